import sys

from qcpg.cli import main

sys.exit(main())

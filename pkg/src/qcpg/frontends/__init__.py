"""Language frontends producing the classical CPG fragment."""

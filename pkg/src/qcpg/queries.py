"""Cypher versions of the detectors and metrics, for use against an exported graph.

The native detectors in :mod:`qcpg.detectors` are the reference behaviour.
Some of these texts depend on exact hop counts and may disagree with them.
"""

SUPERFLUOUS_OPERATION = """\
MATCH p=(:QuantumGate)-->(r:QuantumBitReference)
WHERE NOT EXISTS{(r)-[:DFG*]->(:QuantumBitReference)
<-[:QU_BIT]-(:QuantumMeasure)} RETURN p"""

CONSTANT_CLASSIC_BIT = """\
MATCH p=(:QuantumBit)-[:DFG]->(:QuantumBitReference)
-[:DFG]->(:ClassicBitReference) RETURN p"""

CONSTANT_CONDITION = """\
MATCH p=(a:ClassicIf)-[:CONDITION]->()-[:LHS]->
(r:ClassicBitReference) WHERE NOT EXISTS {
(r)<-[:DFG*3..]-(:QuantumBit)}
AND NOT EXISTS {(r)<-[:DFG*]-(:QuantumBit)
-[:RELEVANT_FOR_GATES]-(:QuantumGate)} RETURN p"""

RESULT_BIT_NOT_USED = """\
MATCH p=(r:ClassicBitReference)<-[:C_BIT]-
(:QuantumMeasure) WHERE NOT EXISTS {(r)-[:DFG]
->(:ArraySubscriptionExpression)} RETURN p"""

CONSTANT_RESULT_BIT = """\
MATCH p=(c:CallExpression)<-[:EOG*]-(:IfStatement)
-[:DFG*]-(:ArraySubscriptionExpression)
<-[:DFG]-(:ClassicBitReference)
<-[:DFG*]-(:QuantumNode)
WHERE c.name = "do_something_complex" RETURN p"""

# the last key is cut off in the published text; completed here
METRICS = """\
MATCH (q:QuantumBit) RETURN COUNT(q) AS value,
  "Width" AS key UNION
MATCH (p:QuantumGate)<-[:RELEVANT_FOR_GATES]->(b:QuantumBit) RETURN COUNT(p) AS value,
  "Depth" AS key ORDER BY value DESC LIMIT 1 UNION
MATCH (p:QuantumGate) RETURN COUNT(p) AS value,
  "NoGates" AS key UNION
MATCH (p:QuantumGateX) RETURN COUNT(p) AS value,
  "NoP-X" AS key UNION
MATCH (p:QuantumGateY) RETURN COUNT(p) AS value,
  "NoP-Y" AS key UNION
MATCH (p:QuantumGateZ) RETURN COUNT(p) AS value,
  "NoP-Z" AS key UNION
MATCH (p:QuantumPauliGate) RETURN COUNT(p) AS value,
  "TNo-P" AS key UNION
MATCH (p:QuantumGateH) RETURN COUNT(p) AS value,
  "NoH" AS key UNION
MATCH (q:QuantumBit)-[:DFG]->(:QuantumBitReference)
  <-[:QUANTUM_BIT_0]-(:QuantumGateH)
  WITH COUNT(q) AS countH
MATCH (b:QuantumBit) WITH COUNT(b) AS total, countH
  RETURN countH*1.0/total AS value, "PercentQubitsH" AS key"""

BY_RULE = {
    "SUPERFLUOUS_OPERATION": SUPERFLUOUS_OPERATION,
    "CONSTANT_CLASSIC_BIT": CONSTANT_CLASSIC_BIT,
    "CONSTANT_CONDITION": CONSTANT_CONDITION,
    "RESULT_BIT_NOT_USED": RESULT_BIT_NOT_USED,
    "CONSTANT_RESULT_BIT": CONSTANT_RESULT_BIT,
}

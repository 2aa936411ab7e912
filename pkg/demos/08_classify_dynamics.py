"""Placing whole dynamics relative to the local-unitary family.

Local rotations stay local at every sample. Depolarizing noise and a partial
SWAP both come back with a verified FTD report. Verdicts hold at sample
resolution only.
"""

from ftdsim import LindbladSemigroup, UnitaryFamily, classify_dynamics
from ftdsim.lindblad import depolarizing_generator
from ftdsim.scenario import UNITARY_MODELS

cases = {
    "local rotations": UnitaryFamily(UNITARY_MODELS["local-rotations"], (2, 2), 3.0),
    "depolarizing": LindbladSemigroup(depolarizing_generator(1.0), 3.0),
    "partial SWAP": UnitaryFamily(UNITARY_MODELS["partial-swap"], (2, 2), 1.5),
}
for name, dyn in cases.items():
    res = classify_dynamics(dyn, samples=64)
    extra = ""
    if res.report is not None:
        iv = res.report.intervals[0]
        extra = f"  via {res.report.method.value}, first interval ({iv.a:.4f}, {iv.b:.4f})"
    print(f"{name:16s} {res.verdict.value}{extra}")

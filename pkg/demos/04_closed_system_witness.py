"""A closed system with FTD: a pulse that reaches CNOT.

CNOT sends Phi+ to the product |+0>. Mixing Phi+ with just enough white
noise keeps it entangled, while its image at the CNOT instant lands strictly
inside the separable set, so nearby times are disentangled too.
"""

import numpy as np

from ftdsim import UnitaryFamily, classify_separability, closed_system_witness, min_pt_eigenvalue
from ftdsim.scenario import UNITARY_MODELS

dyn = UnitaryFamily(UNITARY_MODELS["cnot-pulse"], (2, 2), horizon=2.0)
report = closed_system_witness(dyn, t_bar=1.0, samples=201)

print("psi_E =", np.round(report.details["psi_E"], 4))
print("psi_P =", np.round(report.details["psi_P"], 4))
print(f"noise weight lambda = {report.details['lambda']:.6f}")
print(f"witness lambda_minus = {min_pt_eigenvalue(report.witness_state):+.6f}")
(image,) = dyn.evolve(report.witness_state, [1.0])
print(f"image at t=1: {classify_separability(image).classification.value}, "
      f"smallest eigenvalue {np.linalg.eigvalsh(image.matrix)[0]:.6f}")
for iv in report.intervals:
    print(f"disentangled on ({iv.a:.6f}, {iv.b:.6f})")

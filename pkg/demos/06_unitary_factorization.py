"""Which unitaries keep product states product?

Only local ones and local ones followed by SWAP. We build one of each, plus
CNOT and a Haar-random gate, and let the classifier recover the factors.
"""

import numpy as np

from ftdsim import CNOT, classify_product_preserving_unitary, swap_operator
from ftdsim.states import haar_unitary
from ftdsim.tensor_algebra import phase_distance

rng = np.random.default_rng(1)
ua, ub = haar_unitary(3, rng), haar_unitary(3, rng)
cases = {
    "u_A (x) u_B": np.kron(ua, ub),
    "(u_A (x) u_B) S": np.kron(ua, ub) @ swap_operator((3, 3)),
    "Haar 9x9": haar_unitary(9, rng),
}
for name, u in cases.items():
    cls = classify_product_preserving_unitary(u, (3, 3))
    line = f"{name:18s} -> {cls.tag.value}"
    if cls.factors is not None:
        line += f"   reconstruction residual {phase_distance(cls.reconstruct((3, 3)), u):.2e}"
    print(line)

print(f"{'CNOT':18s} -> {classify_product_preserving_unitary(CNOT, (2, 2)).tag.value}")

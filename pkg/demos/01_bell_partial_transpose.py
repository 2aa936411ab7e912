"""How entangled is a Bell pair, and how much noise does it take to hide that?

We look at the smallest eigenvalue of the partial transpose (lambda_minus)
for Phi+, then slide along the Werner line p*Phi+ + (1-p)*I/4 to find where
it crosses zero.
"""

import numpy as np

from ftdsim import bell_state, entanglement_mixing_threshold, min_pt_eigenvalue, negativity, werner_state

phi = bell_state("phi+").density()
print(f"Phi+   lambda_minus = {min_pt_eigenvalue(phi):+.12f}   negativity = {negativity(phi):.3f}")

print("\nWerner line:")
for p in np.linspace(0, 1, 7):
    rho = werner_state(p)
    lam = min_pt_eigenvalue(rho)
    print(f"  p = {p:.3f}  lambda_minus = {lam:+.5f}  {'entangled' if lam < -1e-9 else 'PPT'}")

lam_star = entanglement_mixing_threshold(phi)
print(f"\nnoise weight needed to reach PPT: {lam_star:.12f}  (Bell weight p = {1 - lam_star:.12f})")

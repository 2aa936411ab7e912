"""Entanglement sudden death under independent amplitude damping.

sqrt(.1)|00> + sqrt(.9)|11> loses its entanglement at a finite time, while
Phi+ only decays asymptotically. The concurrence formula puts the death time
at -ln(1 - sqrt(.1/.9)) = ln 1.5.
"""

import math

import numpy as np

from ftdsim import LindbladSemigroup, PureState, bell_state, detect_ftd, min_pt_eigenvalue
from ftdsim.lindblad import amplitude_damping_generator

dyn = LindbladSemigroup(amplitude_damping_generator(1.0), horizon=3.0)

skewed = PureState([math.sqrt(0.1), 0, 0, math.sqrt(0.9)], (2, 2)).density()
report = detect_ftd(dyn, skewed, samples=301)
print(f"skewed state dies at t = {report.onset:.6f}   (ln 1.5 = {math.log(1.5):.6f})")

report = detect_ftd(dyn, bell_state("phi+").density(), samples=301)
print(f"Phi+: {'no finite death time on [0, 3]' if report is None else report.intervals}")

traj = dyn.evolve(bell_state("phi+").density(), np.linspace(0, 3, 4))
print("Phi+ lambda_minus at t = 0, 1, 2, 3:", [f"{min_pt_eigenvalue(s):+.4f}" for s in traj])

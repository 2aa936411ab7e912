"""An open system with FTD built from a unital noise channel.

Complete one-sided dephasing sends Phi+ to a mixed state with delta = 0.
Any Werner weight p between 1/3 and 1/(1 - 4 delta) gives a state that is
entangled now and separable after the channel; the midpoint is taken.
"""

from ftdsim import ChannelFamily, min_pt_eigenvalue, unital_qubit_witness
from ftdsim.channels import one_sided_dephasing

dyn = ChannelFamily(lambda t: one_sided_dephasing(0.5 * t), (2, 2), horizon=1.0)
report = unital_qubit_witness(dyn, t_bar=1.0, samples=201)

d = report.details
print(f"delta = {d['delta']:+.3e}   window = ({d['window'][0]:.6f}, {d['window'][1]:.6f})   p = {d['p']:.6f}")
print(f"lambda_minus before = {d['lambda_minus_initial']:+.6f}, after = {d['lambda_minus_image']:+.6f}")
(image,) = dyn.evolve(report.witness_state, [1.0])
print(f"checked on the states: {min_pt_eigenvalue(report.witness_state):+.6f} -> {min_pt_eigenvalue(image):+.6f}")
print("intervals:", [(round(iv.a, 6), round(iv.b, 6), iv.open_ended) for iv in report.intervals])

"""Recovering the unitary behind a unital, pure-state-preserving channel.

The channel is handed over as a redundant Kraus set, so the unitary is not
sitting in plain sight. Dephasing and a constant channel are refused.
"""

import numpy as np

from ftdsim import Channel, reconstruct_unitary_from_channel
from ftdsim.channels import ChannelError, constant_channel, one_sided_dephasing
from ftdsim.states import haar_unitary
from ftdsim.tensor_algebra import phase_distance

rng = np.random.default_rng(3)
for d in (2, 3, 4, 6):
    u = haar_unitary(d, rng)
    ch = Channel((np.sqrt(0.3) * u, np.sqrt(0.7) * 1j * u))
    v = reconstruct_unitary_from_channel(ch)
    print(f"d = {d}: recovered up to phase, residual {phase_distance(v, u):.2e}")

for name, ch in [("dephasing q=1/2", one_sided_dephasing(0.5)), ("constant |00>", constant_channel([1, 0, 0, 0]))]:
    try:
        reconstruct_unitary_from_channel(ch)
    except ChannelError as exc:
        print(f"{name}: {type(exc).__name__}: {exc}")

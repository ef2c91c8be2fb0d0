"""
Exact correspondence for the cat map
====================================

For K = 1 and L = 1 the Sawtooth map is the linear cat map.  It maps the
2N x 2N lattice of the discrete Wigner function onto itself, and the
quantum step transports the Wigner function along the classical flow
exactly.  The quantum-classical fidelity therefore never decays.  A
slightly different K breaks this and the fidelity falls off.
"""

import numpy as np

from qcftorus import GaussianDensity, QuantumMap, coherent_state, qcf_discrete

N = 512
q0, p0 = 0.31, 0.62

# %%
# The cat map: G(t) stays at one to rounding error.
cat = QuantumMap.sawtooth(1, N, 1)
state = coherent_state(q0, p0, cat.hilbert)
rho = GaussianDensity.create(q0, p0, N, 1, resolution=2 * N)
series = qcf_discrete(state, rho, cat, 15)
print("cat map   max |G - 1| =", np.abs(series.G - 1).max())

# %%
# A nearby Sawtooth map, K = 0.9, is still chaotic but no longer maps the
# lattice onto itself.
saw = QuantumMap.sawtooth(0.9, N, 1)
series = qcf_discrete(coherent_state(q0, p0, saw.hilbert), rho, saw, 15)
for t, g in zip(series.times, series.G):
    print(f"t={t:2d}  G={g:.4f}")

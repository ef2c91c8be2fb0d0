"""
Wigner function, density and echoed Wigner function
===================================================

Side-by-side snapshots for the Sawtooth map.  The classical density is
stretched along the unstable direction and folded by the torus; the Wigner
function follows it at first and then develops interference fringes.  The
echoed Wigner function, pulled back along the classical flow, shows where
quantum and classical evolution part ways.

Grids are written as plain text for an external plotting tool.
"""

from pathlib import Path

import numpy as np

from qcftorus import GaussianDensity, QuantumMap, coherent_state, density_grid, propagate
from qcftorus.fidelity import echoed_wigner_sampled
from qcftorus.io import write_grid
from qcftorus.wigner import wigner_continuous

K, L, N = 0.5, 2, 101
out = Path("snapshots")
out.mkdir(exist_ok=True)
spec = QuantumMap.sawtooth(K, N, L)
q0, p0 = 0.5, 1.0
state = coherent_state(q0, p0, spec.hilbert)
rho = GaussianDensity.create(q0, p0, N, L)

for t in (1, 2, 3, 7):
    w = wigner_continuous(propagate(state, spec, t)).values
    d = density_grid(rho, spec.classical, t, 3 * N)
    e = echoed_wigner_sampled(state, spec, t, 3 * N)
    write_grid(out / f"wigner_t{t}.txt", w, "continuous", N, L, t)
    write_grid(out / f"density_t{t}.txt", d, "continuous", N, L, t)
    write_grid(out / f"echoed_t{t}.txt", e, "continuous", N, L, t)
    print(f"t={t}: min W = {w.min():+.2e}, negative share {np.mean(w < 0):.2f}, "
          f"density peak {d.max():.1f}")

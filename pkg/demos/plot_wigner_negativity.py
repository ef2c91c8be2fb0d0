"""
Negative values of the Wigner function
======================================

A coherent state has a nearly positive Wigner function.  Under chaotic
evolution the fraction of negative lattice values grows towards the value
expected for a random state, slightly below one half.
"""

from qcftorus import QuantumMap, qcf_ensemble, random_wave_plateau

N = 256
spec = QuantumMap.sawtooth(0.9, N, 1)
series = qcf_ensemble(spec, "discrete", n_states=8, seed=1, t_max=14)
plateau = random_wave_plateau("discrete", N)

# %%
# The rise of P_- tracks the fall of G.
for t, g, p in zip(series.times, series.G, series.P_minus):
    bar = "#" * int(60 * p)
    print(f"t={t:2d}  G={g:.3f}  P-={p:.4f}  {bar}")
print(f"random-state plateau {plateau:.4f}")

"""
Exponential decay of the fidelity
=================================

Averaged over random initial packets the relative fidelity of the Sawtooth
map stays near one up to a time T1 and then decays at the rate of the
classical Lyapunov exponent until it reaches the 1/N plateau at T2.
"""

import math

import numpy as np

from qcftorus import QuantumMap, fit_decay, lyapunov_sawtooth_exact, qcf_ensemble

K, L, N = 0.5, 2, 201
lam = lyapunov_sawtooth_exact(K)
print(f"lambda_max = {lam:.4f}  (log 2 = {math.log(2):.4f})")

# %%
# Ten packets, continuous formalism.
spec = QuantumMap.sawtooth(K, N, L)
series = qcf_ensemble(spec, "continuous", n_states=10, seed=7, t_max=25)
for t, g, se in zip(series.times, series.G, series.stderr_G):
    print(f"t={t:2d}  <G>={g:.3e} +- {se:.1e}")

# %%
# Fit the decaying stretch.  The constrained fit fixes the slope at
# lambda_max, which defines T1 and T2.
fit = fit_decay(series, lambda_max=lam, N=N)
print(f"fitted slope {fit.slope:.3f} on t in {fit.window}")
c = fit.constrained
print(f"T1 = {c.T1:.2f}, T2 = {c.T2:.2f}, lambda (T2 - T1) = {lam * (c.T2 - c.T1):.4f}"
      f" = log N = {math.log(N):.4f}")
print(f"plateau <G> = {np.mean(series.G[18:]):.2e}   1/N = {1 / N:.2e}")

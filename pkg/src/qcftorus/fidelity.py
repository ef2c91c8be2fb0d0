"""
Quantum-classical fidelity (QCF) of evolving Wigner functions and Liouville
densities, its ensemble average, Loschmidt echoes and decay-time fits.

For a coherent initial state the QCF is

    F(t) = integral of W^t(x) rho^t(x) dx,   G(t) = F(t) / F(0),

evaluated either on a quadrature grid against the piecewise-constant
Agam-Brenner extension (``continuous``) or as a 2N x 2N lattice sum with the
Miquel Wigner function (``discrete``).  The classical density is always
evaluated exactly through inverse iteration of the lattice or quadrature
nodes; the preimages are shared by all members of an ensemble.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .density import GaussianDensity, NodeIndex, grid_nodes
from .kinematics import QuantumState, coherent_state
from .quantum_maps import QuantumMap
from .torus_dynamics import ClassicalMap
from .wigner import (Formalism, WignerGrid, _ab_values, _real, miquel_block,
                     miquel_negativity, negativity_fraction)

WORKERS_ENV = "QCFTORUS_WORKERS"


class FitUnavailable(ValueError):
    """Too few points inside the decay-fit window."""


@dataclass
class FidelitySeries:
    times: np.ndarray
    F: np.ndarray
    G: np.ndarray
    P_minus: np.ndarray
    formalism: Formalism
    ensemble_size: int = 1
    stderr_G: np.ndarray | None = None

    def __post_init__(self):
        self.formalism = Formalism(self.formalism)
        if self.stderr_G is None:
            self.stderr_G = np.zeros_like(self.G)

    def __len__(self):
        return len(self.times)


@dataclass
class DecayFit:
    """Straight-line fit log G = intercept - slope * t inside a window.

    T1 and T2 are where the fitted line meets G = 1 and G = 1/N.
    """

    slope: float
    intercept: float
    T1: float
    T2: float
    window: tuple[int, int]
    residual: float
    N: int
    constrained: "DecayFit | None" = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = {
            "slope": self.slope,
            "intercept": self.intercept,
            "T1": self.T1,
            "T2": self.T2,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "residual": self.residual,
        }
        if self.constrained is not None:
            out["constrained"] = self.constrained.as_dict()
        return out


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    """map() with optional thread parallelism; output order is input order."""
    n = _workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- evaluation layouts ---------------------------------------------------

class _ContinuousLayout:
    """Quadrature nodes (i / res, j L / res) against the AB extension."""

    formalism = Formalism.CONTINUOUS

    def __init__(self, N, L, resolution):
        if N % 2 == 0:
            raise ValueError(f"continuous formalism needs odd N, got {N}")
        self.N, self.L, self.res = N, L, int(resolution)
        self.nodes = grid_nodes(self.res, L)
        i = np.arange(self.res)
        self.n_of_i = np.rint(i * N / self.res).astype(np.int64) % N
        self.weight = L / (self.res * self.res)

    def wigner(self, psi):
        return _real(_ab_values(psi))

    def lookup(self, w, idx):
        return w[self.n_of_i[idx // self.res], self.n_of_i[idx % self.res]]

    def overlap(self, w, idx, vals):
        return self.weight * float(np.dot(self.lookup(w, idx), vals))

    def negativity(self, w):
        return negativity_fraction(w)


class _DiscreteLayout:
    """2N x 2N lattice (n / 2N, m L / 2N) with the Miquel Wigner function."""

    formalism = Formalism.DISCRETE

    def __init__(self, N, L):
        self.N, self.L = N, L
        self.res = 2 * N
        self.nodes = grid_nodes(self.res, L)
        self.weight = 1.0

    def wigner(self, psi):
        return miquel_block(psi)

    def lookup(self, block, idx):
        N = self.N
        i, j = np.divmod(idx, 2 * N)
        sq, n = np.divmod(i, N)
        sp, m = np.divmod(j, N)
        expo = sq * m + sp * n + sq * sp * N
        return block[n, m] * (1 - 2 * (expo % 2))

    def overlap(self, block, idx, vals):
        return float(np.dot(self.lookup(block, idx), vals))

    def negativity(self, block):
        return miquel_negativity(block)


def _layout(formalism, N, L, resolution=None):
    if Formalism(formalism) is Formalism.CONTINUOUS:
        return _ContinuousLayout(N, L, 3 * N if resolution is None else resolution)
    return _DiscreteLayout(N, L)


# -- series ---------------------------------------------------------------

def _series(layout, states: Sequence[QuantumState],
            densities: Sequence[GaussianDensity], spec: QuantumMap,
            t_max: int) -> list[FidelitySeries]:
    if len(states) != len(densities):
        raise ValueError("need one density per state")
    for s in states:
        if s.spec != spec.hilbert:
            raise ValueError(f"state lives in {s.spec}, map in {spec.hilbert}")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    cmap = spec.classical
    n = len(states)
    F = np.zeros((n, t_max + 1))
    P = np.zeros((n, t_max + 1))
    psis = [s.amplitudes for s in states]
    q, p = layout.nodes
    for t in range(t_max + 1):
        if t:
            q, p = cmap.inverse(q, p)
            psis = [spec.step_amplitudes(psi) for psi in psis]
        index = NodeIndex(q) if n >= 4 else None

        def member(k, q=q, p=p, index=index):
            w = layout.wigner(psis[k])
            idx, vals = densities[k].support(q, p, index)
            return layout.overlap(w, idx, vals), layout.negativity(w)

        for k, (f, neg) in enumerate(_ordered_map(member, list(range(n)))):
            F[k, t], P[k, t] = f, neg
    times = np.arange(t_max + 1)
    return [FidelitySeries(times, F[k], F[k] / F[k, 0], P[k], layout.formalism)
            for k in range(n)]


def qcf_continuous(state: QuantumState, d: GaussianDensity, spec: QuantumMap,
                   t_max: int, resolution: int | None = None) -> FidelitySeries:
    """Continuous-formalism QCF on a resolution x resolution grid
    (default 3N, which puts 3 x 3 nodes in every Wigner cell)."""
    res = 3 * spec.N if resolution is None else resolution
    return _series(_layout(Formalism.CONTINUOUS, spec.N, spec.L, res),
                   [state], [d], spec, t_max)[0]


def qcf_discrete(state: QuantumState, d: GaussianDensity, spec: QuantumMap,
                 t_max: int) -> FidelitySeries:
    """Discrete-formalism QCF, a 2N x 2N lattice sum."""
    return _series(_layout(Formalism.DISCRETE, spec.N, spec.L),
                   [state], [d], spec, t_max)[0]


def qcf_continuous_echo(state: QuantumState, d: GaussianDensity,
                        spec: QuantumMap, t_max: int,
                        resolution: int | None = None) -> np.ndarray:
    """F(t) in the echo form: integral of W~^t(phi^t(x)) rho^0(x) dx."""
    layout = _layout(Formalism.CONTINUOUS, spec.N, spec.L, resolution)
    q, p = layout.nodes
    rho0 = d(q, p)
    idx = np.flatnonzero(rho0)
    qs, ps, vals = q[idx], p[idx], rho0[idx]
    psi = state.amplitudes
    out = np.zeros(t_max + 1)
    for t in range(t_max + 1):
        if t:
            psi = spec.step_amplitudes(psi)
            qs, ps = spec.classical.forward(qs, ps)
        w = layout.wigner(psi)
        n = np.rint(qs * spec.N).astype(np.int64) % spec.N
        m = np.rint(ps * (spec.N / spec.L)).astype(np.int64) % spec.N
        out[t] = layout.weight * float(np.dot(w[n, m], vals))
    return out


# -- ensembles ------------------------------------------------------------

def draw_centers(n_states: int, seed: int, L: int = 1) -> np.ndarray:
    """Uniform packet centres, one PRNG substream per member; shape (n, 2)."""
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(n_states)
    c = np.array([np.random.default_rng(s).random(2) for s in streams])
    c[:, 1] *= L
    return c


def average_series(members: Sequence[FidelitySeries]) -> FidelitySeries:
    """Pointwise mean of F, G and P_minus; stderr_G from the member spread."""
    F = np.array([s.F for s in members])
    G = np.array([s.G for s in members])
    P = np.array([s.P_minus for s in members])
    n = len(members)
    stderr = G.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(G.shape[1])
    return FidelitySeries(members[0].times.copy(), F.mean(axis=0), G.mean(axis=0),
                          P.mean(axis=0), members[0].formalism, n, stderr)


def ensemble_average(run: Callable[[float, float], FidelitySeries],
                     n_states: int, seed: int, L: int = 1) -> FidelitySeries:
    """Average `run(q0, p0)` over `n_states` random packet centres."""
    centers = draw_centers(n_states, seed, L)
    return average_series([run(q0, p0) for q0, p0 in centers])


def qcf_ensemble(spec: QuantumMap, formalism, n_states: int, seed: int,
                 t_max: int, sigma: float = 1.0, resolution: int | None = None,
                 return_members: bool = False):
    """Ensemble-averaged QCF for coherent states at random centres.

    Equivalent to `ensemble_average` over single-state runs with the same
    seed, but pulls the quadrature nodes back only once per step.
    """
    layout = _layout(formalism, spec.N, spec.L, resolution)
    centers = draw_centers(n_states, seed, spec.L)
    states = [coherent_state(q0, p0, spec.hilbert, sigma) for q0, p0 in centers]
    dens = [GaussianDensity.create(q0, p0, spec.N, spec.L, sigma, layout.res)
            for q0, p0 in centers]
    members = _series(layout, states, dens, spec, t_max)
    avg = average_series(members)
    return (avg, members) if return_members else avg


# -- echoed Wigner function ----------------------------------------------

def echoed_wigner_sampled(state: QuantumState, spec: QuantumMap, t: int,
                          resolution: int) -> np.ndarray:
    """W~^t(phi^t(x)) on the nodes (i / res, j L / res); shape (res, res)."""
    if spec.N % 2 == 0:
        raise ValueError("echoed Wigner function uses the continuous formalism (odd N)")
    q, p = grid_nodes(resolution, spec.L)
    q, p = spec.classical.iterate(q, p, t)
    psi = state.amplitudes
    for _ in range(t):
        psi = spec.step_amplitudes(psi)
    w = _real(_ab_values(psi))
    n = np.rint(q * spec.N).astype(np.int64) % spec.N
    m = np.rint(p * (spec.N / spec.L)).astype(np.int64) % spec.N
    return w[n, m].reshape(resolution, resolution)


def echoed_wigner(state: QuantumState, spec: QuantumMap, t: int) -> WignerGrid:
    """Classically echoed Wigner function on the N x N lattice."""
    vals = echoed_wigner_sampled(state, spec, t, spec.N)
    return WignerGrid(Formalism.CONTINUOUS, vals, spec.hilbert)


# -- Loschmidt echoes -----------------------------------------------------

@dataclass
class EchoReport:
    times: np.ndarray
    F_CLE: np.ndarray
    F_QLE: np.ndarray
    F_QCF_0: np.ndarray
    F_QCF_eps: np.ndarray
    inequality_lhs: np.ndarray
    inequality_rhs: np.ndarray
    raw: dict

    @property
    def residual(self) -> np.ndarray:
        return self.inequality_rhs - self.inequality_lhs


def _gap(x):
    return np.sqrt(np.maximum(1.0 - x, 0.0))


def loschmidt_echoes(state: QuantumState, d: GaussianDensity, spec: QuantumMap,
                     perturbed_spec: QuantumMap, t_max: int,
                     resolution: int | None = None) -> EchoReport:
    """Classical and quantum Loschmidt echoes alongside both QCFs.

    All overlaps use the continuous-formalism quadrature.  The reported
    F_* are overlaps of the four phase-space functions rescaled to unit L2
    norm, which is what enters the triangle-inequality bound
    |sqrt(1 - F_CLE) - sqrt(1 - F_QLE)| <= sqrt(1 - F_QCF_0) + sqrt(1 - F_QCF_eps);
    unscaled overlaps and norms are kept in ``raw``.
    """
    if spec.hilbert != perturbed_spec.hilbert:
        raise ValueError("unperturbed and perturbed maps must share a Hilbert space")
    layout = _layout(Formalism.CONTINUOUS, spec.N, spec.L, resolution)
    wt = layout.weight
    q0, p0 = layout.nodes
    qa, pa = q0, p0
    qb, pb = q0, p0
    psi_a = psi_b = state.amplitudes
    keys = ("CLE", "QLE", "QCF_0", "QCF_eps", "rho0", "rhoe", "W0", "We")
    raw = {k: np.zeros(t_max + 1) for k in keys}

    def wnodes(psi):
        w = _real(_ab_values(psi))
        return w[np.ix_(layout.n_of_i, layout.n_of_i)].ravel()

    for t in range(t_max + 1):
        if t:
            qa, pa = spec.classical.inverse(qa, pa)
            qb, pb = perturbed_spec.classical.inverse(qb, pb)
            psi_a = spec.step_amplitudes(psi_a)
            psi_b = perturbed_spec.step_amplitudes(psi_b)
        ra, rb = d(qa, pa), d(qb, pb)
        wa, wb = wnodes(psi_a), wnodes(psi_b)
        raw["CLE"][t] = wt * np.dot(ra, rb)
        raw["QLE"][t] = wt * np.dot(wa, wb)
        raw["QCF_0"][t] = wt * np.dot(ra, wa)
        raw["QCF_eps"][t] = wt * np.dot(rb, wb)
        raw["rho0"][t] = math.sqrt(wt * np.dot(ra, ra))
        raw["rhoe"][t] = math.sqrt(wt * np.dot(rb, rb))
        raw["W0"][t] = math.sqrt(wt * np.dot(wa, wa))
        raw["We"][t] = math.sqrt(wt * np.dot(wb, wb))
    cle = raw["CLE"] / (raw["rho0"] * raw["rhoe"])
    qle = raw["QLE"] / (raw["W0"] * raw["We"])
    f0 = raw["QCF_0"] / (raw["rho0"] * raw["W0"])
    fe = raw["QCF_eps"] / (raw["rhoe"] * raw["We"])
    lhs = np.abs(_gap(cle) - _gap(qle))
    rhs = _gap(f0) + _gap(fe)
    return EchoReport(np.arange(t_max + 1), cle, qle, f0, fe, lhs, rhs, raw)


# -- decay fits -----------------------------------------------------------

def _window(series: FidelitySeries, N: int, lo: float, hi: float):
    G = np.asarray(series.G)
    t = np.asarray(series.times)
    pick = []
    for k in range(1, len(G)):
        if G[k] < lo:
            break
        if G[k] <= hi:
            pick.append(k)
    return t[pick], G[pick]


def fit_decay(series: FidelitySeries, lambda_max: float | None = None,
              N: int | None = None, lo: float | None = None,
              hi: float = 0.5) -> DecayFit:
    """Fit log <G(t)> = c - s t on the decaying stretch lo <= G <= hi.

    Points are taken from t >= 1 up to the first step at which G drops
    below `lo` (default 5/N), so plateau fluctuations never enter the
    window.  With `lambda_max` the slope is also fixed to that value and the
    resulting fit is attached as ``.constrained``.
    """
    if N is None:
        raise ValueError("N is required")
    lo = 5.0 / N if lo is None else lo
    t, G = _window(series, N, lo, hi)
    if len(t) < 3:
        raise FitUnavailable(
            f"only {len(t)} points with {lo:.3g} <= G <= {hi:.3g}; need 3")
    y = np.log(G)
    A = np.column_stack([np.ones_like(t, dtype=float), -t.astype(float)])
    (c, s), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - (c - s * t)) ** 2)))
    logN = math.log(N)
    window = (int(t[0]), int(t[-1]))
    fit = DecayFit(float(s), float(c), float(c / s), float((c + logN) / s),
                   window, resid, N)
    if lambda_max is not None:
        cc = float(np.mean(y + lambda_max * t))
        rc = float(np.sqrt(np.mean((y - (cc - lambda_max * t)) ** 2)))
        fit.constrained = DecayFit(float(lambda_max), cc, float(cc / lambda_max),
                                   float((cc + logN) / lambda_max), window, rc, N)
    return fit


def fit_log_scaling(Ns: Sequence[int], lam_T1: Sequence[float]):
    """Least-squares line lambda T1 = A log N + B; returns (A, B)."""
    x = np.log(np.asarray(Ns, dtype=float))
    A, B = np.polyfit(x, np.asarray(lam_T1, dtype=float), 1)
    return float(A), float(B)

"""
Classical area-preserving maps on the torus [0, 1) x [0, L).

Two maps are provided, both written as a momentum kick followed by a free
drift:

* the Sawtooth map      p' = p + K q,                      q' = q + p'
* the perturbed cat map p' = q + p - (mu / 2 pi) sin(2 pi q), q' = q + p'

with p reduced mod L and q mod 1.  All functions accept scalars or numpy
arrays for the coordinates, so whole lattices can be pushed through a map in
one call.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * np.pi


class MapKind(str, enum.Enum):
    SAWTOOTH = "sawtooth"
    PERTURBED_CAT = "pcat"


class TorusPoint(NamedTuple):
    """A phase-space point (or an array of points) on [0, 1) x [0, L)."""

    q: float | np.ndarray
    p: float | np.ndarray


def wrap(x, period):
    """Reduce `x` into [0, period), mapping a rounded-up `period` to 0."""
    r = np.mod(x, period)
    if np.ndim(r) == 0:
        return 0.0 if r >= period else float(r)
    r[r >= period] = 0.0
    return r


def torus_distance(a, b, period):
    """Shortest distance between `a` and `b` on a circle of length `period`."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b), period))
    return np.minimum(d, period - d)


@dataclass(frozen=True)
class ClassicalMap:
    """Parameters of a classical torus map.

    Parameters
    ----------
    kind : MapKind
        Which map family.
    K : float
        Sawtooth kick strength (ignored for the perturbed cat map).
    mu : float
        Perturbed-cat nonlinearity.  The Anosov range of `mu` is not checked.
    L : int
        Momentum period of the torus.
    """

    kind: MapKind = MapKind.SAWTOOTH
    K: float = 1.0
    mu: float = 0.0
    L: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", MapKind(self.kind))
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))

    @classmethod
    def sawtooth(cls, K: float, L: int = 1) -> "ClassicalMap":
        return cls(MapKind.SAWTOOTH, K=float(K), mu=0.0, L=L)

    @classmethod
    def perturbed_cat(cls, mu: float, L: int = 1) -> "ClassicalMap":
        return cls(MapKind.PERTURBED_CAT, K=1.0, mu=float(mu), L=L)

    def kick(self, q):
        """Momentum increment p' - p as a function of position."""
        if self.kind is MapKind.SAWTOOTH:
            return self.K * q
        return q - (self.mu / TWO_PI) * np.sin(TWO_PI * q)

    def kick_derivative(self, q):
        if self.kind is MapKind.SAWTOOTH:
            return self.K + 0.0 * np.asarray(q, dtype=float)
        return 1.0 - self.mu * np.cos(TWO_PI * np.asarray(q, dtype=float))

    def forward(self, q, p):
        p1 = wrap(p + self.kick(q), self.L)
        q1 = wrap(q + p1, 1.0)
        return q1, p1

    def inverse(self, q1, p1):
        q = wrap(q1 - p1, 1.0)
        p = wrap(p1 - self.kick(q), self.L)
        return q, p

    def iterate(self, q, p, steps: int, inverse: bool = False):
        step = self.inverse if inverse else self.forward
        for _ in range(steps):
            q, p = step(q, p)
        return q, p


def map_forward(x: TorusPoint, spec: ClassicalMap) -> TorusPoint:
    return TorusPoint(*spec.forward(x.q, x.p))


def map_inverse(x: TorusPoint, spec: ClassicalMap) -> TorusPoint:
    return TorusPoint(*spec.inverse(x.q, x.p))


def tangent_matrix(x: TorusPoint, spec: ClassicalMap) -> np.ndarray:
    """Jacobian d(q', p') / d(q, p) at `x`; shape (2, 2) or (..., 2, 2)."""
    c = np.asarray(spec.kick_derivative(x.q), dtype=float)
    m = np.empty(c.shape + (2, 2))
    m[..., 0, 0] = 1.0 + c
    m[..., 0, 1] = 1.0
    m[..., 1, 0] = c
    m[..., 1, 1] = 1.0
    return m


def lyapunov_sawtooth_exact(K: float) -> float:
    """Maximal Lyapunov exponent of the Sawtooth map for K > 0."""
    if not K > 0:
        raise ValueError(f"closed form requires K > 0, got {K!r}")
    return math.log(0.5 * (K + 2.0 + math.sqrt(K * (K + 4.0))))


def lyapunov_numerical(spec: ClassicalMap, n_traj: int = 100,
                       traj_len: int = 10**5, seed: int = 0,
                       transient: int = 100):
    """Ensemble estimate of the maximal Lyapunov exponent.

    Each trajectory starts at a uniformly random point with a random unit
    tangent vector drawn from its own PRNG substream, so the result does not
    depend on how trajectories are batched.  The tangent vector is
    renormalized every step; the log growth factors of the first
    `transient` steps are discarded so that the vector has aligned with the
    unstable direction before accumulation starts.

    Returns
    -------
    mean, stderr : float
        Ensemble mean of the per-trajectory exponents and its standard
        error (0 for a single trajectory).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if traj_len < 1000:
        raise ValueError("traj_len must be >= 1000")
    streams = np.random.SeedSequence(seed).spawn(n_traj)
    init = np.array([np.random.default_rng(s).random(3) for s in streams])
    q = init[:, 0].copy()
    p = init[:, 1] * spec.L
    angle = init[:, 2] * TWO_PI
    vq, vp = np.cos(angle), np.sin(angle)

    def step(q, p, vq, vp):
        c = spec.kick_derivative(q)
        vp = c * vq + vp
        vq = vq + vp
        norm = np.hypot(vq, vp)
        q, p = spec.forward(q, p)
        return q, p, vq / norm, vp / norm, norm

    for _ in range(transient):
        q, p, vq, vp, _ = step(q, p, vq, vp)

    # block sums keep the accumulated rounding well below the statistical error
    block = 1000
    total = np.zeros(n_traj)
    logs = np.empty((block, n_traj))
    done = 0
    while done < traj_len:
        n = min(block, traj_len - done)
        for i in range(n):
            q, p, vq, vp, norm = step(q, p, vq, vp)
            logs[i] = norm
        total += np.log(logs[:n]).sum(axis=0)
        done += n
    exponents = total / traj_len
    mean = float(exponents.mean())
    stderr = float(exponents.std(ddof=1) / np.sqrt(n_traj)) if n_traj > 1 else 0.0
    return mean, stderr

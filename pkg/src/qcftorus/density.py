"""
Periodized Gaussian Liouville densities and their exact pullback.

The density matching a coherent state of squeezing sigma centred at
(q0, p0) on [0, 1) x [0, L) with hbar = L / (2 pi N) is

    rho(q, p) = C * sum_nu exp(-2 pi sigma N (q - q0 + nu)^2 / L)
                  * sum_nu exp(-2 pi N (p - p0 + nu L)^2 / (sigma L))

whose analytic normalization is C = 2N / L.  The constant actually used is
fixed by a Riemann sum on a working grid so that the grid quadrature is
exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import GAUSS_CUTOFF, _periodized_gaussian
from .torus_dynamics import ClassicalMap, TorusPoint, wrap


@dataclass(frozen=True)
class GaussianDensity:
    q0: float
    p0: float
    sigma: float
    N: int
    L: int
    norm_const: float

    @classmethod
    def create(cls, q0: float, p0: float, N: int, L: int = 1,
               sigma: float = 1.0, resolution: int | None = None) -> "GaussianDensity":
        """Build a density normalized on a `resolution` x `resolution` grid.

        The default grid has 3N points per axis.
        """
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma!r}")
        res = 3 * N if resolution is None else int(resolution)
        d = cls(float(q0), float(p0), float(sigma), int(N), int(L), 1.0)
        grid = np.arange(res) / res
        sq = d.q_factor(grid).sum() / res
        sp = d.p_factor(grid * L).sum() * L / res
        return cls(d.q0, d.p0, d.sigma, d.N, d.L, float(1.0 / (sq * sp)))

    @property
    def analytic_norm(self) -> float:
        return 2.0 * self.N / self.L

    @property
    def q_width(self) -> float:
        """Exponent coefficient of the position factor."""
        return 2.0 * np.pi * self.sigma * self.N / self.L

    @property
    def p_width(self) -> float:
        return 2.0 * np.pi * self.N / (self.sigma * self.L)

    def q_factor(self, q):
        return _periodized_gaussian(q, self.q0, self.q_width, 1.0)

    def p_factor(self, p):
        return _periodized_gaussian(p, self.p0, self.p_width, float(self.L))

    def __call__(self, q, p):
        return self.norm_const * self.q_factor(q) * self.p_factor(p)

    def support(self, q: np.ndarray, p: np.ndarray, index: "NodeIndex | None" = None):
        """Indices and values of the points of flat arrays (q, p) where the
        density is not truncated to zero.

        A point is dropped only when every periodic image has exponent above
        the cutoff, so ``out[idx] = vals`` reproduces ``self(q, p)``.  An
        optional `index` over `q` restricts the scan to nearby bins.
        """
        rq = np.sqrt(GAUSS_CUTOFF / self.q_width)
        rp = np.sqrt(GAUSS_CUTOFF / self.p_width)
        if rq >= 0.5 or rp >= 0.5 * self.L:
            vals = self(q, p)
            idx = np.flatnonzero(vals)
            return idx, vals[idx]
        if index is None:
            dq = np.abs(wrap(q - self.q0 + 0.5, 1.0) - 0.5)
            idx = np.flatnonzero(dq <= rq)
        else:
            cand = index.window(self.q0, rq)
            dq = np.abs(wrap(q[cand] - self.q0 + 0.5, 1.0) - 0.5)
            idx = cand[dq <= rq]
        pi = p[idx]
        dp = np.abs(wrap(pi - self.p0 + 0.5 * self.L, float(self.L)) - 0.5 * self.L)
        keep = dp <= rp
        idx = idx[keep]
        vals = self.norm_const * self.q_factor(q[idx]) * self.p_factor(pi[keep])
        return idx, vals


class NodeIndex:
    """Bucket sort of node positions q in [0, 1), for window queries."""

    def __init__(self, q: np.ndarray, bins: int = 4096):
        self.bins = bins
        b = np.minimum((q * bins).astype(np.int16), bins - 1)
        self.order = np.argsort(b, kind="stable")
        self.starts = np.searchsorted(b[self.order], np.arange(bins + 1))

    def window(self, center: float, half_width: float) -> np.ndarray:
        """Node indices (a superset) with q within `half_width` of `center`
        on the circle."""
        lo = int(np.floor((center - half_width) * self.bins))
        hi = int(np.floor((center + half_width) * self.bins))
        if hi - lo + 1 >= self.bins:
            return self.order
        parts = []
        b = lo
        while b <= hi:
            k = b % self.bins
            stop = min(hi, b + (self.bins - 1 - k))
            kk = k + (stop - b)
            parts.append(self.order[self.starts[k]:self.starts[kk + 1]])
            b = stop + 1
        return np.concatenate(parts) if len(parts) > 1 else parts[0]


def density_eval(d: GaussianDensity, x: TorusPoint):
    return d(x.q, x.p)


def density_pullback(d: GaussianDensity, spec: ClassicalMap, t: int, x: TorusPoint):
    """rho^t(x) = rho^0(phi^{-t}(x)), by exact inverse iteration."""
    if t < 0:
        raise ValueError("t must be >= 0")
    q, p = spec.iterate(x.q, x.p, t, inverse=True)
    return d(q, p)


def grid_nodes(resolution: int, L: int):
    """Flattened quadrature nodes (i / res, j L / res), row-major in (i, j)."""
    i = np.arange(resolution)
    q = np.repeat(i / resolution, resolution)
    p = np.tile(i * (L / resolution), resolution)
    return q, p


def density_grid(d: GaussianDensity, spec: ClassicalMap, t: int,
                 resolution: int) -> np.ndarray:
    """rho^t sampled on a uniform resolution x resolution grid; [i, j] is
    the node (i / res, j L / res)."""
    q, p = grid_nodes(resolution, spec.L)
    return density_pullback(d, spec, t, TorusPoint(q, p)).reshape(resolution, resolution)


def grid_quadrature(values: np.ndarray, L: int) -> float:
    """Riemann sum of a resolution x resolution grid over [0,1) x [0,L)."""
    res = values.shape[0]
    return float(values.sum() * L / (res * res))

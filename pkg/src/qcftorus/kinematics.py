"""
Finite-dimensional quantum kinematics on the torus [0, 1) x [0, L).

The Hilbert space has dimension N with effective Planck constant
hbar = L / (2 pi N): position eigenstates sit at q_n = n / N and momentum
eigenstates at p_m = m L / N, n, m = 0, ..., N-1.  Periodic Bloch angles
are used throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Gaussian terms whose exponent exceeds this are below double precision
# relative to the peak and are dropped from periodized sums.
GAUSS_CUTOFF = 45.0


class Direction(str, enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class HilbertSpec:
    """Dimension `N` and momentum period `L` of the quantized torus."""

    N: int
    L: int = 1

    def __post_init__(self):
        N, L = self.N, self.L
        if int(N) != N or N < 1:
            raise ValueError(f"N must be a positive integer, got {N!r}")
        if int(L) != L or L < 1:
            raise ValueError(f"L must be a positive integer, got {L!r}")
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "L", int(L))
        if self.N % 2 == 1 and self.L % 2 == 1:
            raise ValueError(
                f"odd N={self.N} requires even L (got L={self.L}): free "
                "propagation is not periodic in momentum otherwise")

    @property
    def hbar(self) -> float:
        return self.L / (2.0 * np.pi * self.N)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Position-basis amplitudes psi_j, j = 0..N-1, of a pure state."""

    amplitudes: np.ndarray
    spec: HilbertSpec

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (self.spec.N,):
            raise ValueError(
                f"expected {self.spec.N} amplitudes, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, amplitudes, spec: HilbertSpec) -> "QuantumState":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a / np.linalg.norm(a), spec)

    @classmethod
    def random(cls, spec: HilbertSpec, rng=None) -> "QuantumState":
        rng = np.random.default_rng(rng)
        a = rng.normal(size=spec.N) + 1j * rng.normal(size=spec.N)
        return cls.normalized(a, spec)

    @classmethod
    def basis(cls, j: int, spec: HilbertSpec) -> "QuantumState":
        a = np.zeros(spec.N, dtype=complex)
        a[j % spec.N] = 1.0
        return cls(a, spec)

    @property
    def N(self) -> int:
        return self.spec.N

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def momentum_amplitudes(self) -> np.ndarray:
        """<p_m|psi> for m = 0..N-1."""
        return np.fft.fft(self.amplitudes, norm="ortho")


def dft(state: QuantumState, direction=Direction.FORWARD) -> QuantumState:
    """Unitary discrete Fourier transform.

    Forward: (F psi)_m = N^{-1/2} sum_n psi_n exp(-2 pi i m n / N); the
    inverse is its adjoint.
    """
    direction = Direction(direction)
    if direction is Direction.FORWARD:
        out = np.fft.fft(state.amplitudes, norm="ortho")
    else:
        out = np.fft.ifft(state.amplitudes, norm="ortho")
    return QuantumState(out, state.spec)


def _periodized_gaussian(x, x0, width, period, phase_k=0.0):
    """sum_nu exp(-width (x - x0 + nu period)^2 + i phase_k (x + nu period)).

    Terms with exponent above GAUSS_CUTOFF are skipped.  `x` is an array of
    points in [0, period).
    """
    x = np.asarray(x, dtype=float)
    reach = np.sqrt(GAUSS_CUTOFF / width) / period
    d = (x - x0) / period
    nu_lo = int(np.floor(-reach - d.max())) if d.size else 0
    nu_hi = int(np.ceil(reach - d.min())) if d.size else 0
    total = np.zeros(x.shape, dtype=complex if phase_k else float)
    for nu in range(nu_lo, nu_hi + 1):
        s = x - x0 + nu * period
        expo = width * s * s
        term = np.where(expo <= GAUSS_CUTOFF, np.exp(-np.minimum(expo, GAUSS_CUTOFF)), 0.0)
        if phase_k:
            term = term * np.exp(1j * phase_k * (x + nu * period))
        total = total + term
    return total


def coherent_state(q0: float, p0: float, spec: HilbertSpec,
                   sigma: float = 1.0) -> QuantumState:
    """Torus coherent state centred at (q0, p0) with squeezing `sigma`.

    Periodization over position images of the planar Gaussian
    exp(-sigma (q - q0)^2 / (2 hbar) + i p0 q / hbar), sampled at q_n and
    normalized numerically.  For L = 1 this is exactly
    exp(i 2 pi n p0) sum_nu exp(-(pi sigma / N)(n - q0 N + nu N)^2)
    * exp(i 2 pi N p0 nu).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    hbar = spec.hbar
    q = np.arange(spec.N) / spec.N
    psi = _periodized_gaussian(q, q0, sigma / (2.0 * hbar), 1.0,
                               phase_k=p0 / hbar)
    psi = np.asarray(psi, dtype=complex)
    return QuantumState.normalized(psi, spec)


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>."""
    if a.spec != b.spec:
        raise ValueError(f"state spaces differ: {a.spec} vs {b.spec}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))

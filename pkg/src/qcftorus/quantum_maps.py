"""
Quantized Sawtooth and perturbed cat maps.

One step is U = exp(-i pi L m^2 / N) exp(i V(n)), a position-diagonal kick
followed by a momentum-diagonal drift, applied with two FFTs:

    Sawtooth:      V(n) = pi K n^2 / (N L)
    perturbed cat: V(n) = pi n^2 / (N L) + (N mu / (2 pi L)) cos(2 pi n / N)

n and m are the literal indices 0..N-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .kinematics import HilbertSpec, QuantumState
from .torus_dynamics import ClassicalMap, MapKind

MAX_MATRIX_N = 512


@dataclass(frozen=True)
class QuantumMap:
    """A classical map together with the Hilbert space it is quantized on."""

    classical: ClassicalMap
    hilbert: HilbertSpec

    def __post_init__(self):
        if self.classical.L != self.hilbert.L:
            raise ValueError(
                f"momentum period mismatch: map L={self.classical.L}, "
                f"Hilbert space L={self.hilbert.L}")
        if (self.hilbert.L * self.hilbert.N) % 2:
            raise ValueError(
                f"L*N = {self.hilbert.L * self.hilbert.N} is odd; the drift "
                "exp(-i pi L m^2 / N) is not N-periodic in m")

    @classmethod
    def sawtooth(cls, K: float, N: int, L: int = 1) -> "QuantumMap":
        return cls(ClassicalMap.sawtooth(K, L), HilbertSpec(N, L))

    @classmethod
    def perturbed_cat(cls, mu: float, N: int, L: int = 1) -> "QuantumMap":
        return cls(ClassicalMap.perturbed_cat(mu, L), HilbertSpec(N, L))

    @property
    def N(self) -> int:
        return self.hilbert.N

    @property
    def L(self) -> int:
        return self.hilbert.L

    @cached_property
    def position_phase(self) -> np.ndarray:
        N, L = self.N, self.L
        n = np.arange(N)
        c = self.classical
        if c.kind is MapKind.SAWTOOTH:
            if float(c.K).is_integer():
                k2 = (int(c.K) * n * n) % (2 * N * L)
                return np.exp(1j * (np.pi * k2 / (N * L)))
            return np.exp(1j * np.pi * c.K * (n * n) / (N * L))
        # pi n^2 / (N L): reduce n^2 mod 2 N L exactly before scaling
        quad = np.pi * ((n * n) % (2 * N * L)) / (N * L)
        return np.exp(1j * (quad + (N * c.mu / (2 * np.pi * L))
                            * np.cos(2 * np.pi * n / N)))

    @cached_property
    def momentum_phase(self) -> np.ndarray:
        N, L = self.N, self.L
        m = np.arange(N)
        # L m^2 mod 2N is exact in integers
        return np.exp(-1j * np.pi * ((L * m * m) % (2 * N)) / N)

    def step_amplitudes(self, psi: np.ndarray) -> np.ndarray:
        """One map step on raw amplitudes; the last axis is position."""
        phi = np.fft.fft(psi * self.position_phase, norm="ortho")
        return np.fft.ifft(phi * self.momentum_phase, norm="ortho")


def propagate(state: QuantumState, spec: QuantumMap, steps: int = 1) -> QuantumState:
    """Apply the one-step propagator `steps` times."""
    if state.spec != spec.hilbert:
        raise ValueError(f"state lives in {state.spec}, map in {spec.hilbert}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    psi = state.amplitudes
    for _ in range(steps):
        psi = spec.step_amplitudes(psi)
    return QuantumState(psi, state.spec)


def propagator_matrix(spec: QuantumMap) -> np.ndarray:
    """Dense N x N one-step propagator, column j = U |q_j>."""
    if spec.N > MAX_MATRIX_N:
        raise ValueError(f"N={spec.N} exceeds dense-matrix limit {MAX_MATRIX_N}")
    return spec.step_amplitudes(np.eye(spec.N, dtype=complex)).T

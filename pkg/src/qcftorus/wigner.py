"""
Wigner functions of pure states on the quantized torus.

Two lattice formalisms are implemented:

``continuous``
    Agam-Brenner N x N Wigner function (odd N only) that extends to a
    piecewise-constant function on the continuous torus.
``discrete``
    Miquel 2N x 2N Wigner function, fixed by N^2 of its values through a
    sign-flip symmetry.

In both the first grid index is position-like: ``values[n, m]`` sits at
q = n / N (resp. n / 2N) and p = m L / N (resp. m L / 2N).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kinematics import HilbertSpec, QuantumState

IMAG_TOL = 1e-10
MAX_ORACLE_N = 64


class Formalism(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True, eq=False)
class WignerGrid:
    formalism: Formalism
    values: np.ndarray
    spec: HilbertSpec

    def __post_init__(self):
        object.__setattr__(self, "formalism", Formalism(self.formalism))
        n = self.spec.N * (2 if self.formalism is Formalism.DISCRETE else 1)
        if self.values.shape != (n, n):
            raise ValueError(f"expected {n}x{n} grid, got {self.values.shape}")

    @property
    def N(self) -> int:
        return self.spec.N


def _real(values: np.ndarray) -> np.ndarray:
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    scale = max(1.0, float(np.max(np.abs(values.real))))
    if residue > IMAG_TOL * scale:
        raise ArithmeticError(f"Wigner sum has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(values.real)


def delta_tilde(k, N: int):
    """Dirichlet kernel (1/N) sin(pi k / 2) / sin(pi k / 2N) at integer k.

    Even k gives exactly 0 unless k = 2 N j, where the removable singularity
    takes its limit (-1)^(j (N - 1)), i.e. 1 for odd N.
    """
    k = np.asarray(k, dtype=np.int64)
    out = np.zeros(k.shape)
    odd = (k % 2) == 1
    ko = k[odd]
    # sin(pi k / 2) = (-1)^((k-1)/2) for odd k
    sign = np.where(((ko - 1) // 2) % 2 == 0, 1.0, -1.0)
    out[odd] = sign / (N * np.sin(np.pi * ko / (2 * N)))
    pole = (k % (2 * N)) == 0
    j = k[pole] // (2 * N)
    out[pole] = np.where((j * (N - 1)) % 2 == 0, 1.0, -1.0)
    return out if out.ndim else float(out)


def _symmetric_range(N: int) -> np.ndarray:
    h = (N - 1) // 2
    return np.arange(-h, h + 1)


@lru_cache(maxsize=8)
def _ab_kernel_fft(N: int) -> np.ndarray:
    """conj(FFT_j) of delta_tilde(2 j + n') for each n' in the symmetric range."""
    shifts = _symmetric_range(N)[:, None]
    j = np.arange(N)[None, :]
    g = delta_tilde(2 * j + shifts, N)
    out = np.conj(np.fft.fft(g, axis=1))
    out.setflags(write=False)
    return out


def _ab_values(psi: np.ndarray) -> np.ndarray:
    N = psi.shape[0]
    shifts = _symmetric_range(N)
    idx = (np.arange(N)[None, :] + shifts[:, None]) % N
    # a[n', l] = <q_{l+n'}|psi><psi|q_l>
    a = psi[idx] * np.conj(psi)[None, :]
    # circular correlation over l against the kernel: c[n', n]
    c = np.fft.ifft(np.fft.fft(a, axis=1) * _ab_kernel_fft(N), axis=1)
    rows = np.empty_like(c)
    rows[shifts % N] = c
    return np.fft.fft(rows, axis=0).T / N


def wigner_continuous(state: QuantumState) -> WignerGrid:
    """Agam-Brenner Wigner function on the N x N lattice (N odd)."""
    N = state.N
    if N % 2 == 0:
        raise ValueError(f"continuous (Agam-Brenner) formalism needs odd N, got {N}")
    w = _real(_ab_values(state.amplitudes))
    return WignerGrid(Formalism.CONTINUOUS, w, state.spec)


def wigner_continuous_bruteforce(state: QuantumState) -> np.ndarray:
    """Direct quadruple loop over (n, m, n', l); for small-N checks."""
    N = state.N
    psi = state.amplitudes
    rng = _symmetric_range(N)
    w = np.zeros((N, N), dtype=complex)
    for n in range(N):
        for m in range(N):
            acc = 0j
            for s in rng:
                for l in rng:
                    acc += (np.exp(-2j * np.pi * s * m / N)
                            * delta_tilde(2 * l - 2 * n + s, N)
                            * psi[(l + s) % N] * np.conj(psi[l % N]))
            w[n, m] = acc / N
    return w


@lru_cache(maxsize=4)
def _miquel_phase(N: int) -> np.ndarray:
    n = np.arange(N)
    nm = np.outer(n, n) % (2 * N)
    out = np.exp(1j * np.pi * nm / N) / (2 * N)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4)
def _difference_index(N: int) -> np.ndarray:
    k = np.arange(N)
    out = (k[:, None] - k[None, :]) % N                    # (n - k) mod N
    out.setflags(write=False)
    return out


def miquel_block(psi: np.ndarray) -> np.ndarray:
    """Miquel Wigner values on the fundamental block 0 <= n, m < N."""
    N = psi.shape[-1]
    b = np.conj(psi)[..., _difference_index(N)] * psi[..., None, :]
    return _real(np.fft.fft(b, axis=-1) * _miquel_phase(N))


def sign_pattern(N: int):
    """Signs s[sq, sp] (N x N) with W(n + sq N, m + sp N) = s * W(n, m)."""
    par = np.arange(N) % 2
    sm = 1 - 2 * par[None, :]                              # (-1)^m
    sn = 1 - 2 * par[:, None]                              # (-1)^n
    ones = np.ones((N, N))
    s11 = sm * sn * (-1 if N % 2 else 1)
    return {(0, 0): ones, (1, 0): ones * sm, (0, 1): ones * sn, (1, 1): s11}


def expand_miquel(block: np.ndarray) -> np.ndarray:
    """Full 2N x 2N grid from the fundamental block."""
    N = block.shape[0]
    full = np.empty((2 * N, 2 * N))
    for (sq, sp), s in sign_pattern(N).items():
        full[sq * N:(sq + 1) * N, sp * N:(sp + 1) * N] = s * block
    return full


def wigner_discrete(state: QuantumState) -> WignerGrid:
    """Miquel Wigner function on the 2N x 2N lattice."""
    block = miquel_block(state.amplitudes)
    return WignerGrid(Formalism.DISCRETE, expand_miquel(block), state.spec)


def wigner(state: QuantumState, formalism) -> WignerGrid:
    if Formalism(formalism) is Formalism.CONTINUOUS:
        return wigner_continuous(state)
    return wigner_discrete(state)


def point_operator(formalism, N: int, n: int, m: int) -> np.ndarray:
    """Explicit kernel operator A_nm as a dense N x N matrix."""
    formalism = Formalism(formalism)
    if N > MAX_ORACLE_N:
        raise ValueError(f"N={N} exceeds oracle limit {MAX_ORACLE_N}")
    A = np.zeros((N, N), dtype=complex)
    if formalism is Formalism.CONTINUOUS:
        if N % 2 == 0:
            raise ValueError("continuous formalism needs odd N")
        rng = _symmetric_range(N)
        for s in rng:
            for l in rng:
                A[l % N, (l + s) % N] += (np.exp(-2j * np.pi * s * m / N)
                                          * delta_tilde(2 * (l - n) + s, N)) / N
    else:
        pre = np.exp(1j * np.pi * n * m / N) / (2 * N)
        for k in range(N):
            A[(n - k) % N, k] += pre * np.exp(-2j * np.pi * k * m / N)
    return A


def point_operator_oracle(state: QuantumState, formalism, n: int, m: int) -> float:
    """W(n, m) = tr(A_nm |psi><psi|) from the explicit kernel operator."""
    A = point_operator(formalism, state.N, n, m)
    psi = state.amplitudes
    val = np.trace(A @ np.outer(psi, np.conj(psi)))
    if abs(val.imag) > IMAG_TOL:
        raise ArithmeticError(f"point-operator trace has imaginary part {val.imag:.3e}")
    return float(val.real)


def reconstruct_density(grid: WignerGrid) -> np.ndarray:
    """Density operator N * sum_nm W(n, m) A_nm (small N only)."""
    N = grid.N
    rho = np.zeros((N, N), dtype=complex)
    size = grid.values.shape[0]
    for n in range(size):
        for m in range(size):
            rho += grid.values[n, m] * point_operator(grid.formalism, N, n, m)
    return N * rho


def negativity_fraction(grid: WignerGrid | np.ndarray) -> float:
    """Fraction of lattice points carrying a strictly negative value."""
    v = grid.values if isinstance(grid, WignerGrid) else np.asarray(grid)
    return float(np.count_nonzero(v < 0) / v.size)


def miquel_negativity(block: np.ndarray) -> float:
    """Negativity fraction of the full 2N grid, computed from its block."""
    N = block.shape[0]
    neg = block < 0
    pos = block > 0
    even = np.arange(N) % 2 == 0
    neg_col, pos_col = neg.sum(axis=0), pos.sum(axis=0)
    neg_row, pos_row = neg.sum(axis=1), pos.sum(axis=1)
    total = neg_col.sum()
    # (-1)^m and (-1)^n flips
    total += neg_col[even].sum() + pos_col[~even].sum()
    total += neg_row[even].sum() + pos_row[~even].sum()
    # (-1)^(m + n + N) flip: checkerboard parity of columns within each row
    neg_ev = neg[even][:, even].sum() + neg[~even][:, ~even].sum()
    pos_ev = pos[even][:, even].sum() + pos[~even][:, ~even].sum()
    if N % 2 == 0:
        total += neg_ev + (pos.sum() - pos_ev)
    else:
        total += pos_ev + (neg.sum() - neg_ev)
    return float(total / (4 * N * N))


def random_wave_ratio(formalism, N: int) -> float:
    if Formalism(formalism) is Formalism.CONTINUOUS:
        return (N - 1) ** -0.5
    return (4 * N - 1) ** -0.5


def random_wave_plateau(formalism, N: int) -> float:
    """Negative-fraction plateau 1/2 - (2 pi)^{-1/2} int_0^r exp(-x^2/2) dx."""
    if N < 2:
        raise ValueError("N must be >= 2")
    r = random_wave_ratio(formalism, N)
    return 0.5 - 0.5 * math.erf(r / math.sqrt(2.0))


def marginal_momentum(grid: WignerGrid) -> np.ndarray:
    return grid.values.sum(axis=0)


def marginal_position(grid: WignerGrid) -> np.ndarray:
    return grid.values.sum(axis=1)


def extend_continuous(grid: WignerGrid, q, p) -> np.ndarray:
    """Piecewise-constant extension W~(q, p) = W(round(N q), round(N p / L)).

    Cells are centred on lattice points and have sides 1/N and L/N.
    """
    if grid.formalism is not Formalism.CONTINUOUS:
        raise ValueError("continuous extension needs a continuous-formalism grid")
    N, L = grid.N, grid.spec.L
    n = np.rint(np.asarray(q) * N).astype(np.int64) % N
    m = np.rint(np.asarray(p) * (N / L)).astype(np.int64) % N
    return grid.values[n, m]

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from qcftorus.kinematics import HilbertSpec, QuantumState, coherent_state
from qcftorus.quantum_maps import QuantumMap, propagate
from qcftorus.wigner import (Formalism, WignerGrid, _real, delta_tilde, expand_miquel,
                             extend_continuous, marginal_momentum, marginal_position,
                             miquel_block, miquel_negativity, negativity_fraction,
                             point_operator_oracle, random_wave_plateau,
                             random_wave_ratio, reconstruct_density, wigner,
                             wigner_continuous, wigner_continuous_bruteforce,
                             wigner_discrete)


def random_state(N, L, seed=0):
    return QuantumState.random(HilbertSpec(N, L), seed)


@pytest.mark.parametrize("N", [3, 5, 7, 9, 11])
def test_delta_tilde_matches_defining_sum(N):
    k = np.arange(-4 * N, 4 * N + 1)
    l = np.arange(-(N - 1) // 2, (N - 1) // 2 + 1)
    direct = np.exp(1j * np.pi * np.outer(k, l) / N).sum(axis=1) / N
    assert np.allclose(delta_tilde(k, N), direct.real, atol=1e-13)
    assert np.abs(direct.imag).max() < 1e-12


@pytest.mark.parametrize("N", [3, 5, 7])
def test_continuous_fast_matches_bruteforce(N):
    s = random_state(N, 2, N)
    assert np.allclose(wigner_continuous(s).values,
                       wigner_continuous_bruteforce(s).real, atol=1e-11)


@pytest.mark.parametrize("formalism, N", [("continuous", 3), ("continuous", 5),
                                          ("continuous", 7), ("discrete", 2),
                                          ("discrete", 3), ("discrete", 4),
                                          ("discrete", 5), ("discrete", 8)])
def test_point_operator_oracle(formalism, N):
    L = 2 if N % 2 else 1
    s = random_state(N, L, 10 + N)
    grid = wigner(s, formalism).values
    size = grid.shape[0]
    oracle = np.array([[point_operator_oracle(s, formalism, n, m) for m in range(size)]
                       for n in range(size)])
    assert np.abs(grid - oracle).max() < 1e-12


@pytest.mark.parametrize("formalism, N", [("continuous", 5), ("discrete", 4),
                                          ("discrete", 5)])
def test_reconstruction_returns_the_projector(formalism, N):
    s = random_state(N, 2, 3)
    rho = reconstruct_density(wigner(s, formalism))
    psi = s.amplitudes
    assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-12)


states = st.builds(random_state, st.sampled_from([5, 9, 31, 65]), st.just(2),
                   st.integers(0, 2**31))
even_or_odd = st.builds(random_state, st.sampled_from([4, 5, 16, 31, 64]),
                        st.just(2), st.integers(0, 2**31))


@given(states)
def test_continuous_marginals_and_normalization(s):
    g = wigner_continuous(s)
    assert np.allclose(marginal_position(g), np.abs(s.amplitudes) ** 2, atol=1e-10)
    assert np.allclose(marginal_momentum(g), np.abs(s.momentum_amplitudes()) ** 2,
                       atol=1e-10)
    assert g.values.sum() == pytest.approx(1.0, abs=1e-10)


@given(even_or_odd)
def test_discrete_marginals_and_normalization(s):
    g = wigner_discrete(s)
    pos, mom = marginal_position(g), marginal_momentum(g)
    # the half-integer lattice sites carry no marginal weight
    assert np.allclose(pos[::2], np.abs(s.amplitudes) ** 2, atol=1e-10)
    assert np.allclose(pos[1::2], 0.0, atol=1e-10)
    assert np.allclose(mom[::2], np.abs(s.momentum_amplitudes()) ** 2, atol=1e-10)
    assert np.allclose(mom[1::2], 0.0, atol=1e-10)
    assert g.values.sum() == pytest.approx(1.0, abs=1e-10)


@given(states)
def test_continuous_purity(s):
    """Integral of the extended W~^2 over the torus, per unit area, is 1/N^3."""
    g = wigner_continuous(s)
    N, L = s.N, s.spec.L
    integral = np.sum(g.values ** 2) * (1.0 / N) * (L / N)
    assert integral / L == pytest.approx(N ** -3.0, rel=1e-10)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_miquel_symmetry_relation_against_oracle(N):
    """The full 2N grid from the oracle obeys the block sign relation."""
    s = random_state(N, 2, 7)
    oracle = np.array([[point_operator_oracle(s, "discrete", n, m) for m in range(2 * N)]
                       for n in range(2 * N)])
    B = oracle[:N, :N]
    n = np.arange(N)[:, None] % 2
    m = np.arange(N)[None, :] % 2
    sm, sn = 1 - 2 * m, 1 - 2 * n
    assert np.abs(oracle[N:, :N] - sm * B).max() < 1e-12
    assert np.abs(oracle[:N, N:] - sn * B).max() < 1e-12
    assert np.abs(oracle[N:, N:] - (-1) ** N * sm * sn * B).max() < 1e-12
    assert np.abs(expand_miquel(B) - oracle).max() < 1e-12


@pytest.mark.parametrize("k1, k2", [(1, 0), (0, 1), (2, 3), (5, 7)])
def test_weyl_translation_expectation(k1, k2):
    """<T(k)> is the lattice sum of W against exp(i pi (k2 n - k1 m) / N)."""
    N = 8
    s = random_state(N, 2, 11)
    psi = s.amplitudes
    j = np.arange(N)
    Tpsi = np.zeros(N, dtype=complex)
    Tpsi[(j + k1) % N] = np.exp(2j * np.pi * k2 * j / N + 1j * np.pi * k1 * k2 / N) * psi
    expect = np.vdot(psi, Tpsi)
    n = np.arange(2 * N)[:, None]
    m = np.arange(2 * N)[None, :]
    symbol = np.exp(1j * np.pi * (k2 * n - k1 * m) / N)
    assert abs(np.sum(wigner_discrete(s).values * symbol) - expect) < 1e-12


def test_discrete_unit_cat_is_exactly_covariant():
    """For the unit cat map W^1(x) = W^0(phi^{-1} x) on the 2N lattice."""
    N = 32
    spec = QuantumMap.sawtooth(1, N, 1)
    s = coherent_state(0.3, 0.6, spec.hilbert)
    w0 = wigner_discrete(s).values
    w1 = wigner_discrete(propagate(s, spec, 1)).values
    n = np.arange(2 * N)[:, None]
    m = np.arange(2 * N)[None, :]
    # inverse cat map on integer lattice coordinates
    n0, m0 = (n - m) % (2 * N), (2 * m - n) % (2 * N)
    assert np.abs(w1 - w0[n0, m0]).max() < 1e-12


@given(even_or_odd)
@settings(max_examples=30)
def test_block_negativity_matches_full_grid(s):
    block = miquel_block(s.amplitudes)
    assert miquel_negativity(block) == negativity_fraction(wigner_discrete(s))


def test_negativity_fraction_on_arrays():
    assert negativity_fraction(np.array([[-1.0, 0.0], [2.0, -3.0]])) == 0.5


@pytest.mark.parametrize("formalism, N", [("continuous", 101), ("discrete", 256),
                                          ("discrete", 2048)])
def test_random_wave_plateau_against_quadrature(formalism, N):
    r = random_wave_ratio(formalism, N)
    tail, _ = integrate.quad(lambda x: math.exp(-x * x / 2), 0.0, r)
    expected = 0.5 - tail / math.sqrt(2 * math.pi)
    assert random_wave_plateau(formalism, N) == pytest.approx(expected, abs=1e-14)


def test_random_wave_ratio_values():
    assert random_wave_ratio("discrete", 2048) == pytest.approx(0.011050, abs=1e-6)
    assert random_wave_ratio("continuous", 401) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        random_wave_plateau("discrete", 1)


def test_continuous_requires_odd_N():
    with pytest.raises(ValueError, match="odd"):
        wigner_continuous(random_state(4, 1))


def test_grid_shape_is_checked():
    with pytest.raises(ValueError):
        WignerGrid(Formalism.DISCRETE, np.zeros((4, 4)), HilbertSpec(4, 1))


def test_imaginary_residue_is_reported():
    with pytest.raises(ArithmeticError):
        _real(np.array([1.0 + 1e-3j]))


def test_continuous_extension_is_piecewise_constant():
    s = random_state(7, 2, 5)
    g = wigner_continuous(s)
    N, L = 7, 2
    n, m = 3, 5
    q = n / N + np.array([-0.49, 0.0, 0.49]) / N
    p = (m + np.array([-0.49, 0.0, 0.49])) * L / N
    assert np.all(extend_continuous(g, q, p) == g.values[n, m])
    # cells wrap around the torus
    assert extend_continuous(g, 1 - 0.2 / N, L - 0.2 * L / N) == g.values[0, 0]

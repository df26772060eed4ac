"""The brute-force oracles themselves, plus dense-vs-spectral agreement."""

import math

import numpy as np
import pytest

from latwave import (
    LatticeSpec,
    bessel_power,
    delta_field,
    dft,
    kg_propagator,
    lp_norm,
    random_field,
    schrodinger_propagator,
)
from latwave.oracles import (
    assemble_dense,
    direct_dft,
    finite_diff_second,
)


def test_dense_laplacian_small_circulant():
    op = assemble_dense("laplacian", LatticeSpec(1, 3, 1.0))
    expect = np.array([[-2.0, 1.0, 1.0],
                       [1.0, -2.0, 1.0],
                       [1.0, 1.0, -2.0]])
    np.testing.assert_allclose(op.matrix, expect, atol=1e-14)


def test_dense_laplacian_eigenvalues_N4():
    op = assemble_dense("laplacian", LatticeSpec(1, 4, 1.0))
    mu = np.sort(np.linalg.eigvalsh(op.matrix))
    np.testing.assert_allclose(mu, [-4.0, -2.0, -2.0, 0.0], atol=1e-12)


def test_dense_propagator_t0_is_identity():
    op = assemble_dense("schrodinger_propagator", LatticeSpec(1, 4, 1.0), t=0.0)
    np.testing.assert_allclose(op.matrix, np.eye(4), atol=1e-13)


def test_dense_propagators_unitary():
    spec = LatticeSpec(1, 8, 0.5)
    for name in ("schrodinger_propagator", "kg_propagator"):
        P = assemble_dense(name, spec, t=0.7).matrix
        np.testing.assert_allclose(P.conj().T @ P, np.eye(8), atol=1e-10)


def test_size_cap_refused():
    with pytest.raises(ValueError):
        assemble_dense("laplacian", LatticeSpec(2, 128, 1.0))


def test_dense_requires_parameters():
    spec = LatticeSpec(1, 4, 1.0)
    with pytest.raises(ValueError):
        assemble_dense("schrodinger_propagator", spec)
    with pytest.raises(ValueError):
        assemble_dense("bessel_power", spec)
    with pytest.raises(ValueError):
        assemble_dense("hamiltonian", spec)


def test_dense_vs_spectral_paths():
    """Twenty random fields through both realizations of each operator."""
    for h in (1.0, 0.5):
        spec = LatticeSpec(1, 8, h)
        dense = {
            "bessel": assemble_dense("bessel_power", spec, alpha=0.5),
            "schrod": assemble_dense("schrodinger_propagator", spec, t=0.7),
            "kg": assemble_dense("kg_propagator", spec, t=0.5),
        }
        fast = {
            "bessel": lambda f: bessel_power(f, 0.5),
            "schrod": lambda f: schrodinger_propagator(f, 0.7),
            "kg": lambda f: kg_propagator(f, 0.5),
        }
        for seed in range(20):
            f = random_field(spec, seed=seed)
            for key in dense:
                a = dense[key].apply(f)
                b = fast[key](f)
                diff = lp_norm(type(f)(spec, a.values - b.values), 2)
                assert diff <= 1e-8 * lp_norm(f, 2), (h, key, seed)


def test_direct_dft_delta_and_agreement():
    spec = LatticeSpec(2, 8, 1.0)
    delta = delta_field(spec)
    np.testing.assert_allclose(direct_dft(delta).values, 1.0, atol=1e-12)
    f = random_field(spec, seed=3)
    slow = direct_dft(f).values
    fast = dft(f).values
    assert np.max(np.abs(slow - fast)) <= 1e-11 * np.max(np.abs(fast))


def test_direct_dft_linearity():
    spec = LatticeSpec(1, 16, 1.0)
    f = random_field(spec, seed=4)
    g = random_field(spec, seed=5)
    combo = direct_dft(type(f)(spec, 2.0 * f.values - 1j * g.values)).values
    expect = 2.0 * direct_dft(f).values - 1j * direct_dft(g).values
    np.testing.assert_allclose(combo, expect, rtol=1e-12, atol=1e-10)


def test_finite_diff_second_exact_on_quadratics():
    t = np.linspace(0.0, 1.0, 11)
    y = 3.0 * t ** 2 - 2.0 * t + 5.0
    np.testing.assert_allclose(finite_diff_second(y, 0.1), 6.0, rtol=1e-10)


def test_finite_diff_second_on_sine():
    tau = 1e-3
    t = np.arange(0.0, 1.0, tau)
    d2 = finite_diff_second(np.sin(t), tau)
    np.testing.assert_allclose(d2, -np.sin(t[1:-1]), atol=1e-6)


def test_finite_diff_second_needs_three_samples():
    with pytest.raises(ValueError):
        finite_diff_second([1.0, 2.0], 0.1)

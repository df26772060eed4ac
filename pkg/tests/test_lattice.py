"""Lattice containers, norms, inner product, and the discrete transform."""

import math

import numpy as np
import pytest

from latwave import (
    INF,
    Field,
    LatticeSpec,
    constant_field,
    delta_field,
    dft,
    gaussian_field,
    idft,
    inner,
    lp_norm,
    plancherel_defect,
    random_field,
)


def test_lattice_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec(0, 8, 1.0)
    with pytest.raises(ValueError):
        LatticeSpec(1, 1, 1.0)
    with pytest.raises(ValueError):
        LatticeSpec(1, 8, 0.0)
    with pytest.raises(ValueError):
        LatticeSpec(3, 512, 1.0)  # 512^3 sites is past the supported size
    spec = LatticeSpec(2, 8, 0.5)
    assert spec.shape == (8, 8)
    assert spec.size == 64


def test_field_length_checked():
    spec = LatticeSpec(1, 8, 1.0)
    with pytest.raises(ValueError):
        Field(spec, np.zeros(7))


def test_field_constructor_copies():
    spec = LatticeSpec(1, 4, 1.0)
    raw = np.ones(4, dtype=np.complex128)
    f = Field(spec, raw)
    raw[0] = 99.0
    assert f.values[0] == 1.0


def test_delta_field_norms_all_one():
    # a single unit entry has every l^p norm equal to 1
    spec = LatticeSpec(2, 8, 0.5)
    f = delta_field(spec)
    for p in (1.0, 1.5, 2.0, 4.0, INF):
        assert lp_norm(f, p) == pytest.approx(1.0, abs=1e-15)


def test_constant_field_norms_d1_N4():
    spec = LatticeSpec(1, 4, 1.0)
    f = constant_field(spec, 1.0)
    assert lp_norm(f, 1) == pytest.approx(4.0)
    assert lp_norm(f, 2) == pytest.approx(2.0)
    assert lp_norm(f, INF) == pytest.approx(1.0)


def test_lp_norm_rejects_p_below_one():
    f = delta_field(LatticeSpec(1, 4, 1.0))
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_l2_norm_matches_inner_product():
    f = random_field(LatticeSpec(1, 64, 1.0), seed=7)
    n2 = lp_norm(f, 2)
    assert n2 == pytest.approx(math.sqrt(inner(f, f).real), rel=1e-12)
    assert abs(inner(f, f).imag) <= 1e-12 * n2 ** 2


def test_inner_disjoint_deltas_orthogonal():
    spec = LatticeSpec(1, 8, 1.0)
    a = delta_field(spec)
    b = Field(spec, np.roll(a.values, 3))
    assert inner(a, b) == 0


def test_inner_conjugate_symmetry_and_sesquilinearity():
    spec = LatticeSpec(1, 32, 1.0)
    f = random_field(spec, seed=1)
    g = random_field(spec, seed=2)
    assert inner(f, g) == pytest.approx(inner(g, f).conjugate(), rel=1e-13)
    # conjugate-linear in the second slot
    c = 0.3 - 1.7j
    gc = Field(spec, c * g.values)
    assert inner(f, gc) == pytest.approx(c.conjugate() * inner(f, g), rel=1e-13)


def test_inner_spec_mismatch():
    with pytest.raises(ValueError):
        inner(delta_field(LatticeSpec(1, 8, 1.0)), delta_field(LatticeSpec(1, 16, 1.0)))


def test_cauchy_schwarz():
    spec = LatticeSpec(2, 16, 0.5)
    for seed in range(20):
        f = random_field(spec, seed=seed)
        g = random_field(spec, seed=1000 + seed)
        lhs = abs(inner(f, g))
        rhs = lp_norm(f, 2) * lp_norm(g, 2)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_lp_norm_monotone_in_p():
    spec = LatticeSpec(1, 64, 1.0)
    ps = [1.0, 1.5, 2.0, 4.0, 8.0, INF]
    for seed in range(10):
        f = random_field(spec, seed=seed)
        norms = [lp_norm(f, p) for p in ps]
        for a, b in zip(norms, norms[1:]):
            assert b <= a * (1.0 + 1e-12)


def test_dft_of_delta_is_flat():
    spec = LatticeSpec(1, 16, 1.0)
    F = dft(delta_field(spec))
    np.testing.assert_allclose(F.values, np.ones(16), atol=1e-14)


def test_dft_roundtrip_and_plancherel_across_sizes():
    for d in (1, 2, 3):
        for N in (2, 3, 4, 8, 12, 16, 64):
            if N ** d > 2 ** 18:
                continue
            spec = LatticeSpec(d, N, 0.5)
            f = random_field(spec, seed=d * 100 + N)
            back = idft(dft(f))
            err = np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values))
            assert err <= 1e-12, (d, N, err)
            assert plancherel_defect(f) <= 1e-12, (d, N)


def test_dft_linearity():
    spec = LatticeSpec(2, 8, 1.0)
    f = random_field(spec, seed=5)
    g = random_field(spec, seed=6)
    a, b = 1.3 - 0.4j, -0.8 + 2.2j
    combo = dft(Field(spec, a * f.values + b * g.values))
    expect = a * dft(f).values + b * dft(g).values
    np.testing.assert_allclose(combo.values, expect, rtol=1e-12, atol=1e-12)


def test_random_field_reproducible_and_scaled():
    spec = LatticeSpec(1, 32, 1.0)
    f = random_field(spec, seed=42)
    g = random_field(spec, seed=42)
    np.testing.assert_array_equal(f.values, g.values)
    h2 = random_field(spec, seed=42, amplitude=2.0)
    np.testing.assert_allclose(h2.values, 2.0 * f.values, rtol=1e-15)


def test_gaussian_field_peak_and_wraparound_symmetry():
    spec = LatticeSpec(1, 16, 0.5)
    g = gaussian_field(spec, width=1.0, amplitude=3.0)
    assert g.values[0] == pytest.approx(3.0)
    # nearest-image distance makes site k and site N-k equivalent
    np.testing.assert_allclose(g.values[1:], g.values[1:][::-1], rtol=1e-15)
    with pytest.raises(ValueError):
        gaussian_field(spec, width=0.0)

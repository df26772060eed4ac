"""Potential generation and the standing-assumption validators."""

import math

import numpy as np
import pytest

from latwave import (
    LatticeSpec,
    PotentialSpec,
    constant_potential,
    generate,
    validate_blowup_assumption,
    validate_kg_defocusing,
    zero_potential,
)

LAT = LatticeSpec(1, 16, 1.0)


def test_zero_and_constant():
    np.testing.assert_array_equal(generate(zero_potential(), LAT).values, 0.0)
    np.testing.assert_array_equal(generate(constant_potential(2.0), LAT).values, 2.0)


def test_periodic_pattern_repeats_along_first_axis():
    spec = PotentialSpec("periodic", pattern=(1.0, -2.0, 0.5, 3.0))
    v = generate(spec, LAT).values
    np.testing.assert_array_equal(v[:4], [1.0, -2.0, 0.5, 3.0])
    np.testing.assert_array_equal(v, np.tile([1.0, -2.0, 0.5, 3.0], 4))
    assert np.max(np.abs(v)) == pytest.approx(3.0, abs=1e-12)

    # in d=2 the pattern varies along the first axis only
    lat2 = LatticeSpec(2, 4, 1.0)
    v2 = generate(spec, lat2).values.reshape(4, 4)
    for i, x in enumerate([1.0, -2.0, 0.5, 3.0]):
        np.testing.assert_array_equal(v2[i], x)


def test_periodic_pattern_must_divide_N():
    spec = PotentialSpec("periodic", pattern=(1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        generate(spec, LAT)  # 3 does not divide 16


def test_iid_uniform_reproducible_and_bounded():
    spec = PotentialSpec("iid_uniform", lo=-0.5, hi=1.5, seed=123)
    a = generate(spec, LAT).values
    b = generate(spec, LAT).values
    np.testing.assert_array_equal(a, b)
    assert np.min(a) >= -0.5 and np.max(a) < 1.5
    other = generate(PotentialSpec("iid_uniform", lo=-0.5, hi=1.5, seed=124), LAT).values
    assert np.any(a != other)


def test_quasiperiodic_value_at_origin_and_sup_bound():
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    spec = PotentialSpec("quasiperiodic", amplitude=1.0, phase=(0.0,),
                         frequency=(golden,))
    v = generate(spec, LAT).values
    assert v[0] == pytest.approx(1.0)  # cos(0) at phase zero
    assert np.max(np.abs(v)) <= 1.0 + 1e-12
    # site k holds A cos(2 pi (theta + k alpha))
    expect = np.cos(2.0 * np.pi * (0.0 + np.arange(16) * golden))
    np.testing.assert_allclose(v, expect, rtol=1e-12, atol=1e-12)


def test_quasiperiodic_defaults_and_axis_counts():
    # omitted phase/frequency fall back to 0 and the golden mean per axis
    v_default = generate(PotentialSpec("quasiperiodic", amplitude=0.7), LAT).values
    assert v_default[0] == pytest.approx(0.7)
    with pytest.raises(ValueError):
        generate(PotentialSpec("quasiperiodic", amplitude=1.0, phase=(0.1, 0.2)), LAT)


def test_spec_validation():
    with pytest.raises(ValueError):
        PotentialSpec("lorentzian")
    with pytest.raises(ValueError):
        PotentialSpec("periodic", pattern=())
    with pytest.raises(ValueError):
        PotentialSpec("iid_uniform", lo=2.0, hi=1.0, seed=0)


def test_validate_kg_defocusing():
    out = validate_kg_defocusing(generate(zero_potential(), LAT), h=1.0)
    assert out["ok"] and out["delta0"] == pytest.approx(2.0)

    out = validate_kg_defocusing(generate(constant_potential(-3.0), LAT), h=1.0)
    assert not out["ok"]
    assert out["delta0"] == pytest.approx(-1.0)

    for d, h in ((1, 1.0), (2, 0.5), (3, 0.25)):
        lat = LatticeSpec(d, 8, h)
        V = generate(PotentialSpec("iid_uniform", lo=0.0, hi=1.0, seed=5), lat)
        out = validate_kg_defocusing(V, h=h)
        assert out["ok"]
        assert out["delta0"] >= 2.0 * d


def test_validate_blowup_assumption():
    assert validate_blowup_assumption(generate(constant_potential(1.0), LAT))
    assert not validate_blowup_assumption(generate(zero_potential(), LAT))
    V = generate(PotentialSpec("iid_uniform", lo=0.5, hi=1.5, seed=9), LAT)
    assert validate_blowup_assumption(V)

import math
from fractions import Fraction

import pytest

from axinorms.analysis import EnsembleConfig
from axinorms.domain import ExtendedNorm, MeridianDomain
from axinorms.expr import CSymFun, SymFun, parse
from axinorms.vecfield import (
    VecAxiFun,
    VecCoefficient,
    cartesian_link,
    vec_c_norm_sq,
    vec_equivalence_sweep,
    vec_hk_norm_sq,
    vec_parseval,
)

UNIT = MeridianDomain.rect(0, 1, 0, 1)
HOLED = MeridianDomain.rect(Fraction(1, 10), 1, 0, 1)


def pi(x) -> ExtendedNorm:
    return ExtendedNorm.finite(Fraction(x))


def test_radial_unit_field():
    report = vec_hk_norm_sq(VecCoefficient("1", "0"), 0, 0, UNIT)
    assert report.total == pi(1)
    labels = [label for label, _ in report.terms]
    assert labels[0].startswith("mode 1: ") and labels[-1].startswith("mode -1: ")


def test_components_swap_symmetrically():
    w = parse("r^2 + r z")
    for k in (-2, 0, 3):
        for m in (0, 1, 2):
            a = vec_hk_norm_sq(VecCoefficient(w, SymFun()), k, m, HOLED).total
            b = vec_hk_norm_sq(VecCoefficient(SymFun(), w), k, m, HOLED).total
            assert a == b


def test_cartesian_link():
    plus, minus = cartesian_link(VecCoefficient("r", "z"))
    assert plus == CSymFun(parse("r"), parse("z"))
    assert minus == CSymFun(parse("r"), parse("-z"))
    v = VecCoefficient("r^2", CSymFun(parse("z"), parse("r")))
    assert VecCoefficient.from_shifted(*cartesian_link(v, 1)) == v


def test_vec_c_examples():
    assert vec_c_norm_sq(VecCoefficient("r", "r"), 0, 1, UNIT).total == pi(5)

    # (1/r)^1 (w_r + i w_theta) = 1 on top of the H^1_1 norm of r
    coupled = vec_c_norm_sq(VecCoefficient("r", "0"), 1, 1, UNIT)
    assert coupled.total == pi(Fraction(5, 2))
    assert any(label.startswith("1<=|k|<=m (1/r)^1") for label, _ in coupled.terms)

    far = vec_c_norm_sq(VecCoefficient("r^2", "r^2"), 2, 1, UNIT)
    assert all(label.startswith("|k|>=m+1") for label, _ in far.terms)


@pytest.mark.parametrize("k", [0, 1, 2, 4])
def test_mirror_mode_flips_angular_component(k):
    v = VecCoefficient("r^2", "r z")
    mirror = VecCoefficient("r^2", "-r z")
    for m in (1, 2, 3):
        assert vec_hk_norm_sq(v, k, m, HOLED).total == vec_hk_norm_sq(mirror, -k, m, HOLED).total
        assert vec_c_norm_sq(v, k, m, HOLED).total == vec_c_norm_sq(mirror, -k, m, HOLED).total


def test_vector_parseval():
    u = VecAxiFun.from_json(
        {
            "modes": {
                "0": {"w_r": "r", "w_theta": "z"},
                "1": {"w_r": "r^2 z", "w_theta": {"re": "1", "im": "r"}},
                "-2": {"w_r": "0", "w_theta": "r^3"},
            }
        }
    )
    for m in (0, 1, 2):
        lhs, rhs = vec_parseval(u, m, HOLED)
        assert lhs == rhs


def test_vec_axifun_json():
    u = VecAxiFun(((1, VecCoefficient("r", "0")), (1, VecCoefficient("0", "z")), (3, VecCoefficient())))
    assert [k for k, _ in u] == [1]
    assert u.to_json() == {"modes": {"1": {"w_r": "r", "w_theta": "z"}}}
    assert VecAxiFun.from_json(u.to_json()) == u
    complex_field = VecCoefficient("r", CSymFun(SymFun(), parse("r")))
    assert complex_field.to_json() == {"w_r": "r", "w_theta": {"re": "0", "im": "r"}}
    with pytest.raises(ValueError):
        VecAxiFun.from_json({"modes": {"0": {"w_r": "r"}}})
    with pytest.raises(ValueError):
        VecAxiFun.from_json({"mode": {}})
    with pytest.raises(ValueError, match="w_r and w_theta"):
        VecAxiFun.from_json({"modes": {"0": "r"}})


def test_vector_sweep_is_exact_at_order_zero():
    result = vec_equivalence_sweep(0, range(-2, 3), (0, Fraction(1, 10)), EnsembleConfig(draws=6, max_terms=2))
    assert set(result.frame["quantity"]) == {"vector"}
    assert len(result.frame) == 5 * 2
    assert result.envelope(0, "vector") == (1.0, 1.0)
    assert "vector 0" in result.ensemble


@pytest.mark.slow
@pytest.mark.parametrize("m", [1, 2, 3])
def test_vector_envelope_is_uniform_over_modes(m):
    result = vec_equivalence_sweep(m, range(-8, 9), workers=4)
    assert len(result.frame) == 17 * 3
    lo, hi = result.envelope(m, "vector")
    assert 0 < lo <= hi < math.inf
    assert result.uniformity(m, "vector") <= 4

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axinorms.expr import (
    CSymFun,
    ExprSyntaxError,
    GaussianRational,
    I,
    Monomial,
    SymFun,
    apply_r_dr,
    const,
    d_dr,
    d_dr_n,
    d_dz,
    mul_r_pow,
    parse,
    r_pow,
)

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def monomial(a_min=-5, a_max=8, b_max=3):
    return st.builds(
        lambda c, a, b: SymFun((Monomial(c, a, b),)),
        coeffs,
        st.integers(a_min, a_max),
        st.integers(0, b_max),
    )


def symfun(a_min=-5, a_max=8, b_max=3):
    return st.lists(monomial(a_min, a_max, b_max), max_size=4).map(lambda ms: sum(ms, SymFun()))


def weight(f: SymFun, k: int, ell: int) -> SymFun:
    """(k/r)^ell f"""
    return mul_r_pow(f, -ell).scale(Fraction(k) ** ell)


def test_parse_merges_and_orders_terms():
    assert parse("r^3 - 2*z").coefficients() == {(3, 0): 1, (0, 1): -2}
    assert parse("r^2 + r^2") == SymFun.from_map({(2, 0): 2})
    assert [t.key for t in parse("z + r^3 - 2 + r z")] == [(0, 0), (0, 1), (1, 1), (3, 0)]


def test_parse_coefficients():
    assert parse("3/4 r^2") == r_pow(2, Fraction(3, 4))
    assert parse("1.25*r*z^2") == SymFun.from_map({(1, 2): Fraction(5, 4)})
    assert parse("-r + r") == SymFun()
    assert parse("0").is_zero
    assert parse("2 r^0") == const(2)


@pytest.mark.parametrize(
    "text, position",
    [
        ("r^-1", 2),
        ("r^1.5", 2),
        ("2 & r", 2),
        ("1/0", 2),
        ("r +", 3),
        ("z^-2", 2),
    ],
)
def test_parse_errors_carry_position(text, position):
    with pytest.raises(ExprSyntaxError) as ei:
        parse(text)
    assert ei.value.position == position
    assert text in str(ei.value)
    assert "^" in str(ei.value).splitlines()[-1]


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        parse("   ")


def test_derivatives():
    assert d_dr(parse("r^3")) == parse("3 r^2")
    assert d_dr(const(5)).is_zero
    assert d_dz(parse("r z^2")) == parse("2 r z")
    assert d_dr_n(parse("r^4"), 5).is_zero
    with pytest.raises(ValueError):
        d_dr_n(parse("r"), -1)


def test_mul_r_pow_and_apply_r_dr():
    assert mul_r_pow(parse("r^3"), -2) == parse("r")
    assert mul_r_pow(const(1), 0) == const(1)
    assert mul_r_pow(parse("2 z"), -1) == SymFun.from_map({(-1, 1): 2})
    assert apply_r_dr(parse("r^4"), 1) == parse("4 r^2")
    assert apply_r_dr(parse("r^5"), 2) == parse("15 r")
    f = parse("r^3 - z")
    assert apply_r_dr(f, 0) == f


def test_str_renders_negative_powers():
    assert str(SymFun.from_map({(-2, 0): Fraction(-1, 2), (1, 1): 3})) == "-1/2*r^-2 + 3*r*z"
    assert str(SymFun()) == "0"


@given(symfun(a_min=0))
def test_str_reparses(f):
    assert parse(str(f)) == f


@given(symfun(), symfun(), coeffs)
def test_operators_are_linear(f, g, c):
    for op in (d_dr, d_dz, lambda h: mul_r_pow(h, -3), lambda h: apply_r_dr(h, 2)):
        assert op(f + g.scale(c)) == op(f) + op(g).scale(c)


@given(symfun())
def test_dr_dz_commute(f):
    assert d_dr(d_dz(f)) == d_dz(d_dr(f))


@settings(max_examples=200)
@given(monomial(), st.integers(1, 8), st.integers(1, 8).flatmap(lambda k: st.sampled_from([k, -k])))
def test_weight_commutation(w, ell, k):
    # (k/r)^l d_r w = d_r (k/r)^l w + (l/k) (k/r)^(l+1) w
    lhs = weight(d_dr(w), k, ell)
    rhs = d_dr(weight(w, k, ell)) + weight(w, k, ell + 1).scale(Fraction(ell, k))
    assert lhs == rhs


@given(monomial(a_min=-4, a_max=8), st.integers(1, 5))
def test_r_dr_product_identity(u, ell):
    # (1/r d_r)^l d_r (r u) = d_r^2 (1/r d_r)^(l-1) u + 2l (1/r d_r)^l u
    lhs = apply_r_dr(d_dr(mul_r_pow(u, 1)), ell)
    rhs = d_dr_n(apply_r_dr(u, ell - 1), 2) + apply_r_dr(u, ell).scale(2 * ell)
    assert lhs == rhs


@pytest.mark.parametrize("ell", range(9))
@pytest.mark.parametrize("a", range(-5, 9))
def test_weight_commutation_grid(ell, a):
    for b in (0, 1):
        w = SymFun((Monomial(1, a, b),))
        for k in [*range(-8, 0), *range(1, 9)]:
            lhs = weight(d_dr(w), k, ell)
            rhs = d_dr(weight(w, k, ell)) + weight(w, k, ell + 1).scale(Fraction(ell, k))
            assert lhs == rhs, (ell, a, b, k)


@pytest.mark.parametrize("ell", range(1, 6))
@pytest.mark.parametrize("a", range(-4, 9))
def test_r_dr_product_identity_grid(ell, a):
    for b in range(4):
        u = SymFun((Monomial(1, a, b),))
        lhs = apply_r_dr(d_dr(mul_r_pow(u, 1)), ell)
        rhs = d_dr_n(apply_r_dr(u, ell - 1), 2) + apply_r_dr(u, ell).scale(2 * ell)
        assert lhs == rhs, (ell, a, b)


@given(symfun(), st.integers(1, 8))
def test_shift_identities(w, k):
    kw = mul_r_pow(w, -1).scale(k)
    # (1/r)^k (d_r - k/r) w = d_r (1/r)^k w
    assert mul_r_pow(d_dr(w) - kw, -k) == d_dr(mul_r_pow(w, -k))
    # (1/r)^(k-1) (d_r + k/r) w = d_r (1/r)^(k-1) w + (2k-1) (1/r)^k w
    lhs = mul_r_pow(d_dr(w) + kw, -(k - 1))
    rhs = d_dr(mul_r_pow(w, -(k - 1))) + mul_r_pow(w, -k).scale(2 * k - 1)
    assert lhs == rhs


def test_product_and_evaluate():
    f = parse("r + z")
    assert f * f == parse("r^2 + 2 r z + z^2")
    assert float(parse("r^2 z").evaluate(2.0, 3.0)) == pytest.approx(12.0)
    assert parse("r^2").evaluate([1.0, 2.0]).tolist() == pytest.approx([1.0, 4.0])


def test_radial_slice():
    f = parse("r^2 z + 3 r^2 + r z^3")
    assert f.radial_slice(2) == parse("z + 3")
    assert f.radial_slice(5).is_zero
    assert f.min_r_exp == 1
    assert f.max_z_exp == 3


def test_gaussian_combinations():
    w = parse("r")
    f = CSymFun.of(w).scale(GaussianRational(1, 1))
    assert f == CSymFun(w, w)
    assert f.times_i() == CSymFun(-w, w)
    assert f.conjugate() == CSymFun(w, -w)
    assert (I * I) == GaussianRational(-1, 0)
    assert f.apply(d_dr) == CSymFun(const(1), const(1))
    assert complex(f.evaluate(2.0)) == pytest.approx(2 + 2j)

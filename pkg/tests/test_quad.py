import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from axinorms.domain import MeridianDomain
from axinorms.expr import Monomial, SymFun, const, parse, r_pow
from axinorms.quad import integrate, integrate_sq, relative_error, required_order, rule

UNIT = MeridianDomain.rect(0, 1, 0, 1)

polynomials = st.lists(
    st.builds(
        lambda c, a, b: SymFun((Monomial(c, a, b),)),
        st.integers(-5, 5),
        st.integers(0, 6),
        st.integers(0, 3),
    ),
    min_size=1,
    max_size=4,
).map(lambda ms: sum(ms, SymFun())).filter(lambda f: not f.is_zero)


def test_constant_integrand():
    assert integrate(const(1), UNIT, 4) == pytest.approx(math.pi, abs=1e-14)


def test_polynomial_integrand_is_exact():
    assert integrate(parse("r^6 z^2"), UNIT, 8) == pytest.approx(2 * math.pi / 24, abs=1e-12)


def test_norm_of_inverse_r_on_annulus():
    omega = MeridianDomain.rect(Fraction(1, 2), 1, 0, 1)
    assert integrate_sq(r_pow(-1), omega, 16) == pytest.approx(2 * math.pi * math.log(2), abs=1e-8)


def test_callable_integrand_and_interval():
    omega = MeridianDomain.interval(0, 1)
    q = rule(omega, 5)
    assert len(q) == 5
    assert integrate(lambda r, z: r**2, omega, 5) == pytest.approx(2 * math.pi / 4)


def test_rule_rejects_family_and_bad_order():
    with pytest.raises(ValueError):
        rule(MeridianDomain.family(1), 4)
    with pytest.raises(ValueError):
        rule(UNIT, 0)


def test_non_finite_sample_names_the_node():
    with pytest.raises(ValueError) as ei:
        integrate(lambda r, z: np.where(r > 0.5, np.nan, 1.0), UNIT, 4)
    assert "node r=" in str(ei.value)


def test_required_order():
    assert required_order(SymFun()) == 1
    assert required_order(parse("r^3 z")) == 4
    with pytest.raises(ValueError):
        required_order(r_pow(-1))


@settings(max_examples=100, deadline=None)
@given(polynomials, st.sampled_from([Fraction(0), Fraction(1, 4)]))
def test_quadrature_matches_closed_form(f, eps):
    omega = MeridianDomain.rect(eps, 1, 0, 1)
    assert relative_error(f, omega) < 1e-12


HOLED = MeridianDomain.rect(Fraction(1, 10), 1, 0, 1)


@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda r, z: r**-2, 2 * math.pi * math.log(10)),
        (lambda r, z: r**-4, 2 * math.pi * (1 / 0.1**2 - 1) / 2),
        (lambda r, z: np.sqrt(r), 2 * math.pi * (1 - 0.1**2.5) / 2.5),
    ],
)
def test_error_shrinks_as_the_order_doubles(f, exact):
    errors = [abs(integrate(f, HOLED, n) - exact) / exact for n in (2, 4, 8, 16, 32)]
    for fine, coarse in zip(errors[1:], errors):
        assert fine < coarse or fine < 1e-13
    assert errors[-1] < 1e-8


def test_relative_error_accepts_an_explicit_order():
    coarse = relative_error(r_pow(-1), HOLED, 4)
    assert relative_error(r_pow(-1), HOLED, 16) < coarse < 1

"""Scalar Fourier-mode norms of a meridian coefficient w.

* ``hk_norm_sq``: the H^m_(k) norm through the exact zeta recursion,
  |w|^2_{H^j_perp(k)} = 1/2 |(d_r + k/r) w|^2_{H^{j-1}_perp(k-1)}
                      + 1/2 |(d_r - k/r) w|^2_{H^{j-1}_perp(k+1)}.
* ``w_seminorm_sq``, ``x_seminorm_sq``, ``c_norm_sq``: the step-weighted family.
* ``h1_norm_sq``, ``h1_bullet_norm_sq``, ``v1_norm_sq``: flat weighted spaces.

Every function returns a :class:`NormReport` whose ``total`` is the exact sum
of its labelled ``terms``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple
import logging

from .domain import ExtendedNorm, MeridianDomain, l21_norm_sq, parse_domain
from .expr import (
    CSymFun,
    SymFun,
    apply_r_dr,
    d_dr,
    d_dr_n,
    d_dz_n,
    mul_r_pow,
    parse,
)

__all__ = [
    "MAX_ORDER",
    "NormRequest",
    "NormReport",
    "h_perp_seminorm_sq",
    "hk_norm_sq",
    "w_seminorm_sq",
    "x_seminorm_sq",
    "wx_seminorm_sq",
    "c_norm_sq",
    "h1_norm_sq",
    "h1_bullet_norm_sq",
    "v1_norm_sq",
    "m2_branch_sq",
    "kondratev_w_sq",
    "complex_norm",
]

logger = logging.getLogger(__name__)

MAX_ORDER = 12


def _check_order(m: int) -> None:
    if m < 0:
        raise ValueError(f"Sobolev order must be natural, got m={m}")
    if m > MAX_ORDER:
        raise ValueError(
            f"Sobolev order m={m} exceeds the guard MAX_ORDER={MAX_ORDER}; "
            "the recursion grows like 2^m"
        )


@dataclass(frozen=True)
class NormRequest:
    w: SymFun
    k: int
    m: int
    domain: MeridianDomain

    def __post_init__(self) -> None:
        _check_order(self.m)

    @classmethod
    def from_text(cls, fn: str, k: int, m: int, domain: str) -> "NormRequest":
        return cls(parse(fn), int(k), int(m), parse_domain(domain))


@dataclass(frozen=True)
class NormReport:
    terms: Tuple[Tuple[str, ExtendedNorm], ...]
    total: ExtendedNorm = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "total", sum((v for _, v in self.terms), ExtendedNorm.finite(0)))

    @classmethod
    def concat(cls, *reports: "NormReport", prefixes: Optional[Iterable[str]] = None) -> "NormReport":
        terms: List[Tuple[str, ExtendedNorm]] = []
        labels = list(prefixes) if prefixes is not None else [""] * len(reports)
        for prefix, rep in zip(labels, reports):
            terms.extend((f"{prefix}{label}", v) for label, v in rep.terms)
        return cls(tuple(terms))

    @property
    def is_finite(self) -> bool:
        return self.total.is_finite

    def value(self, label: str) -> ExtendedNorm:
        for name, v in self.terms:
            if name == label:
                return v
        raise KeyError(label)

    def first_divergent(self) -> Optional[str]:
        return next((label for label, v in self.terms if not v.is_finite), None)

    def combine(self, other: "NormReport") -> "NormReport":
        """Termwise sum of two reports with identical labels."""
        if [a for a, _ in self.terms] != [b for b, _ in other.terms]:
            raise ValueError("cannot combine reports with different term labels")
        return NormReport(tuple((a, x + y) for (a, x), (_, y) in zip(self.terms, other.terms)))

    def scale(self, c: Fraction) -> "NormReport":
        return NormReport(tuple((a, v.scale(c)) for a, v in self.terms))

    def substitute(self, eps, r_max) -> "NormReport":
        return NormReport(tuple((a, v.substitute(eps, r_max)) for a, v in self.terms))

    def to_json(self) -> Dict[str, object]:
        return {
            "total": self.total.to_json(),
            "terms": [{"label": label, "value": v.to_json()} for label, v in self.terms],
        }


# -- zeta recursion ------------------------------------------------------------
def _h_perp(
    w: SymFun, k: int, j: int, omega: MeridianDomain, memo: Dict[Tuple[SymFun, int, int], ExtendedNorm]
) -> ExtendedNorm:
    key = (w, k, j)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if j == 0 or w.is_zero:
        value = l21_norm_sq(w, omega)
    else:
        dw, kw = d_dr(w), mul_r_pow(w, -1).scale(k)
        lowered = _h_perp(dw + kw, k - 1, j - 1, omega, memo)
        raised = _h_perp(dw - kw, k + 1, j - 1, omega, memo)
        value = (lowered + raised).scale(Fraction(1, 2))
    memo[key] = value
    return value


def h_perp_seminorm_sq(w: SymFun, k: int, j: int, omega: MeridianDomain) -> ExtendedNorm:
    """|w|^2 in H^j_perp(k): the 2^j-leaf recursion with base case the L^2_1 norm."""
    _check_order(j)
    return _h_perp(w, k, j, omega, {})


def hk_norm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    memo: Dict[Tuple[SymFun, int, int], ExtendedNorm] = {}
    terms: List[Tuple[str, ExtendedNorm]] = []
    for j in range(m + 1):
        for i in range(j + 1):
            a = j - i
            if a and not omega.is_3d:
                continue
            g = d_dz_n(w, a)
            label = f"H^{i}_perp(dz^{a} w)" if a else f"H^{i}_perp(w)"
            terms.append((label, _h_perp(g, k, i, omega, memo)))
    report = NormReport(tuple(terms))
    if not report.is_finite:
        logger.debug("H^%d_(%d) norm of %s diverges at %s", m, k, w, report.first_divergent())
    return report


# -- step-weighted seminorms ----------------------------------------------------
def w_seminorm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    ak = abs(k)
    terms = []
    for ell in range(min(ak, m) + 1):
        weighted = mul_r_pow(w, -ell).scale(Fraction(ak) ** ell)
        terms.append((f"W l={ell}", l21_norm_sq(d_dr_n(weighted, m - ell), omega)))
    return NormReport(tuple(terms))


def _x_argument(w: SymFun, k: int, ell: int) -> SymFun:
    return apply_r_dr(mul_r_pow(w, -abs(k)), ell)


def x_seminorm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    top = (m - abs(k)) // 2
    if top < 1:
        return NormReport(())
    terms = []
    for ell in range(1, top + 1):
        g = d_dr_n(_x_argument(w, k, ell), m - abs(k) - 2 * ell)
        terms.append((f"X l={ell}", l21_norm_sq(g, omega)))
    return NormReport(tuple(terms))


def wx_seminorm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    return NormReport.concat(w_seminorm_sq(w, k, m, omega), x_seminorm_sq(w, k, m, omega))


# -- flat weighted spaces -------------------------------------------------------
def _flat_terms(w: SymFun, m: int, omega: MeridianDomain, tag: str, weight=None):
    """Terms of sum_{|alpha|<=m} ||weight(|alpha|) d^alpha w||^2 (no z-derivatives in 2D)."""
    for total in range(m + 1):
        for b in range(total + 1 if omega.is_3d else 1):
            a = total - b
            g = d_dz_n(d_dr_n(w, a), b)
            if weight is not None:
                g = weight(total, g)
            yield (f"{tag} d_r^{a} d_z^{b}", l21_norm_sq(g, omega))


def h1_norm_sq(w: SymFun, m: int, omega: MeridianDomain, tag: str = "H1") -> NormReport:
    _check_order(m)
    return NormReport(tuple(_flat_terms(w, m, omega, tag)))


def h1_bullet_norm_sq(w: SymFun, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    if m < 1:
        raise ValueError("the bullet space needs m >= 1")
    extra = l21_norm_sq(mul_r_pow(d_dr_n(w, m - 1), -1), omega)
    return NormReport(tuple(_flat_terms(w, m, omega, "H1")) + ((f"bullet (1/r) d_r^{m - 1}", extra),))


def v1_norm_sq(w: SymFun, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    return NormReport(tuple(_flat_terms(w, m, omega, "V1", weight=lambda t, g: mul_r_pow(g, t - m))))


# -- C norm -----------------------------------------------------------------------
def c_norm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    ak = abs(k)
    parts: List[NormReport] = []
    prefixes: List[str] = []
    for ell in range(min(ak, m) + 1):
        g = mul_r_pow(w, -ell).scale(Fraction(ak) ** ell)
        parts.append(h1_norm_sq(g, m - ell, omega))
        prefixes.append(f"W l={ell}: ")
    for ell in range(1, (m - ak) // 2 + 1):
        parts.append(h1_norm_sq(_x_argument(w, k, ell), m - ak - 2 * ell, omega))
        prefixes.append(f"X l={ell}: ")
    report = NormReport.concat(*parts, prefixes=prefixes)
    if not report.is_finite:
        logger.debug("C^%d_(%d) norm of %s diverges at %s", m, k, w, report.first_divergent())
    return report


# -- supplementary forms ----------------------------------------------------------
def m2_branch_sq(w: SymFun, k: int, omega: MeridianDomain) -> NormReport:
    """The k-branch expression equivalent to |w|^2 in H^2_perp(k)."""
    terms = [("d_r^2 w", l21_norm_sq(d_dr_n(w, 2), omega))]
    ak = abs(k)
    if ak == 0:
        terms.append(("(1/r) d_r w", l21_norm_sq(mul_r_pow(d_dr(w), -1), omega)))
    elif ak == 1:
        terms.append(("d_r (1/r) w", l21_norm_sq(d_dr(mul_r_pow(w, -1)), omega)))
    else:
        terms.append(("d_r (k/r) w", l21_norm_sq(d_dr(mul_r_pow(w, -1).scale(ak)), omega)))
        terms.append(("(k/r)^2 w", l21_norm_sq(mul_r_pow(w, -2).scale(ak * ak), omega)))
    return NormReport(tuple(terms))


def kondratev_w_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    """Weights left of the derivatives: sum_l ||(|k|/r)^l d_r^(m-l) w||^2."""
    _check_order(m)
    ak = abs(k)
    return NormReport(
        tuple(
            (f"K l={ell}", l21_norm_sq(mul_r_pow(d_dr_n(w, m - ell), -ell).scale(Fraction(ak) ** ell), omega))
            for ell in range(m + 1)
        )
    )


def complex_norm(norm, f: CSymFun, *args) -> NormReport:
    """Norm of a complex coefficient: all operators are real, so |re|^2 + |im|^2 termwise."""
    return norm(f.re, *args).combine(norm(f.im, *args))


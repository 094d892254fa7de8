"""Axis traces, trace-based membership and the B^m_(k) norms.

Membership in H^m_(k) is decided from exact data only: the divergence flags
of the flat norms and the Taylor coefficients of w at r = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple
import logging

from .domain import MeridianDomain, l21_norm_sq
from .expr import SymFun, d_dr_n, mul_r_pow
from .sobolev import NormReport, _check_order, h1_bullet_norm_sq, h1_norm_sq, v1_norm_sq

__all__ = [
    "TraceProfile",
    "Membership",
    "trace_dr",
    "trace_profile",
    "membership",
    "b_norm_sq",
    "b_case",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceProfile:
    """Traces of d_r^j w on the axis for j = 0..m-2; None everywhere off the axis."""

    traces: Tuple[Optional[SymFun], ...]

    @property
    def defined(self) -> bool:
        return all(t is not None for t in self.traces)

    def nonzero(self) -> List[int]:
        return [j for j, t in enumerate(self.traces) if t is not None and not t.is_zero]

    def to_json(self) -> Dict[str, object]:
        return {str(j): (None if t is None else str(t)) for j, t in enumerate(self.traces)}


def trace_dr(w: SymFun, j: int, omega: MeridianDomain) -> Optional[SymFun]:
    """d_r^j w at r = 0 as a z-polynomial, or None when the domain misses the axis."""
    if j < 0:
        raise ValueError(f"trace order must be natural, got j={j}")
    if not omega.touches_axis():
        return None
    if w.min_r_exp is not None and w.min_r_exp < 0:
        raise ValueError(f"{w} has negative r-exponents; its axis traces are not defined")
    return w.radial_slice(j).scale(factorial(j))


def trace_profile(w: SymFun, m: int, omega: MeridianDomain) -> TraceProfile:
    return TraceProfile(tuple(trace_dr(w, j, omega) for j in range(max(m - 1, 0))))


@dataclass(frozen=True)
class Membership:
    in_space: bool
    space: str
    witness: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.in_space

    def to_json(self) -> Dict[str, object]:
        return {"in_space": self.in_space, "space": self.space, "witness": list(self.witness)}


def _divergent(report: NormReport, space: str) -> List[str]:
    return [f"{space}: {label} infinite" for label, v in report.terms if not v.is_finite]


def _nonzero_traces(w: SymFun, orders, omega: MeridianDomain, tag: str) -> List[str]:
    return [f"{tag} trace {j}" for j in orders if not trace_dr(w, j, omega).is_zero]


def membership(w: SymFun, k: int, m: int, omega: MeridianDomain) -> Membership:
    """Decide w in H^m_(k)(omega) through V^m_1, Z^k and T^m_1 / T^m_(1,bullet)."""
    _check_order(m)
    ak = abs(k)
    if not omega.touches_axis():
        witness = _divergent(h1_norm_sq(w, m, omega), "H^m_1")
        return Membership(not witness, "H^m_1", tuple(witness))
    if ak >= m:
        witness = _divergent(v1_norm_sq(w, m, omega), "V^m_1")
        return Membership(not witness, "V^m_1", tuple(witness))

    odd = (m - ak) % 2 == 1
    space = "Z^k & T^m_1" if odd else "Z^k & T^m_1,bullet"
    witness = _divergent(h1_norm_sq(w, m, omega), "H^m_1")
    if witness:
        return Membership(False, space, tuple(witness))
    witness += _nonzero_traces(w, range(ak), omega, "Z^k")
    if odd:
        witness += _nonzero_traces(w, (m - 2 * ell for ell in range(1, m // 2 + 1)), omega, "T^m_1")
    else:
        bullet = l21_norm_sq(mul_r_pow(d_dr_n(w, m - 1), -1), omega)
        if not bullet.is_finite:
            witness.append("bullet weight")
        witness += _nonzero_traces(
            w, (m - 1 - 2 * ell for ell in range(1, (m - 1) // 2 + 1)), omega, "T^m_1,bullet"
        )
    if witness:
        logger.debug("%s not in H^%d_(%d): %s", w, m, k, "; ".join(witness))
    return Membership(not witness, space, tuple(witness))


def b_case(k: int, m: int) -> str:
    if abs(k) >= m:
        return "weighted"
    return "flat" if (m - k) % 2 else "bullet"


def b_norm_sq(w: SymFun, k: int, m: int, omega: MeridianDomain) -> NormReport:
    _check_order(m)
    case = b_case(k, m)
    if case == "weighted":
        extra = l21_norm_sq(mul_r_pow(w, -m).scale(Fraction(k) ** m), omega)
        return NormReport(h1_norm_sq(w, m, omega).terms + (("(k/r)^m w", extra),))
    if case == "flat":
        return h1_norm_sq(w, m, omega)
    return h1_bullet_norm_sq(w, m, omega)

# -----------------------------------------------------------------------------
# src/axinorms/domain.py
"""Meridian domains and the exact weighted L^2_1 inner product (measure 2*pi*r dr dz).

Squared norms are :class:`ExtendedNorm` values kept in units of pi:

    value = pi * ( sum_e c_e * eps^e  +  b * ln(R/eps) )

On a concrete domain only ``e = 0`` occurs; on the annulus family
``MeridianDomain.family(R, I)`` the hole radius eps stays symbolic, which is
what the eps -> 0 classification works on. Divergence at the axis is decided
from the smallest surviving r-exponent of the integrand, never numerically.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union
import logging
import math

from .expr import SymFun

__all__ = [
    "NormKind",
    "ExtendedNorm",
    "LeadingTerm",
    "MeridianDomain",
    "parse_domain",
    "l21_norm_sq",
    "l21_inner",
]

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, str]


class NormKind(str, Enum):
    FINITE = "finite"
    LOG_DIVERGENT = "log-div"
    INFINITE = "+inf"


@dataclass(frozen=True)
class LeadingTerm:
    """Dominant eps -> 0 behaviour of a family norm: 'power', 'log' or 'constant'."""

    kind: str
    exponent: Optional[int]
    coeff: Fraction


def _frac(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class ExtendedNorm:
    kind: NormKind = NormKind.FINITE
    powers: Tuple[Tuple[int, Fraction], ...] = ()
    log_coeff: Fraction = Fraction(0)
    log_ratio: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.kind is not NormKind.FINITE:
            object.__setattr__(self, "powers", ())
            object.__setattr__(self, "log_coeff", Fraction(0))
            object.__setattr__(self, "log_ratio", None)
            return
        acc: Dict[int, Fraction] = {}
        for e, c in self.powers:
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "powers", tuple(sorted((e, c) for e, c in acc.items() if c != 0)))
        object.__setattr__(self, "log_coeff", Fraction(self.log_coeff))
        if self.log_coeff == 0:
            object.__setattr__(self, "log_ratio", None)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def finite(cls, pi_multiple: Number = 0) -> "ExtendedNorm":
        return cls(NormKind.FINITE, ((0, Fraction(pi_multiple)),))

    @classmethod
    def infinite(cls) -> "ExtendedNorm":
        return cls(NormKind.INFINITE)

    @classmethod
    def log_divergent(cls) -> "ExtendedNorm":
        return cls(NormKind.LOG_DIVERGENT)

    # -- inspection -----------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.kind is NormKind.FINITE

    @property
    def is_symbolic(self) -> bool:
        return any(e != 0 for e, _ in self.powers) or (self.log_coeff != 0 and self.log_ratio is None)

    @property
    def rational(self) -> Fraction:
        """Coefficient of pi * eps^0."""
        return dict(self.powers).get(0, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return self.is_finite and not self.powers and self.log_coeff == 0

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: "ExtendedNorm") -> "ExtendedNorm":
        if not isinstance(other, ExtendedNorm):
            return NotImplemented
        if NormKind.INFINITE in (self.kind, other.kind):
            return ExtendedNorm.infinite()
        if NormKind.LOG_DIVERGENT in (self.kind, other.kind):
            return ExtendedNorm.log_divergent()
        ratio = self.log_ratio if self.log_coeff else other.log_ratio
        if self.log_coeff and other.log_coeff and self.log_ratio != other.log_ratio:
            raise ValueError("cannot add norms computed on different domains")
        return ExtendedNorm(
            NormKind.FINITE, self.powers + other.powers, self.log_coeff + other.log_coeff, ratio
        )

    def __radd__(self, other: object) -> "ExtendedNorm":
        if other == 0:
            return self
        return NotImplemented

    def scale(self, c: Union[int, Fraction]) -> "ExtendedNorm":
        c = Fraction(c)
        if not self.is_finite:
            return self if c != 0 else ExtendedNorm.finite(0)
        return ExtendedNorm(
            NormKind.FINITE, tuple((e, c * v) for e, v in self.powers), c * self.log_coeff, self.log_ratio
        )

    # -- eps family -------------------------------------------------------------
    def substitute(self, eps: Number, r_max: Number) -> "ExtendedNorm":
        """Evaluate a family norm at a concrete hole radius eps > 0."""
        eps, r_max = Fraction(eps), Fraction(r_max)
        if not self.is_finite:
            return self
        if eps <= 0:
            raise ValueError("substitute() needs eps > 0")
        value = sum((c * eps**e for e, c in self.powers), Fraction(0))
        return ExtendedNorm(NormKind.FINITE, ((0, value),), self.log_coeff, r_max / eps)

    def blows_up(self) -> bool:
        """True when the eps-form is unbounded as eps -> 0 (negative powers or a log)."""
        if not self.is_finite:
            return True
        return self.log_coeff != 0 or any(e < 0 for e, _ in self.powers)

    def leading_term(self) -> LeadingTerm:
        negative = [(e, c) for e, c in self.powers if e < 0]
        if negative:
            e, c = negative[0]
            return LeadingTerm("power", e, c)
        if self.log_coeff:
            return LeadingTerm("log", None, self.log_coeff)
        return LeadingTerm("constant", 0, self.rational)

    # -- rendering --------------------------------------------------------------
    def to_float(self) -> float:
        if not self.is_finite:
            return math.inf
        if self.is_symbolic:
            raise ValueError("eps-symbolic norm: substitute() a hole radius before rendering")
        log_part = float(self.log_coeff) * math.log(self.log_ratio) if self.log_coeff else 0.0
        return math.pi * (float(self.rational) + log_part)

    def exact_str(self) -> str:
        if not self.is_finite:
            return self.kind.value
        parts = []
        for e, c in self.powers:
            parts.append(_frac(c) if e == 0 else f"{_frac(c)}*eps^{e}")
        if self.log_coeff:
            arg = "R/eps" if self.log_ratio is None else _frac(self.log_ratio)
            parts.append(f"{_frac(self.log_coeff)}*ln({arg})")
        if not parts:
            return "0"
        if len(parts) == 1 and not self.log_coeff and not self.is_symbolic:
            return f"{parts[0]}*pi"
        return "pi*(" + " + ".join(parts).replace("+ -", "- ") + ")"

    def to_json(self) -> Union[str, Dict[str, object]]:
        if not self.is_finite:
            return self.kind.value
        out: Dict[str, object] = {"exact": self.exact_str()}
        if not self.is_symbolic:
            out["float"] = self.to_float()
        return out

    def __str__(self) -> str:
        return self.exact_str()


def _to_frac(x: Number) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


@dataclass(frozen=True)
class MeridianDomain:
    """(eps, R) x (z0, z1), or the interval (eps, R) when ``z_interval`` is None.

    ``r_min`` None stands for the annulus family with symbolic eps > 0.
    """

    r_min: Optional[Fraction]
    r_max: Fraction
    z_interval: Optional[Tuple[Fraction, Fraction]] = None

    def __post_init__(self) -> None:
        r_max = _to_frac(self.r_max)
        object.__setattr__(self, "r_max", r_max)
        if self.r_min is not None:
            r_min = _to_frac(self.r_min)
            if r_min < 0 or r_min >= r_max:
                raise ValueError(f"need 0 <= eps < R, got eps={r_min}, R={r_max}")
            object.__setattr__(self, "r_min", r_min)
        elif r_max <= 0:
            raise ValueError(f"need R > 0, got R={r_max}")
        if self.z_interval is not None:
            z0, z1 = (_to_frac(v) for v in self.z_interval)
            if z0 >= z1:
                raise ValueError(f"need z0 < z1, got ({z0}, {z1})")
            object.__setattr__(self, "z_interval", (z0, z1))

    @classmethod
    def rect(cls, eps: Number, r_max: Number, z0: Number, z1: Number) -> "MeridianDomain":
        return cls(_to_frac(eps), _to_frac(r_max), (_to_frac(z0), _to_frac(z1)))

    @classmethod
    def interval(cls, eps: Number, r_max: Number) -> "MeridianDomain":
        return cls(_to_frac(eps), _to_frac(r_max), None)

    @classmethod
    def family(
        cls, r_max: Number, z_interval: Optional[Tuple[Number, Number]] = (0, 1)
    ) -> "MeridianDomain":
        z = None if z_interval is None else (_to_frac(z_interval[0]), _to_frac(z_interval[1]))
        return cls(None, _to_frac(r_max), z)

    def at(self, eps: Number) -> "MeridianDomain":
        return MeridianDomain(_to_frac(eps), self.r_max, self.z_interval)

    @property
    def is_family(self) -> bool:
        return self.r_min is None

    @property
    def is_3d(self) -> bool:
        return self.z_interval is not None

    def touches_axis(self) -> bool:
        return self.r_min == 0

    @property
    def z_length(self) -> Fraction:
        if self.z_interval is None:
            return Fraction(1)
        return self.z_interval[1] - self.z_interval[0]

    def z_moment(self, q: int) -> Fraction:
        """Exact integral of z^q over the z-interval."""
        assert self.z_interval is not None
        z0, z1 = self.z_interval
        return (z1 ** (q + 1) - z0 ** (q + 1)) / (q + 1)

    def __str__(self) -> str:
        if self.is_family:
            if self.z_interval is None:
                return f"family:{self.r_max}"
            return f"family:{self.r_max},{self.z_interval[0]},{self.z_interval[1]}"
        if self.z_interval is None:
            return f"interval:{self.r_min},{self.r_max}"
        return f"rect:{self.r_min},{self.r_max},{self.z_interval[0]},{self.z_interval[1]}"


def parse_domain(text: str) -> MeridianDomain:
    """Parse ``rect:eps,R,z0,z1``, ``interval:eps,R`` or ``family:R[,z0,z1]``."""
    kind, _, rest = text.strip().partition(":")
    try:
        values = [Fraction(v.strip()) for v in rest.split(",")] if rest.strip() else []
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad number in domain literal {text!r}: {exc}") from None
    if kind == "rect" and len(values) == 4:
        return MeridianDomain.rect(*values)
    if kind == "interval" and len(values) == 2:
        return MeridianDomain.interval(*values)
    if kind == "family" and len(values) in (1, 3):
        return MeridianDomain.family(values[0], None if len(values) == 1 else (values[1], values[2]))
    raise ValueError(
        f"bad domain literal {text!r}; expected rect:eps,R,z0,z1 | interval:eps,R | family:R[,z0,z1]"
    )


def _radial_profile(h: SymFun, omega: MeridianDomain) -> Dict[int, Fraction]:
    """Integrate z out of h * r; returns {r-exponent: coefficient}."""
    acc: Dict[int, Fraction] = {}
    for t in h:
        if omega.is_3d:
            c = t.coeff * omega.z_moment(t.z_exp)
        elif t.z_exp:
            raise ValueError(f"z-dependent integrand on the interval domain {omega}")
        else:
            c = t.coeff
        acc[t.r_exp + 1] = acc.get(t.r_exp + 1, Fraction(0)) + c
    return {p: c for p, c in acc.items() if c != 0}


def _integrate(h: SymFun, omega: MeridianDomain) -> ExtendedNorm:
    profile = _radial_profile(h, omega)
    if not profile:
        return ExtendedNorm.finite(0)
    if omega.touches_axis():
        p_min = min(profile)
        if p_min <= -1:
            logger.debug("integrand r^%d is not integrable at the axis of %s", p_min, omega)
            return ExtendedNorm.log_divergent() if p_min == -1 else ExtendedNorm.infinite()
    R, eps = omega.r_max, omega.r_min
    powers: Dict[int, Fraction] = {0: Fraction(0)}
    log_coeff = Fraction(0)
    for p, c in profile.items():
        if p == -1:
            log_coeff += c
        elif eps is None:
            powers[0] += c * R ** (p + 1) / (p + 1)
            powers[p + 1] = powers.get(p + 1, Fraction(0)) - c / (p + 1)
        else:
            powers[0] += c * (R ** (p + 1) - eps ** (p + 1)) / (p + 1)
    # 2*pi in front of every integral
    ratio = None if eps is None else R / eps if log_coeff else None
    return ExtendedNorm(
        NormKind.FINITE, tuple((e, 2 * c) for e, c in powers.items()), 2 * log_coeff, ratio
    )


def l21_norm_sq(f: SymFun, omega: MeridianDomain) -> ExtendedNorm:
    """2*pi * integral of |f|^2 r dr dz over the meridian domain."""
    return _integrate(f * f, omega)


def l21_inner(f: SymFun, g: SymFun, omega: MeridianDomain) -> ExtendedNorm:
    """Bilinear L^2_1 pairing; may be negative, divergent when the product is."""
    return _integrate(f * g, omega)

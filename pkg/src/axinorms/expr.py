# -----------------------------------------------------------------------------
# src/axinorms/expr.py
"""Exact finite sums of monomials ``c * r^a * z^b`` and their text grammar.

Everything the norm code touches is a :class:`SymFun`: coefficients are
``fractions.Fraction``, ``a`` is any integer (negative powers arise from the
weight operators) and ``b`` is a natural number.

Grammar accepted by :func:`parse` (whitespace insignificant)::

    expr  := ("+"|"-")? term (("+"|"-") term)*
    term  := coeff? ("*"? atom)*
    atom  := "r" ("^" int)? | "z" ("^" nat)?
    coeff := rational | decimal

User input may not carry negative r-exponents; they only appear internally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Tuple, Union

import numpy as np

__all__ = [
    "ExprSyntaxError",
    "Monomial",
    "SymFun",
    "GaussianRational",
    "CSymFun",
    "parse",
    "const",
    "r_pow",
    "d_dr",
    "d_dz",
    "d_dr_n",
    "d_dz_n",
    "mul_r_pow",
    "apply_r_dr",
    "I",
]

Rational = Union[int, Fraction]
Key = Tuple[int, int]


class ExprSyntaxError(ValueError):
    """Parse failure with the 0-based position of the offending character."""

    def __init__(self, message: str, text: str, position: int):
        self.text, self.position = text, position
        caret = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {caret}")


@dataclass(frozen=True)
class Monomial:
    coeff: Fraction
    r_exp: int
    z_exp: int

    def __post_init__(self) -> None:
        if self.z_exp < 0:
            raise ValueError(f"z-exponent must be natural, got {self.z_exp}")
        object.__setattr__(self, "coeff", Fraction(self.coeff))

    @property
    def key(self) -> Key:
        return (self.r_exp, self.z_exp)


def _canonical(items: Iterable[Tuple[Key, Fraction]]) -> Tuple[Monomial, ...]:
    acc: Dict[Key, Fraction] = {}
    for key, c in items:
        acc[key] = acc.get(key, Fraction(0)) + c
    return tuple(Monomial(c, a, b) for (a, b), c in sorted(acc.items()) if c != 0)


@dataclass(frozen=True)
class SymFun:
    """Canonical monomial sum: sorted on (r_exp, z_exp), no zero coefficients."""

    terms: Tuple[Monomial, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _canonical((t.key, t.coeff) for t in self.terms))

    @classmethod
    def from_map(cls, coeffs: Mapping[Key, Rational]) -> "SymFun":
        return cls(tuple(Monomial(Fraction(c), a, b) for (a, b), c in coeffs.items()))

    # -- inspection ---------------------------------------------------------
    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficients(self) -> Dict[Key, Fraction]:
        return {t.key: t.coeff for t in self.terms}

    @property
    def min_r_exp(self) -> int | None:
        return self.terms[0].r_exp if self.terms else None

    @property
    def max_z_exp(self) -> int:
        return max((t.z_exp for t in self.terms), default=0)

    def radial_slice(self, r_exp: int) -> "SymFun":
        """z-polynomial collecting the terms with the given r-exponent."""
        return SymFun(tuple(Monomial(t.coeff, 0, t.z_exp) for t in self.terms if t.r_exp == r_exp))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: object) -> "SymFun":
        if isinstance(other, (int, Fraction)):
            other = const(other)
        if not isinstance(other, SymFun):
            return NotImplemented
        return SymFun(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "SymFun":
        return SymFun(tuple(Monomial(-t.coeff, t.r_exp, t.z_exp) for t in self.terms))

    def __sub__(self, other: object) -> "SymFun":
        if isinstance(other, (int, Fraction)):
            other = const(other)
        if not isinstance(other, SymFun):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "SymFun":
        return (-self) + other

    def scale(self, c: Rational) -> "SymFun":
        c = Fraction(c)
        return SymFun(tuple(Monomial(c * t.coeff, t.r_exp, t.z_exp) for t in self.terms))

    def __mul__(self, other: object) -> "SymFun":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SymFun):
            return NotImplemented
        return SymFun._from_pairs(
            ((s.r_exp + t.r_exp, s.z_exp + t.z_exp), s.coeff * t.coeff)
            for s in self.terms
            for t in other.terms
        )

    __rmul__ = __mul__

    @classmethod
    def _from_pairs(cls, items: Iterable[Tuple[Key, Fraction]]) -> "SymFun":
        fun = cls.__new__(cls)
        object.__setattr__(fun, "terms", _canonical(items))
        return fun

    # -- evaluation / rendering ---------------------------------------------
    def evaluate(self, r, z=0.0):
        """Float evaluation, vectorised over numpy arrays."""
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        out = np.zeros(np.broadcast(r, z).shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            for t in self.terms:
                out = out + float(t.coeff) * r**t.r_exp * z**t.z_exp
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, t in enumerate(self.terms):
            atoms = []
            if t.r_exp:
                atoms.append("r" if t.r_exp == 1 else f"r^{t.r_exp}")
            if t.z_exp:
                atoms.append("z" if t.z_exp == 1 else f"z^{t.z_exp}")
            mag = abs(t.coeff)
            body = "*".join(([] if mag == 1 and atoms else [str(mag)]) + atoms)
            if i == 0:
                parts.append("-" + body if t.coeff < 0 else body)
            else:
                parts.append(f" {'-' if t.coeff < 0 else '+'} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"SymFun({str(self)!r})"


def const(c: Rational) -> SymFun:
    return SymFun((Monomial(Fraction(c), 0, 0),))


def r_pow(a: int, c: Rational = 1) -> SymFun:
    return SymFun((Monomial(Fraction(c), a, 0),))


# -- operators -----------------------------------------------------------------
def d_dr(f: SymFun) -> SymFun:
    return SymFun._from_pairs(((t.r_exp - 1, t.z_exp), t.coeff * t.r_exp) for t in f.terms)


def d_dz(f: SymFun) -> SymFun:
    return SymFun._from_pairs(((t.r_exp, t.z_exp - 1), t.coeff * t.z_exp) for t in f.terms if t.z_exp)


def _repeat(op: Callable[[SymFun], SymFun], f: SymFun, n: int) -> SymFun:
    if n < 0:
        raise ValueError(f"derivative order must be natural, got {n}")
    for _ in range(n):
        if f.is_zero:
            break
        f = op(f)
    return f


def d_dr_n(f: SymFun, n: int) -> SymFun:
    return _repeat(d_dr, f, n)


def d_dz_n(f: SymFun, n: int) -> SymFun:
    return _repeat(d_dz, f, n)


def mul_r_pow(f: SymFun, p: int) -> SymFun:
    """Multiply by r^p; p = 0 is the identity (convention (|k|/r)^0 = 1)."""
    if p == 0:
        return f
    return SymFun._from_pairs(((t.r_exp + p, t.z_exp), t.coeff) for t in f.terms)


def apply_r_dr(f: SymFun, ell: int) -> SymFun:
    """ell-fold application of g -> (1/r) dg/dr."""
    return _repeat(lambda g: mul_r_pow(d_dr(g), -1), f, ell)


# -- complex (Gaussian rational) combinations ----------------------------------
@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


I = GaussianRational(0, 1)


@dataclass(frozen=True)
class CSymFun:
    """Complex monomial sum ``re + i*im`` with both parts exact."""

    re: SymFun = field(default_factory=SymFun)
    im: SymFun = field(default_factory=SymFun)

    @classmethod
    def of(cls, f: SymFun) -> "CSymFun":
        return cls(f, SymFun())

    @property
    def is_zero(self) -> bool:
        return self.re.is_zero and self.im.is_zero

    @property
    def is_real(self) -> bool:
        return self.im.is_zero

    def __add__(self, other: "CSymFun") -> "CSymFun":
        return CSymFun(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CSymFun") -> "CSymFun":
        return CSymFun(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CSymFun":
        return CSymFun(-self.re, -self.im)

    def scale(self, c: Union[GaussianRational, Rational]) -> "CSymFun":
        if not isinstance(c, GaussianRational):
            return CSymFun(self.re.scale(c), self.im.scale(c))
        return CSymFun(
            self.re.scale(c.re) - self.im.scale(c.im), self.re.scale(c.im) + self.im.scale(c.re)
        )

    def times_i(self) -> "CSymFun":
        return CSymFun(-self.im, self.re)

    def conjugate(self) -> "CSymFun":
        return CSymFun(self.re, -self.im)

    def apply(self, op: Callable[[SymFun], SymFun]) -> "CSymFun":
        """Apply a real-linear operator to both parts."""
        return CSymFun(op(self.re), op(self.im))

    def evaluate(self, r, z=0.0):
        return self.re.evaluate(r, z) + 1j * self.im.evaluate(r, z)

    def __str__(self) -> str:
        if self.im.is_zero:
            return str(self.re)
        return f"({self.re}) + i*({self.im})"


# -- parser --------------------------------------------------------------------
class _Parser:
    def __init__(self, text: str):
        self.text, self.pos = text, 0

    def error(self, message: str, position: int | None = None) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.text, self.pos if position is None else position)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return self.text[start:self.pos]

    def parse(self) -> SymFun:
        items: list[Tuple[Key, Fraction]] = []
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        while True:
            key, c = self.term()
            items.append((key, sign * c))
            nxt = self.peek()
            if nxt == "":
                break
            if nxt not in ("+", "-"):
                raise self.error(f"unexpected character {nxt!r}")
            sign = -1 if nxt == "-" else 1
            self.pos += 1
        return SymFun._from_pairs(items)

    def term(self) -> Tuple[Key, Fraction]:
        self.peek()
        start = self.pos
        coeff = Fraction(1)
        seen = False
        if self.peek().isdigit() or self.peek() == ".":
            coeff, seen = self.coeff(), True
        a = b = 0
        while True:
            nxt = self.peek()
            if nxt == "*":
                self.pos += 1
                nxt = self.peek()
                if nxt not in ("r", "z"):
                    raise self.error("expected 'r' or 'z' after '*'")
            if nxt not in ("r", "z"):
                break
            self.pos += 1
            exp = self.exponent(nxt) if self.peek() == "^" else 1
            if nxt == "r":
                a += exp
            else:
                b += exp
            seen = True
        if not seen:
            raise self.error("expected a term", start)
        return (a, b), coeff

    def coeff(self) -> Fraction:
        start = self.pos
        whole = self.digits()
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            frac = self.digits()
            if not whole and not frac:
                raise self.error("malformed decimal", start)
            return Fraction(f"{whole or '0'}.{frac or '0'}")
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            den = self.digits()
            if not den:
                raise self.error("missing denominator", self.pos)
            if int(den) == 0:
                raise self.error("zero denominator", self.pos - len(den))
            return Fraction(int(whole), int(den))
        return Fraction(int(whole))

    def exponent(self, var: str) -> int:
        self.pos += 1  # '^'
        self.peek()
        start = self.pos
        negative = False
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            negative = self.text[self.pos] == "-"
            self.pos += 1
        digits = self.digits()
        if not digits:
            raise self.error("expected an integer exponent")
        if self.pos < len(self.text) and self.text[self.pos] in "./":
            raise self.error("non-integer exponent", start)
        if negative and var == "r":
            raise self.error("negative r-exponent is not allowed in input", start)
        if negative and var == "z":
            raise self.error("negative z-exponent", start)
        return int(digits)


def parse(text: str) -> SymFun:
    """Parse an expression into its canonical :class:`SymFun`."""
    if not text.strip():
        raise ExprSyntaxError("empty expression", text, 0)
    return _Parser(text).parse()

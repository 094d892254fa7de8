"""Tensor Gauss-Legendre quadrature on meridian domains (float cross-check only)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union
import math

import numpy as np

from .domain import MeridianDomain, l21_norm_sq
from .expr import SymFun

__all__ = [
    "QuadratureRule",
    "rule",
    "integrate",
    "integrate_sq",
    "relative_error",
    "required_order",
]

Integrand = Union[SymFun, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@lru_cache(maxsize=64)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _mapped(a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = _legendre(order)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Flattened nodes with the measure 2*pi*r folded into the weights."""

    r: np.ndarray
    z: np.ndarray
    weights: np.ndarray
    order: int

    def __len__(self) -> int:
        return int(self.weights.size)


def rule(omega: MeridianDomain, order: int) -> QuadratureRule:
    if omega.is_family:
        raise ValueError(f"cannot build nodes on the symbolic family {omega}; use .at(eps)")
    r, wr = _mapped(float(omega.r_min), float(omega.r_max), order)
    wr = 2.0 * math.pi * r * wr
    if omega.z_interval is None:
        return QuadratureRule(r, np.zeros_like(r), wr, order)
    z0, z1 = omega.z_interval
    z, wz = _mapped(float(z0), float(z1), order)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    return QuadratureRule(rr.ravel(), zz.ravel(), np.outer(wr, wz).ravel(), order)


def _sample(f: Integrand, q: QuadratureRule) -> np.ndarray:
    if isinstance(f, SymFun):
        values = f.evaluate(q.r, q.z)
    else:
        values = np.asarray(f(q.r, q.z))
    values = np.broadcast_to(values, q.weights.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(
            f"non-finite integrand value {values[i]!r} at node r={q.r[i]:.17g}, z={q.z[i]:.17g}"
        )
    return values


def integrate(f: Integrand, omega: MeridianDomain, order: int) -> float:
    """Approximate 2*pi * integral of f r dr dz with ``order`` nodes per axis."""
    q = rule(omega, order)
    return float(np.dot(_sample(f, q), q.weights))


def integrate_sq(f: SymFun, omega: MeridianDomain, order: int) -> float:
    """Float counterpart of :func:`axinorms.domain.l21_norm_sq`."""
    return integrate(lambda r, z: f.evaluate(r, z) ** 2, omega, order)


def required_order(f: SymFun) -> int:
    """Smallest per-axis order integrating |f|^2 r exactly; f must be a polynomial."""
    if f.is_zero:
        return 1
    if f.min_r_exp is not None and f.min_r_exp < 0:
        raise ValueError(f"{f} is not a polynomial; Gauss-Legendre is not exact for it")
    r_degree = 2 * max(t.r_exp for t in f) + 1
    z_degree = 2 * f.max_z_exp
    return max(r_degree, z_degree) // 2 + 1


def relative_error(f: SymFun, omega: MeridianDomain, order: Optional[int] = None) -> float:
    """|quadrature - closed form| / |closed form| for ||f||^2 on a concrete domain."""
    exact = l21_norm_sq(f, omega).to_float()
    approx = integrate_sq(f, omega, order or required_order(f))
    if exact == 0.0:
        return abs(approx)
    return abs(approx - exact) / abs(exact)

"""Finite angular Fourier sums u = sum_k u^k(r, z) e^{ik theta}.

The projector onto mode k is coefficient selection; ``project_sampled``
recovers a coefficient from samples on a uniform theta-grid by the trapezoid
rule, which is exact for trigonometric polynomials of degree below M/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, Mapping, Optional, Tuple, Union
import logging
import warnings

import numpy as np

from .domain import ExtendedNorm, MeridianDomain, l21_inner, l21_norm_sq
from .expr import CSymFun, Monomial, SymFun, d_dr, mul_r_pow, parse
from .quad import rule
from .sobolev import hk_norm_sq

__all__ = [
    "AliasingWarning",
    "AxiFun",
    "ThetaSamples",
    "project",
    "project_sampled",
    "l2_inner",
    "l2_inner_sampled",
    "parseval_l2",
    "parseval_hm",
    "zeta_derivatives",
    "default_grid_size",
]

logger = logging.getLogger(__name__)

Key = Tuple[int, int]


class AliasingWarning(UserWarning):
    """The theta-grid is too coarse to separate the requested modes."""


@dataclass(frozen=True)
class AxiFun:
    """Sorted ``(k, u^k)`` pairs; modes with a zero coefficient are not stored."""

    modes: Tuple[Tuple[int, SymFun], ...] = ()

    def __post_init__(self) -> None:
        acc: Dict[int, SymFun] = {}
        for k, f in self.modes:
            acc[int(k)] = acc.get(int(k), SymFun()) + f
        object.__setattr__(self, "modes", tuple(sorted((k, f) for k, f in acc.items() if not f.is_zero)))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, Union[SymFun, str]]) -> "AxiFun":
        return cls(tuple((int(k), parse(f) if isinstance(f, str) else f) for k, f in mapping.items()))

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "AxiFun":
        modes = data.get("modes") if isinstance(data, Mapping) else None
        if not isinstance(modes, Mapping):
            raise ValueError('expected {"modes": {"k": "<expr>", ...}}')
        return cls.from_dict({int(k): str(v) for k, v in modes.items()})

    def to_json(self) -> Dict[str, Dict[str, str]]:
        return {"modes": {str(k): str(f) for k, f in self.modes}}

    def __iter__(self) -> Iterator[Tuple[int, SymFun]]:
        return iter(self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def coefficient(self, k: int) -> SymFun:
        return dict(self.modes).get(k, SymFun())

    @property
    def active_modes(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.modes)

    @property
    def max_mode(self) -> int:
        return max((abs(k) for k, _ in self.modes), default=0)

    @property
    def is_real(self) -> bool:
        """Real-valued on the 3D domain: u^{-k} = u^k for rational coefficients."""
        return all(self.coefficient(-k) == f for k, f in self.modes)

    def __add__(self, other: "AxiFun") -> "AxiFun":
        return AxiFun(self.modes + other.modes)

    def scale(self, c) -> "AxiFun":
        return AxiFun(tuple((k, f.scale(c)) for k, f in self.modes))

    def evaluate(self, r, theta, z=0.0):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(np.asarray(r, dtype=float), theta, np.asarray(z, dtype=float)).shape, complex)
        for k, f in self.modes:
            out = out + f.evaluate(r, z) * np.exp(1j * k * theta)
        return out


def project(u: AxiFun, k: int) -> AxiFun:
    """F^k: keep mode k only."""
    return AxiFun(tuple((j, f) for j, f in u.modes if j == k))


def default_grid_size(max_mode: int) -> int:
    return 4 * (abs(max_mode) + 1)


@dataclass(frozen=True, eq=False)
class ThetaSamples:
    """Values of theta -> u(., theta) on theta_j = 2*pi*j/M in a monomial basis.

    ``values[j, b]`` is the complex coefficient of ``basis[b]`` at theta_j.
    """

    basis: Tuple[Key, ...]
    values: np.ndarray
    max_mode: Optional[int] = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[1] != len(self.basis):
            raise ValueError(f"values must have shape (M, {len(self.basis)}), got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def grid_size(self) -> int:
        return int(self.values.shape[0])

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.grid_size) / self.grid_size

    @classmethod
    def from_axifun(cls, u: AxiFun, grid_size: Optional[int] = None) -> "ThetaSamples":
        M = grid_size or default_grid_size(u.max_mode)
        basis = tuple(sorted({t.key for _, f in u for t in f}))
        index = {key: b for b, key in enumerate(basis)}
        thetas = 2.0 * np.pi * np.arange(M) / M
        values = np.zeros((M, len(basis)), dtype=complex)
        for k, f in u:
            phase = np.exp(1j * k * thetas)
            for t in f:
                values[:, index[t.key]] += float(t.coeff) * phase
        return cls(basis, values, u.max_mode)

    @classmethod
    def from_callable(
        cls, fn: Callable[[float], Mapping[Key, complex]], grid_size: int, max_mode: Optional[int] = None
    ) -> "ThetaSamples":
        """Sample ``fn(theta) -> {(r_exp, z_exp): value}`` on the grid."""
        thetas = 2.0 * np.pi * np.arange(grid_size) / grid_size
        rows = [dict(fn(float(th))) for th in thetas]
        basis = tuple(sorted({key for row in rows for key in row}))
        values = np.array([[row.get(key, 0.0) for key in basis] for row in rows], dtype=complex)
        return cls(basis, values.reshape(grid_size, len(basis)), max_mode)


def _exact(x: float, max_denominator: int) -> Fraction:
    return Fraction(x).limit_denominator(max_denominator)


def project_sampled(samples: ThetaSamples, k: int, max_denominator: int = 10**6) -> CSymFun:
    """Trapezoid-rule coefficient u^k, rounded back to rationals."""
    M = samples.grid_size
    limit = max(abs(k), samples.max_mode or 0)
    if M <= 2 * limit:
        warnings.warn(
            f"theta-grid of size {M} aliases mode {limit}; need M > {2 * limit}",
            AliasingWarning,
            stacklevel=2,
        )
    logger.debug("projecting mode %d from %d theta samples on %d monomials", k, M, len(samples.basis))
    phase = np.exp(-1j * k * samples.thetas)
    coeffs = phase @ samples.values / M
    re, im = [], []
    for (a, b), c in zip(samples.basis, coeffs):
        re.append(Monomial(_exact(float(c.real), max_denominator), a, b))
        im.append(Monomial(_exact(float(c.imag), max_denominator), a, b))
    return CSymFun(SymFun(tuple(re)), SymFun(tuple(im)))


def l2_inner(u: AxiFun, v: AxiFun, omega: MeridianDomain) -> ExtendedNorm:
    """Exact 3D inner product from the coefficients; distinct modes are orthogonal."""
    total = ExtendedNorm.finite(0)
    for k, f in u:
        g = v.coefficient(k)
        if not g.is_zero:
            total = total + l21_inner(f, g, omega)
    return total


def l2_inner_sampled(u: AxiFun, v: AxiFun, omega: MeridianDomain, grid_size: int, order: int) -> complex:
    """Theta-trapezoid times Gauss-Legendre approximation of the 3D inner product."""
    q = rule(omega, order)
    total = 0j
    for theta in 2.0 * np.pi * np.arange(grid_size) / grid_size:
        total += np.dot(u.evaluate(q.r, theta, q.z) * np.conj(v.evaluate(q.r, theta, q.z)), q.weights)
    return complex(total / grid_size)


def parseval_l2(u: AxiFun, omega: MeridianDomain) -> Tuple[ExtendedNorm, ExtendedNorm]:
    """(sum of mode norms, norm reassembled from the projectors)."""
    lhs = sum((l21_norm_sq(f, omega) for _, f in u), ExtendedNorm.finite(0))
    rhs = ExtendedNorm.finite(0)
    for k in u.active_modes:
        p = project(u, k)
        rhs = rhs + l2_inner(p, p, omega)
    return lhs, rhs


def parseval_hm(u: AxiFun, m: int, omega: MeridianDomain) -> Tuple[ExtendedNorm, ExtendedNorm]:
    """The H^m norm of a finite sum as the sum of its H^m_(k) mode norms, two ways."""
    lhs = sum((hk_norm_sq(f, k, m, omega).total for k, f in u), ExtendedNorm.finite(0))
    rhs = ExtendedNorm.finite(0)
    for k in u.active_modes:
        rhs = rhs + hk_norm_sq(project(u, k).coefficient(k), k, m, omega).total
    return lhs, rhs


def zeta_derivatives(u: AxiFun) -> Tuple[AxiFun, AxiFun]:
    """Mode-level (d_r + k/r) into k-1 and (d_r - k/r) into k+1, unscaled."""
    lowered, raised = [], []
    for k, f in u:
        dw, kw = d_dr(f), mul_r_pow(f, -1).scale(k)
        lowered.append((k - 1, dw + kw))
        raised.append((k + 1, dw - kw))
    return AxiFun(tuple(lowered)), AxiFun(tuple(raised))

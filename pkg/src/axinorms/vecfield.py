"""Two-component vector fields in polar components (u_r, u_theta).

Mode k of the field couples to the scalar modes k+1 and k-1 through the
combinations w_r + i w_theta and w_r - i w_theta.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .analysis import EnsembleConfig, SweepResult, _domain, _row, draw_ensemble, norm_ratio, run_cells
from .domain import ExtendedNorm, MeridianDomain
from .expr import CSymFun, SymFun, mul_r_pow, parse
from .sobolev import NormReport, c_norm_sq, complex_norm, h1_norm_sq, hk_norm_sq

__all__ = [
    "VecCoefficient",
    "VecAxiFun",
    "vec_hk_norm_sq",
    "vec_c_norm_sq",
    "cartesian_link",
    "vec_parseval",
    "vec_equivalence_sweep",
]

HALF = Fraction(1, 2)
Component = Union[SymFun, CSymFun, str]


def _component(value: Component) -> CSymFun:
    if isinstance(value, str):
        return CSymFun.of(parse(value))
    if isinstance(value, SymFun):
        return CSymFun.of(value)
    return value


def _component_from_json(value: object) -> CSymFun:
    if isinstance(value, str):
        return CSymFun.of(parse(value))
    if isinstance(value, Mapping):
        return CSymFun(parse(str(value.get("re", "0"))), parse(str(value.get("im", "0"))))
    raise ValueError(f"expected an expression or {{'re': ..., 'im': ...}}, got {value!r}")


def _component_to_json(f: CSymFun) -> object:
    return str(f.re) if f.is_real else {"re": str(f.re), "im": str(f.im)}


@dataclass(frozen=True)
class VecCoefficient:
    """Radial and angular Fourier coefficients of one mode; components may be complex."""

    w_r: CSymFun
    w_theta: CSymFun

    def __init__(self, w_r: Component = "0", w_theta: Component = "0"):
        object.__setattr__(self, "w_r", _component(w_r))
        object.__setattr__(self, "w_theta", _component(w_theta))

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "VecCoefficient":
        if not isinstance(data, Mapping):
            raise ValueError(f"vector coefficient must be an object with w_r and w_theta, got {data!r}")
        try:
            return cls(_component_from_json(data["w_r"]), _component_from_json(data["w_theta"]))
        except KeyError as exc:
            raise ValueError(f"vector coefficient is missing {exc.args[0]!r}") from None

    def to_json(self) -> Dict[str, object]:
        return {"w_r": _component_to_json(self.w_r), "w_theta": _component_to_json(self.w_theta)}

    @property
    def is_zero(self) -> bool:
        return self.w_r.is_zero and self.w_theta.is_zero

    def __add__(self, other: "VecCoefficient") -> "VecCoefficient":
        return VecCoefficient(self.w_r + other.w_r, self.w_theta + other.w_theta)

    def scale(self, c) -> "VecCoefficient":
        return VecCoefficient(self.w_r.scale(c), self.w_theta.scale(c))

    @classmethod
    def from_shifted(cls, plus: CSymFun, minus: CSymFun) -> "VecCoefficient":
        """Inverse of :func:`cartesian_link`: w_r = (p+q)/2, w_theta = -i(p-q)/2."""
        return cls((plus + minus).scale(HALF), (plus - minus).times_i().scale(-HALF))


def cartesian_link(v: VecCoefficient, k: int = 0) -> Tuple[CSymFun, CSymFun]:
    """(w_r + i w_theta, w_r - i w_theta): the scalar coefficients fed to modes k+1 and k-1."""
    i_theta = v.w_theta.times_i()
    return v.w_r + i_theta, v.w_r - i_theta


def vec_hk_norm_sq(v: VecCoefficient, k: int, m: int, omega: MeridianDomain) -> NormReport:
    plus, minus = cartesian_link(v, k)
    return NormReport.concat(
        complex_norm(hk_norm_sq, plus, k + 1, m, omega).scale(HALF),
        complex_norm(hk_norm_sq, minus, k - 1, m, omega).scale(HALF),
        prefixes=(f"mode {k + 1}: ", f"mode {k - 1}: "),
    )


def vec_c_norm_sq(v: VecCoefficient, k: int, m: int, omega: MeridianDomain) -> NormReport:
    """Componentwise C norms, plus the coupling term when 1 <= |k| <= m."""
    ak = abs(k)
    if ak >= m + 1:
        shift, case = ak, "|k|>=m+1"
    elif ak == 0:
        shift, case = 1, "k=0"
    else:
        shift, case = ak - 1, "1<=|k|<=m"
    parts = [
        complex_norm(c_norm_sq, v.w_r, shift, m, omega),
        complex_norm(c_norm_sq, v.w_theta, shift, m, omega),
    ]
    prefixes = [f"{case} w_r C^{m}_({shift}) ", f"{case} w_theta C^{m}_({shift}) "]
    if case == "1<=|k|<=m":
        sign = 1 if k > 0 else -1
        coupled = (v.w_r + v.w_theta.times_i().scale(sign)).apply(lambda f: mul_r_pow(f, -ak))
        parts.append(complex_norm(h1_norm_sq, coupled, m - ak, omega))
        prefixes.append(f"{case} (1/r)^{ak}(w_r + i{'' if sign > 0 else '(-1)'}w_theta) ")
    return NormReport.concat(*parts, prefixes=prefixes)


@dataclass(frozen=True)
class VecAxiFun:
    """Finite vector Fourier sum: sorted ``(k, VecCoefficient)`` pairs."""

    modes: Tuple[Tuple[int, VecCoefficient], ...] = ()

    def __post_init__(self) -> None:
        acc: Dict[int, VecCoefficient] = {}
        for k, v in self.modes:
            acc[int(k)] = acc[int(k)] + v if int(k) in acc else v
        object.__setattr__(
            self, "modes", tuple(sorted(((k, v) for k, v in acc.items() if not v.is_zero), key=lambda kv: kv[0]))
        )

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "VecAxiFun":
        modes = data.get("modes") if isinstance(data, Mapping) else None
        if not isinstance(modes, Mapping):
            raise ValueError('expected {"modes": {"k": {"w_r": ..., "w_theta": ...}}}')
        return cls(tuple((int(k), VecCoefficient.from_json(v)) for k, v in modes.items()))

    def to_json(self) -> Dict[str, object]:
        return {"modes": {str(k): v.to_json() for k, v in self.modes}}

    def __iter__(self) -> Iterator[Tuple[int, VecCoefficient]]:
        return iter(self.modes)


def _cartesian_modes(u: VecAxiFun) -> Tuple[Dict[int, CSymFun], Dict[int, CSymFun]]:
    """Mode coefficients of u_x + i u_y and u_x - i u_y."""
    p: Dict[int, CSymFun] = {}
    q: Dict[int, CSymFun] = {}
    for k, v in u:
        plus, minus = cartesian_link(v, k)
        p[k + 1] = p.get(k + 1, CSymFun()) + plus
        q[k - 1] = q.get(k - 1, CSymFun()) + minus
    return p, q


def vec_parseval(u: VecAxiFun, m: int, omega: MeridianDomain) -> Tuple[ExtendedNorm, ExtendedNorm]:
    """(sum of mode norms, sum of Cartesian-component mode norms); equal for finite sums."""
    lhs = sum((vec_hk_norm_sq(v, k, m, omega).total for k, v in u), ExtendedNorm.finite(0))
    p, q = _cartesian_modes(u)
    rhs = ExtendedNorm.finite(0)
    for j in sorted(set(p) | set(q)):
        a, b = p.get(j, CSymFun()), q.get(j, CSymFun())
        u_x = (a + b).scale(HALF)
        u_y = (a - b).times_i().scale(-HALF)
        rhs = rhs + complex_norm(hk_norm_sq, u_x, j, m, omega).total
        rhs = rhs + complex_norm(hk_norm_sq, u_y, j, m, omega).total
    return lhs, rhs


# -- sweep -----------------------------------------------------------------------------
def _vector_cell(args: Tuple[int, int, object, EnsembleConfig, bool]) -> List[Dict[str, object]]:
    m, k, eps, config, z = args
    omega = _domain(eps, z)
    ratios: List[float] = []
    skipped = 0
    for a, b in zip(draw_ensemble(m, k + 1, config, z), draw_ensemble(m, k - 1, config, z)):
        v = VecCoefficient.from_shifted(CSymFun.of(a), CSymFun.of(b))
        ratio = norm_ratio(vec_c_norm_sq(v, k, m, omega).total, vec_hk_norm_sq(v, k, m, omega).total)
        if ratio is None:
            skipped += 1
        else:
            ratios.append(ratio)
    return [_row(m, k, eps, "vector", ratios, skipped)]


def vec_equivalence_sweep(
    m: int,
    k_range: Iterable[int],
    eps_list: Iterable = (0, Fraction(1, 10), Fraction(1, 1000)),
    config: EnsembleConfig = EnsembleConfig(),
    *,
    workers: Optional[int] = None,
    z: bool = False,
) -> SweepResult:
    """vec_c / vec_h envelopes; the k+-1 scalar ensembles feed w_r +- i w_theta."""
    ks, eps = list(k_range), list(eps_list)
    frame = run_cells(_vector_cell, [(m, k, e, config, z) for k in ks for e in eps], workers)
    return SweepResult(frame, {f"vector {m}": config.describe(m, sorted({k + s for k in ks for s in (-1, 1)}))})

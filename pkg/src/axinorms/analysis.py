# -----------------------------------------------------------------------------
# src/axinorms/analysis.py
"""Quantitative experiments on r^n test functions and random ensembles.

* closed-form constants ``pw_constant`` / ``px_constant`` and the boundedness
  verdict they imply,
* the eps -> 0 regime of ||r^(n-m)||^2 on the annulus family,
* equivalence sweeps (W+X against H_perp, C against H) over seeded ensembles,
* the B-versus-C comparison on r^j for j in the trace set.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple
import logging

import numpy as np
import pandas as pd

from .bdm import b_norm_sq
from .domain import ExtendedNorm, MeridianDomain, l21_norm_sq
from .expr import Monomial, SymFun, apply_r_dr, d_dr_n, mul_r_pow, r_pow
from .sobolev import c_norm_sq, h_perp_seminorm_sq, hk_norm_sq, wx_seminorm_sq

__all__ = [
    "pw_constant",
    "px_constant",
    "polynomial_check",
    "boundedness_verdict",
    "trace_set",
    "AsymptoticsReport",
    "eps_asymptotics",
    "EnsembleConfig",
    "draw_ensemble",
    "admissible_exponents",
    "norm_ratio",
    "SweepResult",
    "equivalence_sweep",
    "run_cells",
    "ComparisonReport",
    "bc_comparison",
    "SWEEP_COLUMNS",
]

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["m", "k", "eps", "ratio_min", "ratio_max", "skipped", "quantity"]


# -- closed-form constants --------------------------------------------------------
def pw_constant(m: int, n: int, ell: int) -> int:
    """d_r^(m-l) (1/r)^l r^n = P^W r^(n-m) with P^W = prod_{p=l}^{m-1} (n-p)."""
    if not 0 <= ell <= m:
        raise ValueError(f"need 0 <= ell <= m, got ell={ell}, m={m}")
    return prod(n - p for p in range(ell, m))


def px_constant(m: int, k: int, n: int, ell: int) -> int:
    """d_r^(m-|k|-2l) (1/r d_r)^l (1/r)^|k| r^n = P^X r^(n-m)."""
    ak = abs(k)
    if not 1 <= ell <= (m - ak) // 2:
        raise ValueError(f"need 1 <= ell <= (m-|k|)/2, got ell={ell}, m={m}, k={k}")
    return prod(n - p for p in range(ak + 2 * ell, m)) * prod(n - ak - 2 * q for q in range(ell))


def boundedness_verdict(k: int, m: int, n: int) -> bool:
    """W and X seminorms of r^n stay bounded as eps -> 0."""
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    ak = abs(k)
    return n >= m or (n >= ak and (n - ak) % 2 == 0)


def polynomial_check(k: int, m: int, n: int) -> Dict[str, object]:
    """Every P^W / P^X constant of r^n, each checked against symbolic differentiation."""
    w = r_pow(n)
    ak = abs(k)
    pw = []
    for ell in range(min(ak, m) + 1):
        p = pw_constant(m, n, ell)
        symbolic = d_dr_n(mul_r_pow(w, -ell), m - ell)
        pw.append({"ell": ell, "value": p, "verified": symbolic == r_pow(n - m, p)})
    px = []
    for ell in range(1, (m - ak) // 2 + 1):
        p = px_constant(m, k, n, ell)
        symbolic = d_dr_n(apply_r_dr(mul_r_pow(w, -ak), ell), m - ak - 2 * ell)
        px.append({"ell": ell, "value": p, "verified": symbolic == r_pow(n - m, p)})
    nonzero = [f"P^W l={e['ell']}" for e in pw if e["value"]] + [f"P^X l={e['ell']}" for e in px if e["value"]]
    return {
        "k": k,
        "m": m,
        "n": n,
        "PW": pw,
        "PX": px,
        "nonzero": nonzero if n < m else [],
        "verdict": boundedness_verdict(k, m, n),
    }


def trace_set(k: int, m: int) -> Set[int]:
    """Orders j whose axis traces d_r^j w must vanish."""
    ak = abs(k)
    out = set(range(ak))
    j = ak + 1
    while j < m - 1:
        out.add(j)
        j += 2
    return out


# -- eps asymptotics ------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class AsymptoticsReport:
    n: int
    m: int
    regime: str
    exponent: Optional[int]
    symbolic: ExtendedNorm
    table: pd.DataFrame

    def to_json(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "m": self.m,
            "regime": self.regime,
            "exponent": self.exponent,
            "symbolic": self.symbolic.exact_str(),
            "values": self.table.to_dict(orient="records"),
        }


def _check_eps_list(eps_list: Sequence, r_max: Fraction) -> List[Fraction]:
    eps = [Fraction(str(e)) if isinstance(e, float) else Fraction(e) for e in eps_list]
    if not eps:
        raise ValueError("eps list is empty")
    if any(e <= 0 or e >= r_max for e in eps):
        raise ValueError(f"every eps must lie in (0, R={r_max})")
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("eps list must be strictly decreasing")
    return eps


def eps_asymptotics(
    n: int,
    m: int,
    r_max=1,
    eps_list: Sequence = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)),
    z_interval: Optional[Tuple] = (0, 1),
) -> AsymptoticsReport:
    """Classify ||r^(n-m)||^2 on the annulus family as 'O(1)', 'log' or 'power'."""
    family = MeridianDomain.family(r_max, z_interval)
    eps = _check_eps_list(eps_list, family.r_max)
    symbolic = l21_norm_sq(r_pow(n - m), family)
    lead = symbolic.leading_term()
    regime = {"power": "power", "log": "log"}.get(lead.kind, "O(1)")
    rows = []
    for e in eps:
        v = symbolic.substitute(e, family.r_max)
        rows.append({"eps": float(e), "exact": v.exact_str(), "value": v.to_float()})
    return AsymptoticsReport(
        n, m, regime, lead.exponent if regime == "power" else None, symbolic, pd.DataFrame(rows)
    )


# -- ensembles ------------------------------------------------------------------------
@dataclass(frozen=True)
class EnsembleConfig:
    draws: int = 64
    max_terms: int = 3
    headroom: int = 4
    z_max: int = 3
    coeff_bound: int = 5
    max_denominator: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.draws < 1 or self.max_terms < 1:
            raise ValueError("draws and max_terms must be >= 1")
        if self.coeff_bound < 1 or self.max_denominator < 1:
            raise ValueError("coeff_bound and max_denominator must be >= 1")

    def describe(self, m: int, k_values: Iterable[int]) -> Dict[str, object]:
        out: Dict[str, object] = asdict(self)
        out["r_exponents"] = {str(k): admissible_exponents(k, m, self.headroom) for k in k_values}
        return out


def admissible_exponents(k: int, m: int, headroom: int = 4) -> List[int]:
    return [n for n in range(m + headroom + 1) if boundedness_verdict(k, m, n)]


def _rng(config: EnsembleConfig, m: int, k: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, m, abs(k), int(k < 0)])


def draw_ensemble(m: int, k: int, config: EnsembleConfig = EnsembleConfig(), z: bool = True) -> List[SymFun]:
    """Seeded random monomial sums whose r-exponents are admissible for (k, m)."""
    rng = _rng(config, m, k)
    exponents = admissible_exponents(k, m, config.headroom)
    out = []
    for _ in range(config.draws):
        size = int(rng.integers(1, config.max_terms + 1))
        terms = []
        for _ in range(size):
            den = int(rng.integers(1, config.max_denominator + 1))
            num = 0
            while num == 0:
                num = int(rng.integers(-config.coeff_bound * den, config.coeff_bound * den + 1))
            a = int(exponents[int(rng.integers(len(exponents)))])
            b = int(rng.integers(config.z_max + 1)) if z else 0
            terms.append(Monomial(Fraction(num, den), a, b))
        out.append(SymFun(tuple(terms)))
    return out


def norm_ratio(num: ExtendedNorm, den: ExtendedNorm) -> Optional[float]:
    """num / den, or None when either side is infinite or den vanishes."""
    if not (num.is_finite and den.is_finite) or den.is_zero:
        return None
    if num == den:
        return 1.0
    if num.log_coeff == 0 and den.log_coeff == 0:
        return float(num.rational / den.rational)
    return num.to_float() / den.to_float()


# -- sweeps ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SweepResult:
    frame: pd.DataFrame
    ensemble: Dict[str, object] = field(default_factory=dict)

    def cells(self, m: int, quantity: str) -> pd.DataFrame:
        f = self.frame
        return f[(f["m"] == m) & (f["quantity"] == quantity)]

    def envelope(self, m: int, quantity: str = "seminorm") -> Tuple[float, float]:
        cells = self.cells(m, quantity)
        if cells.empty:
            raise ValueError(f"no {quantity} cells for m={m}")
        return float(cells["ratio_min"].min()), float(cells["ratio_max"].max())

    def spreads(self, m: int, quantity: str = "seminorm") -> pd.Series:
        """Per-cell envelope width ratio_max/ratio_min, indexed like the frame."""
        cells = self.cells(m, quantity)
        if cells.empty:
            raise ValueError(f"no {quantity} cells for m={m}")
        return cells["ratio_max"] / cells["ratio_min"]

    def uniformity(self, m: int, quantity: str = "seminorm") -> float:
        """Widest per-cell envelope over the median envelope width across all (k, eps) of ``m``.

        A value of at most 4 means no cell drifts beyond a factor 4 of the median.
        """
        spread = self.spreads(m, quantity)
        return float(spread.max() / spread.median())

    def outliers(self, m: int, quantity: str = "seminorm", factor: float = 4.0) -> pd.DataFrame:
        """Cells whose envelope width exceeds ``factor`` times the median width."""
        spread = self.spreads(m, quantity)
        cells = self.cells(m, quantity).assign(spread=spread)
        return cells[spread > factor * spread.median()].reset_index(drop=True)

    def merge(self, other: "SweepResult") -> "SweepResult":
        frame = pd.concat([self.frame, other.frame], ignore_index=True)
        frame = frame.sort_values(["quantity", "m", "k", "eps"], kind="mergesort", ignore_index=True)
        return SweepResult(frame, {**self.ensemble, **other.ensemble})

    def to_csv(self) -> str:
        return self.frame[SWEEP_COLUMNS].to_csv(index=False)

    def to_json(self) -> Dict[str, object]:
        return {"ensemble": self.ensemble, "cells": self.frame[SWEEP_COLUMNS].to_dict(orient="records")}


def _domain(eps, z: bool) -> MeridianDomain:
    e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    return MeridianDomain.rect(e, 1, 0, 1) if z else MeridianDomain.interval(e, 1)


def _row(m: int, k: int, eps, quantity: str, ratios: List[float], skipped: int) -> Dict[str, object]:
    if not ratios:
        raise ValueError(
            f"every draw was skipped for m={m}, k={k}, eps={eps} ({quantity}); "
            "enlarge the ensemble or check the admissible exponents"
        )
    return {
        "m": m,
        "k": k,
        "eps": float(eps),
        "ratio_min": min(ratios),
        "ratio_max": max(ratios),
        "skipped": skipped,
        "quantity": quantity,
    }


def _scalar_cell(args: Tuple[int, int, object, EnsembleConfig, bool]) -> List[Dict[str, object]]:
    m, k, eps, config, z = args
    omega = _domain(eps, z)
    semi: List[float] = []
    full: List[float] = []
    skipped_semi = skipped_full = 0
    for w in draw_ensemble(m, k, config, z):
        ratio = norm_ratio(wx_seminorm_sq(w, k, m, omega).total, h_perp_seminorm_sq(w, k, m, omega))
        if ratio is None:
            skipped_semi += 1
        else:
            semi.append(ratio)
        ratio = norm_ratio(c_norm_sq(w, k, m, omega).total, hk_norm_sq(w, k, m, omega).total)
        if ratio is None:
            skipped_full += 1
        else:
            full.append(ratio)
    if skipped_semi or skipped_full:
        logger.info("m=%d k=%d eps=%s: skipped %d/%d draws", m, k, eps, skipped_semi, skipped_full)
    return [
        _row(m, k, eps, "seminorm", semi, skipped_semi),
        _row(m, k, eps, "norm", full, skipped_full),
    ]


def run_cells(
    cell: Callable[[tuple], List[Dict[str, object]]], cells: Sequence[tuple], workers: Optional[int] = None
) -> pd.DataFrame:
    """Evaluate sweep cells, optionally in a process pool; row order is deterministic."""
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(cell, cells))
    else:
        chunks = [cell(c) for c in cells]
    frame = pd.DataFrame([row for rows in chunks for row in rows], columns=SWEEP_COLUMNS)
    return frame.sort_values(["quantity", "m", "k", "eps"], kind="mergesort", ignore_index=True)


def equivalence_sweep(
    m: int,
    k_range: Iterable[int],
    eps_list: Iterable = (0, Fraction(1, 10), Fraction(1, 100), Fraction(1, 10000)),
    config: EnsembleConfig = EnsembleConfig(),
    *,
    workers: Optional[int] = None,
    z: bool = True,
) -> SweepResult:
    """Min/max of (W+X)/H_perp ('seminorm') and C/H ('norm') per (m, k, eps)."""
    ks, eps = list(k_range), list(eps_list)
    logger.info("sweep m=%d over %d modes x %d domains, %d draws each", m, len(ks), len(eps), config.draws)
    frame = run_cells(_scalar_cell, [(m, k, e, config, z) for k in ks for e in eps], workers)
    return SweepResult(frame, {str(m): config.describe(m, ks)})


# -- B versus C -----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ComparisonReport:
    k: int
    m: int
    j: int
    b_form: ExtendedNorm
    c_form: ExtendedNorm
    b_axis: ExtendedNorm
    c_axis: ExtendedNorm
    table: pd.DataFrame

    @property
    def b_verdict(self) -> str:
        return "blows up" if self.b_form.blows_up() else "bounded"

    @property
    def c_verdict(self) -> str:
        return "blows up" if self.c_form.blows_up() else "bounded"

    def to_json(self) -> Dict[str, object]:
        lead = self.c_form.leading_term()
        return {
            "k": self.k,
            "m": self.m,
            "j": self.j,
            "B": {"form": self.b_form.exact_str(), "verdict": self.b_verdict, "axis": self.b_axis.to_json()},
            "C": {
                "form": self.c_form.exact_str(),
                "verdict": self.c_verdict,
                "axis": self.c_axis.to_json(),
                "leading": {"kind": lead.kind, "exponent": lead.exponent, "coeff": str(lead.coeff)},
            },
            "values": self.table.to_dict(orient="records"),
        }


def bc_comparison(
    k: int,
    m: int,
    j: int,
    eps_list: Sequence = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)),
    r_max=1,
    z_interval: Optional[Tuple] = (0, 1),
) -> ComparisonReport:
    """B and C norms of r^j on the annulus family and on the full domain."""
    allowed = trace_set(k, m)
    if j not in allowed:
        raise ValueError(f"j={j} is not in the trace set {sorted(allowed)} for k={k}, m={m}")
    family = MeridianDomain.family(r_max, z_interval)
    eps = _check_eps_list(eps_list, family.r_max)
    w = r_pow(j)
    b_form = b_norm_sq(w, k, m, family).total
    c_form = c_norm_sq(w, k, m, family).total
    rows = []
    for e in eps:
        b, c = b_form.substitute(e, family.r_max), c_form.substitute(e, family.r_max)
        rows.append({"eps": float(e), "B": b.to_float(), "C": c.to_float(), "B_exact": b.exact_str(), "C_exact": c.exact_str()})
    axis = family.at(0)
    return ComparisonReport(
        k, m, j, b_form, c_form, b_norm_sq(w, k, m, axis).total, c_norm_sq(w, k, m, axis).total, pd.DataFrame(rows)
    )

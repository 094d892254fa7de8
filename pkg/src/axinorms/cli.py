# -----------------------------------------------------------------------------
# src/axinorms/cli.py
"""Command-line front end.

Exit codes: 0 success, 1 usage / parse / configuration error, 2 the requested
norm is infinite (the report is still printed).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import argparse
import json
import logging
import sys

import pandas as pd

from ._io import atomic_write_text
from .analysis import (
    EnsembleConfig,
    SweepResult,
    bc_comparison,
    eps_asymptotics,
    equivalence_sweep,
    polynomial_check,
    trace_set,
)
from .bdm import b_norm_sq, membership, trace_profile
from .domain import parse_domain
from .expr import parse
from .fourier import AxiFun, parseval_hm, parseval_l2
from .sobolev import (
    NormReport,
    NormRequest,
    c_norm_sq,
    h1_bullet_norm_sq,
    h1_norm_sq,
    hk_norm_sq,
    v1_norm_sq,
    w_seminorm_sq,
    x_seminorm_sq,
)
from .store import persist_sweep
from .vecfield import VecAxiFun, VecCoefficient, vec_c_norm_sq, vec_equivalence_sweep, vec_hk_norm_sq, vec_parseval

__all__ = ["RunConfig", "NORMS", "build_parser", "main", "sweep_table"]

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_INFINITE = 0, 1, 2

NORMS: Dict[str, Callable[[NormRequest], NormReport]] = {
    "H": lambda q: hk_norm_sq(q.w, q.k, q.m, q.domain),
    "C": lambda q: c_norm_sq(q.w, q.k, q.m, q.domain),
    "W": lambda q: w_seminorm_sq(q.w, q.k, q.m, q.domain),
    "X": lambda q: x_seminorm_sq(q.w, q.k, q.m, q.domain),
    "B": lambda q: b_norm_sq(q.w, q.k, q.m, q.domain),
    "H1": lambda q: h1_norm_sq(q.w, q.m, q.domain),
    "H1b": lambda q: h1_bullet_norm_sq(q.w, q.m, q.domain),
    "V1": lambda q: v1_norm_sq(q.w, q.m, q.domain),
}


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> List[int]:
    """``3``, ``0,2,4`` or the inclusive range ``-3:3``."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        lo, sep, hi = part.partition(":")
        if sep and lo.strip().lstrip("-").isdigit():
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _fraction_list(text: str) -> List[Fraction]:
    return [Fraction(p.strip()) for p in text.split(",") if p.strip()]


def _z_interval(text: str) -> Optional[Tuple[Fraction, Fraction]]:
    if text.strip().lower() == "none":
        return None
    values = _fraction_list(text)
    if len(values) != 2:
        raise ValueError(f"--z expects 'z0,z1' or 'none', got {text!r}")
    return values[0], values[1]


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    format: Optional[str]
    out: Optional[Path]
    verbose: int
    cache_dir: Optional[Path]
    options: Tuple[Tuple[str, Any], ...]

    _GLOBAL = ("command", "seed", "format", "out", "verbose", "cache_dir")

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        values = vars(ns)
        return cls(
            command=ns.command,
            seed=ns.seed,
            format=ns.format,
            out=Path(ns.out) if ns.out else None,
            verbose=ns.verbose,
            cache_dir=Path(ns.cache_dir) if ns.cache_dir else None,
            options=tuple(sorted((k, v) for k, v in values.items() if k not in cls._GLOBAL)),
        )

    def option(self, name: str) -> Any:
        return dict(self.options)[name]


@dataclass(frozen=True, eq=False)
class _Output:
    data: Dict[str, Any]
    frame: Optional[pd.DataFrame] = None
    default_format: str = "json"
    code: int = EXIT_OK


# -- subcommands ------------------------------------------------------------------------
def _cmd_norm(cfg: RunConfig) -> _Output:
    req = NormRequest.from_text(cfg.option("fn"), cfg.option("k"), cfg.option("m"), cfg.option("domain"))
    report = NORMS[cfg.option("which")](req)
    data = {
        "fn": str(req.w),
        "k": req.k,
        "m": req.m,
        "domain": str(req.domain),
        "which": cfg.option("which"),
        "report": report.to_json(),
    }
    return _Output(data, code=EXIT_OK if report.is_finite else EXIT_INFINITE)


def sweep_table(
    ms: Sequence[int],
    ks: Sequence[int],
    eps: Sequence[Fraction],
    config: EnsembleConfig,
    vector: bool = False,
    workers: Optional[int] = None,
) -> SweepResult:
    run = vec_equivalence_sweep if vector else equivalence_sweep
    results = [run(m, ks, eps, config, workers=workers) for m in ms]
    out = results[0]
    for r in results[1:]:
        out = out.merge(r)
    return out


def _cmd_sweep(cfg: RunConfig) -> _Output:
    config = EnsembleConfig(draws=cfg.option("draws"), max_terms=cfg.option("max_terms"), seed=cfg.seed)
    args = (
        tuple(cfg.option("m")),
        tuple(cfg.option("k")),
        tuple(cfg.option("eps")),
        config,
        cfg.option("vector"),
    )
    run = sweep_table
    if cfg.cache_dir is not None:
        run = persist_sweep(cfg.cache_dir)(sweep_table)
    result = run(*args, workers=cfg.option("workers"))
    envelopes: Dict[str, Dict[str, List[float]]] = {}
    uniformity: Dict[str, Dict[str, float]] = {}
    outliers: List[Dict[str, object]] = []
    for m in cfg.option("m"):
        for quantity in sorted(set(result.frame["quantity"])):
            envelopes.setdefault(str(m), {})[quantity] = list(result.envelope(m, quantity))
            uniformity.setdefault(str(m), {})[quantity] = result.uniformity(m, quantity)
            cells = result.outliers(m, quantity)
            if not cells.empty:
                logger.warning("m=%d %s: %d cells beyond 4x the median envelope", m, quantity, len(cells))
            outliers.extend(cells.to_dict(orient="records"))
    report = {**result.to_json(), "envelopes": envelopes, "uniformity": uniformity, "outliers": outliers}
    return _Output(report, result.frame, "csv")


def _cmd_asymptotics(cfg: RunConfig) -> _Output:
    report = eps_asymptotics(
        cfg.option("n"), cfg.option("m"), Fraction(cfg.option("R")), cfg.option("eps"), _z_interval(cfg.option("z"))
    )
    frame = report.table.assign(regime=report.regime, exponent=report.exponent)
    return _Output(report.to_json(), frame, "csv")


def _cmd_traces(cfg: RunConfig) -> _Output:
    k, m = cfg.option("k"), cfg.option("m")
    data: Dict[str, Any] = {"k": k, "m": m, "N": sorted(trace_set(k, m))}
    if cfg.option("fn"):
        w, omega = parse(cfg.option("fn")), parse_domain(cfg.option("domain"))
        data["fn"] = str(w)
        data["domain"] = str(omega)
        data["profile"] = trace_profile(w, m, omega).to_json()
        data["membership"] = membership(w, k, m, omega).to_json()
    return _Output(data)


def _cmd_polycheck(cfg: RunConfig) -> _Output:
    return _Output(polynomial_check(cfg.option("k"), cfg.option("m"), cfg.option("n")))


def _cmd_vecnorm(cfg: RunConfig) -> _Output:
    v = VecCoefficient(parse(cfg.option("wr")), parse(cfg.option("wtheta")))
    k, m, omega = cfg.option("k"), cfg.option("m"), parse_domain(cfg.option("domain"))
    norm = vec_hk_norm_sq if cfg.option("which") == "H" else vec_c_norm_sq
    report = norm(v, k, m, omega)
    data = {**v.to_json(), "k": k, "m": m, "domain": str(omega), "which": cfg.option("which"), "report": report.to_json()}
    return _Output(data, code=EXIT_OK if report.is_finite else EXIT_INFINITE)


def _cmd_compare(cfg: RunConfig) -> _Output:
    report = bc_comparison(
        cfg.option("k"),
        cfg.option("m"),
        cfg.option("j"),
        cfg.option("eps"),
        Fraction(cfg.option("R")),
        _z_interval(cfg.option("z")),
    )
    return _Output(report.to_json(), report.table)


def _cmd_parseval(cfg: RunConfig) -> _Output:
    modes = json.loads(cfg.option("modes"))
    omega, m = parse_domain(cfg.option("domain")), cfg.option("m")
    if cfg.option("vector"):
        u = VecAxiFun.from_json(modes)
        lhs, rhs = vec_parseval(u, m, omega)
    else:
        u = AxiFun.from_json(modes)
        lhs, rhs = parseval_l2(u, omega) if m == 0 else parseval_hm(u, m, omega)
    data = {**u.to_json(), "m": m, "domain": str(omega), "lhs": lhs.to_json(), "rhs": rhs.to_json(), "equal": lhs == rhs}
    return _Output(data, code=EXIT_OK if lhs.is_finite else EXIT_INFINITE)


COMMANDS: Dict[str, Callable[[RunConfig], _Output]] = {
    "norm": _cmd_norm,
    "sweep": _cmd_sweep,
    "asymptotics": _cmd_asymptotics,
    "traces": _cmd_traces,
    "polycheck": _cmd_polycheck,
    "vecnorm": _cmd_vecnorm,
    "compare": _cmd_compare,
    "parseval": _cmd_parseval,
}


# -- parser ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="axinorms", description="Fourier-mode Sobolev norms on axisymmetric domains.")
    p.add_argument("--seed", type=int, default=0, help="ensemble seed (echoed in the output)")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--cache-dir", default=None, help="persist sweep results under this directory")
    sub = p.add_subparsers(dest="command", required=True)

    domain = dict(default="rect:0,1,0,1", help="rect:eps,R,z0,z1 | interval:eps,R | family:R[,z0,z1]")

    s = sub.add_parser("norm", help="one scalar norm with its term breakdown")
    s.add_argument("--fn", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--domain", **domain)
    s.add_argument("--which", choices=tuple(NORMS), default="H")

    s = sub.add_parser("sweep", help="equivalence-constant envelopes over a random ensemble")
    s.add_argument("--m", type=_int_list, required=True)
    s.add_argument("--k", type=_int_list, default=_int_list("-3:3"))
    s.add_argument("--eps", type=_fraction_list, default=_fraction_list("0,1/10,1/100,1/10000"))
    s.add_argument("--draws", type=int, default=64)
    s.add_argument("--max-terms", type=int, default=3)
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--vector", action="store_true", help="vector norms instead of scalar ones")

    s = sub.add_parser("asymptotics", help="eps -> 0 regime of ||r^(n-m)||^2")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--R", default="1")
    s.add_argument("--eps", type=_fraction_list, default=_fraction_list("1/10,1/100,1/1000"))
    s.add_argument("--z", default="0,1", help="z-interval 'z0,z1' or 'none' for the 2D case")

    s = sub.add_parser("traces", help="trace set N_{k,m}; with --fn also traces and membership")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--fn", default=None)
    s.add_argument("--domain", **domain)

    s = sub.add_parser("polycheck", help="P^W / P^X constants of r^n and the boundedness verdict")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("vecnorm", help="vector norm of one mode (w_r, w_theta)")
    s.add_argument("--wr", required=True)
    s.add_argument("--wtheta", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--domain", **domain)
    s.add_argument("--which", choices=("H", "C"), default="H")

    s = sub.add_parser("compare", help="B versus C norms of r^j as eps -> 0")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--eps", type=_fraction_list, default=_fraction_list("1/10,1/100,1/1000"))
    s.add_argument("--R", default="1")
    s.add_argument("--z", default="0,1")

    s = sub.add_parser("parseval", help="mode-sum identity for a finite Fourier sum")
    s.add_argument("--modes", required=True, help='JSON {"modes": {"k": "<expr>"}}')
    s.add_argument("--domain", **domain)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--vector", action="store_true", help='modes map k to {"w_r": ..., "w_theta": ...}')
    return p


def _render(cfg: RunConfig, out: _Output) -> str:
    fmt = cfg.format or out.default_format
    if fmt == "csv":
        if out.frame is None:
            raise UsageError(f"--format csv is not available for '{cfg.command}'")
        return f"# seed={cfg.seed}\n" + out.frame.to_csv(index=False)
    return json.dumps({"command": cfg.command, "seed": cfg.seed, **out.data}, indent=2, sort_keys=True) + "\n"


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose <= 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = RunConfig.from_namespace(build_parser().parse_args(argv))
        _configure_logging(cfg.verbose)
        out = COMMANDS[cfg.command](cfg)
        text = _render(cfg, out)
    except (ValueError, TimeoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.out is not None:
        atomic_write_text(cfg.out, text)
        logger.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(text)
    return out.code


if __name__ == "__main__":
    sys.exit(main())

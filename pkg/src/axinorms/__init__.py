from .analysis import (
    EnsembleConfig,
    SweepResult,
    bc_comparison,
    boundedness_verdict,
    eps_asymptotics,
    equivalence_sweep,
    polynomial_check,
    trace_set,
)
from .bdm import b_norm_sq, membership, trace_profile
from .domain import ExtendedNorm, MeridianDomain, l21_norm_sq, parse_domain
from .expr import CSymFun, SymFun, parse
from .fourier import AxiFun, parseval_hm, parseval_l2, project
from .sobolev import (
    NormReport,
    c_norm_sq,
    h_perp_seminorm_sq,
    hk_norm_sq,
    w_seminorm_sq,
    wx_seminorm_sq,
    x_seminorm_sq,
)
from .store import persist_sweep
from .vecfield import VecCoefficient, vec_c_norm_sq, vec_hk_norm_sq

__version__ = "0.1.0"

__all__ = [
    "AxiFun",
    "CSymFun",
    "EnsembleConfig",
    "ExtendedNorm",
    "MeridianDomain",
    "NormReport",
    "SweepResult",
    "SymFun",
    "VecCoefficient",
    "b_norm_sq",
    "bc_comparison",
    "boundedness_verdict",
    "c_norm_sq",
    "eps_asymptotics",
    "equivalence_sweep",
    "h_perp_seminorm_sq",
    "hk_norm_sq",
    "l21_norm_sq",
    "membership",
    "parse",
    "parse_domain",
    "parseval_hm",
    "parseval_l2",
    "persist_sweep",
    "polynomial_check",
    "project",
    "trace_profile",
    "trace_set",
    "vec_c_norm_sq",
    "vec_hk_norm_sq",
    "w_seminorm_sq",
    "wx_seminorm_sq",
    "x_seminorm_sq",
]

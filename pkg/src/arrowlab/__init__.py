"""Machine-checked refutations of non-dictatorship for small societies.

Modules: ``core`` (weak orders, profiles), ``axioms`` (ground constraints
and propagation), ``search`` (case-splitting refutation), ``trace`` and
``checker`` (the ``.apf`` proof format and its independent checker),
``cnf`` (DIMACS export plus a small DPLL solver) and ``cli``.
"""
from .core import Config, ParameterError, WeakOrder, enumerate_weak_orders, profile_count
from .axioms import build_constraints, propagate_to_fixpoint
from .search import TheoremFalsified, enumerate_models, refute
from .trace import emit_trace, parse_trace
from .checker import check_text, check_trace
from .cnf import export_cnf, parse_dimacs, solve_cnf

__version__ = "0.1.0"

__all__ = [
    "Config", "ParameterError", "WeakOrder", "enumerate_weak_orders", "profile_count",
    "build_constraints", "propagate_to_fixpoint", "TheoremFalsified", "enumerate_models",
    "refute", "emit_trace", "parse_trace", "check_text", "check_trace", "export_cnf",
    "parse_dimacs", "solve_cnf",
]

"""holkit: a higher-order logic kernel with shared de Bruijn terms, TPTP
I/O and a blackboard of bidding agents."""

from __future__ import annotations

from .terms import LOGIC, BoundVar, Constant, Root, Signature, Term, TermAbs, TypeAbs, mk_app, pretty
from .types import O, I, Arrow, BaseType, Forall, Type, TypeVar, pretty_type
from .normalization import Strategy, beta_normalize, eta_long, is_eta_long
from .indexing import Position, TermIndex
from .blackboard import Blackboard, Delta, SplitKind
from .tptp import Dialect, SZSStatus

__version__ = "0.1.0"

__all__ = [
    "LOGIC",
    "BoundVar",
    "Constant",
    "Root",
    "Signature",
    "Term",
    "TermAbs",
    "TypeAbs",
    "mk_app",
    "pretty",
    "O",
    "I",
    "Arrow",
    "BaseType",
    "Forall",
    "Type",
    "TypeVar",
    "pretty_type",
    "Strategy",
    "beta_normalize",
    "eta_long",
    "is_eta_long",
    "Position",
    "TermIndex",
    "Blackboard",
    "Delta",
    "SplitKind",
    "Dialect",
    "SZSStatus",
]

"""Agents: the task/bid contract, formula transformations and the
built-in agents."""

from __future__ import annotations

from .base import FORMULAS, Agent, FormulaDatum, Task, formula_resource, status_resource
from .library import (
    BidPolicy,
    ExternalProverAgent,
    NNFAgent,
    ParamodulationAgent,
    PrenexAgent,
    SimplifyAgent,
    SkolemAgent,
    TransformAgent,
    make_external_agent,
    standard_agents,
)
from .transform import (
    NotInNNF,
    PositionMismatch,
    contains_existential,
    is_nnf,
    is_prenex,
    is_quantifier_free,
    nnf,
    paramodulate,
    prenex,
    replace_at,
    simplify,
    skolemize,
)

__all__ = [
    "FORMULAS",
    "Agent",
    "FormulaDatum",
    "Task",
    "formula_resource",
    "status_resource",
    "BidPolicy",
    "ExternalProverAgent",
    "NNFAgent",
    "ParamodulationAgent",
    "PrenexAgent",
    "SimplifyAgent",
    "SkolemAgent",
    "TransformAgent",
    "make_external_agent",
    "standard_agents",
    "NotInNNF",
    "PositionMismatch",
    "contains_existential",
    "is_nnf",
    "is_prenex",
    "is_quantifier_free",
    "nnf",
    "paramodulate",
    "prenex",
    "replace_at",
    "simplify",
    "skolemize",
]

"""Ready-made agents: normal-form transformations, paramodulation and an
external-prover agent."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..blackboard import BlackboardView, Delta, Event, EventKind, Insert, Remove, SetStatus, SplitKind
from ..external import ProverResult, ProverSpec, submit
from ..indexing import walk
from ..terms import LOGIC, Root, Signature, Term
from ..tptp import SZSStatus, kernel_problem
from .base import FORMULAS, Agent, FormulaDatum, Task, formula_resource, status_resource
from .transform import (
    contains_existential,
    is_nnf,
    nnf,
    paramodulate,
    prenex,
    simplify,
    skolemize,
)

__all__ = [
    "BidPolicy",
    "TransformAgent",
    "SimplifyAgent",
    "NNFAgent",
    "PrenexAgent",
    "SkolemAgent",
    "ParamodulationAgent",
    "ExternalProverAgent",
    "make_external_agent",
    "standard_agents",
]

EQ = LOGIC["="]
_SATISFIABILITY_ROLES = frozenset({"axiom", "hypothesis", "definition", "assumption", "lemma", "negated_conjecture", "plain"})


@dataclass(frozen=True)
class BidPolicy:
    """``bid = base + per_node * max(0, size reduction)``."""

    base: float = 1.0
    per_node: float = 0.5

    def bid(self, before: Term, after: Term) -> float:
        return self.base + self.per_node * max(0, before.size - after.size)


def _inserted_formula(event: Event) -> FormulaDatum | None:
    if event.kind is EventKind.INSERTED and event.store_id == FORMULAS and isinstance(event.datum, FormulaDatum):
        return event.datum
    return None


class TransformAgent(Agent):
    """Replaces a formula by its transform when that changes it."""

    name = "transform"
    roles: frozenset[str] | None = None  # None: every role
    extra_writes: frozenset = frozenset()

    def __init__(self, policy: BidPolicy | None = None) -> None:
        self.policy = policy or BidPolicy()

    def transform(self, term: Term) -> Term:
        raise NotImplementedError

    def applicable(self, term: Term) -> bool:
        return True

    def filter(self, event: Event, view: BlackboardView) -> list[Task]:
        datum = _inserted_formula(event)
        if datum is None or (self.roles is not None and datum.role not in self.roles):
            return []
        if not view.contains(FORMULAS, datum, event.context_id) or not self.applicable(datum.term):
            return []
        result = self.transform(datum.term)
        if result is datum.term:
            return []
        res = formula_resource(event.context_id, datum)
        return [
            Task(
                self.name,
                event.context_id,
                frozenset({res}),
                frozenset({res}) | self.extra_writes,
                self.policy.bid(datum.term, result),
                f"{self.name} {datum.name}",
                payload=(datum, result),
            )
        ]

    def run(self, task: Task) -> Delta:
        datum, result = task.payload
        new = FormulaDatum(datum.name, datum.role, result)
        return Delta.of(Remove(FORMULAS, datum, task.context_id), Insert(FORMULAS, new, task.context_id))


class SimplifyAgent(TransformAgent):
    name = "simplify"

    def transform(self, term: Term) -> Term:
        return simplify(term)


class NNFAgent(TransformAgent):
    name = "nnf"

    def transform(self, term: Term) -> Term:
        return nnf(term)


class PrenexAgent(TransformAgent):
    name = "prenex"

    def applicable(self, term: Term) -> bool:
        return is_nnf(term)

    def transform(self, term: Term) -> Term:
        return prenex(term)


class SkolemAgent(TransformAgent):
    """Skolemizes NNF formulas whose role allows a satisfiability-preserving step."""

    name = "skolemize"
    roles = _SATISFIABILITY_ROLES
    # fresh names come from a shared counter, so Skolemization runs one at a time
    extra_writes = frozenset({("signature",)})

    def __init__(self, sig: Signature, policy: BidPolicy | None = None) -> None:
        super().__init__(policy)
        self.sig = sig

    def applicable(self, term: Term) -> bool:
        return term.max_tm == 0 and is_nnf(term) and contains_existential(term)

    def transform(self, term: Term) -> Term:
        # a scratch copy keeps the filter free of side effects
        return skolemize(term, self.sig.copy())[0]

    def run(self, task: Task) -> Delta:
        datum, _ = task.payload
        result, _ = skolemize(datum.term, self.sig)
        new = FormulaDatum(datum.name, datum.role, result)
        return Delta.of(Remove(FORMULAS, datum, task.context_id), Insert(FORMULAS, new, task.context_id))


class ParamodulationAgent(Agent):
    """Rewrites with positive unit equations ``l = r`` between closed terms.

    Derived formulas are added next to their premises.  ``max_size`` and
    ``max_derived`` keep the search finite.
    """

    name = "paramodulation"

    def __init__(self, bid: float = 0.1, max_size: int = 60, max_derived: int = 100) -> None:
        self.bid = bid
        self.max_size = max_size
        self.max_derived = max_derived

    @staticmethod
    def _equation(datum: FormulaDatum) -> bool:
        t = datum.term
        return (
            datum.role != "conjecture"
            and isinstance(t, Root)
            and t.head is EQ
            and len(t.args) == 3
            and t.args[1].max_tm == 0
            and t.args[2].max_tm == 0
            and t.args[1] is not t.args[2]
        )

    def filter(self, event: Event, view: BlackboardView) -> list[Task]:
        datum = _inserted_formula(event)
        if datum is None:
            return []
        ctx = event.context_id
        visible = view.query(FORMULAS, ctx)
        if datum not in visible:
            return []
        derived = sum(1 for d in visible if d.name.startswith("pm("))
        if derived >= self.max_derived:
            return []
        pairs = []
        if self._equation(datum):
            pairs += [(datum, target) for target in visible if target is not datum]
        pairs += [(eq, datum) for eq in visible if eq is not datum and self._equation(eq)]
        tasks = []
        existing = {d.term for d in visible}
        for eq, target in pairs:
            lhs = eq.term.args[1]
            for sub, pos in walk(target.term):
                if sub is not lhs:
                    continue
                result = paramodulate(eq.term, target.term, pos)
                if result in existing or result.size > self.max_size:
                    continue
                existing.add(result)
                name = f"pm({eq.name},{target.name},{pos})"
                role = "conjecture" if target.role == "conjecture" else "plain"
                new = FormulaDatum(name, role, result)
                tasks.append(
                    Task(
                        self.name,
                        ctx,
                        frozenset({formula_resource(ctx, eq), formula_resource(ctx, target)}),
                        frozenset({("derived", ctx, new)}),
                        self.bid,
                        f"paramodulate {eq.name} into {target.name} at {pos}",
                        payload=new,
                    )
                )
        return tasks

    def run(self, task: Task) -> Delta:
        return Delta.of(Insert(FORMULAS, task.payload, task.context_id))


class ExternalProverAgent(Agent):
    """Sends a context's problem to an external prover once a conjecture is
    visible there, and records the prover's SZS answer on that leaf.

    Any formula inserted into an open leaf (or an ancestor) that already
    sees a conjecture triggers a bid, so a task lost in one auction is
    offered again after the winning change lands.

    ``context_id`` restricts the agent to one context; ``None`` serves every
    open leaf.
    """

    def __init__(
        self,
        spec: ProverSpec,
        context_id: int | None = None,
        bid: float | None = None,
        submit_fn: Callable[..., ProverResult] = submit,
    ) -> None:
        self.spec = spec
        self.name = f"external:{spec.name}" + (f"@{context_id}" if context_id is not None else "")
        self.context_id = context_id
        self.bid = spec.bid if bid is None else bid
        self.submit_fn = submit_fn

    def _targets(self, event: Event, view: BlackboardView) -> list[int]:
        candidates = [self.context_id] if self.context_id is not None else view.leaves()
        out = []
        for cid in candidates:
            ctx = view.context(cid)
            if ctx.kind is not SplitKind.LEAF or ctx.status is not SZSStatus.OPEN:
                continue
            if event.context_id in view.lineage(cid):
                out.append(cid)
        return out

    def filter(self, event: Event, view: BlackboardView) -> list[Task]:
        if _inserted_formula(event) is None:
            return []
        tasks = []
        for cid in self._targets(event, view):
            formulas = view.query(FORMULAS, cid)
            if not any(d.role == "conjecture" for d in formulas):
                continue
            tasks.append(
                Task(
                    self.name,
                    cid,
                    frozenset(formula_resource(cid, d) for d in formulas),
                    frozenset({status_resource(cid)}),
                    self.bid,
                    f"{self.spec.name} on context {cid}",
                    payload=tuple(formulas),
                )
            )
        return tasks

    def run(self, task: Task) -> Delta:
        formulas: tuple[FormulaDatum, ...] = task.payload
        try:
            problem = kernel_problem([(d.name, d.role, d.term) for d in formulas], self.spec.dialect)
            result = self.submit_fn(problem, self.spec)
            status = result.status
        except Exception:  # noqa: BLE001 - any failure is reported as an SZS Error
            status = SZSStatus.ERROR
        return Delta.of(SetStatus(task.context_id, status))


def make_external_agent(spec: ProverSpec, context_id: int | None = None, bid: float | None = None) -> ExternalProverAgent:
    return ExternalProverAgent(spec, context_id, bid)


def standard_agents(sig: Signature) -> dict[str, Agent]:
    """The built-in transformation agents, keyed by name."""
    agents: list[Agent] = [SimplifyAgent(), NNFAgent(), PrenexAgent(), SkolemAgent(sig), ParamodulationAgent()]
    return {a.name: a for a in agents}

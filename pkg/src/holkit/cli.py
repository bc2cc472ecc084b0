"""Interactive command interpreter.

Terms are entered in THF syntax.  Every command returns its output as
text; errors become ``error: ...`` messages and leave the session intact.
Transcripts never contain timings, so replaying a script is byte-stable.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .agents import (
    FORMULAS,
    Agent,
    BidPolicy,
    ExternalProverAgent,
    FormulaDatum,
    TransformAgent,
    standard_agents,
)
from .blackboard import ROOT, Blackboard, SplitKind
from .external import ProverMode, ProverSpec, load_specs, mock_local_command
from .indexing import TermIndex, canonical_form
from .normalization import Strategy, beta_normalize, eta_long
from .scheduler import SchedulerConfig, run_loop
from .terms import LOGIC, Signature, Term, bank_stats, pretty
from .tptp import (
    ConversionError,
    Dialect,
    SZSStatus,
    format_expr,
    format_formula,
    from_kernel,
    parse,
    parse_expression,
    parse_file,
    to_kernel,
    type_from_kernel,
)

__all__ = ["Session", "script", "main", "VERBS"]

STYLES = ("nameless", "spine", "named", "tptp")
MAX_SPLIT = 64


class CommandError(Exception):
    """A user-facing problem with a command."""


@dataclass
class Session:
    sig: Signature = field(default_factory=Signature)
    bindings: dict[str, Term] = field(default_factory=dict)
    blackboard: Blackboard = field(default_factory=Blackboard)
    index: TermIndex = field(default_factory=TermIndex)
    agents: dict[str, Agent] = field(default_factory=dict)
    enabled: set[str] = field(default_factory=set)
    provers: dict[str, ProverSpec] = field(default_factory=dict)
    config: SchedulerConfig = field(default_factory=SchedulerConfig)
    base_dir: Path = field(default_factory=Path.cwd)
    done: bool = False
    timings: list[tuple[str, float]] = field(default_factory=list)
    in_transcript: bool = False

    def __post_init__(self) -> None:
        if FORMULAS not in self.blackboard.stores():
            self.blackboard.register_store(FORMULAS, FormulaDatum)
        if not self.agents:
            for name, agent in standard_agents(self.sig).items():
                self.agents[name] = agent
                self.enabled.add(name)

    # -- entry point ----------------------------------------------------------

    def execute(self, line: str) -> str:
        """Run one command line and return its output (never raises for
        bad input)."""
        text = line.strip()
        if not text or text.startswith("#"):
            return ""
        verb, _, rest = text.partition(" ")
        handler = _HANDLERS.get(verb.lower())
        start = time.perf_counter()
        try:
            if handler is None:
                return f"unknown command: {verb}\n{_help_summary()}"
            return handler(self, rest.strip())
        except CommandError as exc:
            return f"error: {exc}"
        except RecursionError:
            return "error: input nested too deeply"
        except Exception as exc:  # noqa: BLE001 - every failure becomes a diagnostic
            return f"error: {type(exc).__name__}: {exc}"
        finally:
            self.timings.append((verb, time.perf_counter() - start))

    # -- helpers --------------------------------------------------------------

    def term(self, text: str) -> Term:
        text = text.strip()
        if not text:
            raise CommandError("missing term")
        if text in self.bindings:
            return self.bindings[text]
        term = to_kernel(parse_expression(text), self.sig, expected=None, normalize=False, bindings=self.bindings)
        assert term is not None
        return term

    def path(self, text: str) -> Path:
        p = Path(text)
        return p if p.is_absolute() else self.base_dir / p

    def add_formulas(self, formulas, context_id: int) -> list[str]:
        lines = []
        decls = 0
        for f in formulas:
            term = to_kernel(f, self.sig)
            if term is None:
                decls += 1
                continue
            datum = FormulaDatum(f.name, f.role, term)
            self.blackboard.insert(FORMULAS, datum, context_id)
            lines.append(f"  {f.name} ({f.role}): {render(term)}")
        head = f"{len(lines)} formulas, {decls} type declarations"
        return [head] + lines


def render(t: Term) -> str:
    """THF syntax when the term is closed and normal, nameless otherwise."""
    if t.normal and t.max_tm == 0 and t.max_ty == 0:
        try:
            return format_expr(from_kernel(t, Dialect.THF), Dialect.THF)
        except ConversionError:
            pass
    return pretty(t, "nameless")


def _split_options(rest: str, options: Sequence[str]) -> tuple[str, list[str]]:
    """Peel trailing option words (case-insensitive) off a term argument."""
    words = rest.split()
    found: list[str] = []
    lowered = {o.lower() for o in options}
    while words and words[-1].lower() in lowered:
        found.insert(0, words.pop().lower())
    return " ".join(words), found


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise CommandError(f"{what} must be an integer, got {text!r}") from None


def _keyvals(words: Sequence[str]) -> dict[str, str]:
    out = {}
    for w in words:
        key, eq, value = w.partition("=")
        if not eq:
            raise CommandError(f"expected key=value, got {w!r}")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# commands


def _cmd_help(s: Session, rest: str) -> str:
    if rest:
        entry = _HELP.get(rest.lower())
        if entry is None:
            return f"unknown command: {rest}\n{_help_summary()}"
        return f"{entry[0]}\n  {entry[1]}"
    return _help_summary()


def _help_summary() -> str:
    lines = ["commands:"]
    lines += [f"  {usage:<58} {doc}" for usage, doc in _HELP.values()]
    return "\n".join(lines)


def _cmd_quit(s: Session, rest: str) -> str:
    s.done = True
    return "bye"


def _cmd_load(s: Session, rest: str) -> str:
    words = shlex.split(rest)
    if not words or len(words) > 2:
        raise CommandError("usage: load <file> [context]")
    context_id = _int(words[1], "context") if len(words) == 2 else ROOT
    s.blackboard.context(context_id)
    try:
        formulas = parse_file(s.path(words[0]), include_path=(s.base_dir,))
    except OSError as exc:
        raise CommandError(f"cannot read {words[0]}: {exc.strerror or exc}") from None
    lines = s.add_formulas(formulas, context_id)
    lines[0] = f"loaded {lines[0]} from {words[0]}"
    return "\n".join(lines)


def _cmd_parse(s: Session, rest: str) -> str:
    formulas = parse(rest, base_dir=s.base_dir)
    if not formulas:
        raise CommandError("no annotated formulas")
    out = [format_formula(f) for f in formulas]
    lines = s.add_formulas(formulas, ROOT)
    return "\n".join(out + [f"added {lines[0]}"])


def _cmd_let(s: Session, rest: str) -> str:
    name, eq, body = rest.partition("=")
    name = name.strip()
    if not eq or not name.isidentifier():
        raise CommandError("usage: let <name> = <term>")
    term = s.term(body)
    s.bindings[name] = term
    return f"{name} : {_type_text(term)}"


def _type_text(t: Term) -> str:
    return format_expr(type_from_kernel(t.type, (), Dialect.THF), Dialect.THF)


def _cmd_show(s: Session, rest: str) -> str:
    text, opts = _split_options(rest, STYLES + ("ascii",))
    term = s.term(text)
    ascii_ = "ascii" in opts
    styles = [o for o in opts if o != "ascii"] or ["nameless"]
    if len(styles) > 1:
        raise CommandError("choose one style")
    if styles[0] == "tptp":
        return render(beta_normalize(term, Strategy.LL)[0] if not term.normal else term)
    return pretty(term, styles[0], ascii=ascii_)


def _cmd_type(s: Session, rest: str) -> str:
    return _type_text(s.term(rest))


def _cmd_normalize(s: Session, rest: str) -> str:
    text, opts = _split_options(rest, [st.name for st in Strategy])
    if len(opts) > 1:
        raise CommandError("choose one strategy")
    strategy = Strategy.from_name(opts[0]) if opts else Strategy.LL
    result, stats = beta_normalize(s.term(text), strategy)
    return f"{render(result)}\nsteps: {stats.reduction_steps}"


def _cmd_eta(s: Session, rest: str) -> str:
    term, _ = beta_normalize(s.term(rest), Strategy.LL)
    return render(eta_long(term))


def _cmd_index(s: Session, rest: str) -> str:
    if not rest:
        st = s.index.stats()
        return ", ".join(f"{k} {v}" for k, v in st.items())
    canon = s.index.insert(s.term(rest))
    return f"indexed {pretty(canon, 'nameless')} ({s.index.stats()['roots']} roots)"


def _sorted_terms(terms) -> list[str]:
    return sorted(pretty(t, "nameless") for t in terms)


def _cmd_query_head(s: Session, rest: str) -> str:
    name = rest.strip()
    if not name:
        raise CommandError("usage: query-head <symbol>")
    head = LOGIC.get(name) or s.sig.get(name)
    if head is None:
        raise CommandError(f"unknown symbol {name}")
    hits = _sorted_terms(s.index.by_head(head))
    return "\n".join([f"{len(hits)} terms with head {name}"] + [f"  {h}" for h in hits])


def _cmd_occurrences(s: Session, rest: str) -> str:
    query = canonical_form(s.term(rest), s.index.strategy)
    hits = sorted((pretty(root, "nameless"), str(pos)) for root, pos in s.index.occurrences(query))
    return "\n".join([f"{len(hits)} occurrences"] + [f"  {root} at {pos}" for root, pos in hits])


def _cmd_context(s: Session, rest: str) -> str:
    bb = s.blackboard
    if not rest:
        return bb.dump_tree([FORMULAS])
    cid = _int(rest, "context")
    ctx = bb.context(cid)
    lines = [
        f"context {cid}: {ctx.kind.value} {ctx.status.label}",
        f"  parent {ctx.parent if ctx.parent is not None else '-'}, children {ctx.children or '-'}",
    ]
    lines += [f"  {d}" for d in bb.query(FORMULAS, cid)]
    return "\n".join(lines)


def _cmd_split(s: Session, rest: str) -> str:
    words = rest.split()
    if len(words) != 3:
        raise CommandError("usage: split <context> AND|OR <n>")
    cid, n = _int(words[0], "context"), _int(words[2], "n")
    try:
        kind = SplitKind(words[1].upper())
    except ValueError:
        raise CommandError("split kind must be AND or OR") from None
    if not 1 <= n <= MAX_SPLIT:
        raise CommandError(f"n must be between 1 and {MAX_SPLIT}")
    children = s.blackboard.split(cid, kind, n)
    return f"context {cid} split {kind.value} into {', '.join(map(str, children))}"


def _cmd_status(s: Session, rest: str) -> str:
    words = rest.split()
    if len(words) > 2:
        raise CommandError("usage: status [context] [status]")
    cid = _int(words[0], "context") if words else ROOT
    if len(words) == 2:
        status = SZSStatus.from_name(words[1])
        s.blackboard.set_status(cid, status)
    return "\n".join(f"context {c}: {s.blackboard.status(c).label}" for c in [cid] + ([ROOT] if cid != ROOT else []))


def _agent_line(s: Session, agent: Agent) -> str:
    mark = "on " if agent.name in s.enabled else "off"
    if isinstance(agent, TransformAgent):
        bid = f"bid {agent.policy.base:g} + {agent.policy.per_node:g}/node saved"
    else:
        bid = f"bid {getattr(agent, 'bid', 0):g}"
    return f"  [{mark}] {agent.name}: {bid}"


def _configure_agents(s: Session, data: dict) -> list[str]:
    out = []
    for name, params in data.items():
        agent = s.agents.get(name)
        if agent is None:
            raise CommandError(f"unknown agent {name}")
        if isinstance(agent, TransformAgent):
            agent.policy = BidPolicy(**{**agent.policy.__dict__, **params})
        else:
            for key, value in params.items():
                if not hasattr(agent, key) or key.startswith("_") or key == "name":
                    raise CommandError(f"agent {name} has no parameter {key}")
                setattr(agent, key, value)
        out.append(f"configured {name}")
    return out


def _cmd_agents(s: Session, rest: str) -> str:
    words = shlex.split(rest)
    if words:
        action, names = words[0].lower(), words[1:]
        if action == "config":
            if len(names) != 1:
                raise CommandError("usage: agents config <file.json>")
            data = json.loads(s.path(names[0]).read_text(encoding="utf-8"))
            return "\n".join(_configure_agents(s, data))
        if action not in ("enable", "disable", "only"):
            raise CommandError("usage: agents [enable|disable|only <names>...] | agents config <file>")
        unknown = [n for n in names if n not in s.agents]
        if unknown:
            raise CommandError(f"unknown agent {unknown[0]}")
        if action == "only":
            s.enabled = set(names)
        elif action == "enable":
            s.enabled |= set(names)
        else:
            s.enabled -= set(names)
    return "\n".join(["agents:"] + [_agent_line(s, a) for a in s.agents.values()])


def _prover_line(spec: ProverSpec) -> str:
    where = spec.endpoint if spec.mode is ProverMode.REMOTE else "local process"
    return f"  {spec.name}: {spec.mode.value} {spec.dialect.value} limit {spec.time_limit:g}s via {where}"


def _cmd_provers(s: Session, rest: str) -> str:
    words = shlex.split(rest)
    if words:
        action = words[0].lower()
        if action == "load" and len(words) == 2:
            specs = load_specs(s.path(words[1]))
            s.provers.update(specs)
            return f"loaded {len(specs)} provers: {', '.join(specs)}"
        if action == "mock" and len(words) >= 3:
            name, answer = words[1], words[2]
            opts = _keyvals(words[3:])
            delay = float(opts.pop("delay", 0))
            limit = float(opts.pop("limit", 5))
            if opts:
                raise CommandError(f"unknown option {next(iter(opts))}")
            status = SZSStatus.from_name(answer)
            reply = f"% SZS status {status.label} for problem\n"
            s.provers[name] = ProverSpec(name, ProverMode.LOCAL, limit, command=mock_local_command(reply, delay))
            return f"mock prover {name} answers {status.label} after {delay:g}s (limit {limit:g}s)"
        if action == "attach" and len(words) == 3:
            spec = s.provers.get(words[1])
            if spec is None:
                raise CommandError(f"unknown prover {words[1]}")
            target = None if words[2] == "all" else _int(words[2], "context")
            if target is not None:
                s.blackboard.context(target)
            agent = ExternalProverAgent(spec, target)
            s.agents[agent.name] = agent
            s.enabled.add(agent.name)
            return f"agent {agent.name} enabled"
        raise CommandError("usage: provers [load <file> | mock <name> <status> [delay=s] [limit=s] | attach <name> <context|all>]")
    if not s.provers:
        return "no provers"
    return "\n".join(["provers:"] + [_prover_line(p) for p in s.provers.values()])


def _cmd_run(s: Session, rest: str) -> str:
    opts = _keyvals(rest.split())
    cfg = s.config
    params = {}
    for key, field_name, conv in (
        ("parallel", "max_parallel_tasks", int),
        ("timeout", "timeout", float),
        ("rounds", "max_rounds", int),
    ):
        if key in opts:
            params[field_name] = conv(opts.pop(key))
    if opts:
        raise CommandError(f"unknown option {next(iter(opts))}")
    cfg = SchedulerConfig(**{**cfg.__dict__, **params})
    agents = [a for name, a in s.agents.items() if name in s.enabled]
    trace: list[str] = []
    status = run_loop(s.blackboard, agents, cfg, trace)
    return "\n".join(trace + [f"result: {status.label}"])


def _cmd_stats(s: Session, rest: str) -> str:
    lines = [
        "index: " + ", ".join(f"{k} {v}" for k, v in s.index.stats().items()),
        f"contexts: {len(s.blackboard.contexts())}",
        "stores: " + ", ".join(f"{sid} {n}" for sid, _, n in s.blackboard.store_info()),
    ]
    if s.in_transcript:
        # the term bank is shared by the whole process, so its counts and
        # the timings would make transcripts unrepeatable
        lines.append("term bank and timings: omitted in transcripts")
    else:
        bank = bank_stats()
        lines.insert(0, "terms interned: " + ", ".join(f"{k} {v}" for k, v in sorted(bank.items())))
        total = sum(t for _, t in s.timings)
        lines.append(f"timings: {len(s.timings)} commands, {total * 1000:.1f} ms total")
        lines += [f"  {verb} {t * 1000:.2f} ms" for verb, t in s.timings[-5:]]
    return "\n".join(lines)


_HANDLERS: dict[str, Callable[[Session, str], str]] = {
    "help": _cmd_help,
    "load": _cmd_load,
    "parse": _cmd_parse,
    "let": _cmd_let,
    "show": _cmd_show,
    "type": _cmd_type,
    "normalize": _cmd_normalize,
    "eta": _cmd_eta,
    "index": _cmd_index,
    "query-head": _cmd_query_head,
    "occurrences": _cmd_occurrences,
    "context": _cmd_context,
    "split": _cmd_split,
    "status": _cmd_status,
    "agents": _cmd_agents,
    "run": _cmd_run,
    "provers": _cmd_provers,
    "stats": _cmd_stats,
    "quit": _cmd_quit,
    "exit": _cmd_quit,
}

_HELP: dict[str, tuple[str, str]] = {
    "load": ("load <file> [context]", "add a TPTP problem's formulas to a context"),
    "parse": ("parse <annotated formulas>", "parse inline TPTP and add it to the root context"),
    "let": ("let <name> = <term>", "bind a THF term to a name"),
    "show": ("show <term> [nameless|spine|named|tptp] [ascii]", "print a term"),
    "type": ("type <term>", "print the type of a term"),
    "normalize": ("normalize <term> [BASE|SS|SL|LS|LL]", "β-normalize and count steps"),
    "eta": ("eta <term>", "β-normal η-long form"),
    "index": ("index [<term>]", "index a term, or show index sizes"),
    "query-head": ("query-head <symbol>", "indexed subterms with that head"),
    "occurrences": ("occurrences <term>", "positions of a subterm in indexed terms"),
    "context": ("context [id]", "show the context tree or one context"),
    "split": ("split <id> AND|OR <n>", "split a leaf context"),
    "status": ("status [id] [status]", "show or set a context status"),
    "agents": ("agents [enable|disable|only <names>] | config <file>", "list or configure agents"),
    "provers": ("provers [load <file> | mock ... | attach <name> <ctx|all>]", "external provers"),
    "run": ("run [parallel=N] [timeout=S] [rounds=N]", "run the scheduler"),
    "stats": ("stats", "sizes and timings"),
    "help": ("help [command]", "this list"),
    "quit": ("quit", "leave"),
}

VERBS = tuple(_HANDLERS)


# ---------------------------------------------------------------------------
# scripts and the REPL


def script(session: Session, path: str | Path) -> str:
    """Run a script file and return its transcript: each command echoed
    with ``> `` followed by its output."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        return f"error: cannot read script {path}: {exc}"
    previous = session.base_dir, session.in_transcript
    session.base_dir, session.in_transcript = path.parent, True
    out: list[str] = []
    try:
        for line in lines:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            out.append(f"> {text}")
            result = session.execute(text)
            if result:
                out.append(result)
            if session.done:
                break
    finally:
        session.base_dir, session.in_transcript = previous
    return "\n".join(out) + ("\n" if out else "")


def repl(session: Session, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    interactive = stdin.isatty()
    while not session.done:
        if interactive:
            stdout.write("holkit> ")
            stdout.flush()
        line = stdin.readline()
        if not line:
            break
        result = session.execute(line)
        if result:
            stdout.write(result + "\n")
            stdout.flush()


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="holkit", description="Interactive higher-order logic workbench.")
    parser.add_argument("script", nargs="?", help="script file to run instead of the REPL")
    parser.add_argument("-c", "--command", action="append", default=[], help="run a command (repeatable)")
    parser.add_argument("--max-parallel", type=int, default=4, help="tasks executed in parallel per round")
    parser.add_argument("--timeout", type=float, default=300.0, help="overall scheduler timeout in seconds")
    parser.add_argument("--round-timeout", type=float, default=60.0, help="per-round timeout in seconds")
    parser.add_argument("--provers", help="JSON file with prover specs")
    parser.add_argument("--agents-config", help="JSON file with per-agent bid parameters")
    parser.add_argument("--disable", action="append", default=[], help="disable an agent by name")
    args = parser.parse_args(argv)
    try:
        config = SchedulerConfig(args.max_parallel, args.round_timeout, args.timeout)
        session = Session(config=config)
        if args.provers:
            session.provers.update(load_specs(args.provers))
        if args.agents_config:
            _configure_agents(session, json.loads(Path(args.agents_config).read_text(encoding="utf-8")))
        for name in args.disable:
            if name not in session.agents:
                raise ValueError(f"unknown agent {name}")
            session.enabled.discard(name)
    except (OSError, ValueError, TypeError, CommandError) as exc:
        print(f"holkit: {exc}", file=sys.stderr)
        return 2
    for command in args.command:
        result = session.execute(command)
        if result:
            print(result)
        if session.done:
            return 0
    if args.script:
        sys.stdout.write(script(session, args.script))
    elif not args.command:
        repl(session)
    return 0


if __name__ == "__main__":
    sys.exit(main())

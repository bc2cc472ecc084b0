"""Client for TPTP-compliant external provers.

Two transports are supported: a local process that receives the problem
as a temporary file argument, and a remote endpoint that accepts a
SystemOnTPTP-style form POST and answers with plain prover output.  A
small in-process HTTP server stands in for the remote service in tests
and demos.
"""

from __future__ import annotations

import enum
import json
import os
import subprocess
import sys
import tempfile
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable, Sequence

from .terms import Signature
from .tptp import AnnotatedFormula, Dialect, SZSStatus, parse_szs, render_problem
from .tptp.szs import NO_STATUS

__all__ = [
    "ProverMode",
    "ProverSpec",
    "ProverResult",
    "submit",
    "load_specs",
    "MockProverServer",
    "mock_local_command",
    "DEFAULT_GRACE",
]

# extra seconds allowed beyond a prover's time limit before giving up on it
DEFAULT_GRACE = 1.0


class ProverMode(str, enum.Enum):
    LOCAL = "local"
    REMOTE = "remote"


@dataclass(frozen=True)
class ProverSpec:
    name: str
    mode: ProverMode
    time_limit: float
    dialect: Dialect = Dialect.THF
    command: tuple[str, ...] | None = None
    endpoint: str | None = None
    system: str | None = None
    grace: float = DEFAULT_GRACE
    bid: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", ProverMode(self.mode))
        object.__setattr__(self, "dialect", Dialect(self.dialect))
        if self.command is not None:
            object.__setattr__(self, "command", tuple(self.command))
        if not self.time_limit > 0:
            raise ValueError(f"{self.name}: time limit must be positive")
        if self.mode is ProverMode.LOCAL and (not self.command or self.endpoint):
            raise ValueError(f"{self.name}: local provers need a command and no endpoint")
        if self.mode is ProverMode.REMOTE and (not self.endpoint or self.command):
            raise ValueError(f"{self.name}: remote provers need an endpoint and no command")

    @classmethod
    def from_dict(cls, data: dict) -> ProverSpec:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown prover spec fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class ProverResult:
    status: SZSStatus
    raw_output: str
    wall_time: float = field(default=0.0, compare=False)


def load_specs(path: str | os.PathLike) -> dict[str, ProverSpec]:
    """Read prover specs from a JSON file: ``{"provers": [{...}, ...]}``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = data["provers"] if isinstance(data, dict) else data
    specs = [ProverSpec.from_dict(entry) for entry in entries]
    return {s.name: s for s in specs}


def _status_of(output: str) -> SZSStatus:
    status = parse_szs(output)
    return SZSStatus.UNKNOWN if status is NO_STATUS else status


def submit(
    problem: Sequence[AnnotatedFormula] | str, spec: ProverSpec, sig: Signature | None = None
) -> ProverResult:
    """Send ``problem`` to the prover and classify its answer.

    Output without an SZS status line is Unknown.  Failure to launch or
    connect is Error; exceeding ``time_limit + grace`` is Timeout.
    """
    text = problem if isinstance(problem, str) else render_problem(list(problem), spec.dialect, sig)
    start = time.monotonic()
    if spec.mode is ProverMode.LOCAL:
        result = _submit_local(text, spec)
    else:
        result = _submit_remote(text, spec)
    result.wall_time = time.monotonic() - start
    return result


def _submit_local(text: str, spec: ProverSpec) -> ProverResult:
    with tempfile.TemporaryDirectory(prefix="holkit-") as tmp:
        path = os.path.join(tmp, "problem.p")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        limit = f"{spec.time_limit:g}"
        command = [part.replace("{file}", path).replace("{time}", limit) for part in spec.command]
        if not any("{file}" in part for part in spec.command):
            command.append(path)
        try:
            proc = subprocess.run(
                command, capture_output=True, text=True, timeout=spec.time_limit + spec.grace
            )
        except subprocess.TimeoutExpired as exc:
            partial = exc.stdout or ""
            if isinstance(partial, bytes):
                partial = partial.decode("utf-8", "replace")
            return ProverResult(SZSStatus.TIMEOUT, partial)
        except OSError as exc:
            return ProverResult(SZSStatus.ERROR, f"could not launch {command[0]}: {exc}")
    output = proc.stdout + (proc.stderr and "\n" + proc.stderr)
    return ProverResult(_status_of(proc.stdout), output)


def _submit_remote(text: str, spec: ProverSpec) -> ProverResult:
    system = spec.system or spec.name
    form = {
        "ProblemSource": "FORMULAE",
        "FORMULAEProblem": text,
        "SystemAndVersion": system,
        "TimeLimit": f"{spec.time_limit:g}",
        "NoHTML": "1",
        "SubmitButton": "RunSelectedSystems",
    }
    body = urllib.parse.urlencode(form).encode("utf-8")
    request = urllib.request.Request(spec.endpoint, data=body, method="POST")
    request.add_header("Content-Type", "application/x-www-form-urlencoded")
    deadline = spec.time_limit + spec.grace
    box: dict[str, ProverResult] = {}

    def worker() -> None:
        try:
            with urllib.request.urlopen(request, timeout=deadline) as response:
                output = response.read().decode("utf-8", "replace")
            box["result"] = ProverResult(_status_of(output), output)
        except TimeoutError:
            box["result"] = ProverResult(SZSStatus.TIMEOUT, "")
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", "replace") if exc.fp else ""
            box["result"] = ProverResult(SZSStatus.ERROR, f"HTTP {exc.code}: {detail}")
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                box["result"] = ProverResult(SZSStatus.TIMEOUT, "")
            else:
                box["result"] = ProverResult(SZSStatus.ERROR, f"could not reach {spec.endpoint}: {exc.reason}")
        except OSError as exc:
            box["result"] = ProverResult(SZSStatus.ERROR, f"connection to {spec.endpoint} failed: {exc}")

    thread = threading.Thread(target=worker, daemon=True)
    thread.start()
    thread.join(deadline)
    # a reply that keeps trickling in past the deadline is abandoned
    return box.get("result") or ProverResult(SZSStatus.TIMEOUT, "")


# ---------------------------------------------------------------------------
# mocks


class MockProverServer:
    """HTTP endpoint answering every POST with a fixed (or computed) reply.

    ``reply`` may be a string or a function of the decoded form.  ``delay``
    seconds pass before the reply is sent.  Use as a context manager.
    """

    def __init__(self, reply: str | Callable[[dict[str, str]], str] = "% SZS status Theorem", delay: float = 0.0) -> None:
        self.reply = reply
        self.delay = delay
        self.requests: list[dict[str, str]] = []
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        if self._server is None:
            raise RuntimeError("server not started")
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/SystemOnTPTPFormReply"

    def start(self) -> MockProverServer:
        owner = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self) -> None:  # noqa: N802 - http.server naming
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length).decode("utf-8")
                form = {k: v[0] for k, v in urllib.parse.parse_qs(raw).items()}
                owner.requests.append(form)
                if owner.delay:
                    time.sleep(owner.delay)
                reply = owner.reply(form) if callable(owner.reply) else owner.reply
                data = reply.encode("utf-8")
                try:
                    self.send_response(200)
                    self.send_header("Content-Type", "text/plain; charset=utf-8")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except OSError:
                    pass  # client gave up

            def log_message(self, *args) -> None:
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> MockProverServer:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def mock_local_command(reply: str, delay: float = 0.0) -> tuple[str, ...]:
    """A command line running a stand-in prover that sleeps, then prints ``reply``."""
    code = f"import sys, time; time.sleep({delay!r}); sys.stdout.write({reply!r})"
    return (sys.executable, "-c", code, "{file}")

"""SZS status values and the ``% SZS status`` line convention."""

from __future__ import annotations

import enum

__all__ = ["SZSStatus", "NO_STATUS", "NoStatus", "parse_szs", "format_szs", "SUCCESS", "SZS_PREFIX"]

SZS_PREFIX = "% SZS status "


class SZSStatus(enum.Enum):
    # success
    THEOREM = ("Theorem", "THM")
    UNSATISFIABLE = ("Unsatisfiable", "UNS")
    COUNTER_SATISFIABLE = ("CounterSatisfiable", "CSA")
    SATISFIABLE = ("Satisfiable", "SAT")
    CONTRADICTORY_AXIOMS = ("ContradictoryAxioms", "CAX")
    # no success
    OPEN = ("Open", "OPN")
    UNKNOWN = ("Unknown", "UNK")
    TIMEOUT = ("Timeout", "TMO")
    RESOURCE_OUT = ("ResourceOut", "RSO")
    MEMORY_OUT = ("MemoryOut", "MMO")
    GAVE_UP = ("GaveUp", "GUP")
    INAPPROPRIATE = ("Inappropriate", "IAP")
    ERROR = ("Error", "ERR")

    def __init__(self, label: str, code: str) -> None:
        self.label = label
        self.code = code

    def __str__(self) -> str:
        return self.label

    @property
    def is_success(self) -> bool:
        return self in SUCCESS

    @classmethod
    def from_name(cls, text: str) -> SZSStatus:
        status = _BY_NAME.get(text) or _BY_NAME.get(text.upper())
        if status is None:
            raise ValueError(f"unknown SZS status {text!r}")
        return status


SUCCESS = frozenset(
    {
        SZSStatus.THEOREM,
        SZSStatus.UNSATISFIABLE,
        SZSStatus.COUNTER_SATISFIABLE,
        SZSStatus.SATISFIABLE,
        SZSStatus.CONTRADICTORY_AXIOMS,
    }
)

_BY_NAME: dict[str, SZSStatus] = {}
for _s in SZSStatus:
    _BY_NAME[_s.label] = _s
    _BY_NAME[_s.code] = _s


class NoStatus:
    """Marker returned when no SZS status line is present."""

    _instance = None

    def __new__(cls) -> NoStatus:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoStatus"

    def __bool__(self) -> bool:
        return False


NO_STATUS = NoStatus()


def parse_szs(text: str) -> SZSStatus | NoStatus:
    """First status found on a line starting with ``% SZS status ``."""
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith(SZS_PREFIX):
            continue
        rest = line[len(SZS_PREFIX) :].split()
        if rest and rest[0] in _BY_NAME:
            return _BY_NAME[rest[0]]
    return NO_STATUS


def format_szs(status: SZSStatus, problem: str | None = None) -> str:
    line = SZS_PREFIX + status.label
    return f"{line} for {problem}" if problem else line

"""Boolean actuation law and its synthesis from action tables.

Variables are ordered A, B, C, D. A 4-character pattern such as ``"1-01"``
fixes A=1, C=0, D=1 and leaves B free. Commands are written ``L-R+`` etc.:
the sign says whether that wheel's speed is decreased or increased.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from ._textfmt import ParseError, read_lines
from .snn import OUTPUT_LABELS

VARS = OUTPUT_LABELS


class OutputBits(NamedTuple):
    a: bool
    b: bool
    c: bool
    d: bool

    @classmethod
    def from_index(cls, i: int) -> "OutputBits":
        # A is the most significant bit, matching the pattern text order
        return cls(*(bool(i >> (3 - k) & 1) for k in range(4)))

    @classmethod
    def from_pattern(cls, s: str) -> "OutputBits":
        return cls(*(ch == "1" for ch in s))

    @property
    def index(self) -> int:
        return sum(int(v) << (3 - k) for k, v in enumerate(self))

    @property
    def pattern(self) -> str:
        return "".join("1" if v else "0" for v in self)


ALL_BITS = tuple(OutputBits.from_index(i) for i in range(16))


class WheelCommand(enum.Enum):
    RETREAT = (-1, -1)
    TURN_LEFT = (-1, +1)
    TURN_RIGHT = (+1, -1)
    ADVANCE = (+1, +1)

    @property
    def left(self) -> int:
        return self.value[0]

    @property
    def right(self) -> int:
        return self.value[1]

    @property
    def mnemonic(self) -> str:
        sign = {1: "+", -1: "-"}
        return f"L{sign[self.left]}R{sign[self.right]}"

    @property
    def pretty(self) -> str:
        sign = {1: "⁺", -1: "⁻"}
        return f"(L{sign[self.left]},R{sign[self.right]})"

    @classmethod
    def parse(cls, text: str) -> "WheelCommand":
        norm = (text.strip().strip("()").replace(",", "").replace(" ", "")
                .replace("⁺", "+").replace("⁻", "-").replace("−", "-").upper())
        for cmd in cls:
            if norm == cmd.mnemonic:
                return cmd
        raise ValueError(f"unknown wheel command {text!r}")

    def __str__(self) -> str:
        return self.mnemonic


# ---------------------------------------------------------------------------
# the control law

def booleanize(counts) -> OutputBits:
    """A label is active when its output neuron fired at least once."""
    values = []
    for label in VARS:
        try:
            values.append(counts[label] >= 1)
        except KeyError:
            raise ValueError(f"counts lack output label {label!r}") from None
    return OutputBits(*values)


def law_cases(bits: OutputBits) -> list[bool]:
    """Truth of the three explicit control-law cases, in priority order."""
    a, b, c, d = bits
    return [
        a and b and c,
        (not c) and d and (a != b),
        a and (not b) and (c != d),
    ]


_CASE_COMMANDS = (WheelCommand.RETREAT, WheelCommand.TURN_LEFT, WheelCommand.TURN_RIGHT)


def decide(bits: OutputBits) -> WheelCommand:
    for hit, cmd in zip(law_cases(bits), _CASE_COMMANDS):
        if hit:
            return cmd
    return WheelCommand.ADVANCE


def left_wheel(bits: OutputBits) -> int:
    """Sign applied to the left wheel (the law's F output)."""
    return decide(bits).left


def right_wheel(bits: OutputBits) -> int:
    """Sign applied to the right wheel (the law's G output)."""
    return decide(bits).right


def apply(command: WheelCommand, speeds: tuple[float, float], delta: float,
          bounds: tuple[float, float]) -> tuple[float, float]:
    if delta <= 0:
        raise ValueError("delta must be positive")
    lo, hi = bounds
    if not lo < hi:
        raise ValueError("bounds must satisfy v_min < v_max")
    vl = min(hi, max(lo, speeds[0] + command.left * delta))
    vr = min(hi, max(lo, speeds[1] + command.right * delta))
    return vl, vr


# ---------------------------------------------------------------------------
# action tables

def pattern_matches(pattern: str, bits: OutputBits) -> bool:
    return all(p == "-" or (p == "1") == v for p, v in zip(pattern, bits))


def patterns_overlap(p: str, q: str) -> bool:
    return all(x == "-" or y == "-" or x == y for x, y in zip(p, q))


@dataclass(frozen=True)
class ActionRow:
    pattern: str
    command: WheelCommand
    labels: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.pattern} -> {self.command}"


@dataclass(frozen=True)
class ActionTable:
    """Rows of patterns mapped to commands, plus a default.

    With ``ordered`` the first matching row wins; otherwise overlapping rows
    with different commands are a conflict.
    """

    rows: tuple[ActionRow, ...]
    default: WheelCommand = WheelCommand.ADVANCE
    ordered: bool = False

    def conflicts(self) -> list[tuple[int, int]]:
        out = []
        for (i, r), (j, s) in itertools.combinations(enumerate(self.rows), 2):
            if r.command != s.command and patterns_overlap(r.pattern, s.pattern):
                out.append((i, j))
        return out

    def evaluate(self, bits: OutputBits) -> WheelCommand:
        for row in self.rows:
            if pattern_matches(row.pattern, bits):
                return row.command
        return self.default

    def flatten(self) -> dict[OutputBits, WheelCommand]:
        clashes = self.conflicts()
        if clashes and not self.ordered:
            listing = "; ".join(f"row {i + 1} ({self.rows[i]}) vs row {j + 1} ({self.rows[j]})" for i, j in clashes)
            raise ValueError(f"overlapping rows without declared priority: {listing}")
        return {bits: self.evaluate(bits) for bits in ALL_BITS}

    def referenced_labels(self) -> set[str]:
        return {VARS[k] for row in self.rows for k, p in enumerate(row.pattern) if p != "-"}


def _check_pattern(p: str) -> bool:
    return len(p) == 4 and set(p) <= {"0", "1", "-"}


def parse_action_lines(lines, source: str = "<string>") -> ActionTable:
    rows, default, ordered = [], WheelCommand.ADVANCE, False
    for line in lines:
        tok = line.tokens
        if tok[0] == "priority":
            if len(tok) != 2 or tok[1] not in ("ordered", "none"):
                raise line.error("expected 'priority ordered' or 'priority none'", 0, source)
            ordered = tok[1] == "ordered"
        elif tok[0] == "default":
            try:
                default = WheelCommand.parse(tok[1])
            except (IndexError, ValueError):
                raise line.error("expected 'default <command>'", 1, source) from None
        else:
            if not _check_pattern(tok[0]):
                raise line.error(f"malformed pattern {tok[0]!r} (4 chars of 0, 1, -)", 0, source)
            if len(tok) < 2:
                raise line.error("missing command", 1, source)
            try:
                cmd = WheelCommand.parse(tok[1])
            except ValueError as exc:
                raise line.error(str(exc), 1, source) from None
            rows.append(ActionRow(tok[0], cmd, tuple(tok[2:])))
    return ActionTable(tuple(rows), default, ordered)


def parse_action_table(text: str, source: str = "<string>") -> ActionTable:
    lines = read_lines(text, source)
    for line in lines:
        if line.section:
            raise line.error("action tables have no sections", 0, source)
    return parse_action_lines(lines, source)


def serialize_action_table(table: ActionTable) -> str:
    lines = [f"priority {'ordered' if table.ordered else 'none'}", f"default {table.default}",
             "# ABCD  command  labels"]
    for row in table.rows:
        lines.append(f"{row.pattern}  {row.command}  {' '.join(row.labels)}".rstrip())
    return "\n".join(lines) + "\n"


def load_action_table(path) -> ActionTable:
    path = Path(path)
    return parse_action_table(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# two-level minimization

def _combine(p: str, q: str) -> str | None:
    diff = [k for k, (x, y) in enumerate(zip(p, q)) if x != y]
    if len(diff) != 1 or "-" in (p[diff[0]], q[diff[0]]):
        return None
    k = diff[0]
    return p[:k] + "-" + p[k + 1:]


def _covers(cube: str, minterm: str) -> bool:
    return all(c == "-" or c == m for c, m in zip(cube, minterm))


def prime_implicants(n: int, on: Iterable[int], dc: Iterable[int] = ()) -> list[str]:
    """Quine-McCluskey tabulation; cubes are strings over {0, 1, -}."""
    level = {format(m, f"0{n}b") for m in set(on) | set(dc)}
    primes: set[str] = set()
    while level:
        used, nxt = set(), set()
        for p, q in itertools.combinations(sorted(level), 2):
            merged = _combine(p, q)
            if merged is not None:
                nxt.add(merged)
                used.update((p, q))
        primes |= level - used
        level = nxt
    return sorted(primes)


def _literals(cube: str) -> int:
    return sum(c != "-" for c in cube)


def minimize(n: int, on: Iterable[int], dc: Iterable[int] = ()) -> list[str]:
    """Minimum-cardinality cover of ``on`` by prime implicants.

    Ties on term count are broken by total literal count, then lexically, so
    the result is deterministic. The cover search branches on the lowest
    uncovered minterm and memoizes on the uncovered set.
    """
    on_terms = frozenset(format(m, f"0{n}b") for m in set(on))
    if not on_terms:
        return []
    primes = prime_implicants(n, on, dc)
    covers = {p: frozenset(m for m in on_terms if _covers(p, m)) for p in primes}

    @functools.lru_cache(maxsize=None)
    def best(uncovered: frozenset) -> tuple:
        if not uncovered:
            return (0, 0, ())
        m = min(uncovered)
        options = []
        for p in primes:
            if m in covers[p]:
                k, lits, rest = best(uncovered - covers[p])
                options.append((k + 1, lits + _literals(p), tuple(sorted((p,) + rest))))
        return min(options)

    return sorted(best(on_terms)[2], key=lambda c: (-_literals(c), c))


def term_text(cube: str, ascii_only: bool = False) -> str:
    if set(cube) == {"-"}:
        return "1"
    bar = "'" if ascii_only else "̄"
    return "".join(v if c == "1" else v + bar for v, c in zip(VARS, cube) if c != "-")


def parse_term(text: str) -> str:
    """Inverse of :func:`term_text`; accepts ``'`` or a combining bar for negation."""
    cube = ["-"] * 4
    chars = text.strip().replace("̅", "̄")
    i = 0
    while i < len(chars):
        v = chars[i].upper()
        if v not in VARS:
            raise ValueError(f"bad literal {chars[i]!r} in term {text!r}")
        neg = i + 1 < len(chars) and chars[i + 1] in "'̄"
        k = VARS.index(v)
        if cube[k] != "-":
            raise ValueError(f"variable {v} repeated in term {text!r}")
        cube[k] = "0" if neg else "1"
        i += 2 if neg else 1
    return "".join(cube)


@dataclass(frozen=True)
class SopExpression:
    """Minimized sum of products per command, plus synthesis diagnostics."""

    terms: Mapping[WheelCommand, tuple[str, ...]]
    diagnostics: tuple[str, ...] = field(default=())

    __hash__ = None

    def evaluate(self, bits: OutputBits) -> WheelCommand:
        hits = [cmd for cmd, cubes in self.terms.items() if any(pattern_matches(c, bits) for c in cubes)]
        if len(hits) != 1:
            raise ValueError(f"{bits.pattern}: expression selects {len(hits)} commands")
        return hits[0]

    def render(self, ascii_only: bool = False) -> str:
        lines = []
        for cmd in WheelCommand:
            cubes = self.terms.get(cmd, ())
            body = " + ".join(term_text(c, ascii_only) for c in cubes) or "0"
            label = cmd.mnemonic if ascii_only else cmd.pretty
            lines.append(f"{label}: {body}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.render()


def synthesize(table: ActionTable) -> SopExpression:
    flat = table.flatten()
    diagnostics = []
    for i, j in table.conflicts():
        shared = [b.pattern for b in ALL_BITS
                  if pattern_matches(table.rows[i].pattern, b) and pattern_matches(table.rows[j].pattern, b)]
        diagnostics.append(f"rows {i + 1} and {j + 1} overlap on {', '.join(shared)}; "
                           f"priority selects {table.rows[i].command}")
    terms = {}
    for cmd in WheelCommand:
        on = [b.index for b, c in flat.items() if c == cmd]
        terms[cmd] = tuple(minimize(4, on))
    return SopExpression(terms, tuple(diagnostics))


def priority_law_table() -> ActionTable:
    """The control law written as a priority-ordered action table."""
    rows = (
        ActionRow("111-", WheelCommand.RETREAT),
        ActionRow("1001", WheelCommand.TURN_LEFT),
        ActionRow("0101", WheelCommand.TURN_LEFT),
        ActionRow("1010", WheelCommand.TURN_RIGHT),
        ActionRow("1001", WheelCommand.TURN_RIGHT),
    )
    return ActionTable(rows, WheelCommand.ADVANCE, ordered=True)

"""Shared reader for the line-oriented, sectioned text formats.

Every file format in the package follows the same layout: ``#`` starts a
comment, blank lines are ignored, ``[name]`` opens a section, and any other
line is a whitespace-separated declaration. Lines before the first section
header belong to the header pseudo-section ``""``.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """A located diagnostic raised by any of the text-format parsers."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<string>"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


@dataclass(frozen=True)
class Line:
    section: str
    lineno: int
    tokens: tuple[str, ...]
    columns: tuple[int, ...]
    raw: str

    def error(self, message: str, index: int = 0, source: str = "<string>") -> ParseError:
        col = self.columns[index] if index < len(self.columns) else 1
        return ParseError(message, self.lineno, col, source)


def read_lines(text: str, source: str = "<string>", sections: tuple[str, ...] | None = None) -> list[Line]:
    out = []
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]") or len(stripped) < 3:
                raise ParseError(f"malformed section header {stripped!r}", lineno, body.index("[") + 1, source)
            section = stripped[1:-1].strip().lower()
            if sections is not None and section not in sections:
                raise ParseError(f"unknown section [{section}]", lineno, body.index("[") + 1, source)
            continue
        tokens, columns = [], []
        pos = 0
        for tok in body.split():
            pos = body.index(tok, pos)
            tokens.append(tok)
            columns.append(pos + 1)
            pos += len(tok)
        out.append(Line(section, lineno, tuple(tokens), tuple(columns), raw))
    return out


def parse_int(line: Line, index: int, what: str, source: str) -> int:
    try:
        return int(line.tokens[index])
    except IndexError:
        raise line.error(f"missing {what}", len(line.tokens), source) from None
    except ValueError:
        raise line.error(f"{what} must be an integer, got {line.tokens[index]!r}", index, source) from None


def parse_float(line: Line, index: int, what: str, source: str) -> float:
    try:
        return float(line.tokens[index])
    except IndexError:
        raise line.error(f"missing {what}", len(line.tokens), source) from None
    except ValueError:
        raise line.error(f"{what} must be a number, got {line.tokens[index]!r}", index, source) from None


def fmt_float(x: float) -> str:
    # repr round-trips exactly; keeps golden files bit-stable
    return repr(float(x))

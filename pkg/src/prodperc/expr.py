"""Parser and printer for the small graph expression language.

Grammar (whitespace is ignored everywhere except inside ``file(...)`` paths)::

    expr := term ("x" term)*
    term := atom ("^" uint)?
    atom := ("K" | "C" | "P") uint | "Q" uint | "file(" path ")"

``Q t`` is shorthand for ``K2^t``.  Examples: ``"K2^3"``, ``"C5 x K3"``,
``"K2^2 x K3"``, ``"file(base.txt)^4"``.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_C_MAX = 16

__all__ = [
    "Atom",
    "Term",
    "GraphSpec",
    "GraphExprError",
    "parse_graph_expr",
    "DEFAULT_C_MAX",
]


class GraphExprError(ValueError):
    """Syntax or range error in a graph expression; ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class Atom:
    kind: str  # "K", "C", "P", "Q" or "file"
    value: int | str  # order (Q: dimension) or file path

    def __str__(self) -> str:
        if self.kind == "file":
            return f"file({self.value})"
        return f"{self.kind}{self.value}"


@dataclass(frozen=True)
class Term:
    atom: Atom
    power: int = 1

    def __str__(self) -> str:
        return str(self.atom) if self.power == 1 else f"{self.atom}^{self.power}"


@dataclass(frozen=True)
class GraphSpec:
    terms: tuple[Term, ...]

    def __str__(self) -> str:
        return " x ".join(str(t) for t in self.terms)

    def factors(self) -> list[Atom]:
        """Flatten powers and ``Q`` shorthands into one atom per base graph."""
        out = []
        for term in self.terms:
            for _ in range(term.power):
                if term.atom.kind == "Q":
                    out.extend([Atom("K", 2)] * int(term.atom.value))
                else:
                    out.append(term.atom)
        return out


class _Parser:
    def __init__(self, text: str, c_max: int):
        self.text = text
        self.pos = 0
        self.c_max = c_max

    def _offset(self, pos: int | None = None) -> int:
        return len(self.text[: self.pos if pos is None else pos].encode("utf-8"))

    def error(self, message: str, pos: int | None = None):
        raise GraphExprError(message, self._offset(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def uint(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected unsigned integer")
        return int(self.text[start : self.pos])

    def atom(self) -> Atom:
        self.skip_ws()
        start = self.pos
        if self.text.startswith("file(", self.pos):
            self.pos += len("file(")
            close = self.text.find(")", self.pos)
            if close < 0:
                self.error("unterminated file(...)")
            path = self.text[self.pos : close].strip()
            if not path:
                self.error("empty file path")
            self.pos = close + 1
            return Atom("file", path)
        ch = self.peek()
        if ch not in ("K", "C", "P", "Q"):
            self.error("expected atom K<n>, C<n>, P<n>, Q<n> or file(path)")
        self.pos += 1
        value = self.uint()
        if ch == "Q":
            if value < 1:
                self.error("hypercube dimension must be >= 1", start)
        elif ch == "C" and value < 3:
            self.error("cycle order must be ≥ 3", start)
        elif not 2 <= value <= self.c_max:
            self.error(f"atom order must be in [2, {self.c_max}]", start)
        return Atom(ch, value)

    def term(self) -> Term:
        atom = self.atom()
        if self.peek() == "^":
            self.pos += 1
            pstart = self.pos
            power = self.uint()
            if power < 1:
                self.error("power must be >= 1", pstart)
            return Term(atom, power)
        return Term(atom)

    def expr(self) -> GraphSpec:
        terms = [self.term()]
        while self.peek() == "x":
            self.pos += 1
            terms.append(self.term())
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return GraphSpec(tuple(terms))


def parse_graph_expr(text: str, c_max: int = DEFAULT_C_MAX) -> GraphSpec:
    """Parse ``text`` into a :class:`GraphSpec`.

    Raises :class:`GraphExprError` carrying the byte offset of the problem.
    """
    if not text or not text.strip():
        raise GraphExprError("empty graph expression", 0)
    return _Parser(text, c_max).expr()

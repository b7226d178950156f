"""Wilkinson-notation model formulas.

A formula such as ``"R ~ X*Y - X"`` is tokenized, parsed with the usual
precedence (``:`` over ``*`` over ``+``/``-``), and expanded into a canonical
:class:`Formula`: a response name, an intercept flag, and an ordered list of
unique :class:`Term` objects.

Operator semantics:

* ``a:b`` is the pairwise union of the operands' variable sets, distributing
  over sums, so ``(A+B):C`` gives ``A:C + C:B`` and ``X:X`` collapses to ``X``.
* ``a*b`` is ``a + b + a:b``.
* ``- t`` removes the terms of ``t`` from everything to its left. Removing a
  term that is not present does nothing.
* ``1`` asserts the intercept, ``0`` (or ``- 1``) drops it. The last mention
  wins; with no mention the intercept is present.

Terms are then stably sorted by order (number of variables).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

__all__ = [
    "FormulaError",
    "FormulaSyntaxError",
    "Term",
    "Formula",
    "parse",
    "render",
    "formulas_equal",
]


class FormulaError(ValueError):
    """Raised for formulas that are well formed but not supported."""


class FormulaSyntaxError(FormulaError):
    """Raised when a formula string cannot be tokenized or parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")


@dataclass(frozen=True, eq=False)
class Term:
    """An interaction term: a non-empty set of variable names.

    ``names`` keeps first-appearance order for rendering and column labels;
    equality and hashing only look at the set.
    """

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("a term needs at least one variable")
        deduped = tuple(dict.fromkeys(self.names))
        object.__setattr__(self, "names", deduped)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.names)

    @property
    def order(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __contains__(self, name):
        return name in self.names

    def union(self, other: "Term") -> "Term":
        return Term(self.names + other.names)

    def without(self, name: str) -> "Term | None":
        """The margin of this term with ``name`` removed (None if empty)."""
        rest = tuple(n for n in self.names if n != name)
        return Term(rest) if rest else None

    @property
    def label(self) -> str:
        return ":".join(self.names)

    def __repr__(self):
        return f"Term({self.label!r})"


@dataclass(frozen=True)
class Formula:
    response: str
    terms: tuple[Term, ...] = field(default_factory=tuple)
    intercept: bool = True

    def __post_init__(self):
        terms = _unique(self.terms)
        terms = sorted(terms, key=lambda t: t.order)  # stable: ties keep source order
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def variables(self) -> tuple[str, ...]:
        """Right-hand-side variables in first-appearance order."""
        seen: dict[str, None] = {}
        for term in self.terms:
            for name in term.names:
                seen.setdefault(name, None)
        return tuple(seen)

    def __str__(self):
        return render(self)


def _unique(terms: Iterable[Term]) -> list[Term]:
    out: list[Term] = []
    seen: set[Term] = set()
    for t in terms:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


# -- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z][A-Za-z0-9_.]*)
  | (?P<number>\d+(?:\.\d*)?)
  | (?P<op>%in%|[~+\-*:()])
  | (?P<bad>[\^/|%,=<>!&$@\[\]{}]|.)
    """,
    re.VERBOSE,
)

_UNSUPPORTED = {
    "^": "power operator '^' is not supported",
    "/": "nesting operator '/' is not supported",
    "%in%": "nesting operator '%in%' is not supported",
    "|": "random-effect terms '(... | group)' are not supported",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # name, number, op, end
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            continue
        if kind == "bad" or (kind == "op" and value == "%in%"):
            msg = _UNSUPPORTED.get(value, f"unknown operator {value!r}")
            raise FormulaSyntaxError(msg, text, m.start())
        tokens.append(_Token(kind, value, m.start()))
    tokens.append(_Token("end", "", len(text)))
    return tokens


# -- parser --------------------------------------------------------------------


@dataclass
class _Expr:
    """Intermediate value: expanded terms plus the last intercept mention."""

    terms: list[Term]
    intercept: bool | None = None


class _Parser:
    def __init__(self, text: str, tokens: list[_Token]):
        self.text = text
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise FormulaSyntaxError(message, self.text, tok.pos)

    def advance(self) -> _Token:
        tok = self.tok
        self.i += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in ops

    def expect_op(self, op: str):
        if not self.at_op(op):
            found = self.tok.value or "end of formula"
            self.error(f"expected {op!r}, found {found!r}")
        self.advance()

    # sum := ['-'] product (('+' | '-') product)*
    def parse_sum(self) -> _Expr:
        if self.at_op("-"):
            self.advance()
            value = _subtract(_Expr([]), self.parse_product())
        else:
            value = self.parse_product()
        while self.at_op("+", "-"):
            op = self.advance().value
            rhs = self.parse_product()
            value = _add(value, rhs) if op == "+" else _subtract(value, rhs)
        return value

    # product := interaction ('*' interaction)*
    def parse_product(self) -> _Expr:
        value = self.parse_interaction()
        while self.at_op("*"):
            star = self.advance()
            rhs = self.parse_interaction()
            value = _cross(value, rhs, self, star)
        return value

    # interaction := atom (':' atom)*
    def parse_interaction(self) -> _Expr:
        value = self.parse_atom()
        while self.at_op(":"):
            colon = self.advance()
            rhs = self.parse_atom()
            value = _interact(value, rhs, self, colon)
        return value

    def parse_atom(self) -> _Expr:
        tok = self.tok
        if tok.kind == "name":
            self.advance()
            if self.at_op("("):
                if tok.value == "I":
                    self.error("inline arithmetic I(...) is not supported", tok)
                self.error(f"function calls such as {tok.value}(...) are not supported", tok)
            return _Expr([Term((tok.value,))])
        if tok.kind == "number":
            self.advance()
            if tok.value == "1":
                return _Expr([], intercept=True)
            if tok.value == "0":
                return _Expr([], intercept=False)
            self.error(f"numeric literal {tok.value!r} is not allowed (only 0 and 1)", tok)
        if self.at_op("("):
            self.advance()
            if self.at_op(")"):
                self.error("empty parentheses")
            value = self.parse_sum()
            self.expect_op(")")
            return value
        if tok.kind == "end":
            self.error("unexpected end of formula")
        self.error(f"unexpected {tok.value!r}")


def _add(a: _Expr, b: _Expr) -> _Expr:
    intercept = b.intercept if b.intercept is not None else a.intercept
    return _Expr(_unique(a.terms + b.terms), intercept)


def _subtract(a: _Expr, b: _Expr) -> _Expr:
    drop = set(b.terms)
    intercept = a.intercept
    if b.intercept is not None:
        # "- 1" removes the intercept, "- 0" restores it
        intercept = not b.intercept
    return _Expr([t for t in a.terms if t not in drop], intercept)


def _interact(a: _Expr, b: _Expr, parser: _Parser, tok: _Token) -> _Expr:
    if a.intercept is not None or b.intercept is not None:
        parser.error("'0' and '1' cannot appear inside an interaction", tok)
    return _Expr(_unique(s.union(t) for s in a.terms for t in b.terms))


def _cross(a: _Expr, b: _Expr, parser: _Parser, tok: _Token) -> _Expr:
    return _add(_add(a, b), _interact(a, b, parser, tok))


def parse(text: str) -> Formula:
    """Parse and canonicalize a formula string.

    >>> render(parse("R ~ X*Y - X"))
    'R ~ Y + X:Y'
    """
    if text.count("~") != 1:
        raise FormulaSyntaxError(
            "formula must contain exactly one '~'", text, text.find("~") if "~" in text else 0
        )
    tokens = _tokenize(text)
    parser = _Parser(text, tokens)

    if parser.tok.kind != "name":
        parser.error("left-hand side must be a single variable name")
    response = parser.advance().value
    parser.expect_op("~")
    if parser.tok.kind == "end":
        parser.error("empty right-hand side")

    value = parser.parse_sum()
    if parser.tok.kind != "end":
        parser.error(f"unexpected {parser.tok.value!r}")
    if response in {v for t in value.terms for v in t.names}:
        raise FormulaError(f"response {response!r} also appears on the right-hand side")

    intercept = True if value.intercept is None else value.intercept
    return Formula(response, tuple(value.terms), intercept)


def render(f: Formula) -> str:
    """Canonical string form; ``parse(render(f)) == f``."""
    rhs = " + ".join(t.label for t in f.terms)
    if not rhs:
        rhs = "1" if f.intercept else "0"
    elif not f.intercept:
        rhs += " - 1"
    return f"{f.response} ~ {rhs}"


def formulas_equal(a: Formula, b: Formula) -> bool:
    """Same response, intercept and set of terms (term order ignored)."""
    return (
        a.response == b.response
        and a.intercept == b.intercept
        and set(a.terms) == set(b.terms)
    )

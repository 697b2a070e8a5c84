"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' uint)?
    atom   := number | name | '(' expr ')'

Numbers are integers or decimals (``0.25`` becomes ``1/4`` exactly).  A
rational literal ``a/b`` is the division of two numbers; in general the
right operand of ``/`` must reduce to a nonzero constant.  Names are either
variables (``prefix`` followed by a 1-based index, or an explicit name list)
or entries of the constants table.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Sequence

from .poly import MultiPoly, as_fraction

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d*)?|\.\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Malformed expression; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        self.text = text
        super().__init__(f"{message} at byte {self.offset}")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, nvars, var_prefix, constants, names):
        self.text = text
        self.nvars = nvars
        self.prefix = var_prefix
        self.constants = {k: as_fraction(v) for k, v in (constants or {}).items()}
        self.names = {n: i + 1 for i, n in enumerate(names)} if names is not None else None
        self.var_re = re.compile(re.escape(var_prefix) + r"(\d+)") if names is None else None
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, pos=None):
        raise ParseError(message, self.text, self.peek()[2] if pos is None else pos)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.advance()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if q.total_degree() > 0:
                    self.fail("divisor must be a constant", pos)
                c = q.constant_term()
                if c == 0:
                    self.fail("division by zero", pos)
                p = p * (1 / c)
        return p

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.advance()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            kind, val, pos = self.peek()
            if kind != "number" or not val.isdigit():
                self.fail("exponent must be a nonnegative integer", pos)
            self.advance()
            return base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "number":
            self.advance()
            return MultiPoly.constant(self.nvars, Fraction(val))
        if kind == "name":
            self.advance()
            return self.resolve(val, pos)
        if kind == "op" and val == "(":
            self.advance()
            p = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.advance()
            return p
        if kind == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected {val!r}")

    def resolve(self, name, pos):
        if self.names is not None:
            if name in self.names:
                return MultiPoly.variable(self.nvars, self.names[name])
        else:
            m = self.var_re.fullmatch(name)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.nvars:
                    self.fail(f"variable {name} out of range (1..{self.nvars})", pos)
                return MultiPoly.variable(self.nvars, idx)
        if name in self.constants:
            return MultiPoly.constant(self.nvars, self.constants[name])
        self.fail(f"unknown name {name!r}", pos)


def parse(
    expr_text: str,
    num_vars: int,
    var_prefix: str = "u",
    constants: Mapping[str, object] | None = None,
    names: Sequence[str] | None = None,
) -> MultiPoly:
    """Parse ``expr_text`` into an expanded polynomial.

    ``names`` replaces the ``var_prefix`` numbering with explicit variable
    names (used for spatial coordinates ``x``, ``y``).
    """
    if names is not None:
        if len(names) != num_vars:
            raise ValueError(f"{len(names)} names given for {num_vars} variables")
    elif not isinstance(num_vars, int) or num_vars < 1:
        raise ValueError(f"num_vars must be a positive integer, got {num_vars!r}")
    return _Parser(expr_text, num_vars, var_prefix, constants, names).parse()

"""Recursive-descent parser for HCSP program text.

Grammar summary (see docs/grammar.md for the full reference)::

    program  := choice ( "||" chans choice )*
    choice   := seq ( "$" seq )*
    seq      := command ( ";" seq )?
    command  := "skip" | "wait" expr | x ":=" expr | ch "?" x | ch "!" expr
              | "if" bexpr "then" choice "else" choice "endif"
              | "(" program ")" [ "*" ]
              | "<" eqs "&" bexpr [ "|>" choice ] ">" [ "|>" "[]" "(" branches ")" ]
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from ..exceptions import HcspSyntaxError, InvalidProcessError
from ..symbolic.expr import (
    FALSE,
    TRUE,
    Add,
    And,
    BExpr,
    Cmp,
    Const,
    Div,
    Expr,
    Implies,
    Mul,
    Neg,
    Not,
    Or,
    Pow,
    Sub,
    Var,
)
from .ast import (
    ODE,
    Assign,
    CommBranch,
    Cond,
    IChoice,
    Input,
    Interrupt,
    Output,
    Parallel,
    Process,
    Repeat,
    Seq,
    Skip,
    Wait,
)

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({"skip", "wait", "if", "then", "else", "endif", "true", "false"})

_SYMBOLS = [
    ":=", "||", "|>", "[]", "->", "&&", "==", "!=", "<=", ">=",
    "<", ">", "=", "&", "!", "?", ";", "$", "(", ")", "[", "]", ",",
    "+", "-", "*", "/", "^",
]  # fmt: skip
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<number>\d+(?:\.\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<symbol>" + "|".join(re.escape(s) for s in _SYMBOLS) + ")"
)
_CMP_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
DOT_SUFFIX = "_dot"


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "number", "ident", "keyword", "symbol", "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else self.text


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise HcspSyntaxError(
                line, column, frozenset(), text[pos],
                f"line {line}, column {column}: unexpected character {text[pos]!r}",
            )
        kind = match.lastgroup
        value = match.group()
        if kind == "nl":
            line += 1
            line_start = match.end()
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, line, column))
        elif kind in ("number", "symbol"):
            tokens.append(Token(kind, value, line, column))  # type: ignore[arg-type]
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Literal:
    """Markers for bare numeric literals, which fold ``1/2`` into a rational."""

    UNSIGNED = "unsigned"
    SIGNED = "signed"


class Parser:
    """Parser over a token list with one-token lookahead and limited backtracking."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # ------------------------------------------------------------------
    # Token helpers
    # ------------------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        token = self.current
        return token.kind in ("symbol", "keyword") and token.text in texts

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.pos += 1
        return token

    def error(self, *expected: str) -> HcspSyntaxError:
        token = self.current
        return HcspSyntaxError(token.line, token.column, frozenset(expected), token.describe())

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(text)
        return self.advance()

    def expect_ident(self) -> str:
        if self.current.kind != "ident":
            raise self.error("identifier")
        return self.advance().text

    def expect_end(self) -> None:
        if self.current.kind != "eof":
            raise self.error("end of input")

    def build(self, token: Token, factory, *args) -> Process:
        """Construct a node, reporting structural violations at ``token``."""
        try:
            return factory(*args)
        except InvalidProcessError as e:
            raise HcspSyntaxError(
                token.line, token.column, frozenset(), token.describe(),
                f"line {token.line}, column {token.column}: {e}",
            ) from e

    # ------------------------------------------------------------------
    # Processes
    # ------------------------------------------------------------------

    def program(self) -> Process:
        left = self.choice()
        while self.at("||"):
            token = self.advance()
            chans = self.channel_set()
            right = self.choice()
            left = self.build(token, Parallel, left, chans, right)
        return left

    def channel_set(self) -> frozenset[str]:
        if self.at("[]"):
            self.advance()
            return frozenset()
        self.expect("[")
        names = [self.expect_ident()]
        while self.at(","):
            self.advance()
            names.append(self.expect_ident())
        self.expect("]")
        return frozenset(names)

    def choice(self) -> Process:
        left = self.seq()
        while self.at("$"):
            token = self.advance()
            left = self.build(token, IChoice, left, self.seq())
        return left

    def seq(self) -> Process:
        first = self.command()
        if self.at(";"):
            token = self.advance()
            return self.build(token, Seq, first, self.seq())
        return first

    def command(self) -> Process:
        token = self.current
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("wait"):
            self.advance()
            return Wait(self.expr())
        if self.at("if"):
            return self.conditional()
        if self.at("("):
            self.advance()
            inner = self.program()
            self.expect(")")
            if self.at("*"):
                self.advance()
                return self.build(token, Repeat, inner)
            return inner
        if self.at("<"):
            return self.evolution()
        if token.kind == "ident":
            name = self.advance().text
            if self.at(":="):
                self.advance()
                return Assign(name, self.expr())
            if self.at("?"):
                self.advance()
                return Input(name, self.expect_ident())
            if self.at("!"):
                self.advance()
                return Output(name, self.expr())
            raise self.error(":=", "?", "!")
        raise self.error("skip", "wait", "if", "(", "<", "identifier")

    def conditional(self) -> Process:
        token = self.expect("if")
        cond = self.bexpr()
        self.expect("then")
        then = self.choice()
        self.expect("else")
        else_ = self.choice()
        self.expect("endif")
        return self.build(token, Cond, cond, then, else_)

    def evolution(self) -> Process:
        token = self.expect("<")
        eqs = [self.equation()]
        while self.at(","):
            self.advance()
            eqs.append(self.equation())
        self.expect("&")
        domain = self.bexpr()
        tail: Process | None = None
        if self.at("|>"):
            self.advance()
            tail = self.choice()
        self.expect(">")
        if not self.at("|>"):
            if tail is not None:
                raise self.error("|>")
            return self.build(token, ODE, tuple(eqs), domain)
        self.advance()
        self.expect("[]")
        self.expect("(")
        branches = [self.branch()]
        while self.at(","):
            self.advance()
            branches.append(self.branch())
        self.expect(")")
        return self.build(
            token, Interrupt, tuple(eqs), domain, tail or Skip(), tuple(branches)
        )

    def equation(self) -> tuple[str, Expr]:
        token = self.current
        name = self.expect_ident()
        if not name.endswith(DOT_SUFFIX) or len(name) == len(DOT_SUFFIX):
            raise HcspSyntaxError(
                token.line, token.column, frozenset({"x_dot"}), name,
                f"line {token.line}, column {token.column}: "
                f"ODE left-hand side must be a derivative like x_dot, found {name!r}",
            )
        self.expect("=")
        return name[: -len(DOT_SUFFIX)], self.expr()

    def branch(self) -> CommBranch:
        token = self.current
        ch = self.expect_ident()
        if self.at("?"):
            self.advance()
            var = self.expect_ident()
            self.expect("->")
            return self.build(token, CommBranch, "?", ch, var, None, self.choice())
        if self.at("!"):
            self.advance()
            expr = self.expr()
            self.expect("->")
            return self.build(token, CommBranch, "!", ch, None, expr, self.choice())
        raise self.error("?", "!")

    # ------------------------------------------------------------------
    # Boolean expressions
    # ------------------------------------------------------------------

    def bexpr(self) -> BExpr:
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.bexpr())
        return left

    def disjunction(self) -> BExpr:
        left = self.conjunction()
        while self.at("||") and not self._at_parallel():
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def _at_parallel(self) -> bool:
        return self.peek().text in ("[", "[]") and self.peek().kind == "symbol"

    def conjunction(self) -> BExpr:
        left = self.negation()
        while self.at("&&"):
            self.advance()
            left = And(left, self.negation())
        return left

    def negation(self) -> BExpr:
        if self.at("!"):
            self.advance()
            return Not(self.negation())
        return self.bprimary()

    def bprimary(self) -> BExpr:
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("("):
            start = self.pos
            try:
                self.advance()
                inner = self.bexpr()
                self.expect(")")
                return inner
            except HcspSyntaxError as grouped:
                grouped_pos = self.pos
                self.pos = start
                try:
                    return self.comparison()
                except HcspSyntaxError as compared:
                    if grouped_pos > self.pos:
                        raise grouped from None
                    raise compared from None
        return self.comparison()

    def comparison(self) -> BExpr:
        left = self.expr()
        if not self.at(*_CMP_OPS):
            raise self.error(*sorted(_CMP_OPS))
        op = self.advance().text
        right = self.expr()
        if op == "!=":
            return Not(Cmp("==", left, right))
        return Cmp(op, left, right)  # type: ignore[arg-type]

    # ------------------------------------------------------------------
    # Arithmetic expressions
    # ------------------------------------------------------------------

    def expr(self) -> Expr:
        left, _ = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            right, _ = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> tuple[Expr, str | None]:
        left, literal = self.unary()
        while self.at("*", "/"):
            op = self.advance().text
            right, right_literal = self.unary()
            if (
                op == "/"
                and literal is not None
                and right_literal == _Literal.UNSIGNED
                and isinstance(left, Const)
                and isinstance(right, Const)
                and right.value != 0
            ):
                left = Const(left.value / right.value)
            else:
                left = Mul(left, right) if op == "*" else Div(left, right)
            literal = None
        return left, literal

    def unary(self) -> tuple[Expr, str | None]:
        if self.at("-"):
            self.advance()
            if self.current.kind == "number" and not (
                self.peek().kind == "symbol" and self.peek().text == "^"
            ):
                return Const(-self.number()), _Literal.SIGNED
            operand, _ = self.unary()
            return Neg(operand), None
        return self.power()

    def power(self) -> tuple[Expr, str | None]:
        base, literal = self.atom()
        if not self.at("^"):
            return base, literal
        self.advance()
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        token = self.current
        if token.kind != "number" or "." in token.text:
            raise self.error("integer exponent")
        self.advance()
        return Pow(base, sign * int(token.text)), None

    def atom(self) -> tuple[Expr, str | None]:
        token = self.current
        if token.kind == "number":
            return Const(self.number()), _Literal.UNSIGNED
        if token.kind == "ident":
            self.advance()
            return Var(token.text), None
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner, None
        raise self.error("number", "identifier", "(", "-")

    def number(self) -> Fraction:
        token = self.advance()
        return Fraction(token.text)


def parse(text: str) -> Process:
    """Parse program text into a process."""
    parser = Parser(text)
    process = parser.program()
    parser.expect_end()
    logger.debug(f"Parsed process with {len(parser.tokens) - 1} tokens")
    return process


def parse_bexpr(text: str) -> BExpr:
    parser = Parser(text)
    result = parser.bexpr()
    parser.expect_end()
    return result


def parse_expr(text: str) -> Expr:
    parser = Parser(text)
    result = parser.expr()
    parser.expect_end()
    return result

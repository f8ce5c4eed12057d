"""
Object language: a WHILE-style register language over naturals, its
numbering (every natural is a program), the textual syntax, and a program
builder with derived macros.

Registers are named X0, X1, ...; X0 holds the input and, at termination,
the output. All other registers start at 0. k-ary inputs are right-nested
Cantor pairs, so a two-argument program p is run on pair_nat(x, y).
"""
import logging
import re
from contextlib import contextmanager
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from math import isqrt
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

logger = logging.getLogger(__name__)


class ObjLangError(ValueError):
    """Base class for object-language errors."""


class ProgramSyntaxError(ObjLangError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class QueryNotAllowedError(ObjLangError):
    """A query statement appeared in a plain (non-oracle) program."""


# ---------------------------------------------------------------------------
# Cantor pairing
# ---------------------------------------------------------------------------

def pair_nat(x: int, y: int) -> int:
    """Cantor pairing: (x+y)(x+y+1)/2 + y."""
    s = x + y
    return s * (s + 1) // 2 + y


def unpair_nat(z: int) -> Tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def first_nat(z: int) -> int:
    return unpair_nat(z)[0]


def second_nat(z: int) -> int:
    return unpair_nat(z)[1]


def list_code(items: Iterable[int]) -> int:
    """nil = 0, cons(h, t) = pair(h, t) + 1."""
    code = 0
    for item in reversed(list(items)):
        code = pair_nat(item, code) + 1
    return code


def list_decode(code: int) -> List[int]:
    items = []
    while code:
        head, code = unpair_nat(code - 1)
        items.append(head)
    return items


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------

class Op(IntEnum):
    CONST = 0
    COPY = 1
    SUCC = 2
    PRED = 3
    PAIR = 4
    FIRST = 5
    SECOND = 6
    LOOP = 7
    BRANCH = 8
    EVAL = 9
    SMN = 10
    BEVAL = 11
    QUERY = 12
    NOOP = 13


# Number of register/constant fields each tag carries in its encoding,
# besides nested blocks.
FIELD_COUNTS = {
    Op.CONST: 2, Op.COPY: 2, Op.SUCC: 2, Op.PRED: 2, Op.PAIR: 3,
    Op.FIRST: 2, Op.SECOND: 2, Op.LOOP: 1, Op.BRANCH: 1, Op.EVAL: 3,
    Op.SMN: 3, Op.BEVAL: 4, Op.QUERY: 2, Op.NOOP: 0,
}
BLOCK_COUNTS = {Op.LOOP: 1, Op.BRANCH: 2}

ASSIGNING_OPS = frozenset({
    Op.CONST, Op.COPY, Op.SUCC, Op.PRED, Op.PAIR, Op.FIRST, Op.SECOND,
    Op.EVAL, Op.SMN, Op.BEVAL, Op.QUERY,
})


@dataclass(frozen=True)
class Stmt:
    """
    One statement. Field usage by op:

        CONST   dst := a (literal)
        COPY / SUCC / PRED / FIRST / SECOND   dst := op(Xa)
        PAIR    dst := pair(Xa, Xb)
        LOOP    while Xa != 0: body
        BRANCH  if Xa == 0: body else orelse
        EVAL / SMN   dst := op(Xa, Xb)    (code register, argument register)
        BEVAL   dst := beval(Xa, Xb, Xc)  (code, argument, budget)
        QUERY   dst := oracle(Xa)
    """
    op: Op
    dst: int = 0
    a: int = 0
    b: int = 0
    c: int = 0
    body: Tuple["Stmt", ...] = ()
    orelse: Tuple["Stmt", ...] = ()

    def fields(self) -> Tuple[int, ...]:
        if self.op in (Op.LOOP, Op.BRANCH):
            return (self.a,)
        if self.op == Op.PAIR or self.op in (Op.EVAL, Op.SMN):
            return (self.dst, self.a, self.b)
        if self.op == Op.BEVAL:
            return (self.dst, self.a, self.b, self.c)
        if self.op == Op.NOOP:
            return ()
        return (self.dst, self.a)

    def reads(self) -> Tuple[int, ...]:
        """Registers this statement reads (not counting nested blocks)."""
        if self.op in (Op.CONST, Op.NOOP):
            return ()
        if self.op in (Op.PAIR, Op.EVAL, Op.SMN):
            return (self.a, self.b)
        if self.op == Op.BEVAL:
            return (self.a, self.b, self.c)
        return (self.a,)

    def blocks(self) -> Tuple[Tuple["Stmt", ...], ...]:
        if self.op == Op.LOOP:
            return (self.body,)
        if self.op == Op.BRANCH:
            return (self.body, self.orelse)
        return ()


def walk(body: Iterable[Stmt]) -> Iterator[Stmt]:
    """Every statement in a block, nested blocks included."""
    for stmt in body:
        yield stmt
        for block in stmt.blocks():
            yield from walk(block)


def max_register(body: Iterable[Stmt]) -> int:
    top = 0
    for stmt in walk(body):
        regs = stmt.reads()
        if stmt.op in ASSIGNING_OPS:
            regs = regs + (stmt.dst,)
        if regs:
            top = max(top, *regs)
    return top


@dataclass(frozen=True)
class Program:
    """A plain program: no query statements."""
    body: Tuple[Stmt, ...] = ()

    def __post_init__(self):
        if any(stmt.op == Op.QUERY for stmt in walk(self.body)):
            raise QueryNotAllowedError("query is only legal inside an oracle program")


@dataclass(frozen=True)
class OracleProgram:
    """A program that may query its oracle (a partial recursive functional)."""
    body: Tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class FiniteFn:
    """A finite partial function on naturals, entries sorted by argument."""
    entries: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "FiniteFn":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def get(self, arg: int) -> Optional[int]:
        return self.as_dict().get(arg)

    def issubset(self, other: Mapping[int, int]) -> bool:
        return all(arg in other and other[arg] == value for arg, value in self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return "{" + ", ".join(f"{a}↦{v}" for a, v in self.entries) + "}"


# ---------------------------------------------------------------------------
# Numbering
#
# An index n is read as the bijective binary word of n (the binary digits of
# n + 1 without the leading 1). The word is a stream of tokens; a token is an
# Elias-gamma coded length L + 1 followed by the L bijective binary digits of
# its value. A statement is its tag token followed by its field tokens, and
# nested blocks are embedded as the tokens of their own codes.
# ---------------------------------------------------------------------------

def _token(value: int) -> str:
    digits = bin(value + 1)[3:]
    length = bin(len(digits) + 1)[2:]
    return "0" * (len(length) - 1) + length + digits


class _TokenReader:
    def __init__(self, word: str):
        self.word = word
        self.pos = 0
        self.done = not word

    def next(self) -> Optional[int]:
        """Next token value, or None once the stream is exhausted."""
        if self.done:
            return None
        word, pos = self.word, self.pos
        one = word.find("1", pos)
        if one < 0:
            self.done = True
            return None
        zeros = one - pos
        end = one + zeros + 1
        if end > len(word):
            self.done = True
            return None
        length = int(word[one:end], 2) - 1
        if end + length > len(word):
            self.done = True
            return None
        value = int("1" + word[end:end + length], 2) - 1
        self.pos = end + length
        if self.pos >= len(word):
            self.done = True
        return value

    def field(self) -> int:
        value = self.next()
        return 0 if value is None else value


def _encode_body(body: Iterable[Stmt]) -> str:
    parts = []
    for stmt in body:
        parts.append(_token(int(stmt.op)))
        parts.extend(_token(value) for value in stmt.fields())
        parts.extend(_token(_word_to_nat(_encode_body(block))) for block in stmt.blocks())
    return "".join(parts)


def _word_to_nat(word: str) -> int:
    return int("1" + word, 2) - 1


def encode(program) -> int:
    """Index of a Program or OracleProgram."""
    return _word_to_nat(_encode_body(program.body))


@lru_cache(maxsize=8192)
def decode_body(code: int, oracle: bool) -> Tuple[Stmt, ...]:
    reader = _TokenReader(bin(code + 1)[3:])
    body = []
    while True:
        tag = reader.next()
        if tag is None:
            break
        if tag > Op.QUERY:
            body.append(Stmt(Op.NOOP))
            continue
        if tag == Op.QUERY and not oracle:
            for _ in range(FIELD_COUNTS[Op.QUERY]):
                reader.field()
            body.append(Stmt(Op.NOOP))
            continue
        op = Op(tag)
        values = [reader.field() for _ in range(FIELD_COUNTS[op])]
        blocks = [decode_body(reader.field(), oracle) for _ in range(BLOCK_COUNTS.get(op, 0))]
        if op == Op.LOOP:
            body.append(Stmt(op, a=values[0], body=blocks[0]))
        elif op == Op.BRANCH:
            body.append(Stmt(op, a=values[0], body=blocks[0], orelse=blocks[1]))
        elif op in (Op.PAIR, Op.EVAL, Op.SMN):
            body.append(Stmt(op, dst=values[0], a=values[1], b=values[2]))
        elif op == Op.BEVAL:
            body.append(Stmt(op, dst=values[0], a=values[1], b=values[2], c=values[3]))
        else:
            body.append(Stmt(op, dst=values[0], a=values[1]))
    return tuple(body)


def decode(code: int) -> Program:
    """Total: every natural decodes to a plain program."""
    return Program(decode_body(code, False))


def decode_oracle(code: int) -> OracleProgram:
    return OracleProgram(decode_body(code, True))


def compose_codes(i: int, j: int) -> int:
    """Index k with phi_k(x) = phi_i(phi_j(x))."""
    return encode(Program((
        Stmt(Op.CONST, dst=3, a=j),
        Stmt(Op.EVAL, dst=1, a=3, b=0),
        Stmt(Op.CONST, dst=4, a=i),
        Stmt(Op.EVAL, dst=0, a=4, b=1),
    )))


# ---------------------------------------------------------------------------
# Textual syntax
# ---------------------------------------------------------------------------

_REG = r"X(\d+)"
_ASSIGN = re.compile(rf"^{_REG}\s*:=\s*(.+)$")
_WHILE = re.compile(rf"^while\s+{_REG}\s*\{{$")
_IFZERO = re.compile(rf"^ifzero\s+{_REG}\s*\{{$")
_UNARY = {"succ": Op.SUCC, "pred": Op.PRED, "first": Op.FIRST, "second": Op.SECOND, "query": Op.QUERY}
_BINARY = {"pair": Op.PAIR, "eval": Op.EVAL, "smn": Op.SMN}


def _register(token: str, lineno: int) -> int:
    match = re.fullmatch(_REG, token)
    if not match:
        raise ProgramSyntaxError(lineno, f"expected a register, got {token!r}")
    return int(match.group(1))


def _parse_block(lines: List[Tuple[int, str]], pos: int, nested: bool) -> Tuple[List[Stmt], int, str]:
    """Parse statements until a closing brace (when nested) or end of input."""
    body: List[Stmt] = []
    while pos < len(lines):
        lineno, text = lines[pos]
        if text in ("}", "} else {"):
            if not nested:
                raise ProgramSyntaxError(lineno, "unbalanced '}'")
            return body, pos + 1, text
        pos += 1
        if text == "nop":
            body.append(Stmt(Op.NOOP))
            continue
        match = _WHILE.match(text)
        if match:
            inner, pos, closer = _parse_block(lines, pos, True)
            if closer != "}":
                raise ProgramSyntaxError(lineno, "'else' without 'ifzero'")
            body.append(Stmt(Op.LOOP, a=int(match.group(1)), body=tuple(inner)))
            continue
        match = _IFZERO.match(text)
        if match:
            then, pos, closer = _parse_block(lines, pos, True)
            orelse: List[Stmt] = []
            if closer == "} else {":
                orelse, pos, closer = _parse_block(lines, pos, True)
                if closer != "}":
                    raise ProgramSyntaxError(lineno, "double 'else'")
            body.append(Stmt(Op.BRANCH, a=int(match.group(1)), body=tuple(then), orelse=tuple(orelse)))
            continue
        match = _ASSIGN.match(text)
        if not match:
            raise ProgramSyntaxError(lineno, f"cannot parse {text!r}")
        dst, expr = int(match.group(1)), match.group(2).split()
        if expr == ["quote", "{"]:
            inner, pos, closer = _parse_block(lines, pos, True)
            if closer != "}":
                raise ProgramSyntaxError(lineno, "'else' inside quote")
            body.append(Stmt(Op.CONST, dst=dst, a=_word_to_nat(_encode_body(inner))))
        elif len(expr) == 1 and expr[0].isdigit():
            body.append(Stmt(Op.CONST, dst=dst, a=int(expr[0])))
        elif len(expr) == 1:
            body.append(Stmt(Op.COPY, dst=dst, a=_register(expr[0], lineno)))
        elif expr[0] in _UNARY and len(expr) == 2:
            body.append(Stmt(_UNARY[expr[0]], dst=dst, a=_register(expr[1], lineno)))
        elif expr[0] in _BINARY and len(expr) == 3:
            body.append(Stmt(_BINARY[expr[0]], dst=dst, a=_register(expr[1], lineno),
                             b=_register(expr[2], lineno)))
        elif expr[0] == "beval" and len(expr) == 4:
            code, arg, budget = (_register(token, lineno) for token in expr[1:])
            body.append(Stmt(Op.BEVAL, dst=dst, a=code, b=arg, c=budget))
        else:
            raise ProgramSyntaxError(lineno, f"unknown expression {' '.join(expr)!r}")
    if nested:
        raise ProgramSyntaxError(lines[-1][0] if lines else 0, "missing '}'")
    return body, pos, ""


def parse_body(text: str) -> Tuple[Stmt, ...]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, re.sub(r"\s+", " ", stripped)))
    body, _, _ = _parse_block(lines, 0, False)
    return tuple(body)


def parse_program(text: str) -> Program:
    return Program(parse_body(text))


def parse_oracle_program(text: str) -> OracleProgram:
    return OracleProgram(parse_body(text))


def _format_stmt(stmt: Stmt, indent: str) -> List[str]:
    op = stmt.op
    if op == Op.NOOP:
        return [f"{indent}nop"]
    if op == Op.LOOP:
        return ([f"{indent}while X{stmt.a} {{"]
                + _format_body(stmt.body, indent + "  ")
                + [f"{indent}}}"])
    if op == Op.BRANCH:
        lines = [f"{indent}ifzero X{stmt.a} {{"] + _format_body(stmt.body, indent + "  ")
        if stmt.orelse:
            lines += [f"{indent}}} else {{"] + _format_body(stmt.orelse, indent + "  ")
        return lines + [f"{indent}}}"]
    if op == Op.CONST:
        expr = str(stmt.a)
    elif op == Op.COPY:
        expr = f"X{stmt.a}"
    elif op == Op.BEVAL:
        expr = f"beval X{stmt.a} X{stmt.b} X{stmt.c}"
    elif op in (Op.PAIR, Op.EVAL, Op.SMN):
        expr = f"{op.name.lower()} X{stmt.a} X{stmt.b}"
    else:
        expr = f"{op.name.lower()} X{stmt.a}"
    return [f"{indent}X{stmt.dst} := {expr}"]


def _format_body(body: Iterable[Stmt], indent: str = "") -> List[str]:
    lines: List[str] = []
    for stmt in body:
        lines.extend(_format_stmt(stmt, indent))
    return lines


def format_program(program) -> str:
    return "\n".join(_format_body(program.body)) + "\n"


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------

class ProgramBuilder:
    """
    Accumulates core statements. Macros expand in place into core statements
    and draw scratch registers from `fresh`, starting above the registers the
    caller uses by hand (X0..X{first_free - 1}).
    """

    def __init__(self, first_free: int = 20):
        self._next = first_free
        self._blocks: List[List[Stmt]] = [[]]

    def fresh(self) -> int:
        reg = self._next
        self._next += 1
        return reg

    def emit(self, *stmts: Stmt) -> "ProgramBuilder":
        self._blocks[-1].extend(stmts)
        return self

    # core statements

    def const(self, dst: int, value: int):
        return self.emit(Stmt(Op.CONST, dst=dst, a=value))

    def copy(self, dst: int, src: int):
        return self.emit(Stmt(Op.COPY, dst=dst, a=src))

    def succ(self, dst: int, src: int):
        return self.emit(Stmt(Op.SUCC, dst=dst, a=src))

    def pred(self, dst: int, src: int):
        return self.emit(Stmt(Op.PRED, dst=dst, a=src))

    def pair(self, dst: int, a: int, b: int):
        return self.emit(Stmt(Op.PAIR, dst=dst, a=a, b=b))

    def first(self, dst: int, src: int):
        return self.emit(Stmt(Op.FIRST, dst=dst, a=src))

    def second(self, dst: int, src: int):
        return self.emit(Stmt(Op.SECOND, dst=dst, a=src))

    def eval(self, dst: int, code: int, arg: int):
        return self.emit(Stmt(Op.EVAL, dst=dst, a=code, b=arg))

    def smn(self, dst: int, code: int, arg: int):
        return self.emit(Stmt(Op.SMN, dst=dst, a=code, b=arg))

    def beval(self, dst: int, code: int, arg: int, budget: int):
        return self.emit(Stmt(Op.BEVAL, dst=dst, a=code, b=arg, c=budget))

    def query(self, dst: int, arg: int):
        return self.emit(Stmt(Op.QUERY, dst=dst, a=arg))

    @contextmanager
    def while_nonzero(self, guard: int):
        self._blocks.append([])
        yield
        body = self._blocks.pop()
        self.emit(Stmt(Op.LOOP, a=guard, body=tuple(body)))

    @contextmanager
    def if_zero(self, guard: int):
        self._blocks.append([])
        yield
        body = self._blocks.pop()
        self.emit(Stmt(Op.BRANCH, a=guard, body=tuple(body)))

    @contextmanager
    def otherwise(self):
        """Else block of the branch emitted just before."""
        block = self._blocks[-1]
        if not block or block[-1].op != Op.BRANCH or block[-1].orelse:
            raise ObjLangError("otherwise() must follow an if_zero block")
        branch = block.pop()
        self._blocks.append([])
        yield
        orelse = self._blocks.pop()
        self.emit(Stmt(Op.BRANCH, a=branch.a, body=branch.body, orelse=tuple(orelse)))

    # macros

    def add(self, dst: int, a: int, b: int):
        count, acc = self.fresh(), self.fresh()
        self.copy(count, b).copy(acc, a)
        with self.while_nonzero(count):
            self.succ(acc, acc).pred(count, count)
        return self.copy(dst, acc)

    def monus(self, dst: int, a: int, b: int):
        count, acc = self.fresh(), self.fresh()
        self.copy(count, b).copy(acc, a)
        with self.while_nonzero(count):
            self.pred(acc, acc).pred(count, count)
        return self.copy(dst, acc)

    def mul(self, dst: int, a: int, b: int):
        count, acc = self.fresh(), self.fresh()
        self.const(acc, 0).copy(count, b)
        with self.while_nonzero(count):
            self.add(acc, acc, a)
            self.pred(count, count)
        return self.copy(dst, acc)

    def is_zero(self, dst: int, src: int):
        with self.if_zero(src):
            self.const(dst, 1)
        with self.otherwise():
            self.const(dst, 0)
        return self

    def eq(self, dst: int, a: int, b: int):
        """dst := 1 if Xa == Xb else 0, by double monus (unary cost)."""
        left, right, total = self.fresh(), self.fresh(), self.fresh()
        self.monus(left, a, b).monus(right, b, a).add(total, left, right)
        return self.is_zero(dst, total)

    def big_eq(self, dst: int, a: int, b: int):
        """Equality test whose cost grows with the size of the numbers, not their value."""
        code, arg = self.fresh(), self.fresh()
        self.const(code, structural_eq_index())
        self.pair(arg, a, b).pair(arg, code, arg)
        return self.eval(dst, code, arg)

    def unpair(self, dst_first: int, dst_second: int, src: int):
        if src in (dst_first, dst_second):
            tmp = self.fresh()
            self.copy(tmp, src)
            src = tmp
        return self.first(dst_first, src).second(dst_second, src)

    def cons(self, dst: int, head: int, tail: int):
        return self.pair(dst, head, tail).succ(dst, dst)

    def uncons(self, dst_head: int, dst_tail: int, src: int):
        cell = self.fresh()
        self.pred(cell, src)
        return self.first(dst_head, cell).second(dst_tail, cell)

    def table(self, dst: int, key: int, mapping: Mapping[int, int], default: int = 0):
        """dst := mapping[Xkey], or default when the key is absent."""
        hit = self.fresh()
        want = self.fresh()
        self.const(dst, default)
        for k, v in sorted(mapping.items()):
            self.const(want, k).eq(hit, key, want)
            with self.if_zero(hit):
                pass
            with self.otherwise():
                self.const(dst, v)
        return self

    def diverge(self):
        flag = self.fresh()
        self.const(flag, 1)
        with self.while_nonzero(flag):
            pass
        return self

    def factorial(self, dst: int, src: int):
        acc, count = self.fresh(), self.fresh()
        self.const(acc, 1).copy(count, src)
        with self.while_nonzero(count):
            self.mul(acc, acc, count)
            self.pred(count, count)
        return self.copy(dst, acc)

    def build(self) -> Program:
        if len(self._blocks) != 1:
            raise ObjLangError("unclosed block")
        return Program(tuple(self._blocks[0]))

    def build_oracle(self) -> OracleProgram:
        if len(self._blocks) != 1:
            raise ObjLangError("unclosed block")
        return OracleProgram(tuple(self._blocks[0]))


def div_program() -> Program:
    """The canonical diverging program [X1 := succ X1; while X1 {}]."""
    return Program((Stmt(Op.SUCC, dst=1, a=1), Stmt(Op.LOOP, a=1)))


def succ_program() -> Program:
    return Program((Stmt(Op.SUCC, dst=0, a=0),))


def constant_program(value: int) -> Program:
    return Program((Stmt(Op.CONST, dst=0, a=value),))


def add_program() -> Program:
    b = ProgramBuilder()
    b.unpair(1, 2, 0).add(0, 1, 2)
    return b.build()


def mul_program() -> Program:
    b = ProgramBuilder()
    b.unpair(1, 2, 0).mul(0, 1, 2)
    return b.build()


def eq_program() -> Program:
    b = ProgramBuilder()
    b.unpair(1, 2, 0).eq(0, 1, 2)
    return b.build()


def factorial_program() -> Program:
    b = ProgramBuilder()
    b.factorial(0, 0)
    return b.build()


@lru_cache(maxsize=None)
def structural_eq_index() -> int:
    """
    Self-passing equality program on pair(self, pair(a, b)): answers 1 iff
    a == b by recursing into the Cantor components of both numbers. Values
    0 and 1 are handled directly (1 is a fixed point of first_nat).
    """
    S, P, A, B, R, T, U, V, W = range(1, 10)
    b = ProgramBuilder()
    b.first(S, 0).second(P, 0).first(A, P).second(B, P).const(R, 0)
    with b.if_zero(A):
        b.is_zero(R, B)
    with b.otherwise():
        b.pred(T, A)
        with b.if_zero(T):
            with b.if_zero(B):
                pass
            with b.otherwise():
                b.pred(U, B).is_zero(R, U)
        with b.otherwise():
            with b.if_zero(B):
                pass
            with b.otherwise():
                b.pred(U, B)
                with b.if_zero(U):
                    pass
                with b.otherwise():
                    b.first(V, A).first(W, B).pair(T, V, W).pair(T, S, T).eval(R, S, T)
                    with b.if_zero(R):
                        pass
                    with b.otherwise():
                        b.second(V, A).second(W, B).pair(T, V, W).pair(T, S, T).eval(R, S, T)
    b.copy(0, R)
    return encode(b.build())


def describe(stmt: Stmt) -> str:
    """One-line rendering of a statement (block headers only, for traces)."""
    return _format_stmt(stmt, "")[0]

"""
The s-m-n function, template substitution, an optimizing specializer and a
sampled extensionality probe.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd
from tqdm import tqdm

from objlang import (Op, Program, Stmt, decode_body, encode, first_nat,
                     max_register, pair_nat, second_nat, walk, ASSIGNING_OPS)

logger = logging.getLogger(__name__)

MAX_PASSES = 10
MAX_INLINES = 16

PURE_OPS = frozenset({
    Op.CONST, Op.COPY, Op.SUCC, Op.PRED, Op.PAIR, Op.FIRST, Op.SECOND, Op.SMN,
})


@lru_cache(maxsize=65536)
def smn(p: int, x: int) -> int:
    """Index of [X1 := x; X2 := pair X1 X0; X3 := p; X0 := eval X3 X2]."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=x),
        Stmt(Op.PAIR, dst=2, a=1, b=0),
        Stmt(Op.CONST, dst=3, a=p),
        Stmt(Op.EVAL, dst=0, a=3, b=2),
    )))


def subst_const(template: Union[Program, int], k: int) -> int:
    """Freeze the first component k of a template expecting pair(k, y)."""
    code = template if isinstance(template, int) else encode(template)
    return smn(code, k)


# ---------------------------------------------------------------------------
# Optimizing specializer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Known:
    value: int


@dataclass(frozen=True)
class Alias:
    """Equal to the current content of `reg`."""
    reg: int


@dataclass(frozen=True)
class PairOf:
    left: Optional["AbsVal"]
    right: Optional["AbsVal"]


AbsVal = Union[Known, Alias, PairOf]
Env = Dict[int, AbsVal]


def _mentions(value: Optional[AbsVal], reg: int) -> bool:
    if isinstance(value, Alias):
        return value.reg == reg
    if isinstance(value, PairOf):
        return _mentions(value.left, reg) or _mentions(value.right, reg)
    return False


def _substitute(value: Optional[AbsVal], reg: int, new: Optional[AbsVal]) -> Optional[AbsVal]:
    if isinstance(value, Alias) and value.reg == reg:
        return new
    if isinstance(value, PairOf):
        return PairOf(_substitute(value.left, reg, new), _substitute(value.right, reg, new))
    return value


def _assign(env: Env, dst: int, value: Optional[AbsVal]):
    """Record dst := value, rehoming anything that referred to the old dst."""
    holders = sorted(r for r, v in env.items() if v == Alias(dst) and r != dst)
    replacement: Optional[AbsVal] = None
    if holders:
        keeper = holders[0]
        del env[keeper]
        replacement = Alias(keeper)
    for reg in list(env):
        if reg != dst and _mentions(env[reg], dst):
            new = _substitute(env[reg], dst, replacement)
            if new is None:
                del env[reg]
            else:
                env[reg] = new
    value = _substitute(value, dst, replacement)
    if value is None or value == Alias(dst):
        env.pop(dst, None)
    else:
        env[dst] = value


def _read(env: Env, reg: int) -> AbsVal:
    return env.get(reg, Alias(reg))


def _source(env: Env, reg: int) -> int:
    value = _read(env, reg)
    return value.reg if isinstance(value, Alias) else reg


def _meet(left: Env, right: Env) -> Env:
    return {reg: value for reg, value in left.items() if right.get(reg) == value}


def _rename(body: Iterable[Stmt], offset: int) -> Tuple[Stmt, ...]:
    renamed = []
    for stmt in body:
        if stmt.op in (Op.LOOP, Op.BRANCH):
            renamed.append(Stmt(stmt.op, a=stmt.a + offset, body=_rename(stmt.body, offset),
                                orelse=_rename(stmt.orelse, offset)))
        elif stmt.op == Op.CONST:
            renamed.append(Stmt(Op.CONST, dst=stmt.dst + offset, a=stmt.a))
        elif stmt.op == Op.NOOP:
            renamed.append(stmt)
        else:
            renamed.append(Stmt(stmt.op, dst=stmt.dst + offset, a=stmt.a + offset,
                                b=stmt.b + offset, c=stmt.c + offset))
    return tuple(renamed)


class _Propagator:
    """Forward constant/alias propagation with branch folding and eval inlining."""

    def __init__(self, next_free: int):
        self.next_free = next_free
        self.inlines = 0

    def block(self, body: Sequence[Stmt], env: Env, top: bool) -> List[Stmt]:
        out: List[Stmt] = []
        queue = list(body)
        while queue:
            stmt = queue.pop(0)
            if stmt.op == Op.BRANCH:
                guard = _read(env, stmt.a)
                if isinstance(guard, Known):
                    queue[:0] = stmt.body if guard.value == 0 else stmt.orelse
                    continue
                then_env, else_env = dict(env), dict(env)
                then = self.block(stmt.body, then_env, False)
                orelse = self.block(stmt.orelse, else_env, False)
                env.clear()
                env.update(_meet(then_env, else_env))
                out.append(Stmt(Op.BRANCH, a=stmt.a, body=tuple(then), orelse=tuple(orelse)))
            elif stmt.op == Op.LOOP:
                guard = _read(env, stmt.a)
                if guard == Known(0):
                    continue
                for reg in {s.dst for s in walk(stmt.body) if s.op in ASSIGNING_OPS}:
                    _assign(env, reg, None)
                body = self.block(stmt.body, dict(env), False)
                _assign(env, stmt.a, Known(0))
                out.append(Stmt(Op.LOOP, a=stmt.a, body=tuple(body)))
            elif stmt.op == Op.EVAL and top and isinstance(_read(env, stmt.a), Known) \
                    and self.inlines < MAX_INLINES:
                queue[:0] = self.inline(stmt, _read(env, stmt.a).value, env)
            else:
                rewritten = self.simple(stmt, env)
                if rewritten is not None:
                    out.append(rewritten)
        return out

    def inline(self, stmt: Stmt, code: int, env: Env) -> List[Stmt]:
        inner = decode_body(code, False)
        base = self.next_free
        self.next_free += max_register(inner) + 1
        self.inlines += 1
        # scratch registers of the inlined body have never been touched
        for reg in range(base + 1, self.next_free):
            env[reg] = Known(0)
        logger.debug(f"inlining eval of code with {len(inner)} statements at X{base}")
        return ([Stmt(Op.COPY, dst=base, a=stmt.b)]
                + list(_rename(inner, base))
                + [Stmt(Op.COPY, dst=stmt.dst, a=base)])

    def simple(self, stmt: Stmt, env: Env) -> Optional[Stmt]:
        op, dst = stmt.op, stmt.dst
        if op == Op.NOOP:
            return None
        if op == Op.CONST:
            _assign(env, dst, Known(stmt.a))
            return stmt
        if op == Op.COPY:
            value = _read(env, stmt.a)
            _assign(env, dst, value)
            if isinstance(value, Known):
                return Stmt(Op.CONST, dst=dst, a=value.value)
            if isinstance(value, Alias):
                return Stmt(Op.COPY, dst=dst, a=value.reg)
            return stmt
        if op in (Op.SUCC, Op.PRED):
            value = _read(env, stmt.a)
            if isinstance(value, Known):
                result = value.value + 1 if op == Op.SUCC else max(value.value - 1, 0)
                _assign(env, dst, Known(result))
                return Stmt(Op.CONST, dst=dst, a=result)
            src = _source(env, stmt.a)
            _assign(env, dst, None)
            return Stmt(op, dst=dst, a=src)
        if op == Op.PAIR:
            left, right = _read(env, stmt.a), _read(env, stmt.b)
            if isinstance(left, Known) and isinstance(right, Known):
                result = pair_nat(left.value, right.value)
                _assign(env, dst, Known(result))
                return Stmt(Op.CONST, dst=dst, a=result)
            rewritten = Stmt(op, dst=dst, a=_source(env, stmt.a), b=_source(env, stmt.b))
            _assign(env, dst, PairOf(left, right))
            return rewritten
        if op in (Op.FIRST, Op.SECOND):
            value = _read(env, stmt.a)
            if isinstance(value, Known):
                result = first_nat(value.value) if op == Op.FIRST else second_nat(value.value)
                _assign(env, dst, Known(result))
                return Stmt(Op.CONST, dst=dst, a=result)
            if isinstance(value, PairOf):
                part = value.left if op == Op.FIRST else value.right
                if isinstance(part, Known):
                    _assign(env, dst, part)
                    return Stmt(Op.CONST, dst=dst, a=part.value)
                if isinstance(part, Alias):
                    _assign(env, dst, part)
                    return Stmt(Op.COPY, dst=dst, a=part.reg)
                rewritten = Stmt(op, dst=dst, a=_source(env, stmt.a))
                _assign(env, dst, part)
                return rewritten
            src = _source(env, stmt.a)
            _assign(env, dst, None)
            return Stmt(op, dst=dst, a=src)
        if op == Op.SMN:
            code, arg = _read(env, stmt.a), _read(env, stmt.b)
            if isinstance(code, Known) and isinstance(arg, Known):
                result = smn(code.value, arg.value)
                _assign(env, dst, Known(result))
                return Stmt(Op.CONST, dst=dst, a=result)
        # eval / beval / query / unfoldable smn: sources only
        rewritten = Stmt(op, dst=dst, a=_source(env, stmt.a), b=_source(env, stmt.b),
                         c=_source(env, stmt.c) if op == Op.BEVAL else 0)
        if op == Op.QUERY:
            rewritten = Stmt(op, dst=dst, a=_source(env, stmt.a))
        _assign(env, dst, None)
        return rewritten


def _eliminate_dead(body: Sequence[Stmt], live_out: frozenset) -> Tuple[List[Stmt], frozenset]:
    """Backward liveness; returns the surviving statements and the live-in set."""
    live = set(live_out)
    kept: List[Stmt] = []
    for stmt in reversed(body):
        op = stmt.op
        if op == Op.NOOP:
            continue
        if op in PURE_OPS:
            if stmt.dst not in live:
                continue
            live.discard(stmt.dst)
            live.update(stmt.reads())
            kept.append(stmt)
        elif op == Op.LOOP:
            loop_live = frozenset(live | {stmt.a})
            while True:
                _, body_in = _eliminate_dead(stmt.body, loop_live)
                grown = loop_live | body_in
                if grown == loop_live:
                    break
                loop_live = grown
            body, _ = _eliminate_dead(stmt.body, loop_live)
            live = set(loop_live)
            kept.append(Stmt(Op.LOOP, a=stmt.a, body=tuple(body)))
        elif op == Op.BRANCH:
            then, then_in = _eliminate_dead(stmt.body, frozenset(live))
            orelse, else_in = _eliminate_dead(stmt.orelse, frozenset(live))
            if not then and not orelse:
                continue
            live = set(then_in | else_in | {stmt.a})
            kept.append(Stmt(Op.BRANCH, a=stmt.a, body=tuple(then), orelse=tuple(orelse)))
        else:
            # eval, beval and query may diverge and always stay
            live.discard(stmt.dst)
            live.update(stmt.reads())
            kept.append(stmt)
    kept.reverse()
    return kept, frozenset(live)


def optimize(body: Sequence[Stmt]) -> Tuple[Stmt, ...]:
    """
    Constant/alias propagation, branch folding, top-level eval inlining and
    dead-code removal, repeated until nothing changes (at most MAX_PASSES).
    Every register but the input X0 starts at 0.
    Loops are never unrolled.
    """
    current = tuple(body)
    propagator = _Propagator(max_register(current) + 1)
    for n in range(MAX_PASSES):
        propagator.next_free = max(propagator.next_free, max_register(current) + 1)
        env: Env = {reg: Known(0) for reg in range(1, max_register(current) + 1)}
        propagated = propagator.block(current, env, True)
        cleaned, _ = _eliminate_dead(propagated, frozenset({0}))
        cleaned = tuple(cleaned)
        if cleaned == current:
            break
        current = cleaned
    logger.debug(f"optimize: {n + 1} passes, {propagator.inlines} inlined evals")
    return current


def smn_opt(p: int, x: int) -> int:
    """Co-extensional with smn(p, x), with x folded into p's body."""
    body = decode_body(p, False)
    top = max_register(body)
    saved, frozen = top + 1, top + 2
    prologue = (
        Stmt(Op.COPY, dst=saved, a=0),
        Stmt(Op.CONST, dst=frozen, a=x),
        Stmt(Op.PAIR, dst=0, a=frozen, b=saved),
    )
    return encode(Program(optimize(prologue + body)))


# ---------------------------------------------------------------------------
# Extensionality probe
# ---------------------------------------------------------------------------

@dataclass
class ProbeRow:
    a: int
    b: int
    status: str  # premise-failed | f-exhausted | ok | violation
    fa: Optional[int] = None
    fb: Optional[int] = None


@dataclass
class ExtensionalityReport:
    transformer: int
    fuel: int
    rows: List[ProbeRow] = field(default_factory=list)

    @property
    def violations(self) -> List[ProbeRow]:
        return [row for row in self.rows if row.status == "violation"]

    @property
    def exhausted(self) -> List[ProbeRow]:
        return [row for row in self.rows if row.status == "f-exhausted"]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(row) for row in self.rows])


def extensionality_probe(f: int, pairs: Iterable[Tuple[int, int]], inputs: Iterable[int],
                         fuel: int, progress: bool = False) -> ExtensionalityReport:
    """
    For every pair of indices that agree on `inputs`, require their images
    under f to agree as well. Can only find violations, never certify.
    """
    from evaluator import Halted, check_equiv, run

    inputs = list(inputs)
    report = ExtensionalityReport(f, fuel)
    for a, b in tqdm(list(pairs), desc="extensionality", disable=not progress):
        if not check_equiv(a, b, inputs, fuel).passed:
            report.rows.append(ProbeRow(a, b, "premise-failed"))
            continue
        fa, fb = run(f, a, fuel), run(f, b, fuel)
        if not (isinstance(fa, Halted) and isinstance(fb, Halted)):
            report.rows.append(ProbeRow(a, b, "f-exhausted"))
            continue
        same = check_equiv(fa.value, fb.value, inputs, fuel).passed
        report.rows.append(ProbeRow(a, b, "ok" if same else "violation", fa.value, fb.value))
    if report.violations:
        first = report.violations[0]
        logger.info(f"extensionality violated: codes {first.a} and {first.b} agree, "
                    f"their images {first.fa} and {first.fb} do not")
    return report

"""
Fuel-bounded operational semantics for object programs and the universal
index U. Divergence is observed as an Exhausted outcome at a stated budget.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Union

import pandas as pd
from tqdm import tqdm

from objlang import (FiniteFn, Op, Program, Stmt, decode_body, encode,
                     first_nat, pair_nat, second_nat)
from specializer import smn

logger = logging.getLogger(__name__)

EXHAUSTED_RESULT = pair_nat(0, 0)

Trace = Callable[[int, Stmt, int], None]


class FuelExhausted(Exception):
    pass


@dataclass(frozen=True)
class Halted:
    value: int
    steps: int

    def __str__(self):
        return f"HALT {self.value} steps={self.steps}"


@dataclass(frozen=True)
class Exhausted:
    budget: int

    def __str__(self):
        return f"EXHAUSTED budget={self.budget}"


Outcome = Union[Halted, Exhausted]
Oracle = Union[int, FiniteFn, None]


def kleene_agree(left: Outcome, right: Outcome) -> bool:
    """Three-valued agreement: both exhausted, or both halted with the same value."""
    if isinstance(left, Halted) and isinstance(right, Halted):
        return left.value == right.value
    return isinstance(left, Exhausted) and isinstance(right, Exhausted)


class _Frame:
    """A block being executed. `kind` says what happens when it runs off its end."""
    __slots__ = ("body", "pc", "regs", "depth", "kind", "stmt", "parent", "start", "outer", "budget")

    def __init__(self, body, regs, depth, kind, stmt=None, parent=None, start=0, outer=0, budget=0):
        self.body = body
        self.pc = 0
        self.regs = regs
        self.depth = depth
        self.kind = kind
        self.stmt = stmt
        self.parent = parent
        self.start = start
        self.outer = outer
        self.budget = budget


_BLOCK, _LOOP, _CALL, _BOUNDED = range(4)


class Machine:
    """
    One evaluation. `steps` counts executed statements (guard and branch
    tests included) across every nested eval/beval/query, all of which share
    the single global `limit`. Nested calls live on an explicit frame stack,
    so self-application depth is bounded by fuel only.
    """

    def __init__(self, limit: int, oracle: Oracle = None, trace: Optional[Trace] = None):
        self.limit = limit
        self.steps = 0
        self.oracle = oracle
        self.trace = trace
        self._oracle_table = oracle.as_dict() if isinstance(oracle, FiniteFn) else None

    def call(self, code: int, arg: int) -> int:
        regs = {0: arg}
        self.execute(decode_body(code, False), regs)
        return regs[0]

    def execute(self, body: Iterable[Stmt], regs: dict):
        stack = [_Frame(tuple(body), regs, 0, _BLOCK)]
        while stack:
            try:
                while stack:
                    self._step(stack)
            except FuelExhausted:
                self._unwind(stack)

    def _unwind(self, stack: List[_Frame]):
        """Pop to the innermost beval whose own budget ran out, or re-raise."""
        while stack:
            frame = stack.pop()
            if frame.kind != _BOUNDED:
                continue
            self.limit = frame.outer
            if frame.start + frame.budget <= frame.outer:
                self.steps = frame.start + frame.budget
                frame.parent[frame.stmt.dst] = EXHAUSTED_RESULT
                return
        raise FuelExhausted()

    def _step(self, stack: List[_Frame]):
        frame = stack[-1]
        if frame.pc >= len(frame.body):
            self._leave(stack)
            return
        stmt = frame.body[frame.pc]
        frame.pc += 1
        if self.steps >= self.limit:
            raise FuelExhausted()
        self.steps += 1
        if self.trace is not None:
            self.trace(frame.depth, stmt, self.steps)
        regs = frame.regs
        op = stmt.op
        if op == Op.CONST:
            regs[stmt.dst] = stmt.a
        elif op == Op.COPY:
            regs[stmt.dst] = regs.get(stmt.a, 0)
        elif op == Op.SUCC:
            regs[stmt.dst] = regs.get(stmt.a, 0) + 1
        elif op == Op.PRED:
            regs[stmt.dst] = max(regs.get(stmt.a, 0) - 1, 0)
        elif op == Op.LOOP:
            if regs.get(stmt.a, 0):
                stack.append(_Frame(stmt.body, regs, frame.depth + 1, _LOOP, stmt))
        elif op == Op.BRANCH:
            block = stmt.body if regs.get(stmt.a, 0) == 0 else stmt.orelse
            stack.append(_Frame(block, regs, frame.depth + 1, _BLOCK))
        elif op == Op.PAIR:
            regs[stmt.dst] = pair_nat(regs.get(stmt.a, 0), regs.get(stmt.b, 0))
        elif op == Op.FIRST:
            regs[stmt.dst] = first_nat(regs.get(stmt.a, 0))
        elif op == Op.SECOND:
            regs[stmt.dst] = second_nat(regs.get(stmt.a, 0))
        elif op == Op.EVAL:
            self._push_call(stack, frame, stmt, regs.get(stmt.a, 0), regs.get(stmt.b, 0))
        elif op == Op.BEVAL:
            budget = regs.get(stmt.c, 0)
            callee = _Frame(decode_body(regs.get(stmt.a, 0), False), {0: regs.get(stmt.b, 0)},
                            frame.depth + 1, _BOUNDED, stmt, regs, self.steps, self.limit, budget)
            self.limit = min(self.limit, self.steps + budget)
            stack.append(callee)
        elif op == Op.SMN:
            regs[stmt.dst] = smn(regs.get(stmt.a, 0), regs.get(stmt.b, 0))
        elif op == Op.QUERY:
            self._query(stack, frame, stmt)
        # NOOP: nothing

    def _push_call(self, stack, frame, stmt, code, arg):
        stack.append(_Frame(decode_body(code, False), {0: arg}, frame.depth + 1, _CALL,
                            stmt, frame.regs))

    def _query(self, stack, frame, stmt):
        arg = frame.regs.get(stmt.a, 0)
        if self._oracle_table is not None:
            if arg not in self._oracle_table:
                # an unbound point of a finite oracle diverges
                self.steps = self.limit
                raise FuelExhausted()
            frame.regs[stmt.dst] = self._oracle_table[arg]
        elif self.oracle is None:
            frame.regs[stmt.dst] = 0
        else:
            self._push_call(stack, frame, stmt, self.oracle, arg)

    def _leave(self, stack: List[_Frame]):
        frame = stack[-1]
        if frame.kind == _LOOP:
            # guard re-test
            if self.steps >= self.limit:
                raise FuelExhausted()
            self.steps += 1
            if self.trace is not None:
                self.trace(frame.depth - 1, frame.stmt, self.steps)
            if frame.regs.get(frame.stmt.a, 0):
                frame.pc = 0
                return
            stack.pop()
        elif frame.kind == _CALL:
            stack.pop()
            frame.parent[frame.stmt.dst] = frame.regs.get(0, 0)
        elif frame.kind == _BOUNDED:
            stack.pop()
            self.limit = frame.outer
            frame.parent[frame.stmt.dst] = pair_nat(1, frame.regs.get(0, 0))
        else:
            stack.pop()


def run(p: int, x: int, fuel: int, trace: Optional[Trace] = None) -> Outcome:
    """Run index p on input x with `fuel` steps."""
    machine = Machine(fuel, trace=trace)
    try:
        value = machine.call(p, x)
    except FuelExhausted:
        return Exhausted(fuel)
    return Halted(value, machine.steps)


def run_program(program, x: int, fuel: int, oracle: Oracle = None,
                trace: Optional[Trace] = None) -> Outcome:
    """Run a Program (or, with an oracle, an OracleProgram) directly."""
    machine = Machine(fuel, oracle=oracle, trace=trace)
    regs = {0: x}
    try:
        machine.execute(program.body, regs)
    except FuelExhausted:
        return Exhausted(fuel)
    return Halted(regs[0], machine.steps)


@lru_cache(maxsize=None)
def universal_index() -> int:
    return encode(Program((
        Stmt(Op.FIRST, dst=1, a=0),
        Stmt(Op.SECOND, dst=2, a=0),
        Stmt(Op.EVAL, dst=0, a=1, b=2),
    )))


class Verdict(Enum):
    AGREE = "AGREE"
    BOTH_EXHAUSTED = "BOTH_EXHAUSTED"
    DISAGREE = "DISAGREE"


def verdict(left: Outcome, right: Outcome) -> Verdict:
    if isinstance(left, Halted) and isinstance(right, Halted) and left.value == right.value:
        return Verdict.AGREE
    if isinstance(left, Exhausted) and isinstance(right, Exhausted):
        return Verdict.BOTH_EXHAUSTED
    return Verdict.DISAGREE


@dataclass
class InputVerdict:
    input: int
    verdict: Verdict
    left: Outcome
    right: Outcome

    def line(self) -> str:
        if self.verdict == Verdict.AGREE:
            return f"{self.input}: AGREE {self.left.value}"
        if self.verdict == Verdict.BOTH_EXHAUSTED:
            return f"{self.input}: BOTH_EXHAUSTED"
        return f"{self.input}: DISAGREE {self.left} | {self.right}"


@dataclass
class EquivReport:
    left: int
    right: int
    fuel: int
    rows: List[InputVerdict] = field(default_factory=list)
    note: str = ("BOTH_EXHAUSTED is evidence of equal divergence at this budget, "
                 "not proof of it")

    @property
    def passed(self) -> bool:
        return all(row.verdict != Verdict.DISAGREE for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "input": row.input,
            "verdict": row.verdict.value,
            "left": str(row.left),
            "right": str(row.right),
        } for row in self.rows])


def check_equiv(a: int, b: int, inputs: Iterable[int], fuel: int,
                progress: bool = False) -> EquivReport:
    report = EquivReport(a, b, fuel)
    inputs = list(inputs)
    for x in tqdm(inputs, desc="check-equiv", disable=not progress):
        left, right = run(a, x, fuel), run(b, x, fuel)
        report.rows.append(InputVerdict(x, verdict(left, right), left, right))
    logger.info(f"check_equiv: {sum(r.verdict == Verdict.DISAGREE for r in report.rows)} "
                f"disagreements over {len(inputs)} inputs at fuel {fuel}")
    return report

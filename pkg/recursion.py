"""
Fixed points of blueprints and code transformers, host-side and as object
programs. A blueprint expects pair(self, y); a transformer maps codes to codes.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import pandas as pd

from evaluator import EquivReport, Halted, check_equiv, run, universal_index
from objlang import Op, Program, ProgramBuilder, Stmt, encode
from specializer import smn, subst_const

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def kleene_template() -> int:
    """On pair(pp, pair(y, x)): eval(pp, pair(smn(y, y), x))."""
    return encode(Program((
        Stmt(Op.FIRST, dst=1, a=0),
        Stmt(Op.SECOND, dst=2, a=0),
        Stmt(Op.FIRST, dst=3, a=2),
        Stmt(Op.SECOND, dst=4, a=2),
        Stmt(Op.SMN, dst=5, a=3, b=3),
        Stmt(Op.PAIR, dst=6, a=5, b=4),
        Stmt(Op.EVAL, dst=0, a=1, b=6),
    )))


@lru_cache(maxsize=None)
def rogers_template() -> int:
    """On pair(ff, pair(x, y)): eval(eval(ff, x), y)."""
    return encode(Program((
        Stmt(Op.FIRST, dst=1, a=0),
        Stmt(Op.SECOND, dst=2, a=0),
        Stmt(Op.FIRST, dst=3, a=2),
        Stmt(Op.SECOND, dst=4, a=2),
        Stmt(Op.EVAL, dst=5, a=1, b=3),
        Stmt(Op.EVAL, dst=0, a=5, b=4),
    )))


def kleene_fix(p: int) -> int:
    """e with phi_e(y) = phi_p(pair(e, y)); e = smn(q, q) for q = subst_const(T_K, p)."""
    q = subst_const(kleene_template(), p)
    return smn(q, q)


h = kleene_fix


@lru_cache(maxsize=None)
def kleene_h() -> int:
    """Object-language h: on p, returns kleene_fix(p)."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=kleene_template()),
        Stmt(Op.SMN, dst=2, a=1, b=0),
        Stmt(Op.SMN, dst=0, a=2, b=2),
    )))


def n(z: int) -> int:
    """e with phi_e = phi_{phi_z(e)}, whenever phi_z(e) is defined."""
    return kleene_fix(subst_const(rogers_template(), z))


@lru_cache(maxsize=None)
def rogers_n() -> int:
    """Object-language n, built from smn statements and the two frozen templates."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=rogers_template()),
        Stmt(Op.SMN, dst=2, a=1, b=0),
        Stmt(Op.CONST, dst=3, a=kleene_template()),
        Stmt(Op.SMN, dst=4, a=3, b=2),
        Stmt(Op.SMN, dst=0, a=4, b=4),
    )))


def kleene_law(p: int, inputs: Iterable[int], fuel: int) -> EquivReport:
    """phi_e(y) against phi_p(pair(e, y)) for e = kleene_fix(p)."""
    e = kleene_fix(p)
    # smn(p, e) computes y -> phi_p(pair(e, y))
    return check_equiv(e, smn(p, e), inputs, fuel)


@dataclass
class RogersReport:
    transformer: int
    fixed_point: int
    image: Optional[int]
    status: str  # pass | fail | indeterminate
    equiv: Optional[EquivReport] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_frame(self) -> pd.DataFrame:
        if self.equiv is None:
            return pd.DataFrame([{"input": None, "verdict": self.status}])
        return self.equiv.to_frame()


def rogers_fix(f: int, inputs: Iterable[int] = range(10), fuel: int = 10 ** 6) -> RogersReport:
    """
    e = n(f), checked against f(e) on `inputs`. When f does not halt on e
    within `fuel` the law cannot be observed and the verdict is indeterminate.
    """
    e = n(f)
    image = run(f, e, fuel)
    if not isinstance(image, Halted):
        logger.info(f"rogers_fix: transformer exhausted {fuel} steps on its fixed point")
        return RogersReport(f, e, None, "indeterminate")
    equiv = check_equiv(e, image.value, inputs, fuel)
    return RogersReport(f, e, image.value, "pass" if equiv.passed else "fail", equiv)


# ---------------------------------------------------------------------------
# Worked blueprints and transformers
# ---------------------------------------------------------------------------

def factorial_blueprint() -> int:
    """On pair(x, y): 1 if y = 0 else y * phi_U(x, y - 1)."""
    b = ProgramBuilder()
    b.first(1, 0).second(2, 0)
    with b.if_zero(2):
        b.const(0, 1)
    with b.otherwise():
        b.pred(3, 2).pair(4, 1, 3).const(5, universal_index()).eval(6, 5, 4)
        b.mul(0, 2, 6)
    return encode(b.build())


def constant_blueprint(value: int = 42) -> int:
    return encode(Program((Stmt(Op.CONST, dst=0, a=value),)))


def quine_blueprint() -> int:
    """On pair(self, y): self."""
    return encode(Program((Stmt(Op.FIRST, dst=0, a=0),)))


def identity_transformer() -> int:
    """Codes map to themselves: the empty program, index 0."""
    return 0


def constant_transformer(code: int) -> int:
    """Every code maps to `code`."""
    return encode(Program((Stmt(Op.CONST, dst=0, a=code),)))


def parity_transformer() -> int:
    """x + 1 for even x, x - 1 for odd x. Runs in time linear in x."""
    b = ProgramBuilder()
    b.copy(1, 0).const(2, 0)
    with b.while_nonzero(1):
        with b.if_zero(2):
            b.const(2, 1)
        with b.otherwise():
            b.const(2, 0)
        b.pred(1, 1)
    with b.if_zero(2):
        b.succ(0, 0)
    with b.otherwise():
        b.pred(0, 0)
    return encode(b.build())

"""
The three Futamura projections over this numbering, with behavioral checks
and a comparison of interpreted against specialized step counts.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from evaluator import Halted, Outcome, kleene_agree, run, universal_index
from objlang import Op, Program, Stmt, encode, pair_nat
from specializer import smn_opt

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def smn_as_index() -> int:
    """s with phi_s(pair(p, x)) = smn(p, x)."""
    return encode(Program((
        Stmt(Op.FIRST, dst=1, a=0),
        Stmt(Op.SECOND, dst=2, a=0),
        Stmt(Op.SMN, dst=0, a=1, b=2),
    )))


def apply_s(p: int, x: int, fuel: int) -> Optional[int]:
    outcome = run(smn_as_index(), pair_nat(p, x), fuel)
    return outcome.value if isinstance(outcome, Halted) else None


@dataclass
class ProjectionRow:
    input: int
    source: Outcome
    target: Outcome
    interpreted: Outcome
    optimized: Optional[Outcome] = None

    def step_difference(self) -> Optional[int]:
        if isinstance(self.target, Halted) and isinstance(self.interpreted, Halted):
            return self.target.steps - self.interpreted.steps
        return None

    def step_ratio(self) -> Optional[float]:
        if isinstance(self.target, Halted) and isinstance(self.interpreted, Halted) \
                and self.interpreted.steps:
            return self.target.steps / self.interpreted.steps
        return None


@dataclass
class ProjectionReport:
    source: int
    target: Optional[int]
    compiler: Optional[int]
    cogen: Optional[int]
    fuel: int
    rows: List[ProjectionRow] = field(default_factory=list)
    compiled: dict = field(default_factory=dict)      # corpus source -> law (2) held
    generated: dict = field(default_factory=dict)     # corpus source -> law (3) held

    @property
    def indeterminate(self) -> bool:
        return None in (self.target, self.compiler, self.cogen)

    @property
    def first_law(self) -> bool:
        return all(kleene_agree(row.target, row.source) for row in self.rows)

    @property
    def passed(self) -> bool:
        return (not self.indeterminate and self.first_law
                and all(self.compiled.values()) and all(self.generated.values()))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "input": row.input,
            "source": str(row.source),
            "target": str(row.target),
            "interpreted": str(row.interpreted),
            "optimized": str(row.optimized) if row.optimized is not None else "",
            "step_diff": row.step_difference(),
            "step_ratio": row.step_ratio(),
        } for row in self.rows])


def _agrees_everywhere(a: int, b: int, inputs: Sequence[int], fuel: int) -> bool:
    return all(kleene_agree(run(a, x, fuel), run(b, x, fuel)) for x in inputs)


def project(src: int, inputs: Iterable[int] = range(10), fuel: int = 10 ** 6,
            sources: Iterable[int] = ()) -> ProjectionReport:
    """
    target = s(U, src), compiler = s(s, U), cogen = s(s, s). Checks the first
    law on `inputs`, the second and third on each of `sources`.
    """
    s, u = smn_as_index(), universal_index()
    inputs = list(inputs)
    target = apply_s(u, src, fuel)
    compiler = apply_s(s, u, fuel)
    cogen = apply_s(s, s, fuel)
    report = ProjectionReport(src, target, compiler, cogen, fuel)
    if report.indeterminate:
        logger.warning("projection construction exhausted its budget")
        return report

    optimized = smn_opt(u, src)
    for x in inputs:
        report.rows.append(ProjectionRow(
            x,
            source=run(src, x, fuel),
            target=run(target, x, fuel),
            interpreted=run(u, pair_nat(src, x), fuel),
            optimized=run(optimized, x, fuel),
        ))

    generated_compiler = run(cogen, u, fuel)
    for other in [src, *sources]:
        compiled = run(compiler, other, fuel)
        report.compiled[other] = (isinstance(compiled, Halted)
                                  and _agrees_everywhere(compiled.value, other, inputs, fuel))
        ok = isinstance(generated_compiler, Halted)
        if ok:
            compiled = run(generated_compiler.value, other, fuel)
            ok = isinstance(compiled, Halted) and _agrees_everywhere(compiled.value, other, inputs, fuel)
        report.generated[other] = ok
    logger.info(f"futamura: first law {report.first_law}, "
                f"second {all(report.compiled.values())}, third {all(report.generated.values())}")
    return report

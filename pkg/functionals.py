"""
Effective operations and their least fixed points: finite-function graphs,
the chain dovetailer, the standard-form transformer, the non-minimal fixed
point counterexample, oracle programs and the Sasso separation.

Every "run in parallel" is a single deterministic round-robin with budgets
that grow per round, so each (candidate, budget) pair is reached eventually.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple, Union

import pandas as pd
from tqdm import tqdm

from evaluator import Exhausted, Halted, Outcome, kleene_agree, run, run_program
from objlang import (FiniteFn, OracleProgram, Op, Program, ProgramBuilder, Stmt,
                     div_program, encode, list_code, list_decode, max_register,
                     pair_nat, unpair_nat)
from recursion import (kleene_fix, kleene_template, n, rogers_template)
from specializer import smn, subst_const

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Finite functions
# ---------------------------------------------------------------------------

def graph_code(t: FiniteFn) -> int:
    return list_code(pair_nat(arg, value) for arg, value in t.entries)


def graph_decode(code: int) -> FiniteFn:
    """Total; a repeated argument keeps its first binding."""
    bindings = {}
    for entry in list_decode(code):
        arg, value = unpair_nat(entry)
        bindings.setdefault(arg, value)
    return FiniteFn.of(bindings)


@lru_cache(maxsize=None)
def lookup_template() -> int:
    """On pair(g, x): the value bound to x in graph g, looping forever if unbound."""
    G, X, R, FOUND, H, A, E = range(1, 8)
    b = ProgramBuilder()
    b.first(G, 0).second(X, 0).const(FOUND, 0).const(R, 0)
    with b.while_nonzero(G):
        b.uncons(H, G, G)
        b.first(A, H).eq(E, A, X)
        with b.if_zero(E):
            pass
        with b.otherwise():
            b.second(R, H).const(FOUND, 1).const(G, 0)
    with b.if_zero(FOUND):
        b.diverge()
    b.copy(0, R)
    return encode(b.build())


def finite_fn_index(g: int) -> int:
    """d(g): an index computing the finite function with graph code g."""
    return subst_const(lookup_template(), g)


@lru_cache(maxsize=None)
def div_index() -> int:
    return encode(div_program())


def enumerate_graph(p: int, rounds: int, max_arg: Optional[int] = None,
                    progress: bool = False) -> FiniteFn:
    """{(i, v) : i <= rounds, phi_p(i) = v within `rounds` steps}; monotone in rounds."""
    top = rounds if max_arg is None else min(rounds, max_arg)
    bindings = {}
    for i in tqdm(range(top + 1), desc="enumerate", disable=not progress):
        outcome = run(p, i, rounds)
        if isinstance(outcome, Halted):
            bindings[i] = outcome.value
    return FiniteFn.of(bindings)


# ---------------------------------------------------------------------------
# Oracle programs
# ---------------------------------------------------------------------------

def run_oracle(F: OracleProgram, oracle: Union[int, FiniteFn], x: int, fuel: int) -> Outcome:
    """Strict sequential semantics: each query runs to completion before the next."""
    return run_program(F, x, fuel, oracle=oracle)


def _queries_as_evals(body: Tuple[Stmt, ...], code_reg: int) -> Tuple[Stmt, ...]:
    rewritten = []
    for stmt in body:
        if stmt.op == Op.QUERY:
            rewritten.append(Stmt(Op.EVAL, dst=stmt.dst, a=code_reg, b=stmt.a))
        elif stmt.op in (Op.LOOP, Op.BRANCH):
            rewritten.append(Stmt(stmt.op, a=stmt.a,
                                  body=_queries_as_evals(stmt.body, code_reg),
                                  orelse=_queries_as_evals(stmt.orelse, code_reg)))
        else:
            rewritten.append(stmt)
    return tuple(rewritten)


def oracle_template(F: OracleProgram) -> int:
    """On pair(e, x): F's body run on x with every query answered by phi_e."""
    code_reg = max_register(F.body) + 1
    prologue = (Stmt(Op.FIRST, dst=code_reg, a=0), Stmt(Op.SECOND, dst=0, a=0))
    return encode(Program(prologue + _queries_as_evals(F.body, code_reg)))


def odifreddi_lfp(F: OracleProgram) -> int:
    """Queries replaced by recursive calls to the program's own code."""
    return kleene_fix(oracle_template(F))


def induced_transformer(F: OracleProgram) -> int:
    """The effective operation of F as a code transformer: c -> code of F(phi_c)."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=oracle_template(F)),
        Stmt(Op.SMN, dst=0, a=1, b=0),
    )))


def factorial_oracle_program() -> OracleProgram:
    """1 if y = 0 else y * f(y - 1)."""
    b = ProgramBuilder()
    with b.if_zero(0):
        b.const(0, 1)
    with b.otherwise():
        b.pred(1, 0).query(2, 1).mul(0, 0, 2)
    return b.build_oracle()


def identity_oracle_program() -> OracleProgram:
    return OracleProgram((Stmt(Op.QUERY, dst=0, a=0),))


def factorial_step_transformer() -> int:
    return induced_transformer(factorial_oracle_program())


# ---------------------------------------------------------------------------
# Chain dovetailer
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def frt_template() -> int:
    """
    On pair(q, x): round r evaluates p_0..p_r on x at budget 2^r, where
    p_0 = DIV and p_{i+1} = phi_q(p_i), and halts with the first value found.
    The chain is rebuilt from DIV every round rather than cached, so the only
    state carried between rounds is the budget and the round number.
    """
    Q, X, B, R, DIV, RUN, CUR, CNT, RES, TAG, V = range(1, 12)
    b = ProgramBuilder()
    b.first(Q, 0).second(X, 0).const(B, 1).const(R, 0).const(DIV, div_index()).const(RUN, 1)
    with b.while_nonzero(RUN):
        b.copy(CUR, DIV).succ(CNT, R)
        with b.while_nonzero(CNT):
            b.beval(RES, CUR, X, B).first(TAG, RES)
            with b.if_zero(TAG):
                pass
            with b.otherwise():
                b.second(V, RES).const(RUN, 0).const(CNT, 1)
            b.pred(CNT, CNT)
            with b.if_zero(CNT):
                pass
            with b.otherwise():
                b.eval(CUR, Q, CUR)
        b.succ(R, R).add(B, B, B)
    b.copy(0, V)
    return encode(b.build())


def frt_lfp(q: int) -> int:
    return subst_const(frt_template(), q)


@dataclass
class ChainState:
    codes: List[int] = field(default_factory=list)
    round: int = 0


def chain_codes(q: int, depth: int, fuel: int) -> ChainState:
    """p_0 = DIV, p_{i+1} = phi_q(p_i); stops early if q exhausts."""
    state = ChainState([div_index()])
    while state.round < depth:
        step = run(q, state.codes[-1], fuel)
        if not isinstance(step, Halted):
            logger.warning(f"transformer exhausted on chain element {state.round}")
            break
        state.codes.append(step.value)
        state.round += 1
    return state


def chain_oracle(q: int, depth: int = 8, args: Iterable[int] = range(7), fuel: int = 10 ** 5,
                 progress: bool = False) -> FiniteFn:
    """
    Graph of f_depth for f_0 = empty, f_{i+1} = F(f_i), iterating on graphs:
    each f_i is rebuilt from its finite graph before F is applied.
    """
    args = list(args)
    graph = FiniteFn()
    for i in tqdm(range(depth), desc="chain", disable=not progress):
        step = run(q, finite_fn_index(graph_code(graph)), fuel)
        if not isinstance(step, Halted):
            raise RuntimeError(f"transformer exhausted {fuel} steps at chain step {i}")
        bindings = {}
        for a in args:
            outcome = run(step.value, a, fuel)
            if isinstance(outcome, Halted):
                bindings[a] = outcome.value
        graph = FiniteFn.of(bindings)
        logger.debug(f"chain step {i + 1}: {graph}")
    return graph


# ---------------------------------------------------------------------------
# Standard form
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def stdform_worker() -> int:
    """
    On pair(pair(f, y), x): round r scans graph codes g < 2^r, starting at the
    empty function, and skips any g whose arguments are not strictly
    increasing (every finite function has exactly one such code). For each
    remaining g, F(theta) = phi_f(d(g)) is tried on x at budget 2^r; on a hit
    with value t every entry (a, b) of theta must satisfy phi_y(a) = b at
    budget about 2 * 4^r, and then the worker halts with t.
    """
    (K, X, F, Y, BF, BM, LIM, RUN, TD, G, CNT, D, C, RES, TAG, T, OK, L, E, A, BV,
     R2, T2, W, SAME, OUT, CAN, LO, L2, E2, A2, GAP) = range(1, 33)
    b = ProgramBuilder(first_free=40)
    b.first(K, 0).second(X, 0).first(F, K).second(Y, K)
    b.const(BF, 1).const(BM, 1).const(LIM, 1).const(RUN, 1).const(TD, lookup_template())
    with b.while_nonzero(RUN):
        b.const(G, 0).copy(CNT, LIM)
        with b.while_nonzero(CNT):
            # canonical iff each argument is at least one past the previous
            b.const(CAN, 1).const(LO, 0).copy(L2, G)
            with b.while_nonzero(L2):
                b.uncons(E2, L2, L2).first(A2, E2).monus(GAP, LO, A2)
                with b.if_zero(GAP):
                    b.succ(LO, A2)
                with b.otherwise():
                    b.const(CAN, 0).const(L2, 0)
            with b.if_zero(CAN):
                pass
            with b.otherwise():
                b.smn(D, TD, G).eval(C, F, D).beval(RES, C, X, BF).first(TAG, RES)
                with b.if_zero(TAG):
                    pass
                with b.otherwise():
                    b.second(T, RES).const(OK, 1).copy(L, G)
                    with b.while_nonzero(L):
                        b.uncons(E, L, L).first(A, E).second(BV, E)
                        b.beval(R2, Y, A, BM).first(T2, R2)
                        with b.if_zero(T2):
                            b.const(OK, 0).const(L, 0)
                        with b.otherwise():
                            b.second(W, R2).eq(SAME, W, BV)
                            with b.if_zero(SAME):
                                b.const(OK, 0).const(L, 0)
                    with b.if_zero(OK):
                        pass
                    with b.otherwise():
                        b.const(RUN, 0).const(CNT, 1).copy(OUT, T)
            b.succ(G, G).pred(CNT, CNT)
        b.add(BF, BF, BF).pair(BM, BF, BF).add(LIM, LIM, LIM)
    b.copy(0, OUT)
    return encode(b.build())


@lru_cache(maxsize=None)
def stdform_template() -> int:
    """On pair(f, y): the code of the worker with pair(f, y) frozen in."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=stdform_worker()),
        Stmt(Op.SMN, dst=0, a=1, b=0),
    )))


def standard_form(f: int) -> int:
    """v with phi_v = h_f, a total transformer co-extensional with f."""
    return subst_const(stdform_template(), f)


def lfp_via_stdform(f: int) -> int:
    return n(standard_form(f))


# ---------------------------------------------------------------------------
# Non-minimal fixed point
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def zero_code() -> int:
    """t: the constant-zero program."""
    return encode(Program((Stmt(Op.CONST, dst=0, a=0),)))


@lru_cache(maxsize=None)
def singularity_blueprint() -> int:
    """On pair(self, x): t if x = n(self) else x, with n(self) computed in-language."""
    SELF, X, TR, Z, TK, Q, NU, SAME = range(1, 9)
    b = ProgramBuilder()
    b.first(SELF, 0).second(X, 0)
    b.const(TR, rogers_template()).smn(Z, TR, SELF)
    b.const(TK, kleene_template()).smn(Q, TK, Z).smn(NU, Q, Q)
    b.big_eq(SAME, X, NU)
    with b.if_zero(SAME):
        b.copy(0, X)
    with b.otherwise():
        b.const(0, zero_code())
    return encode(b.build())


@dataclass
class CounterexampleReport:
    m: int
    fixed_point: int
    t: int
    fuel: int
    off_singularity: List[Tuple[int, Outcome]] = field(default_factory=list)
    at_singularity: Optional[Outcome] = None
    fixed_point_runs: List[Tuple[int, Outcome]] = field(default_factory=list)

    @property
    def identity_off_singularity(self) -> bool:
        return all(isinstance(o, Halted) and o.value == x for x, o in self.off_singularity)

    @property
    def maps_singularity_to_t(self) -> bool:
        return isinstance(self.at_singularity, Halted) and self.at_singularity.value == self.t

    @property
    def fixed_point_is_zero(self) -> bool:
        return all(isinstance(o, Halted) and o.value == 0 for _, o in self.fixed_point_runs)

    @property
    def passed(self) -> bool:
        return self.identity_off_singularity and self.maps_singularity_to_t and self.fixed_point_is_zero

    def to_frame(self) -> pd.DataFrame:
        rows = [{"check": "m(x) = x", "input": x, "outcome": str(o)} for x, o in self.off_singularity]
        rows.append({"check": "m(n(m)) = t", "input": "n(m)", "outcome": str(self.at_singularity)})
        rows += [{"check": "n(m)(x) = 0", "input": x, "outcome": str(o)} for x, o in self.fixed_point_runs]
        return pd.DataFrame(rows)


def nonminimal_counterexample(inputs: Iterable[int] = range(10),
                              fuel: int = 10 ** 6) -> Tuple[int, CounterexampleReport]:
    """
    m = kleene_fix(B) is the identity everywhere except at its own uniform
    fixed point n(m), which it sends to t. So n(m) computes constant zero,
    while the least fixed point of m is the empty function.
    """
    m = kleene_fix(singularity_blueprint())
    fixed_point = n(m)
    report = CounterexampleReport(m, fixed_point, zero_code(), fuel)
    inputs = list(inputs)
    for x in inputs:
        report.off_singularity.append((x, run(m, x, fuel)))
    report.at_singularity = run(m, fixed_point, fuel)
    for x in inputs:
        report.fixed_point_runs.append((x, run(fixed_point, x, fuel)))
    logger.info(f"counterexample: n(m) has {fixed_point.bit_length()} bits, passed={report.passed}")
    return m, report


@dataclass
class SeparationReport:
    srt: List[Tuple[int, Outcome]]
    dovetail: List[Tuple[int, Outcome]]
    stdform: List[Tuple[int, Outcome]]

    @property
    def passed(self) -> bool:
        return (all(isinstance(o, Halted) and o.value == 0 for _, o in self.srt)
                and all(isinstance(o, Exhausted) for _, o in self.dovetail)
                and all(isinstance(o, Exhausted) for _, o in self.stdform))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{"input": x, "srt": str(a), "dovetail": str(b), "stdform": str(c)}
                             for (x, a), (_, b), (_, c) in zip(self.srt, self.dovetail, self.stdform)])


def separation(m: int, inputs: Iterable[int] = range(10), fuel: int = 10 ** 6,
               progress: bool = False) -> SeparationReport:
    """n(m) against frt_lfp(m) and lfp_via_stdform(m) on the same inputs."""
    inputs = list(inputs)
    codes = {"srt": n(m), "dovetail": frt_lfp(m), "stdform": lfp_via_stdform(m)}
    results = {name: [] for name in codes}
    for x in tqdm(inputs, desc="separation", disable=not progress):
        for name, code in codes.items():
            results[name].append((x, run(code, x, fuel)))
    return SeparationReport(results["srt"], results["dovetail"], results["stdform"])


# ---------------------------------------------------------------------------
# Sasso's functional
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def sasso_worker_template() -> int:
    """On pair(g, x): 0 once phi_g(2x) = 0 or phi_g(2x + 1) = 0 within budget b, b = 1, 2, ..."""
    G, X, A, A2, B, RUN, RES, P = range(1, 9)
    b = ProgramBuilder()
    b.first(G, 0).second(X, 0).add(A, X, X).succ(A2, A).const(B, 1).const(RUN, 1)
    with b.while_nonzero(RUN):
        for arg in (A, A2):
            # beval yields pair(1, 0) = 1 exactly when phi_g(arg) = 0
            b.beval(RES, G, arg, B)
            with b.if_zero(RES):
                pass
            with b.otherwise():
                b.pred(P, RES)
                with b.if_zero(P):
                    b.const(RUN, 0)
        b.succ(B, B)
    b.const(0, 0)
    return encode(b.build())


@lru_cache(maxsize=None)
def sasso_op() -> int:
    """The transformer g -> subst_const(T_Sasso, g)."""
    return encode(Program((
        Stmt(Op.CONST, dst=1, a=sasso_worker_template()),
        Stmt(Op.SMN, dst=0, a=1, b=0),
    )))


def _ordered_query_program(right_first: bool) -> OracleProgram:
    A, FIRST, SECOND, R = range(1, 5)
    b = ProgramBuilder()
    b.add(A, 0, 0)
    if right_first:
        b.succ(FIRST, A).copy(SECOND, A)
    else:
        b.copy(FIRST, A).succ(SECOND, A)
    b.query(R, FIRST)
    with b.if_zero(R):
        b.const(0, 0)
    with b.otherwise():
        b.query(R, SECOND)
        with b.if_zero(R):
            b.const(0, 0)
        with b.otherwise():
            b.diverge()
    return b.build_oracle()


def q_left() -> OracleProgram:
    return _ordered_query_program(right_first=False)


def q_right() -> OracleProgram:
    return _ordered_query_program(right_first=True)


@dataclass
class SassoCase:
    name: str
    graph: FiniteFn
    x: int
    worker: Outcome
    left: Outcome
    right: Outcome


@dataclass
class SassoReport:
    fuel: int
    cases: List[SassoCase] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "oracle": case.name, "x": case.x, "worker": str(case.worker),
            "q_left": str(case.left), "q_right": str(case.right),
        } for case in self.cases])

    @property
    def passed(self) -> bool:
        """Worker halts on both one-sided oracles; each fixed query order misses one."""
        by_name = {case.name: case for case in self.cases}
        low, high, empty = by_name["2x"], by_name["2x+1"], by_name["empty"]
        return (isinstance(low.worker, Halted) and low.worker.value == 0
                and isinstance(high.worker, Halted) and high.worker.value == 0
                and isinstance(empty.worker, Exhausted)
                and isinstance(low.right, Exhausted) and isinstance(high.left, Exhausted))


def sasso_demo(x: int = 3, fuel: int = 10 ** 5) -> SassoReport:
    report = SassoReport(fuel)
    for name, graph in (("2x", FiniteFn.of({2 * x: 0})),
                        ("2x+1", FiniteFn.of({2 * x + 1: 0})),
                        ("empty", FiniteFn())):
        oracle = finite_fn_index(graph_code(graph))
        image = run(sasso_op(), oracle, fuel)
        worker = run(image.value, x, fuel) if isinstance(image, Halted) else image
        report.cases.append(SassoCase(name, graph, x, worker,
                                      run_oracle(q_left(), oracle, x, fuel),
                                      run_oracle(q_right(), oracle, x, fuel)))
    return report


# ---------------------------------------------------------------------------
# Compactness
# ---------------------------------------------------------------------------

@dataclass
class CompactnessReport:
    x: int
    value: Optional[int]
    status: str  # found | not-found | indeterminate
    witness: Optional[FiniteFn] = None
    witness_code: Optional[int] = None
    candidates: int = 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "x": self.x, "value": self.value, "status": self.status,
            "witness": str(self.witness) if self.witness is not None else "",
            "witness_code": self.witness_code, "candidates": self.candidates,
        }])


def compactness_probe(q: int, g: int, x: int, fuel: int, rounds: int = 256,
                      max_candidates: int = 200, code_limit: int = 10 ** 5,
                      progress: bool = False) -> CompactnessReport:
    """
    Smallest canonical graph code theta inside the enumerated graph of phi_g
    with F(theta)(x) = F(phi_g)(x). Failing within the bounds is not a
    refutation.
    """
    target = run(q, g, fuel)
    value = run(target.value, x, fuel) if isinstance(target, Halted) else target
    if not isinstance(value, Halted):
        return CompactnessReport(x, None, "indeterminate")
    graph = enumerate_graph(g, rounds).as_dict()
    candidates = 0
    for code in tqdm(range(code_limit), desc="compactness", disable=not progress):
        theta = graph_decode(code)
        if graph_code(theta) != code or not theta.issubset(graph):
            continue
        candidates += 1
        if candidates > max_candidates:
            break
        image = run(q, finite_fn_index(code), fuel)
        if not isinstance(image, Halted):
            continue
        if kleene_agree(run(image.value, x, fuel), value):
            logger.info(f"compactness witness {theta} (code {code}) after {candidates} candidates")
            return CompactnessReport(x, value.value, "found", theta, code, candidates)
    return CompactnessReport(x, value.value, "not-found", candidates=min(candidates, max_candidates))

import math

import pytest

from evaluator import Exhausted, Halted, check_equiv, run
from functionals import (chain_codes, chain_oracle, compactness_probe,
                         div_index, enumerate_graph, factorial_oracle_program,
                         factorial_step_transformer, finite_fn_index,
                         frt_lfp, graph_code, graph_decode, identity_oracle_program,
                         induced_transformer, lfp_via_stdform,
                         nonminimal_counterexample, odifreddi_lfp, run_oracle,
                         sasso_demo, sasso_op, sasso_worker_template,
                         separation, standard_form, zero_code)
from objlang import (FiniteFn, encode, factorial_program, list_code, pair_nat,
                     parse_oracle_program, succ_program)
from recursion import constant_transformer, identity_transformer
from specializer import smn

FACT = encode(factorial_program())
SUCC = encode(succ_program())


def test_graph_code_of_a_single_binding():
    assert graph_code(FiniteFn.of({2: 5})) == pair_nat(pair_nat(2, 5), 0) + 1
    assert graph_code(FiniteFn()) == 0


def test_graph_decode_keeps_first_binding():
    code = list_code([pair_nat(1, 2), pair_nat(1, 3)])
    assert graph_decode(code) == FiniteFn.of({1: 2})
    assert graph_decode(0) == FiniteFn()


def test_finite_fn_index_looks_up_bindings():
    d = finite_fn_index(graph_code(FiniteFn.of({2: 5, 4: 1})))
    assert run(d, 2, 10 ** 4).value == 5
    assert run(d, 4, 10 ** 4).value == 1
    assert run(d, 3, 10 ** 4) == Exhausted(10 ** 4)


def test_empty_graph_diverges_everywhere():
    d = finite_fn_index(0)
    assert all(isinstance(run(d, x, 10 ** 3), Exhausted) for x in range(4))


def test_enumerate_graph():
    assert enumerate_graph(SUCC, 5) == FiniteFn.of({i: i + 1 for i in range(6)})
    assert enumerate_graph(div_index(), 50) == FiniteFn()
    assert enumerate_graph(0, 100, max_arg=3) == FiniteFn.of({0: 0, 1: 1, 2: 2, 3: 3})


def test_enumerate_graph_is_monotone():
    smaller = enumerate_graph(FACT, 60)
    larger = enumerate_graph(FACT, 250)
    assert smaller.issubset(larger.as_dict())
    assert len(larger) > len(smaller)


def test_run_oracle_with_a_table():
    F = factorial_oracle_program()
    assert run_oracle(F, FiniteFn.of({2: 2}), 3, 10 ** 4).value == 6
    assert run_oracle(F, FiniteFn(), 0, 10 ** 4).value == 1
    assert run_oracle(F, FiniteFn(), 3, 10 ** 4) == Exhausted(10 ** 4)


def test_run_oracle_with_an_index():
    assert run_oracle(factorial_oracle_program(), FACT, 4, 10 ** 5).value == 24


@pytest.mark.parametrize("x", range(7))
def test_odifreddi_factorial(x):
    outcome = run(odifreddi_lfp(factorial_oracle_program()), x, 10 ** 6)
    assert outcome.value == math.factorial(x)


def test_odifreddi_identity_is_empty():
    e = odifreddi_lfp(identity_oracle_program())
    assert all(isinstance(run(e, x, 10 ** 4), Exhausted) for x in range(3))


def test_odifreddi_constant():
    e = odifreddi_lfp(parse_oracle_program("X0 := 7"))
    assert [run(e, x, 10 ** 4).value for x in range(3)] == [7, 7, 7]


def test_induced_transformer_applies_the_functional():
    q = induced_transformer(factorial_oracle_program())
    image = run(q, FACT, 100)
    assert isinstance(image, Halted)
    assert run(image.value, 5, 10 ** 5).value == 120


def test_chain_codes_for_identity():
    state = chain_codes(identity_transformer(), 3, 100)
    assert state.codes == [div_index()] * 4
    assert state.round == 3


def test_chain_oracle_builds_factorial():
    graph = chain_oracle(factorial_step_transformer(), depth=8, args=range(7), fuel=10 ** 4)
    assert graph == FiniteFn.of({x: math.factorial(x) for x in range(7)})


def test_chain_oracle_of_identity_is_empty():
    assert chain_oracle(0, depth=3, args=range(4), fuel=10 ** 3) == FiniteFn()


@pytest.mark.slow
@pytest.mark.parametrize("q,fuel", [
    (factorial_step_transformer(), 10 ** 7),
    (identity_transformer(), 10 ** 6),
])
def test_chain_oracle_matches_the_dovetailer(q, fuel):
    graph = chain_oracle(q, depth=8, args=range(7), fuel=10 ** 4)
    assert graph == enumerate_graph(frt_lfp(q), fuel, max_arg=6)


@pytest.mark.slow
@pytest.mark.parametrize("x", range(7))
def test_frt_factorial(x):
    outcome = run(frt_lfp(factorial_step_transformer()), x, 10 ** 7)
    assert outcome.value == math.factorial(x)


def test_frt_identity_exhausts():
    e = frt_lfp(induced_transformer(identity_oracle_program()))
    assert all(isinstance(run(e, x, 10 ** 4), Exhausted) for x in range(3))


def test_frt_constant_transformer_reaches_the_identity():
    e = frt_lfp(constant_transformer(0))
    assert [run(e, x, 10 ** 5).value for x in range(10)] == list(range(10))


@pytest.mark.slow
def test_frt_identity_transformer_is_empty():
    e = frt_lfp(identity_transformer())
    assert all(isinstance(run(e, x, 10 ** 6), Exhausted) for x in range(10))


@pytest.mark.slow
def test_frt_result_is_a_fixed_point():
    q = factorial_step_transformer()
    e = frt_lfp(q)
    image = run(q, e, 10 ** 5)
    assert isinstance(image, Halted)
    assert check_equiv(e, image.value, range(5), 10 ** 7).passed


@pytest.mark.slow
def test_odifreddi_agrees_with_the_dovetailer():
    oracle_lfp = odifreddi_lfp(factorial_oracle_program())
    dovetailed = frt_lfp(factorial_step_transformer())
    assert check_equiv(oracle_lfp, dovetailed, range(7), 10 ** 7).passed


def test_standard_form_of_a_constant_transformer():
    h = standard_form(constant_transformer(zero_code()))
    image = run(h, FACT, 10 ** 4)
    assert isinstance(image, Halted)
    assert [run(image.value, x, 10 ** 5).value for x in range(3)] == [0, 0, 0]


def test_lfp_via_stdform_of_a_constant_transformer():
    e = lfp_via_stdform(constant_transformer(zero_code()))
    assert [run(e, x, 10 ** 5).value for x in range(3)] == [0, 0, 0]


@pytest.mark.slow
@pytest.mark.parametrize("x", range(5))
def test_lfp_via_stdform_factorial(x):
    outcome = run(lfp_via_stdform(factorial_step_transformer()), x, 10 ** 8)
    assert outcome.value == math.factorial(x)


@pytest.mark.slow
@pytest.mark.parametrize("y", [0, FACT])
def test_standard_form_is_coextensional(y):
    q = factorial_step_transformer()
    from_h = run(standard_form(q), y, 10 ** 4)
    from_f = run(q, y, 10 ** 4)
    assert isinstance(from_h, Halted) and isinstance(from_f, Halted)
    assert check_equiv(from_h.value, from_f.value, range(5), 10 ** 8).passed


@pytest.mark.slow
def test_nonminimal_counterexample_and_separation():
    m, report = nonminimal_counterexample(range(10), 10 ** 6)
    assert report.identity_off_singularity
    assert report.maps_singularity_to_t
    assert report.fixed_point_is_zero
    split = separation(m, range(10), 10 ** 6)
    assert split.passed
    assert list(split.to_frame().columns) == ["input", "srt", "dovetail", "stdform"]


def test_sasso_demo():
    report = sasso_demo(3, 10 ** 5)
    assert report.passed
    cases = {case.name: case for case in report.cases}
    assert cases["2x"].left == Halted(0, cases["2x"].left.steps)
    assert isinstance(cases["2x+1"].right, Halted)
    assert isinstance(cases["empty"].left, Exhausted)


@pytest.mark.parametrize("x,witness,code", [
    (0, {}, 0),
    (2, {1: 1}, 11),
    (3, {2: 2}, 79),
    (4, {3: 6}, 1327),
])
def test_compactness_factorial(x, witness, code):
    report = compactness_probe(factorial_step_transformer(), FACT, x, 10 ** 4, rounds=250)
    assert report.status == "found"
    assert report.value == math.factorial(x)
    assert report.witness == FiniteFn.of(witness)
    assert report.witness_code == code


def test_compactness_identity():
    q = induced_transformer(identity_oracle_program())
    report = compactness_probe(q, 0, 5, 10 ** 4)
    assert report.witness == FiniteFn.of({5: 5})
    assert report.witness_code == 1831


def test_compactness_indeterminate_when_the_target_diverges():
    q = induced_transformer(identity_oracle_program())
    report = compactness_probe(q, div_index(), 1, 10 ** 3)
    assert report.status == "indeterminate"


def test_sasso_op_freezes_the_oracle():
    g = finite_fn_index(graph_code(FiniteFn.of({6: 0})))
    image = run(sasso_op(), g, 100)
    assert image.value == smn(sasso_worker_template(), g)
    assert run(image.value, 3, 10 ** 5).value == 0

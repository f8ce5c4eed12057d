import math

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from evaluator import Exhausted, Halted, run
from functionals import factorial_step_transformer
from objlang import constant_program, encode, succ_program
from recursion import (constant_blueprint, constant_transformer,
                       factorial_blueprint, identity_transformer, kleene_fix,
                       kleene_h, kleene_law, kleene_template, n,
                       parity_transformer, quine_blueprint, rogers_fix,
                       rogers_n)
from specializer import smn, subst_const

ZERO = encode(constant_program(0))
SUCC = encode(succ_program())


def test_kleene_fix_shape():
    p = factorial_blueprint()
    q = subst_const(kleene_template(), p)
    assert kleene_fix(p) == smn(q, q)


@pytest.mark.parametrize("y", range(9))
def test_recursive_factorial(y):
    outcome = run(kleene_fix(factorial_blueprint()), y, 10 ** 7)
    assert isinstance(outcome, Halted)
    assert outcome.value == math.factorial(y)


def test_kleene_law_on_factorial():
    report = kleene_law(factorial_blueprint(), range(6), 10 ** 6)
    assert report.passed


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.integers(0, 10 ** 7))
def test_kleene_law_on_arbitrary_blueprints(p):
    assert kleene_law(p, range(3), 10 ** 5).passed


@pytest.mark.parametrize("z", [
    identity_transformer(),
    constant_transformer(ZERO),
    constant_transformer(SUCC),
    constant_transformer(0),
    factorial_step_transformer(),
])
def test_rogers_law_on_total_transformers(z):
    # factorial runs out of fuel on both sides from 8 on
    assert rogers_fix(z, range(10), 10 ** 5).status == "pass"


def test_constant_blueprint():
    e = kleene_fix(constant_blueprint(42))
    assert [run(e, y, 10 ** 4).value for y in range(5)] == [42] * 5


def test_quine_prints_its_own_index():
    e = kleene_fix(quine_blueprint())
    for y in range(3):
        assert run(e, y, 10 ** 4).value == e


@pytest.mark.parametrize("p", [*range(100), 12345])
def test_object_h_matches_host(p):
    assert run(kleene_h(), p, 100) == Halted(kleene_fix(p), 3)


@pytest.mark.parametrize("z", range(100))
def test_object_n_matches_host(z):
    assert run(rogers_n(), z, 100) == Halted(n(z), 5)


def test_rogers_constant_transformer():
    report = rogers_fix(constant_transformer(ZERO), range(5), 10 ** 4)
    assert report.status == "pass"
    assert report.image == ZERO
    assert [run(report.fixed_point, y, 10 ** 4).value for y in range(5)] == [0] * 5


def test_rogers_identity_transformer_diverges_consistently():
    report = rogers_fix(identity_transformer(), range(3), 10 ** 4)
    assert report.passed
    assert report.image == report.fixed_point
    assert run(report.fixed_point, 0, 10 ** 4) == Exhausted(10 ** 4)


def test_rogers_parity_is_indeterminate():
    # parity runs in time linear in its argument, and the fixed point is huge
    report = rogers_fix(parity_transformer(), range(3), 10 ** 4)
    assert report.status == "indeterminate"
    assert report.image is None


def test_parity_transformer_values():
    f = parity_transformer()
    assert [run(f, x, 10 ** 4).value for x in range(6)] == [1, 0, 3, 2, 5, 4]

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from evaluator import Exhausted, Halted, run, run_program
from objlang import (FiniteFn, Op, OracleProgram, Program, ProgramBuilder,
                     ProgramSyntaxError, QueryNotAllowedError, Stmt, add_program,
                     compose_codes, constant_program, decode, decode_oracle,
                     div_program, encode, eq_program, factorial_program,
                     format_program, list_code, list_decode, mul_program,
                     pair_nat, parse_oracle_program, parse_program,
                     succ_program, unpair_nat)
from utils.corpus import CORPUS_DIR, corpus_names, load_program

DIV_INDEX = 44598280


def test_pair_examples():
    assert pair_nat(0, 0) == 0
    assert pair_nat(1, 2) == 8
    assert unpair_nat(1) == (1, 0)
    assert unpair_nat(2) == (0, 1)


@given(st.integers(0, 99), st.integers(0, 99))
def test_unpair_inverts_pair(x, y):
    assert unpair_nat(pair_nat(x, y)) == (x, y)


@given(st.integers(0, 10 ** 4))
def test_pair_inverts_unpair(n):
    assert pair_nat(*unpair_nat(n)) == n


@given(st.integers(2, 2 ** 4096))
def test_components_shrink(n):
    x, y = unpair_nat(n)
    assert x < n and y < n


def test_list_codes():
    assert list_code([]) == 0
    assert list_code([7]) == pair_nat(7, 0) + 1
    assert list_decode(list_code([3, 0, 5])) == [3, 0, 5]


def test_empty_program_is_index_zero():
    assert encode(Program()) == 0
    assert decode(0) == Program()


@pytest.mark.parametrize("n", [0, 1, 3, 4])
def test_small_indices_are_identity(n):
    assert decode(n).body == ()


def test_index_two_is_constant_zero():
    assert decode(2) == constant_program(0)


def test_div_index_is_frozen():
    assert encode(div_program()) == DIV_INDEX
    assert decode(DIV_INDEX) == div_program()


@given(st.integers(0, 10 ** 4))
def test_decode_is_total_and_stable(n):
    program = decode(n)
    assert decode(encode(program)) == program


@settings(max_examples=50)
@given(st.integers(0, 10 ** 4), st.integers(0, 9))
def test_reencoding_preserves_behavior(n, x):
    again = encode(decode(n))
    left, right = run(n, x, 500), run(again, x, 500)
    assert left == right


def test_large_tags_decode_to_noop():
    # tag 13 alone: gamma(4) = 00100, digits of 13 = 110
    word = "00100" + "110"
    code = int("1" + word, 2) - 1
    assert decode(code).body == (Stmt(Op.NOOP),)


def test_query_kept_only_by_oracle_decoder():
    program = OracleProgram((Stmt(Op.QUERY, dst=0, a=0),))
    code = encode(program)
    assert decode_oracle(code) == program
    assert decode(code).body == (Stmt(Op.NOOP),)


def test_plain_program_rejects_query():
    with pytest.raises(QueryNotAllowedError):
        Program((Stmt(Op.QUERY, dst=0, a=0),))
    with pytest.raises(QueryNotAllowedError):
        parse_program("X0 := query X0")
    builder = ProgramBuilder()
    builder.query(0, 0)
    with pytest.raises(QueryNotAllowedError):
        builder.build()


def test_parse_and_format():
    text = "X1 := first X0\nwhile X1 {\n  X1 := pred X1\n}\nifzero X1 {\n  X0 := 7\n} else {\n  nop\n}\n"
    program = parse_program(text)
    assert program.body[1] == Stmt(Op.LOOP, a=1, body=(Stmt(Op.PRED, dst=1, a=1),))
    assert format_program(program) == text
    assert parse_program(format_program(program)) == program


def test_parse_quote_embeds_code():
    program = parse_program("X1 := quote {\n  X0 := succ X0\n}\n")
    assert program.body == (Stmt(Op.CONST, dst=1, a=encode(succ_program())),)


@pytest.mark.parametrize("text", [
    "X0 := frobnicate X1",
    "while X1 {",
    "}",
    "X0 := pair X1",
    "Y1 := 3",
])
def test_syntax_errors(text):
    with pytest.raises(ProgramSyntaxError):
        parse_program(text)


def test_syntax_error_reports_line():
    with pytest.raises(ProgramSyntaxError, match="line 3"):
        parse_program("X0 := 1\n# comment\nX0 := bogus X0\n")


def test_oracle_program_parses():
    program = parse_oracle_program("X0 := query X0")
    assert program.body == (Stmt(Op.QUERY, dst=0, a=0),)


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trips(name):
    program = load_program(CORPUS_DIR / f"{name}.wl")
    assert decode(encode(program)) == program
    assert parse_program(format_program(program)) == program


def test_corpus_div_matches_builder():
    assert load_program(CORPUS_DIR / "div.wl") == div_program()


def test_compose_identity():
    k = compose_codes(0, 0)
    for x in range(10):
        assert run(k, x, 10 ** 4).value == x


def test_compose_succ_twice():
    s = encode(succ_program())
    assert run(compose_codes(s, s), 5, 10 ** 4).value == 7


def test_compose_propagates_divergence():
    k = compose_codes(0, DIV_INDEX)
    assert all(isinstance(run(k, x, 10 ** 3), Exhausted) for x in range(10))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["identity", "succ", "add", "mul", "constant-zero", "div"]),
       st.sampled_from(["identity", "succ", "add", "mul", "constant-zero", "div"]),
       st.integers(0, 9))
def test_compose_law(outer, inner, x):
    i = encode(load_program(CORPUS_DIR / f"{outer}.wl"))
    j = encode(load_program(CORPUS_DIR / f"{inner}.wl"))
    fuel = 10 ** 5
    composed = run(compose_codes(i, j), x, fuel)
    first = run(j, x, fuel)
    if isinstance(first, Exhausted):
        assert isinstance(composed, Exhausted)
        return
    second = run(i, first.value, fuel)
    if isinstance(second, Halted):
        assert isinstance(composed, Halted) and composed.value == second.value
    else:
        assert isinstance(composed, Exhausted)


def test_eq_macro():
    eq = encode(eq_program())
    assert run(eq, pair_nat(5, 5), 10 ** 4).value == 1
    assert run(eq, pair_nat(5, 6), 10 ** 4).value == 0


def test_mul_macro():
    assert run(encode(mul_program()), pair_nat(6, 7), 10 ** 4).value == 42


def test_add_macro():
    assert run(encode(add_program()), pair_nat(3, 4), 10 ** 4).value == 7


def test_factorial_macro():
    assert run(encode(factorial_program()), 5, 10 ** 5).value == 120


def test_table_macro():
    b = ProgramBuilder()
    b.table(1, 0, {1: 10, 2: 20}, default=99).copy(0, 1)
    code = encode(b.build())
    assert [run(code, x, 10 ** 4).value for x in range(4)] == [99, 10, 20, 99]


def test_builder_is_deterministic():
    assert encode(factorial_program()) == encode(factorial_program())


def _big_eq_code():
    b = ProgramBuilder()
    b.unpair(1, 2, 0).big_eq(0, 1, 2)
    return encode(b.build())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 300), st.integers(0, 300))
def test_big_eq_small_values(a, b):
    outcome = run(_big_eq_code(), pair_nat(a, b), 10 ** 5)
    assert outcome.value == int(a == b)


def test_big_eq_large_values():
    a = 2 ** 300 + 12345
    code = _big_eq_code()
    assert run(code, pair_nat(a, a), 10 ** 6).value == 1
    assert run(code, pair_nat(a, a + 1), 10 ** 6).value == 0


def test_finite_fn():
    t = FiniteFn.of({3: 9, 1: 2})
    assert t.entries == ((1, 2), (3, 9))
    assert t.get(3) == 9 and t.get(4) is None
    assert t.issubset({1: 2, 3: 9, 5: 5})
    assert not t.issubset({1: 2})


def test_run_program_directly():
    assert run_program(succ_program(), 4, 10) == Halted(5, 1)

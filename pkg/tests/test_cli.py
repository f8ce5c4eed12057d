import pytest

from main import EXIT_FAIL, EXIT_OK, EXIT_USAGE, Config, main, parse_inputs
from recursion import constant_blueprint, kleene_fix
from utils.corpus import CORPUS_DIR, resolve_index


def test_parse_inputs():
    assert parse_inputs("0..3") == [0, 1, 2, 3]
    assert parse_inputs("5, 7,9") == [5, 7, 9]


def test_config_rejects_nonpositive_fuel():
    with pytest.raises(ValueError):
        Config(fuel=0)


def test_run_factorial(capsys):
    assert main(["run", "factorial", "5"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("HALT 120 steps=")


def test_run_reports_exhaustion(capsys):
    assert main(["run", "div", "0", "--fuel", "1000"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "EXHAUSTED budget=1000"


def test_run_trace(capsys):
    assert main(["run", "succ", "4", "--trace"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["1", "X0", ":=", "succ", "X0"]
    assert lines[-1] == "HALT 5 steps=1"


def test_missing_program_is_a_usage_error(capsys):
    assert main(["run", "no-such-program", "1"]) == EXIT_USAGE
    assert "no-such-program" in capsys.readouterr().err


def test_syntax_error_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.wl"
    bad.write_text("X0 := 1\nX0 := nonsense\n")
    assert main(["encode", str(bad)]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_encode_and_decode(capsys):
    assert main(["encode", str(CORPUS_DIR / "div.wl")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "index 44598280"
    assert main(["decode", "2"]) == EXIT_OK
    assert capsys.readouterr().out == "X0 := 0\n"


def test_out_file_collects_indices(tmp_path, capsys):
    out = tmp_path / "indices.txt"
    assert main(["smn", "add", "3", "--out", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out.splitlines()[0]
    assert out.read_text().strip() == printed


def test_check_equiv_identity_codes(capsys):
    assert main(["check-equiv", "identity", "0"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == [f"{x}: AGREE {x}" for x in range(10)]


def test_check_equiv_fails_on_disagreement(capsys):
    assert main(["check-equiv", "identity", "succ", "--inputs", "0..2"]) == EXIT_FAIL


def test_fix_kleene_verify(capsys):
    p = constant_blueprint(42)
    assert main(["fix", "kleene", str(p), "--verify", "--inputs", "0..2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == f"fixed-point {kleene_fix(p)}"
    assert lines[1:] == [f"{x}: AGREE 42" for x in range(3)]


def test_fix_rogers_identity_transformer(capsys):
    code = main(["fix", "rogers", "identity-transformer", "--fuel", "10000", "--inputs", "0..1"])
    assert code == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "PASS"


def test_lfp_via_oracle(tmp_path, capsys):
    program = tmp_path / "const.wl"
    program.write_text("X0 := 7\n")
    assert main(["lfp", str(program), "--via", "oracle", "--inputs", "0..1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("lfp ")
    assert lines[1].startswith("0: HALT 7 ")
    assert lines[2].startswith("1: HALT 7 ")


def test_futamura_small(capsys):
    assert main(["futamura", "succ", "--fuel", "10000", "--inputs", "0..2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "PASS"


def test_corpus_test(capsys):
    assert main(["corpus-test", "--fuel", "1000", "--inputs", "0..2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "div: ok halted=0/3" in out
    assert "ROUND-TRIP FAILED" not in out


def test_resolve_index_orders_its_lookups(tmp_path):
    assert resolve_index("17") == 17
    assert resolve_index("identity") == 0
    program = tmp_path / "p.wl"
    program.write_text("X0 := 0\n")
    assert resolve_index(str(program)) == 2

"""
Command-line front end.

    python main.py run factorial 5 --fuel 1000000
    python main.py check-equiv identity 0 --inputs 0..9
    python main.py counterexample
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from evaluator import Halted, check_equiv, run, universal_index
from functionals import (compactness_probe, frt_lfp, lfp_via_stdform,
                         nonminimal_counterexample, odifreddi_lfp, sasso_demo,
                         separation)
from futamura import project, smn_as_index
from objlang import (ObjLangError, decode, describe, encode, format_program,
                     parse_oracle_program, parse_program)
from recursion import kleene_fix, kleene_law, rogers_fix
from specializer import smn, smn_opt
from utils.corpus import CORPUS_DIR, load_corpus, load_program, resolve_index

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def parse_inputs(text: str) -> List[int]:
    """'a..b' (inclusive) or a comma separated list."""
    text = text.strip()
    if ".." in text:
        low, high = text.split("..", 1)
        return list(range(int(low), int(high) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


@dataclass
class Config:
    fuel: int = 10 ** 6
    inputs: List[int] = field(default_factory=lambda: list(range(10)))
    corpus_dir: Path = CORPUS_DIR
    opt: bool = False
    progress: bool = False
    out: Optional[Path] = None

    def __post_init__(self):
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")

    @classmethod
    def from_args(cls, args) -> "Config":
        return cls(fuel=args.fuel, inputs=parse_inputs(args.inputs),
                   corpus_dir=Path(args.corpus), opt=args.opt,
                   progress=args.progress, out=Path(args.out) if args.out else None)


def emit_index(label: str, index: int, config: Config):
    """Print an index in decimal; with --out also write it to a file."""
    print(f"{label} {index}")
    if config.out is not None:
        with open(config.out, "a", encoding="utf-8") as handle:
            handle.write(f"{label} {index}\n")


def print_outcomes(code: int, config: Config):
    for x in config.inputs:
        print(f"{x}: {run(code, x, config.fuel)}")


def cmd_run(args, config: Config) -> int:
    p = resolve_index(args.program, config.corpus_dir)
    trace = None
    if args.trace:
        def trace(depth, stmt, steps):
            print(f"{steps:>8} {'  ' * depth}{describe(stmt)}")
    print(run(p, args.input, config.fuel, trace=trace))
    return EXIT_OK


def cmd_encode(args, config: Config) -> int:
    emit_index("index", encode(load_program(args.file)), config)
    return EXIT_OK


def cmd_decode(args, config: Config) -> int:
    print(format_program(decode(args.index)), end="")
    return EXIT_OK


def cmd_smn(args, config: Config) -> int:
    p = resolve_index(args.program, config.corpus_dir)
    index = smn_opt(p, args.x) if config.opt else smn(p, args.x)
    emit_index("index", index, config)
    print(format_program(decode(index)), end="")
    return EXIT_OK


def cmd_fix(args, config: Config) -> int:
    p = resolve_index(args.program, config.corpus_dir)
    if args.kind == "kleene":
        emit_index("fixed-point", kleene_fix(p), config)
        if not args.verify:
            return EXIT_OK
        report = kleene_law(p, config.inputs, config.fuel)
        for row in report.rows:
            print(row.line())
        return EXIT_OK if report.passed else EXIT_FAIL
    report = rogers_fix(p, config.inputs, config.fuel)
    emit_index("fixed-point", report.fixed_point, config)
    if report.image is not None:
        emit_index("image", report.image, config)
    print(report.status.upper())
    return EXIT_FAIL if report.status == "fail" else EXIT_OK


def cmd_lfp(args, config: Config) -> int:
    if args.via == "oracle":
        code = odifreddi_lfp(parse_oracle_program(Path(args.program).read_text(encoding="utf-8")))
    else:
        q = resolve_index(args.program, config.corpus_dir)
        code = frt_lfp(q) if args.via == "dovetail" else lfp_via_stdform(q)
    emit_index("lfp", code, config)
    print_outcomes(code, config)
    return EXIT_OK


def cmd_counterexample(args, config: Config) -> int:
    m, report = nonminimal_counterexample(config.inputs, config.fuel)
    emit_index("m", m, config)
    emit_index("n(m)", report.fixed_point, config)
    print(f"m is the identity off n(m): {'PASS' if report.identity_off_singularity else 'FAIL'}")
    print(f"m(n(m)) = t: {'PASS' if report.maps_singularity_to_t else 'FAIL'}")
    print(f"n(m) is constant zero: {'PASS' if report.fixed_point_is_zero else 'FAIL'}")
    split = separation(m, config.inputs, config.fuel, progress=config.progress)
    print(split.to_frame().to_string(index=False))
    passed = report.passed and split.passed
    print("SEPARATED" if passed else "NOT SEPARATED")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sasso(args, config: Config) -> int:
    report = sasso_demo(args.x, config.fuel)
    print(report.to_frame().to_string(index=False))
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_compactness(args, config: Config) -> int:
    q = resolve_index(args.transformer, config.corpus_dir)
    g = resolve_index(args.function, config.corpus_dir)
    report = compactness_probe(q, g, args.x, config.fuel, rounds=args.rounds,
                               progress=config.progress)
    print(report.to_frame().to_string(index=False))
    return EXIT_OK


def cmd_futamura(args, config: Config) -> int:
    src = resolve_index(args.source, config.corpus_dir)
    corpus = load_corpus(config.corpus_dir)
    report = project(src, config.inputs, config.fuel, sources=corpus.values())
    emit_index("s", smn_as_index(), config)
    emit_index("U", universal_index(), config)
    if report.indeterminate:
        print("INDETERMINATE")
        return EXIT_OK
    emit_index("target", report.target, config)
    emit_index("compiler", report.compiler, config)
    emit_index("cogen", report.cogen, config)
    print(report.to_frame().to_string(index=False))
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_equiv(args, config: Config) -> int:
    a = resolve_index(args.left, config.corpus_dir)
    b = resolve_index(args.right, config.corpus_dir)
    report = check_equiv(a, b, config.inputs, config.fuel, progress=config.progress)
    for row in report.rows:
        print(row.line())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_corpus_test(args, config: Config) -> int:
    failures = 0
    for name, index in load_corpus(config.corpus_dir).items():
        program = load_program(config.corpus_dir / f"{name}.wl")
        round_trip = decode(encode(program)) == program and parse_program(format_program(program)) == program
        halted = sum(isinstance(run(index, x, config.fuel), Halted) for x in config.inputs)
        status = "ok" if round_trip else "ROUND-TRIP FAILED"
        failures += not round_trip
        print(f"{name}: {status} halted={halted}/{len(config.inputs)}")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=10 ** 6, help="step budget per run")
    common.add_argument("--inputs", default="0..9", help="sample inputs: a..b or a,b,c")
    common.add_argument("--corpus", default=str(CORPUS_DIR), help="corpus directory")
    common.add_argument("--opt", action="store_true", help="use the optimizing specializer")
    common.add_argument("--progress", action="store_true", help="show progress bars")
    common.add_argument("--out", help="also append printed indices to this file")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--debug", action="store_true")

    parser = argparse.ArgumentParser(description="Reflective computability workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a program on one input")
    p.add_argument("program")
    p.add_argument("input", type=int)
    p.add_argument("--trace", action="store_true", help="print every executed statement")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("encode", parents=[common], help="index of a program file")
    p.add_argument("file")
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("decode", parents=[common], help="program of an index")
    p.add_argument("index", type=int)
    p.set_defaults(handler=cmd_decode)

    p = sub.add_parser("smn", parents=[common], help="specialize a program on its first argument")
    p.add_argument("program")
    p.add_argument("x", type=int)
    p.set_defaults(handler=cmd_smn)

    p = sub.add_parser("fix", parents=[common], help="recursion-theorem fixed points")
    p.add_argument("kind", choices=["kleene", "rogers"])
    p.add_argument("program")
    p.add_argument("--verify", action="store_true", help="check the fixed-point law on the inputs")
    p.set_defaults(handler=cmd_fix)

    p = sub.add_parser("lfp", parents=[common], help="least fixed point of a transformer")
    p.add_argument("program", help="transformer, or an oracle program file with --via oracle")
    p.add_argument("--via", choices=["dovetail", "stdform", "oracle"], default="dovetail")
    p.set_defaults(handler=cmd_lfp)

    p = sub.add_parser("counterexample", parents=[common], help="non-minimal fixed point demo")
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("sasso", parents=[common], help="dovetailed vs sequential oracle queries")
    p.add_argument("--x", type=int, default=3)
    p.set_defaults(handler=cmd_sasso)

    p = sub.add_parser("compactness", parents=[common], help="finite-part witness search")
    p.add_argument("transformer")
    p.add_argument("function")
    p.add_argument("x", type=int)
    p.add_argument("--rounds", type=int, default=256, help="steps and arguments for enumerating g")
    p.set_defaults(handler=cmd_compactness)

    p = sub.add_parser("futamura", parents=[common], help="the three projections")
    p.add_argument("source")
    p.set_defaults(handler=cmd_futamura)

    p = sub.add_parser("check-equiv", parents=[common], help="three-valued comparison")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=cmd_check_equiv)

    p = sub.add_parser("corpus-test", parents=[common], help="round-trip and run the corpus")
    p.set_defaults(handler=cmd_corpus_test)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    try:
        config = Config.from_args(args)
        return args.handler(args, config)
    except (OSError, ObjLangError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

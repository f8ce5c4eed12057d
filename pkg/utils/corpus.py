import logging
from pathlib import Path
from typing import Dict, List

from objlang import Program, encode, parse_program

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
SUFFIX = ".wl"


def load_program(path) -> Program:
    """Parse a program file. OSError and ProgramSyntaxError propagate to the caller."""
    path = Path(path)
    logger.debug(f"Reading program {path}")
    return parse_program(path.read_text(encoding="utf-8"))


def corpus_names(corpus_dir=CORPUS_DIR) -> List[str]:
    return sorted(p.stem for p in Path(corpus_dir).glob(f"*{SUFFIX}"))


def load_corpus(corpus_dir=CORPUS_DIR) -> Dict[str, int]:
    """Name -> index for every program in the corpus directory."""
    corpus = {}
    for name in corpus_names(corpus_dir):
        corpus[name] = encode(load_program(Path(corpus_dir) / f"{name}{SUFFIX}"))
    logger.info(f"Loaded {len(corpus)} corpus programs from {corpus_dir}")
    return corpus


def resolve_index(arg: str, corpus_dir=CORPUS_DIR) -> int:
    """
    A decimal index, a path to a program file, or the name of a corpus
    program, in that order.
    """
    if arg.isdigit():
        return int(arg)
    path = Path(arg)
    if path.is_file():
        return encode(load_program(path))
    named = Path(corpus_dir) / f"{arg}{SUFFIX}"
    if named.is_file():
        return encode(load_program(named))
    raise FileNotFoundError(f"no program file or corpus entry named {arg!r}")

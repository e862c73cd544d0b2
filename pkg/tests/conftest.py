from pathlib import Path

import pytest

from overc import compile_source

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
CORPUS_PROGRAMS = sorted(CORPUS.glob("*.mini"))


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.mini").read_text()


def corpus_input(name: str) -> str:
    path = CORPUS / f"{name}.in"
    return path.read_text() if path.exists() else ""


def wrap_main(body: str, decls: str = "") -> str:
    return f"{decls}\nint main()\n{{\n{body}\nreturn 0;\n}}\n"


@pytest.fixture
def compile_text():
    def _compile(text, file="t.mini"):
        return compile_source(text, file)

    return _compile

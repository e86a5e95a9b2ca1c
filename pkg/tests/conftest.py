import random
import shlex
import sys

import pytest

from bitextaug.corpus import Corpus, Origin, Sentence, SentencePair

PYTHON = shlex.quote(sys.executable)


def mock_cmd(mode: str, extra: str = "") -> str:
    return f"{PYTHON} -m bitextaug.mocks {mode} {{IN}} {{OUT}}{extra}"


def make_corpus(
    n: int,
    seed: int = 0,
    min_len: int = 3,
    max_len: int = 20,
    origin: Origin = Origin.ORIGINAL,
    name: str = "fixture",
    unique_lines: bool = True,
) -> Corpus:
    """Random corpus with distinct per-pair vocabularies when unique_lines."""
    rng = random.Random(seed)
    pairs = []
    for i in range(n):
        k = rng.randint(min_len, max_len)
        if unique_lines:
            src = " ".join(f"s{i}t{j}" for j in range(k))
            tgt = " ".join(f"u{i}t{j}" for j in range(k))
        else:
            src = " ".join(f"w{rng.randint(0, 30)}" for _ in range(k))
            tgt = " ".join(f"v{rng.randint(0, 30)}" for _ in range(k))
        pairs.append(SentencePair(i, Sentence(src), Sentence(tgt), origin))
    return Corpus(pairs, name=name)


def write_pair_files(tmp_path, corpus: Corpus, prefix: str = "corpus"):
    src = tmp_path / f"{prefix}.src"
    tgt = tmp_path / f"{prefix}.tgt"
    src.write_text("".join(p.source.raw + "\n" for p in corpus.pairs), encoding="utf-8")
    tgt.write_text("".join(p.target.raw + "\n" for p in corpus.pairs), encoding="utf-8")
    return src, tgt


@pytest.fixture
def small_corpus():
    return make_corpus(40, seed=7, min_len=5, max_len=18)

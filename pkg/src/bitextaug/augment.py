"""Synthetic long-sentence generation by pairwise sentence concatenation.

Two pairs are drawn uniformly at random from a single-origin pool, their
sources are joined with a reserved separator token, their targets are
joined the same way, and the result is kept only if the concatenation
reaches a minimum word length. Draws are independent ordered pairs with
distinct indices, so the two halves never come from the same pool row and
(a, b) and (b, a) are distinct outcomes. Rejection sampling continues
until the requested number of outputs survives the length filter.
"""

from __future__ import annotations

import operator
from itertools import repeat
from typing import NamedTuple, Optional

import numpy as np

from .corpus import PRNG_ID, Corpus, Origin, Sentence, SentencePair, Side, gc_paused
from .errors import AugmentationError, ValidationError

DEFAULT_SEP_TOKEN = "<sep>"
DEFAULT_MIN_CONCAT_LEN = 25


class AugmentConfig(NamedTuple):
    """Parameters for concatenation augmentation.

    count_sep_in_length controls whether the separator token itself counts
    toward the minimum-length filter; the default excludes it because the
    threshold is about linguistic content.
    """

    seed: int
    sep_token: str = DEFAULT_SEP_TOKEN
    min_concat_len: int = DEFAULT_MIN_CONCAT_LEN
    target_count: int = 0
    length_side: Side = Side.SOURCE
    count_sep_in_length: bool = False
    max_attempts_factor: int = 100

    def validate(self) -> None:
        if not self.sep_token or self.sep_token.split() != [self.sep_token]:
            raise ValidationError(
                f"sep_token must be a single whitespace-free token, got {self.sep_token!r}"
            )
        if self.min_concat_len < 0:
            raise ValidationError(f"min_concat_len must be >= 0, got {self.min_concat_len}")
        if self.target_count < 0:
            raise ValidationError(f"target_count must be >= 0, got {self.target_count}")
        if self.max_attempts_factor < 1:
            raise ValidationError(
                f"max_attempts_factor must be >= 1, got {self.max_attempts_factor}"
            )


def concat_pair(a: SentencePair, b: SentencePair, sep: str = DEFAULT_SEP_TOKEN, pair_id: int = 0) -> SentencePair:
    """Concatenate two pairs source-with-source and target-with-target.

    Neither input may already be a concatenation or contain the separator.
    """
    for label, p in (("first", a), ("second", b)):
        if p.origin is Origin.CONCAT:
            raise ValidationError(f"concat_pair: {label} input is already concatenated")
        if sep in p.source.tokens or sep in p.target.tokens:
            raise ValidationError(
                f"concat_pair: {label} input contains the separator token {sep!r}"
            )
    source = Sentence(f"{a.source.raw} {sep} {b.source.raw}")
    target = Sentence(f"{a.target.raw} {sep} {b.target.raw}")
    return SentencePair(pair_id, source, target, Origin.CONCAT)


def _pool_origin(pool: Corpus) -> Origin:
    origins = set(map(operator.attrgetter("origin"), pool.pairs))
    if len(origins) != 1:
        names = sorted(o.value for o in origins)
        raise ValidationError(
            f"concat pool must be homogeneous in origin, found {names}; "
            "concatenate original and pseudo pools separately"
        )
    origin = origins.pop()
    if origin is Origin.CONCAT:
        raise ValidationError("concat pool must not itself be concatenated")
    return origin


def concat_augment(pool: Corpus, config: AugmentConfig) -> Corpus:
    """Generate config.target_count concatenated pairs from a pool.

    The pool must hold at least two pairs, all with the same
    non-concatenated origin and none containing the separator token. The
    output length (measured on config.length_side, separator excluded
    unless count_sep_in_length) is at least config.min_concat_len for
    every surviving pair. Deterministic for fixed (pool, config).

    Raises AugmentationError when the threshold is unreachable or the
    draw budget (max_attempts_factor * target_count) runs out.
    """
    config.validate()
    sep = config.sep_token
    if len(pool) < 2:
        raise ValidationError(f"concat pool needs at least 2 pairs, got {len(pool)}")
    # the cyclic GC stays off for the whole call: with million-pair pools
    # alive, collections triggered by this function's churn re-scan every
    # pool tuple and dominate runtime
    with gc_paused():
        _pool_origin(pool)
        n = len(pool)
        src_raws = list(map(operator.attrgetter("source.raw"), pool.pairs))
        tgt_raws = list(map(operator.attrgetter("target.raw"), pool.pairs))
        # substring scan first (C-speed short-circuit over the whole pool);
        # only on a hit does a line-by-line tokenized check run
        for raws in (src_raws, tgt_raws):
            if any(map(operator.contains, raws, repeat(sep))):
                for i, raw in enumerate(raws):
                    if sep in raw.split():
                        raise ValidationError(
                            f"pool pair {i} contains the reserved separator token {sep!r}"
                        )

        measured = src_raws if config.length_side is Side.SOURCE else tgt_raws
        lens = np.fromiter(map(len, map(str.split, measured)), np.int64, count=n)
        sep_add = 1 if config.count_sep_in_length else 0
        top_two = int(np.partition(lens, -2)[-2:].sum()) + sep_add
        if config.target_count > 0 and top_two < config.min_concat_len:
            raise AugmentationError(
                f"length threshold unreachable: max concatenated length {top_two} "
                f"< min_concat_len {config.min_concat_len}"
            )

        rng = np.random.default_rng(config.seed)
        budget = config.max_attempts_factor * config.target_count
        draws = rejected_self = rejected_short = 0
        kept_i: list[np.ndarray] = []
        kept_j: list[np.ndarray] = []
        need = config.target_count
        while need > 0:
            batch = min(max(4096, 2 * need), 1 << 17, budget - draws)
            if batch <= 0:
                raise AugmentationError(
                    f"could not reach target_count={config.target_count} within "
                    f"{budget} draws ({rejected_short} rejected below "
                    f"min_concat_len={config.min_concat_len}, {rejected_self} self-pairs); "
                    "the pool sentences are too short for the threshold"
                )
            ij = rng.integers(0, n, size=(batch, 2))
            draws += batch
            i, j = ij[:, 0], ij[:, 1]
            distinct = i != j
            rejected_self += int(batch - distinct.sum())
            long_enough = lens[i] + lens[j] + sep_add >= config.min_concat_len
            ok = distinct & long_enough
            rejected_short += int((distinct & ~long_enough).sum())
            i, j = i[ok], j[ok]
            if len(i) > need:
                i, j = i[:need], j[:need]
            kept_i.append(i)
            kept_j.append(j)
            need -= len(i)

        mid = f" {sep} "
        # tuple.__new__ skips the generated NamedTuple __new__ wrapper, a
        # Python-level call that would otherwise dominate this loop
        tnew = tuple.__new__
        pair_cls, sent_cls, concat_origin = SentencePair, Sentence, Origin.CONCAT
        out_pairs = [
            tnew(
                pair_cls,
                (
                    k,
                    tnew(sent_cls, (src_raws[a] + mid + src_raws[b],)),
                    tnew(sent_cls, (tgt_raws[a] + mid + tgt_raws[b],)),
                    concat_origin,
                ),
            )
            for k, a, b in zip(
                range(config.target_count),
                np.concatenate(kept_i).tolist() if kept_i else [],
                np.concatenate(kept_j).tolist() if kept_j else [],
            )
        ]
    meta = {
        "augment": "concat",
        "pool": pool.name,
        "seed": str(config.seed),
        "prng": PRNG_ID,
        "sep_token": sep,
        "min_concat_len": str(config.min_concat_len),
        "target_count": str(config.target_count),
        "length_side": config.length_side.value,
        "count_sep_in_length": str(config.count_sep_in_length).lower(),
        "draws": str(draws),
        "rejected_short": str(rejected_short),
        "rejected_self": str(rejected_self),
    }
    return Corpus(
        out_pairs, f"{pool.name}+concat", pool.source_lang, pool.target_lang, meta
    )


def measure_concat_mean(corpus: Corpus, config: Optional[AugmentConfig] = None) -> float:
    """Mean token count over the corpus, separator handling per config.

    With count_sep_in_length False (the default) one separator occurrence
    per sentence is excluded from the count.
    """
    if len(corpus) == 0:
        raise ValidationError("measure_concat_mean: empty corpus")
    cfg = config or AugmentConfig(seed=0)
    lens = corpus.token_counts(cfg.length_side)
    if not cfg.count_sep_in_length:
        sep = cfg.sep_token
        attr = "source" if cfg.length_side is Side.SOURCE else "target"
        sep_counts = np.fromiter(
            (getattr(p, attr).raw.split().count(sep) for p in corpus.pairs),
            np.int64,
            count=len(corpus),
        )
        lens = lens - sep_counts
    return float(lens.sum()) / len(corpus)

"""Corpus BLEU, length-bucketed scoring, run averaging, and judgment tallies.

BLEU here is the standard corpus-level score: clipped n-gram precisions
for orders 1..n pooled over the corpus, combined as a geometric mean and
multiplied by the brevity penalty min(1, e^(1-r/c)), reported on a 0-100
scale. Single reference, no tokenization (callers supply whitespace
token-ready text), no smoothing unless requested. Orders for which the
hypothesis corpus has no n-grams at all are dropped from the geometric
mean; that degenerate case only arises when every hypothesis is shorter
than the order and keeps the identity BLEU(h, h) = 100 exact for any
non-empty corpus.
"""

from __future__ import annotations

import csv
import io
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .buckets import BucketSpec
from .corpus import Sentence, gc_paused
from .errors import ValidationError

try:  # C-accelerated counter used by collections.Counter itself
    from collections import _count_elements
except ImportError:  # pragma: no cover - pure-python fallback

    def _count_elements(mapping, iterable):
        get = mapping.get
        for elem in iterable:
            mapping[elem] = get(elem, 0) + 1


class BucketScore(NamedTuple):
    score: Optional[float]  # None marks an empty bucket (absent, not zero)
    count: int


class BleuReport(NamedTuple):
    overall: float
    per_bucket: dict[str, BucketScore]
    n_order: int
    bp: float
    precisions: tuple[float, ...]  # per-order modified precisions, 0-100 scale
    hyp_len: int
    ref_len: int
    excluded: int = 0  # items whose source length fell outside the bucket spec

    def bucket_labels(self) -> tuple[str, ...]:
        return tuple(self.per_bucket)


class BleuDiff(NamedTuple):
    overall: float
    per_bucket: dict[str, Optional[float]]


def _ngram_stats_order4(hyps: Sequence[Sentence], refs: Sequence[Sentence]):
    """Clipped-match and total n-gram counts for orders 1..4.

    Hand-specialized hot path: per pair, reference n-grams of all four
    orders go into one set (key spaces are disjoint: str vs 2/3/4-tuples)
    and hypothesis n-grams are checked with C-level map/sum. When a
    hypothesis repeats an n-gram the set is not enough to clip, so those
    rare pairs fall back to exact counted matching.
    """
    matched = [0, 0, 0, 0]
    total = [0, 0, 0, 0]
    hyp_len = ref_len = 0
    zp = zip
    with gc_paused():
        for hsent, rsent in zp(hyps, refs):
            ht = hsent.raw.split()
            rt = rsent.raw.split()
            lh = len(ht)
            hyp_len += lh
            ref_len += len(rt)
            total[0] += lh
            if lh > 1:
                total[1] += lh - 1
            if lh > 2:
                total[2] += lh - 2
            if lh > 3:
                total[3] += lh - 3
            if ht == rt:
                matched[0] += lh
                if lh > 1:
                    matched[1] += lh - 1
                if lh > 2:
                    matched[2] += lh - 2
                if lh > 3:
                    matched[3] += lh - 3
                continue
            r1 = rt[1:]
            r2 = rt[2:]
            r3 = rt[3:]
            rset = set(rt)
            up = rset.update
            up(zp(rt, r1))
            up(zp(rt, r1, r2))
            up(zp(rt, r1, r2, r3))
            contains = rset.__contains__
            h1 = ht[1:]
            h2 = ht[2:]
            h3 = ht[3:]
            no_repeats = len(set(ht)) == lh
            rcounts = None
            for order, grams in (
                (0, ht),
                (1, list(zp(ht, h1))),
                (2, list(zp(ht, h1, h2))),
                (3, list(zp(ht, h1, h2, h3))),
            ):
                if not grams:
                    break
                if no_repeats or len(set(grams)) == len(grams):
                    m = sum(map(contains, grams))
                else:
                    if rcounts is None:
                        rcounts = {}
                        _count_elements(rcounts, rt)
                        _count_elements(rcounts, zp(rt, r1))
                        _count_elements(rcounts, zp(rt, r1, r2))
                        _count_elements(rcounts, zp(rt, r1, r2, r3))
                    get = rcounts.get
                    m = 0
                    for g in grams:
                        k = get(g)
                        if k:
                            m += 1
                            rcounts[g] = k - 1
                if m == 0:
                    break  # an absent n-gram implies absent higher orders
                matched[order] += m
    return matched, total, hyp_len, ref_len


def _ngram_stats_generic(hyps: Sequence[Sentence], refs: Sequence[Sentence], n_order: int):
    """Counted clipped matching for arbitrary maximum order."""
    matched = [0] * n_order
    total = [0] * n_order
    hyp_len = ref_len = 0
    with gc_paused():
        for hsent, rsent in zip(hyps, refs):
            ht = hsent.raw.split()
            rt = rsent.raw.split()
            lh = len(ht)
            hyp_len += lh
            ref_len += len(rt)
            for n in range(1, n_order + 1):
                if lh < n:
                    break
                total[n - 1] += lh - n + 1
            rcounts: dict = {}
            for n in range(1, n_order + 1):
                if len(rt) < n:
                    break
                _count_elements(
                    rcounts, rt if n == 1 else zip(*(rt[i:] for i in range(n)))
                )
            get = rcounts.get
            for n in range(1, n_order + 1):
                if lh < n:
                    break
                m = 0
                for g in ht if n == 1 else zip(*(ht[i:] for i in range(n))):
                    k = get(g)
                    if k:
                        m += 1
                        rcounts[g] = k - 1
                matched[n - 1] += m
    return matched, total, hyp_len, ref_len


def _combine(matched, total, hyp_len, ref_len, n_order, smooth):
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    precisions: list[float] = []
    log_sum = 0.0
    effective = 0
    zero_precision = False
    for n in range(n_order):
        m, t = matched[n], total[n]
        if smooth and n >= 1 and t > 0:  # add-one smoothing on higher orders only
            m, t = m + 1, t + 1
        if t == 0:
            precisions.append(0.0)
            continue
        effective += 1
        p = m / t
        precisions.append(100.0 * p)
        if p == 0.0:
            zero_precision = True
        else:
            log_sum += math.log(p)
    if effective == 0 or zero_precision:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(log_sum / effective)
    return score, bp, tuple(precisions)


def corpus_bleu(
    hypotheses: Sequence[Sentence],
    references: Sequence[Sentence],
    n_order: int = 4,
    smooth: bool = False,
) -> BleuReport:
    """Corpus-level BLEU of hypotheses against single references.

    Exact clipped counting; with smooth=True, add-one smoothing is applied
    to orders >= 2 so tiny fixtures with no higher-order matches still get
    a nonzero score.
    """
    if len(hypotheses) != len(references):
        raise ValidationError(
            f"corpus_bleu: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise ValidationError("corpus_bleu: empty input")
    if n_order < 1:
        raise ValidationError(f"corpus_bleu: n_order must be >= 1, got {n_order}")
    if n_order == 4:
        matched, total, hyp_len, ref_len = _ngram_stats_order4(hypotheses, references)
    else:
        matched, total, hyp_len, ref_len = _ngram_stats_generic(hypotheses, references, n_order)
    if hyp_len == 0:
        raise ValidationError("corpus_bleu: hypotheses contain no tokens")
    score, bp, precisions = _combine(matched, total, hyp_len, ref_len, n_order, smooth)
    return BleuReport(
        overall=score,
        per_bucket={},
        n_order=n_order,
        bp=bp,
        precisions=precisions,
        hyp_len=hyp_len,
        ref_len=ref_len,
    )


def bucketed_bleu(
    hypotheses: Sequence[Sentence],
    references: Sequence[Sentence],
    sources: Sequence[Sentence],
    buckets: BucketSpec,
    n_order: int = 4,
    smooth: bool = False,
) -> BleuReport:
    """Corpus BLEU overall and independently within source-length buckets.

    Items are assigned by source token count. With a finite last bound,
    longer items are excluded from every score (including the overall one)
    and counted in the report's ``excluded`` field; an open-ended spec
    excludes nothing. Empty buckets report score None, never 0.
    """
    if not (len(hypotheses) == len(references) == len(sources)):
        raise ValidationError(
            "bucketed_bleu: hypotheses, references, and sources must have equal lengths "
            f"({len(hypotheses)}, {len(references)}, {len(sources)})"
        )
    if not hypotheses:
        raise ValidationError("bucketed_bleu: empty input")
    src_lens = np.fromiter((len(s.raw.split()) for s in sources), np.int64, count=len(sources))
    if int(src_lens.min()) < 1:
        raise ValidationError("bucketed_bleu: sources must be non-empty sentences")
    idx = np.searchsorted(np.asarray(buckets.bounds), src_lens, side="left")
    n_buckets = len(buckets.labels)
    per_bucket: dict[str, BucketScore] = {}
    covered_h: list[Sentence] = []
    covered_r: list[Sentence] = []
    for b, label in enumerate(buckets.labels):
        members = np.flatnonzero(idx == b)
        if len(members) == 0:
            per_bucket[label] = BucketScore(None, 0)
            continue
        hs = [hypotheses[i] for i in members.tolist()]
        rs = [references[i] for i in members.tolist()]
        covered_h.extend(hs)
        covered_r.extend(rs)
        rep = corpus_bleu(hs, rs, n_order=n_order, smooth=smooth)
        per_bucket[label] = BucketScore(rep.overall, len(members))
    excluded = int((idx >= n_buckets).sum())
    if not covered_h:
        raise ValidationError("bucketed_bleu: every item falls outside the bucket spec")
    overall = corpus_bleu(covered_h, covered_r, n_order=n_order, smooth=smooth)
    return BleuReport(
        overall=overall.overall,
        per_bucket=per_bucket,
        n_order=n_order,
        bp=overall.bp,
        precisions=overall.precisions,
        hyp_len=overall.hyp_len,
        ref_len=overall.ref_len,
        excluded=excluded,
    )


def _check_compatible(reports: Sequence[BleuReport]) -> None:
    first = reports[0]
    for rep in reports[1:]:
        if tuple(rep.per_bucket) != tuple(first.per_bucket):
            raise ValidationError("reports use different bucket specs")
        if rep.n_order != first.n_order:
            raise ValidationError("reports use different n-gram orders")
        for label in first.per_bucket:
            if rep.per_bucket[label].count != first.per_bucket[label].count:
                raise ValidationError(
                    f"reports disagree on bucket {label!r} counts: "
                    f"{first.per_bucket[label].count} vs {rep.per_bucket[label].count}"
                )
            if (rep.per_bucket[label].score is None) != (first.per_bucket[label].score is None):
                raise ValidationError(f"reports disagree on bucket {label!r} presence")


def average_runs(reports: Sequence[BleuReport]) -> BleuReport:
    """Arithmetic mean of overall and per-bucket scores across runs.

    Counts are unchanged; reports must share bucket spec and counts.
    """
    if not reports:
        raise ValidationError("average_runs: no reports")
    _check_compatible(reports)
    k = len(reports)
    per_bucket: dict[str, BucketScore] = {}
    for label in reports[0].per_bucket:
        if reports[0].per_bucket[label].score is None:
            per_bucket[label] = reports[0].per_bucket[label]
        else:
            per_bucket[label] = BucketScore(
                sum(r.per_bucket[label].score for r in reports) / k,
                reports[0].per_bucket[label].count,
            )
    n_order = reports[0].n_order
    return BleuReport(
        overall=sum(r.overall for r in reports) / k,
        per_bucket=per_bucket,
        n_order=n_order,
        bp=sum(r.bp for r in reports) / k,
        precisions=tuple(
            sum(r.precisions[i] for r in reports) / k for i in range(n_order)
        ),
        hyp_len=reports[0].hyp_len,
        ref_len=reports[0].ref_len,
        excluded=reports[0].excluded,
    )


def diff_by_bucket(a: BleuReport, b: BleuReport) -> BleuDiff:
    """Per-bucket and overall score differences a - b.

    Buckets absent in either report stay absent in the diff.
    """
    if tuple(a.per_bucket) != tuple(b.per_bucket):
        raise ValidationError("diff_by_bucket: reports use different bucket specs")
    per_bucket: dict[str, Optional[float]] = {}
    for label in a.per_bucket:
        sa, sb = a.per_bucket[label].score, b.per_bucket[label].score
        per_bucket[label] = None if sa is None or sb is None else sa - sb
    return BleuDiff(overall=a.overall - b.overall, per_bucket=per_bucket)


# --- pairwise human judgments ---------------------------------------------

DIMENSIONS = ("adequacy", "fluency")
VERDICTS = ("win", "tie", "lose")


class Judgment(NamedTuple):
    item_id: str
    source_len: int
    dimension: str  # adequacy | fluency
    verdict: str  # win | tie | lose


class VerdictCounts(NamedTuple):
    win: int
    tie: int
    lose: int

    def __add__(self, other: "VerdictCounts") -> "VerdictCounts":  # type: ignore[override]
        return VerdictCounts(self.win + other.win, self.tie + other.tie, self.lose + other.lose)


class JudgmentTally(NamedTuple):
    # per bucket label, per dimension
    rows: dict[str, dict[str, VerdictCounts]]
    overall: dict[str, VerdictCounts]


def tally_judgments(judgments: Sequence[Judgment], buckets: BucketSpec) -> JudgmentTally:
    """Win/tie/lose counts per (source-length bucket, dimension).

    The overall row is the column sum over buckets. Duplicate
    (item, dimension) records are an error: one verdict each.
    """
    seen: set[tuple[str, str]] = set()
    counts: dict[str, dict[str, list[int]]] = {
        label: {d: [0, 0, 0] for d in DIMENSIONS} for label in buckets.labels
    }
    for j in judgments:
        if j.dimension not in DIMENSIONS:
            raise ValidationError(f"unknown dimension {j.dimension!r} for item {j.item_id!r}")
        if j.verdict not in VERDICTS:
            raise ValidationError(f"unknown verdict {j.verdict!r} for item {j.item_id!r}")
        key = (j.item_id, j.dimension)
        if key in seen:
            raise ValidationError(f"duplicate judgment for item {j.item_id!r} on {j.dimension}")
        seen.add(key)
        label = buckets.label_of(j.source_len)
        if label is None:
            raise ValidationError(
                f"item {j.item_id!r}: source length {j.source_len} outside bucket spec"
            )
        counts[label][j.dimension][VERDICTS.index(j.verdict)] += 1
    rows = {
        label: {d: VerdictCounts(*counts[label][d]) for d in DIMENSIONS}
        for label in buckets.labels
    }
    overall = {
        d: sum((rows[label][d] for label in buckets.labels), VerdictCounts(0, 0, 0))
        for d in DIMENSIONS
    }
    return JudgmentTally(rows=rows, overall=overall)


def read_judgments(path) -> list[Judgment]:
    """Read a tab-separated judgment file.

    Expected header: item_id <TAB> source_len <TAB> dimension <TAB> verdict.
    """
    out: list[Judgment] = []
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        expected = ["item_id", "source_len", "dimension", "verdict"]
        if header != expected:
            raise ValidationError(
                f"{path}: bad judgment header {header!r}, expected {expected!r}"
            )
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 tab-separated fields")
            item_id, source_len, dimension, verdict = fields
            try:
                length = int(source_len)
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: bad source_len {source_len!r}") from exc
            out.append(Judgment(item_id, length, dimension, verdict))
    return out


def write_judgments(path, judgments: Sequence[Judgment]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("item_id\tsource_len\tdimension\tverdict\n")
        for j in judgments:
            f.write(f"{j.item_id}\t{j.source_len}\t{j.dimension}\t{j.verdict}\n")


# --- BleuReport serialization ----------------------------------------------

_CSV_HEADER = ["bucket", "count", "score"]


def report_to_csv(report: BleuReport) -> str:
    """Serialize a report as CSV with a leading '#'-prefixed metadata block.

    Scores are written at full precision (repr); absent bucket scores are
    empty fields. The overall score appears as the bucket named "all".
    """
    buf = io.StringIO()
    buf.write(f"# n_order={report.n_order}\n")
    buf.write(f"# bp={report.bp!r}\n")
    buf.write(f"# precisions={','.join(repr(p) for p in report.precisions)}\n")
    buf.write(f"# hyp_len={report.hyp_len}\n")
    buf.write(f"# ref_len={report.ref_len}\n")
    buf.write(f"# excluded={report.excluded}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    total_count = sum(bs.count for bs in report.per_bucket.values())
    writer.writerow(["all", total_count, repr(report.overall)])
    for label, bs in report.per_bucket.items():
        writer.writerow([label, bs.count, "" if bs.score is None else repr(bs.score)])
    return buf.getvalue()


def report_from_csv(text: str) -> BleuReport:
    meta: dict[str, str] = {}
    rows: list[list[str]] = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif line:
            rows.append(next(csv.reader([line])))
    if not rows or rows[0] != _CSV_HEADER:
        raise ValidationError(f"bad report CSV header: {rows[0] if rows else 'missing'}")
    overall = None
    per_bucket: dict[str, BucketScore] = {}
    for bucket, count, score in rows[1:]:
        if bucket == "all":
            overall = float(score)
        else:
            per_bucket[bucket] = BucketScore(float(score) if score else None, int(count))
    if overall is None:
        raise ValidationError("report CSV missing the 'all' row")
    precisions = tuple(float(p) for p in meta.get("precisions", "").split(",") if p)
    return BleuReport(
        overall=overall,
        per_bucket=per_bucket,
        n_order=int(meta.get("n_order", 4)),
        bp=float(meta.get("bp", 1.0)),
        precisions=precisions,
        hyp_len=int(meta.get("hyp_len", 0)),
        ref_len=int(meta.get("ref_len", 0)),
        excluded=int(meta.get("excluded", 0)),
    )

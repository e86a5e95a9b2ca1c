import pytest

from bitextaug.buckets import STANDARD_BUCKETS, BucketSpec
from bitextaug.corpus import (
    Corpus,
    Origin,
    Sentence,
    SentencePair,
    Side,
    holdout_split,
    length_stats,
    load_parallel,
    sample,
    save_parallel,
    validate_corpus,
)
from bitextaug.errors import CorpusFormatError, ValidationError

from conftest import make_corpus


class TestLoadParallel:
    def test_basic_alignment(self, tmp_path):
        (tmp_path / "a.src").write_text("a b\nc\n", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\ny z\n", encoding="utf-8")
        corpus = load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")
        assert len(corpus) == 2
        assert corpus[0].source.raw == "a b"
        assert corpus[0].target.raw == "x"
        assert corpus[0].source.tokens == ["a", "b"]
        assert corpus[1].id == 1
        assert all(p.origin is Origin.ORIGINAL for p in corpus)

    def test_line_count_mismatch_reports_both_counts(self, tmp_path):
        (tmp_path / "a.src").write_text("a\nb\nc\n", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\ny\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=r"line-count mismatch 3 vs 2"):
            load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")

    def test_mismatch_other_direction(self, tmp_path):
        (tmp_path / "a.src").write_text("a\n", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\ny\nz\nw\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=r"line-count mismatch 1 vs 4"):
            load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")

    def test_empty_line_reports_line_number(self, tmp_path):
        (tmp_path / "a.src").write_text("\n", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=r"a\.src:1: empty sentence"):
            load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")

    def test_whitespace_only_line_rejected(self, tmp_path):
        (tmp_path / "a.src").write_text("a\n   \n", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\ny\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=r":2: empty sentence"):
            load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")

    def test_invalid_utf8(self, tmp_path):
        (tmp_path / "a.src").write_bytes(b"ok\n\xff\xfe broken\n")
        (tmp_path / "a.tgt").write_text("x\ny\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match="invalid UTF-8"):
            load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")

    def test_missing_trailing_newline_tolerated(self, tmp_path):
        (tmp_path / "a.src").write_text("a b\nc d", encoding="utf-8")
        (tmp_path / "a.tgt").write_text("x\ny", encoding="utf-8")
        corpus = load_parallel(tmp_path / "a.src", tmp_path / "a.tgt")
        assert [p.source.raw for p in corpus] == ["a b", "c d"]


class TestRoundTrip:
    def test_save_then_load_is_identical(self, tmp_path, small_corpus):
        src, tgt = tmp_path / "out.src", tmp_path / "out.tgt"
        save_parallel(small_corpus, src, tgt)
        again = load_parallel(src, tgt)
        assert again == small_corpus
        # byte-identical raw lines
        assert [p.source.raw for p in again] == [p.source.raw for p in small_corpus]

    def test_save_is_lf_terminated(self, tmp_path, small_corpus):
        src, tgt = tmp_path / "out.src", tmp_path / "out.tgt"
        save_parallel(small_corpus, src, tgt)
        data = src.read_bytes()
        assert b"\r" not in data
        assert data.endswith(b"\n")


class TestValidateCorpus:
    def test_clean(self, small_corpus):
        assert validate_corpus(small_corpus, sep_token="<sep>") == []

    def test_separator_in_plain_pair_flagged(self):
        pairs = [SentencePair(0, Sentence("a <sep> b"), Sentence("x"), Origin.ORIGINAL)]
        problems = validate_corpus(Corpus(pairs), sep_token="<sep>")
        assert any("separator" in p for p in problems)

    def test_concat_pair_needs_exactly_one_separator(self):
        pairs = [SentencePair(0, Sentence("a b"), Sentence("x <sep> y"), Origin.CONCAT)]
        problems = validate_corpus(Corpus(pairs), sep_token="<sep>")
        assert any("source has 0 separator" in p for p in problems)


class TestLengthStats:
    def test_simple_mean_and_histogram(self):
        pairs = [
            SentencePair(0, Sentence(" ".join(["w"] * 10)), Sentence("x"), Origin.ORIGINAL),
            SentencePair(1, Sentence(" ".join(["w"] * 20)), Sentence("x"), Origin.ORIGINAL),
        ]
        stats = length_stats(Corpus(pairs), STANDARD_BUCKETS)
        assert stats.count == 2
        assert stats.mean_source_len == 15.0
        assert stats.histogram["1-10"] == 1
        assert stats.histogram["11-20"] == 1
        assert sum(stats.histogram.values()) == 2

    def test_single_pair(self):
        pairs = [SentencePair(0, Sentence(" ".join(["w"] * 30)), Sentence("x"), Origin.ORIGINAL)]
        assert length_stats(Corpus(pairs), STANDARD_BUCKETS).mean_source_len == 30.0

    def test_merged_corpus_mean_matches_brute_force(self):
        # weighted-mean law checked against a recount over every line
        c1 = make_corpus(17, seed=1, min_len=4, max_len=30)
        c2 = make_corpus(29, seed=2, min_len=10, max_len=50)
        merged = Corpus(
            [
                SentencePair(i, p.source, p.target, p.origin)
                for i, p in enumerate(list(c1.pairs) + list(c2.pairs))
            ]
        )
        stats = length_stats(merged, STANDARD_BUCKETS)
        n1, n2 = len(c1), len(c2)
        m1 = length_stats(c1, STANDARD_BUCKETS).mean_source_len
        m2 = length_stats(c2, STANDARD_BUCKETS).mean_source_len
        assert stats.mean_source_len == pytest.approx((n1 * m1 + n2 * m2) / (n1 + n2), abs=1e-12)
        brute = sum(len(p.source.raw.split()) for p in merged) / len(merged)
        assert stats.mean_source_len == pytest.approx(brute, abs=1e-12)

    def test_histogram_covers_all_lengths_with_open_spec(self):
        corpus = make_corpus(250, seed=5, min_len=1, max_len=120)
        stats = length_stats(corpus, STANDARD_BUCKETS)
        assert sum(stats.histogram.values()) == len(corpus)

    def test_target_side(self):
        pairs = [SentencePair(0, Sentence("a"), Sentence("x y z"), Origin.ORIGINAL)]
        stats = length_stats(Corpus(pairs), STANDARD_BUCKETS, side=Side.TARGET)
        assert stats.mean_source_len == 3.0

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValidationError):
            length_stats(Corpus([]), STANDARD_BUCKETS)


class TestSample:
    def test_full_sample_is_identity(self, small_corpus):
        assert sample(small_corpus, len(small_corpus), seed=3) == small_corpus

    def test_empty_sample(self, small_corpus):
        assert len(sample(small_corpus, 0, seed=3)) == 0

    def test_oversized_sample_rejected(self, small_corpus):
        with pytest.raises(ValidationError, match="exceeds corpus size"):
            sample(small_corpus, len(small_corpus) + 1, seed=3)

    def test_deterministic_and_seed_sensitive(self):
        corpus = make_corpus(1000, seed=11)
        a = sample(corpus, 500, seed=42)
        b = sample(corpus, 500, seed=42)
        c = sample(corpus, 500, seed=43)
        assert a == b
        assert a != c

    def test_order_preserved(self):
        corpus = make_corpus(200, seed=4)
        out = sample(corpus, 50, seed=9)
        raws = [p.source.raw for p in out]
        positions = [[p.source.raw for p in corpus].index(r) for r in raws]
        assert positions == sorted(positions)

    def test_ids_renumbered(self):
        corpus = make_corpus(30, seed=4)
        out = sample(corpus, 10, seed=1)
        assert [p.id for p in out] == list(range(10))


class TestHoldoutSplit:
    def test_disjoint_cover(self):
        corpus = make_corpus(10, seed=6)
        train, heldout = holdout_split(corpus, 6, 4, seed=2)
        train_lines = {p.source.raw for p in train}
        held_lines = {p.source.raw for p in heldout}
        assert len(train) == 6 and len(heldout) == 4
        assert train_lines.isdisjoint(held_lines)
        assert train_lines | held_lines == {p.source.raw for p in corpus}

    def test_full_train_empty_test(self):
        corpus = make_corpus(12, seed=6)
        train, heldout = holdout_split(corpus, len(corpus), 0, seed=2)
        assert len(heldout) == 0
        assert {p.source.raw for p in train} == {p.source.raw for p in corpus}

    def test_insufficient_corpus(self):
        corpus = make_corpus(5, seed=6)
        with pytest.raises(ValidationError, match="exceeds corpus size"):
            holdout_split(corpus, 4, 2, seed=0)

    def test_deterministic(self):
        corpus = make_corpus(300, seed=8)
        a = holdout_split(corpus, 100, 150, seed=5)
        b = holdout_split(corpus, 100, 150, seed=5)
        assert a[0] == b[0] and a[1] == b[1]

    def test_union_subset_of_input(self):
        corpus = make_corpus(50, seed=8)
        train, heldout = holdout_split(corpus, 20, 10, seed=5)
        all_lines = {p.source.raw for p in corpus}
        assert {p.source.raw for p in train} <= all_lines
        assert {p.source.raw for p in heldout} <= all_lines

    def test_large_split_ratio_shape(self):
        # intended large-scale use splits 2M pairs into 400K train + 1M
        # held-out; run the same ratios scaled down 1000x
        corpus = make_corpus(2000, seed=1)
        train, heldout = holdout_split(corpus, 400, 1000, seed=3)
        assert len(train) == 400
        assert len(heldout) == 1000
        assert {p.id for p in train} == set(range(400))


class TestSentence:
    def test_tokens_are_whitespace_split(self):
        s = Sentence("a  b\tc")
        assert s.tokens == ["a", "b", "c"]
        assert s.token_count() == 3

    def test_bucket_spec_rejects_bad_bounds(self):
        with pytest.raises(ValidationError):
            BucketSpec.from_bounds([10, 10])
        with pytest.raises(ValidationError):
            BucketSpec.from_bounds([20, 10])
        with pytest.raises(ValidationError):
            BucketSpec.from_bounds([])

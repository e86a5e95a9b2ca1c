"""Assembly of augmented training mixes with exact size accounting.

Five recipes over an original corpus of N pairs:

  vanilla            N   original only
  vanilla+concat    2N   original + N concatenations of the original pool
  vanilla+st        2N   original + N self-trained pseudo pairs
  vanilla+bt        2N   original + N back-translated pseudo pairs
  vanilla+bt+concat 4N   original + N back-translated + N concatenations
                         of the original pool + N of the pseudo pool

The 4N recipe concatenates within each pool separately; original and
pseudo sentences are never joined to each other. Sub-seeds derive from
the recipe seed by fixed offsets (concat-original: +0, concat-pseudo: +1,
shuffle: +2) so one seed reproduces the whole mix.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np

from .augment import AugmentConfig, concat_augment
from .corpus import (
    PRNG_ID,
    Corpus,
    SentencePair,
    gc_paused,
    save_parallel,
    write_sidecar,
)
from .errors import ValidationError
from .translate import Direction, TranslatorSpec, back_translate, self_train

PathLike = Union[str, Path]

RECIPES = ("vanilla", "vanilla+concat", "vanilla+st", "vanilla+bt", "vanilla+bt+concat")


class MixRecipe(NamedTuple):
    name: str
    base_size: int
    seed: int = 0
    shuffle_output: bool = True
    shuffle_seed: Optional[int] = None  # defaults to seed + 2

    def validate(self) -> None:
        if self.name not in RECIPES:
            raise ValidationError(f"unknown recipe {self.name!r}, expected one of {RECIPES}")
        if self.base_size < 2:
            raise ValidationError(f"base_size must be >= 2, got {self.base_size}")

    @property
    def total_size(self) -> int:
        if self.name == "vanilla":
            return self.base_size
        if self.name == "vanilla+bt+concat":
            return 4 * self.base_size
        return 2 * self.base_size


def build_mix(
    recipe: MixRecipe,
    original: Corpus,
    translators: Optional[dict[Direction, TranslatorSpec]] = None,
    augment: Optional[AugmentConfig] = None,
    workdir: Optional[PathLike] = None,
) -> Corpus:
    """Assemble the requested training mix from an original corpus.

    ``translators`` must carry Direction.BACKWARD for bt recipes and
    Direction.FORWARD for st; ``augment`` is required for concat recipes
    (its target_count is overridden to N per pool). Deterministic given
    the recipe seed, inputs, and translator behavior.
    """
    recipe.validate()
    translators = translators or {}
    if len(original) != recipe.base_size:
        raise ValidationError(
            f"recipe expects base_size={recipe.base_size} but corpus has {len(original)} pairs"
        )
    n = recipe.base_size
    components: list[Corpus] = [original]

    pseudo: Optional[Corpus] = None
    if recipe.name in ("vanilla+bt", "vanilla+bt+concat"):
        backward = translators.get(Direction.BACKWARD)
        if backward is None:
            raise ValidationError(f"recipe {recipe.name!r} requires a backward translator")
        pseudo = back_translate(original, backward, workdir=workdir)
        components.append(pseudo)
    elif recipe.name == "vanilla+st":
        forward = translators.get(Direction.FORWARD)
        if forward is None:
            raise ValidationError(f"recipe {recipe.name!r} requires a forward translator")
        components.append(self_train(original, forward, workdir=workdir))

    if recipe.name in ("vanilla+concat", "vanilla+bt+concat"):
        if augment is None:
            raise ValidationError(f"recipe {recipe.name!r} requires an augment config")
        cfg_orig = augment._replace(seed=recipe.seed, target_count=n)
        components.append(concat_augment(original, cfg_orig))
        if recipe.name == "vanilla+bt+concat":
            assert pseudo is not None
            cfg_pseudo = augment._replace(seed=recipe.seed + 1, target_count=n)
            components.append(concat_augment(pseudo, cfg_pseudo))

    with gc_paused():
        merged: list[SentencePair] = []
        for comp in components:
            merged.extend(comp.pairs)
        if recipe.shuffle_output:
            shuffle_seed = recipe.seed + 2 if recipe.shuffle_seed is None else recipe.shuffle_seed
            rng = np.random.default_rng(shuffle_seed)
            order = rng.permutation(len(merged))
            merged = [merged[i] for i in order.tolist()]
        pairs = [SentencePair(i, p.source, p.target, p.origin) for i, p in enumerate(merged)]

    meta = {
        "recipe": recipe.name,
        "base_size": str(n),
        "seed": str(recipe.seed),
        "prng": PRNG_ID,
        "shuffled": str(recipe.shuffle_output).lower(),
        "components": ",".join(c.name for c in components),
    }
    if augment is not None and recipe.name.endswith("concat"):
        meta.update(
            {
                "sep_token": augment.sep_token,
                "min_concat_len": str(augment.min_concat_len),
            }
        )
    return Corpus(pairs, f"{original.name}[{recipe.name}]", original.source_lang, original.target_lang, meta)


class MixManifest(NamedTuple):
    total: int
    per_origin: dict[str, int]
    with_separator: int
    mean_source_len: dict[str, float]  # per origin, plain token count


def mix_manifest(corpus: Corpus, sep_token: str = "<sep>") -> MixManifest:
    """Per-origin counts, separator-containing pair count, and mean lengths."""
    per_origin: dict[str, int] = {}
    length_sums: dict[str, int] = {}
    with_sep = 0
    for p in corpus.pairs:
        key = p.origin.value
        per_origin[key] = per_origin.get(key, 0) + 1
        length_sums[key] = length_sums.get(key, 0) + len(p.source.raw.split())
        if sep_token in p.source.raw.split():
            with_sep += 1
    mean_source_len = {
        origin: length_sums[origin] / per_origin[origin] for origin in per_origin
    }
    return MixManifest(
        total=len(corpus),
        per_origin=per_origin,
        with_separator=with_sep,
        mean_source_len=mean_source_len,
    )


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_mix(
    corpus: Corpus, out_dir: PathLike, sep_token: str = "<sep>", prefix: str = "train"
) -> Path:
    """Write a mix as parallel files plus a key=value manifest.

    The manifest records per-origin counts, mean lengths, seeds and
    thresholds from the corpus metadata, and sha256 hashes of the written
    component files. Paths inside the manifest are relative so reruns
    into different directories stay byte-identical.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    src_path = out_dir / f"{prefix}.{corpus.source_lang}"
    tgt_path = out_dir / f"{prefix}.{corpus.target_lang}"
    save_parallel(corpus, src_path, tgt_path)
    manifest = mix_manifest(corpus, sep_token=sep_token)
    entries: dict[str, str] = {
        "name": corpus.name,
        "pairs.total": str(manifest.total),
        "pairs.with_separator": str(manifest.with_separator),
        "file.source": src_path.name,
        "file.target": tgt_path.name,
        "sha256.source": _sha256(src_path),
        "sha256.target": _sha256(tgt_path),
    }
    for origin, count in sorted(manifest.per_origin.items()):
        entries[f"pairs.{origin}"] = str(count)
        entries[f"mean_source_len.{origin}"] = repr(manifest.mean_source_len[origin])
    for key, value in corpus.meta.items():
        entries[f"meta.{key}"] = value
    manifest_path = out_dir / f"{prefix}.manifest"
    write_sidecar(manifest_path, entries)
    return manifest_path

"""Selection of the per-language discriminative sequence sets."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExtractionError


@dataclass(frozen=True)
class ExtractionConfig:
    """Thresholds for sequence extraction.

    The eligibility threshold is given per speaker and converted to the
    per-sentence scale of the normalized counts by dividing by
    ``sentences_per_speaker``.
    """

    alpha: float = 4.0
    max_p: int = 3
    min_count_per_speaker: float = 50.0
    sentences_per_speaker: int = 100
    max_sequences_per_language: int = 30
    overlap: bool = True

    def __post_init__(self):
        if not self.alpha >= 1:
            raise ExtractionError(f"alpha must be >= 1, got {self.alpha}")
        if self.max_p < 1:
            raise ExtractionError(f"max_p must be >= 1, got {self.max_p}")
        if self.min_count_per_speaker < 0:
            raise ExtractionError("min_count_per_speaker must be >= 0")
        if self.sentences_per_speaker < 1:
            raise ExtractionError("sentences_per_speaker must be >= 1")
        if self.max_sequences_per_language < 1:
            raise ExtractionError("max_sequences_per_language must be >= 1")

    @property
    def min_normalized_count(self) -> float:
        return self.min_count_per_speaker / self.sentences_per_speaker


@dataclass(frozen=True)
class DiscriminativeSet:
    language: str
    sequences: tuple

    def __contains__(self, seq):
        return tuple(seq) in self.sequences

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)


def _table_map(tables):
    out = {}
    for t in tables:
        if t.language in out:
            raise ExtractionError(f"duplicate table for language {t.language!r}")
        out[t.language] = t
    return out


def is_discriminative(seq, language, tables, alpha: float) -> bool:
    """True iff n_i(s) >= alpha * n_k(s) for every other language k.

    Absent entries count as zero.
    """
    by_lang = _table_map(tables)
    if language not in by_lang:
        raise ExtractionError(f"no count table for language {language!r}")
    seq = tuple(seq)
    own = by_lang[language][seq]
    return all(own >= alpha * t[seq] for lang, t in by_lang.items() if lang != language)


def rank_key(table):
    # count desc, then shorter first, then lexicographic
    return lambda s: (-table[s], len(s), s)


def filter_candidates(table, tables, config: ExtractionConfig) -> list:
    """All sequences of ``table`` passing the count threshold and the ratio test, ranked."""
    threshold = config.min_normalized_count
    others = [t for t in tables if t.language != table.language]
    alpha = config.alpha
    kept = []
    for seq, n in table.counts.items():
        if n < threshold or len(seq) > config.max_p:
            continue
        if all(n >= alpha * t[seq] for t in others):
            kept.append(seq)
    kept.sort(key=rank_key(table))
    return kept


def extract_sets(tables, config: ExtractionConfig) -> list:
    """Build S_1..S_n: filter by threshold and ratio test first, then cap."""
    tables = list(tables)
    if len(tables) < 2:
        raise ExtractionError(f"extraction needs at least 2 languages, got {len(tables)}")
    _table_map(tables)
    cap = config.max_sequences_per_language
    return [
        DiscriminativeSet(t.language, tuple(filter_candidates(t, tables, config)[:cap]))
        for t in tables
    ]

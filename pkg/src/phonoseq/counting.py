"""
Sentence-normalized counts of phone sequences up to length ``max_p``.

Sequences never cross utterance boundaries. By default every start
position counts (sliding window, stride 1); with ``overlap=False`` a
sequence is only counted again once the previous counted occurrence of
the same sequence has ended, like ``str.count``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CountingError


def iter_windows(phones, max_p: int, overlap: bool = True) -> Iterator[tuple]:
    """Yield every counted window of length 1..max_p in ``phones``.

    This is the single matching routine shared by training-time counting
    and test-time observation collection.
    """
    phones = tuple(phones)
    m = len(phones)
    if overlap:
        for start in range(m):
            for k in range(1, min(max_p, m - start) + 1):
                yield phones[start:start + k]
        return
    for k in range(1, min(max_p, m) + 1):
        next_free = {}
        for start in range(m - k + 1):
            seq = phones[start:start + k]
            if next_free.get(seq, 0) <= start:
                next_free[seq] = start + k
                yield seq


def count_sequences(utterances: Iterable, max_p: int, overlap: bool = True):
    """Count raw occurrences of all sequences of length 1..max_p.

    Returns ``(raw, sentences)`` where ``sentences`` includes empty
    utterances.
    """
    if max_p < 1:
        raise CountingError(f"max_p must be >= 1, got {max_p}")
    raw: Counter = Counter()
    sentences = 0
    for utt in utterances:
        sentences += 1
        phones = getattr(utt, "phones", utt)
        raw.update(iter_windows(phones, max_p, overlap))
    return raw, sentences


@dataclass(frozen=True)
class CountTable:
    language: str
    sentence_count: int
    raw_counts: dict
    max_p: int
    counts: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.sentence_count <= 0:
            raise CountingError(
                f"language {self.language!r}: no sentences, normalization undefined"
            )
        raw = {s: c for s, c in self.raw_counts.items() if c > 0}
        object.__setattr__(self, "raw_counts", raw)
        n = self.sentence_count
        object.__setattr__(self, "counts", {s: c / n for s, c in raw.items()})

    def __getitem__(self, seq) -> float:
        """Normalized count n_i(s); 0.0 for unseen sequences."""
        return self.counts.get(tuple(seq), 0.0)

    def __contains__(self, seq):
        return tuple(seq) in self.counts

    def __len__(self):
        return len(self.counts)


def merge_counts(parts: Iterable) -> tuple:
    """Sum ``(raw, sentences)`` pairs; order does not matter."""
    total = Counter()
    sentences = 0
    for raw, n in parts:
        total.update(raw)
        sentences += n
    return total, sentences


def count_speaker(speaker, max_p: int, overlap: bool = True) -> tuple:
    return count_sequences(speaker.utterances, max_p, overlap)


def build_count_table(language: str, speakers, max_p: int, overlap: bool = True) -> CountTable:
    speakers = list(speakers)
    for spk in speakers:
        if spk.language != language:
            raise CountingError(
                f"speaker {spk.speaker_id!r} is {spk.language!r}, not {language!r}"
            )
    raw, sentences = merge_counts(count_speaker(s, max_p, overlap) for s in speakers)
    return CountTable(language, sentences, dict(raw), max_p)


def _dump_key(item):
    seq, c = item
    return (-c, seq)


def format_count_table(table: CountTable) -> str:
    """Debug dump: ``<count>\\t<normalized>\\t<phones>`` by count desc, then lexicographic."""
    out = []
    for seq, c in sorted(table.raw_counts.items(), key=_dump_key):
        out.append(f"{c}\t{table.counts[seq]!r}\t{' '.join(seq)}\n")
    return "".join(out)

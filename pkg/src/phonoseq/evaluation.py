"""
Leave-one-out evaluation with confusion matrices and per-fold records.

Each fold holds out one speaker, rebuilds that speaker's language table
from the remaining speakers of that language, keeps every other language
at full strength, re-extracts the sets, builds a model and classifies the
held-out speaker. Per-speaker raw counts are computed once and merged per
fold; merging is plain integer addition, so this is identical to
recounting from scratch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .classifier import GLOBAL, LOCAL, DEFAULT_BETA, classify_global, classify_local, collect_observations
from .corpus import partition_by_language
from .counting import CountTable, count_speaker, merge_counts
from .errors import EvaluationError, NoEvidenceError, PhonoseqError
from .extraction import ExtractionConfig, extract_sets
from .model import DEFAULT_EPSILON, SequenceModel

ABSTAIN = "(abstain)"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Speaker tallies; rows are true languages, columns decided languages."""

    languages: tuple
    counts: tuple
    abstentions: tuple

    @classmethod
    def empty(cls, languages):
        n = len(languages)
        return cls(tuple(languages), tuple((0,) * n for _ in range(n)), (0,) * n)

    @classmethod
    def from_decisions(cls, languages, pairs):
        """Build from ``(true, decided_or_None)`` pairs."""
        languages = tuple(languages)
        idx = {lang: i for i, lang in enumerate(languages)}
        counts = [[0] * len(languages) for _ in languages]
        abst = [0] * len(languages)
        for true, decided in pairs:
            if decided is None:
                abst[idx[true]] += 1
            else:
                counts[idx[true]][idx[decided]] += 1
        return cls(languages, tuple(map(tuple, counts)), tuple(abst))

    @property
    def totals(self) -> tuple:
        return tuple(sum(row) + a for row, a in zip(self.counts, self.abstentions))

    @property
    def cells(self) -> tuple:
        """Row percentages; rows of languages with no speakers are all zero."""
        out = []
        for row, total in zip(self.counts, self.totals):
            out.append(tuple(100.0 * c / total if total else 0.0 for c in row))
        return tuple(out)

    @property
    def abstention_percent(self) -> tuple:
        return tuple(100.0 * a / t if t else 0.0 for a, t in zip(self.abstentions, self.totals))

    @property
    def correct(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.languages)))

    @property
    def classification_rate(self) -> float:
        total = sum(self.totals)
        return self.correct / total if total else 0.0

    def is_diagonal_dominant(self) -> bool:
        """Every row's diagonal cell strictly exceeds every other cell, abstentions included."""
        for i, row in enumerate(self.counts):
            if not self.totals[i]:
                continue
            others = [c for j, c in enumerate(row) if j != i] + [self.abstentions[i]]
            if any(row[i] <= c for c in others):
                return False
        return True


def render_confusion(matrix: ConfusionMatrix, abstain_column: bool | None = None) -> str:
    """Text table: languages as row and column headers, one-decimal percentages.

    The abstention column is shown when any speaker abstained, or when
    forced with ``abstain_column``.
    """
    if abstain_column is None:
        abstain_column = any(matrix.abstentions)
    headers = list(matrix.languages) + ([ABSTAIN] if abstain_column else [])
    rows = []
    for i, lang in enumerate(matrix.languages):
        vals = list(matrix.cells[i])
        if abstain_column:
            vals.append(matrix.abstention_percent[i])
        rows.append([lang] + [f"{v:.1f}" for v in vals])
    label_w = max([len(l) for l in matrix.languages] + [1])
    col_w = [max(len(h), 5) for h in headers]
    lines = [" " * label_w + "".join(f"  {h:>{w}}" for h, w in zip(headers, col_w))]
    for row in rows:
        lines.append(f"{row[0]:<{label_w}}" + "".join(f"  {v:>{w}}" for v, w in zip(row[1:], col_w)))
    lines.append(f"rate: {100.0 * matrix.classification_rate:.2f}%")
    return "\n".join(lines) + "\n"


def parse_confusion(text: str) -> dict:
    """Read back :func:`render_confusion` output.

    Returns ``{"languages", "cells", "abstentions", "rate"}`` with
    percentages as floats; ``abstentions`` is None without that column.
    """
    lines = [l for l in text.splitlines() if l.strip()]
    headers = lines[0].split()
    has_abst = headers[-1] == ABSTAIN
    langs = headers[:-1] if has_abst else headers
    cells, abst, rate = [], [], None
    for line in lines[1:]:
        if line.startswith("rate:"):
            rate = float(line.split()[1].rstrip("%"))
            continue
        parts = line.split()
        vals = [float(v) for v in parts[1:]]
        if len(vals) != len(headers):
            raise ValueError(f"row {parts[0]!r} has {len(vals)} values, expected {len(headers)}")
        if has_abst:
            abst.append(vals.pop())
        cells.append(vals)
    return {"languages": langs, "cells": cells, "abstentions": abst if has_abst else None, "rate": rate}


@dataclass(frozen=True)
class FoldRecord:
    speaker: str
    language: str
    decision: str | None
    scores: dict = field(default_factory=dict)
    cardinalities: dict = field(default_factory=dict)
    ignored: tuple = ()
    note: str = ""

    @property
    def abstained(self) -> bool:
        return self.decision is None


@dataclass(frozen=True)
class FoldAudit:
    """Speakers whose counts entered each language's table in one fold."""

    held_out: str | None
    training: dict

    def all_training_ids(self) -> set:
        return {sid for ids in self.training.values() for sid in ids}


@dataclass
class EvaluationResult:
    mode: str
    matrix: ConfusionMatrix
    folds: list
    audits: list
    settings: dict = field(default_factory=dict)

    @property
    def classification_rate(self) -> float:
        return self.matrix.classification_rate


def _check_loo(corpus):
    parts = partition_by_language(corpus)
    thin = [lang for lang, spk in parts.items() if len(spk) < 2]
    if thin:
        raise EvaluationError(
            "leave-one-out needs >= 2 speakers per language; too few for " + ", ".join(thin)
        )
    return parts


def _table(language, speaker_ids, cache, max_p):
    raw, sentences = merge_counts(cache[sid] for sid in speaker_ids)
    return CountTable(language, sentences, dict(raw), max_p)


def iter_fold_models(corpus, config: ExtractionConfig, epsilon=DEFAULT_EPSILON, loo=True):
    """Yield ``(test_speaker, model_or_exception, audit)`` per speaker in corpus order.

    With ``loo=False`` one model is trained on the whole corpus and reused
    for every speaker (closed-loop mode).
    """
    parts = _check_loo(corpus) if loo else partition_by_language(corpus)
    cache = {s.speaker_id: count_speaker(s, config.max_p, config.overlap) for s in corpus.speakers}
    ids = {lang: [s.speaker_id for s in spk] for lang, spk in parts.items()}
    full = {}

    def full_table(lang):
        if lang not in full:
            full[lang] = _table(lang, ids[lang], cache, config.max_p)
        return full[lang]

    def build(tables):
        try:
            sets = extract_sets(tables, config)
            return SequenceModel.from_tables(tables, sets, epsilon, config.overlap)
        except PhonoseqError as exc:
            return exc

    if not loo:
        try:
            tables = [full_table(lang) for lang in corpus.languages]
            shared = build(tables)
        except PhonoseqError as exc:
            shared = exc
        audit = FoldAudit(None, {lang: tuple(ids[lang]) for lang in corpus.languages})
        for spk in corpus.speakers:
            yield spk, shared, audit
        return

    for spk in corpus.speakers:
        training = {}
        tables = []
        for lang in corpus.languages:
            if lang == spk.language:
                kept = tuple(sid for sid in ids[lang] if sid != spk.speaker_id)
                tables.append(_table(lang, kept, cache, config.max_p))
            else:
                kept = tuple(ids[lang])
                tables.append(full_table(lang))
            training[lang] = kept
        yield spk, build(tables), FoldAudit(spk.speaker_id, training)


def _decide(model, speaker, mode, beta, include_prior) -> FoldRecord:
    if isinstance(model, Exception):
        return FoldRecord(speaker.speaker_id, speaker.language, None, note=f"no model: {model}")
    obs = collect_observations(model, speaker.utterances)
    cards = obs.cardinalities()
    try:
        if mode == GLOBAL:
            res = classify_global(model, obs, include_prior)
        else:
            res = classify_local(model, obs, beta, include_prior)
    except NoEvidenceError as exc:
        return FoldRecord(speaker.speaker_id, speaker.language, None, cardinalities=cards, note=str(exc))
    ignored = tuple(l for l in model.languages if l in res.ignored)
    return FoldRecord(speaker.speaker_id, speaker.language, res.decision, dict(res.scores), cards, ignored)


def evaluate_modes(
    corpus,
    config: ExtractionConfig | None = None,
    modes=(GLOBAL, LOCAL),
    beta: float = DEFAULT_BETA,
    epsilon: float = DEFAULT_EPSILON,
    include_prior: bool = True,
    loo: bool = True,
) -> dict:
    """Run the folds once and score every requested mode on the same models."""
    config = config or ExtractionConfig()
    for m in modes:
        if m not in (GLOBAL, LOCAL):
            raise ValueError(f"unknown mode {m!r}")
    records = {m: [] for m in modes}
    audits = []
    for spk, model, audit in iter_fold_models(corpus, config, epsilon, loo):
        audits.append(audit)
        for m in modes:
            records[m].append(_decide(model, spk, m, beta, include_prior))
    settings = {
        "alpha": config.alpha,
        "max_p": config.max_p,
        "min_count_per_speaker": config.min_count_per_speaker,
        "sentences_per_speaker": config.sentences_per_speaker,
        "max_sequences_per_language": config.max_sequences_per_language,
        "overlap": config.overlap,
        "beta": beta,
        "epsilon": epsilon,
        "include_prior": include_prior,
        "loo": loo,
    }
    out = {}
    for m in modes:
        matrix = ConfusionMatrix.from_decisions(
            corpus.languages, [(r.language, r.decision) for r in records[m]]
        )
        out[m] = EvaluationResult(m, matrix, records[m], audits, dict(settings, mode=m))
    return out


def evaluate_loo(corpus, config=None, mode=GLOBAL, beta=DEFAULT_BETA, epsilon=DEFAULT_EPSILON, **kw):
    return evaluate_modes(corpus, config, (mode,), beta, epsilon, **kw)[mode]


# -- reports

def json_number(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def result_to_dict(result: EvaluationResult) -> dict:
    m = result.matrix
    return {
        "mode": result.mode,
        "settings": result.settings,
        "languages": list(m.languages),
        "counts": [list(r) for r in m.counts],
        "abstentions": list(m.abstentions),
        "percent": [list(r) for r in m.cells],
        "classification_rate": m.classification_rate,
        "folds": [
            {
                "speaker": r.speaker,
                "language": r.language,
                "decision": r.decision,
                "scores": {k: json_number(v) for k, v in r.scores.items()},
                "cardinalities": r.cardinalities,
                "ignored": list(r.ignored),
                "note": r.note,
            }
            for r in result.folds
        ],
    }


def format_json_report(results: dict) -> str:
    doc = {"modes": [result_to_dict(results[m]) for m in results]}
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def format_text_report(results: dict) -> str:
    chunks = []
    for mode, res in results.items():
        abst = sum(res.matrix.abstentions)
        head = f"== {mode} decision: {res.matrix.correct}/{sum(res.matrix.totals)} speakers correct"
        if abst:
            head += f", {abst} abstained"
        chunks.append(head + "\n" + render_confusion(res.matrix))
    return "\n".join(chunks)

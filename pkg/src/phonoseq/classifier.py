"""
Native-language decision for a test speaker.

Two rules are provided. The global rule pools every matched sequence
into one list and takes the argmax of the log posterior. The local rule
keeps one list per language, drops languages whose list is too short
relative to the longest competitor (factor ``beta``), and compares
length-normalized log posteriors of the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .counting import iter_windows
from .errors import NoEvidenceError

GLOBAL = "global"
LOCAL = "local"
DEFAULT_BETA = 2.5


@dataclass(frozen=True)
class ObservationList:
    global_: tuple
    per_language: dict

    def cardinalities(self) -> dict:
        return {lang: len(obs) for lang, obs in self.per_language.items()}

    def __len__(self):
        return len(self.global_)


@dataclass(frozen=True)
class ClassificationResult:
    decision: str
    mode: str
    scores: dict
    observations: ObservationList
    ignored: frozenset = field(default_factory=frozenset)


def collect_observations(model, utterances) -> ObservationList:
    """Scan utterances for occurrences of model sequences.

    Each matching window goes once into the global list and once into the
    list of every language whose set contains it.
    """
    max_p = model.max_p
    overlap = model.overlap
    found = []
    per_language = {lang: [] for lang in model.languages}
    for utt in utterances:
        phones = getattr(utt, "phones", utt)
        for seq in iter_windows(phones, max_p, overlap):
            langs = model.member_languages(seq)
            if not langs:
                continue
            found.append(seq)
            for lang in langs:
                per_language[lang].append(seq)
    return ObservationList(
        tuple(found), {lang: tuple(obs) for lang, obs in per_language.items()}
    )


def _argmax(languages, scores):
    # first language in model order wins ties
    best = None
    for lang in languages:
        if best is None or scores[lang] > scores[best]:
            best = lang
    return best


def classify_global(model, obs: ObservationList, include_prior: bool = True) -> ClassificationResult:
    if not obs.global_:
        raise NoEvidenceError("no evidence: no model sequence observed")
    scores = {
        lang: model.log_posterior_given_obs(obs.global_, lang, include_prior)
        for lang in model.languages
    }
    return ClassificationResult(_argmax(model.languages, scores), GLOBAL, scores, obs)


def ignored_languages(cardinalities: dict, beta: float) -> frozenset:
    """Languages whose list is dominated by a factor ``beta``.

    Language i is dropped if its list is empty, or if some other list is
    strictly longer and at least ``beta`` times as long. The strictness only
    matters at ``beta == 1``, where it keeps tied leaders in play.
    """
    out = set()
    for lang, ci in cardinalities.items():
        if ci == 0 or any(ck > ci and ck >= beta * ci for ck in cardinalities.values()):
            out.add(lang)
    return frozenset(out)


def classify_local(
    model, obs: ObservationList, beta: float = DEFAULT_BETA, include_prior: bool = True
) -> ClassificationResult:
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    cards = {lang: len(obs.per_language.get(lang, ())) for lang in model.languages}
    if not any(cards.values()):
        raise NoEvidenceError("no evidence: every per-language observation list is empty")
    ignored = ignored_languages(cards, beta)
    scores = {}
    for lang in model.languages:
        if cards[lang]:
            lp = model.log_posterior_given_obs(obs.per_language[lang], lang, include_prior)
            scores[lang] = lp / cards[lang]
    kept = [lang for lang in model.languages if lang not in ignored]
    return ClassificationResult(_argmax(kept, scores), LOCAL, scores, obs, ignored)


def classify(model, utterances, mode=GLOBAL, beta=DEFAULT_BETA, include_prior=True):
    obs = collect_observations(model, utterances)
    if mode == GLOBAL:
        return classify_global(model, obs, include_prior)
    if mode == LOCAL:
        return classify_local(model, obs, beta, include_prior)
    raise ValueError(f"unknown mode {mode!r}")

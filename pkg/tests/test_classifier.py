import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phonoseq.classifier import (
    DEFAULT_BETA,
    GLOBAL,
    LOCAL,
    ObservationList,
    classify,
    classify_global,
    classify_local,
    collect_observations,
    ignored_languages,
)
from phonoseq.errors import NoEvidenceError
from phonoseq.model import SequenceModel

from .helpers import make_model, random_model


def _seqs(*items):
    return tuple(tuple(s.split()) for s in items)


def test_collect_sliding_window():
    m = make_model({"L1": ["a b"], "L2": ["c"]}, {"a b": (1, 0), "c": (0, 1)})
    obs = collect_observations(m, [("a", "b", "a", "b")])
    assert obs.global_ == _seqs("a b", "a b")
    assert obs.per_language == {"L1": _seqs("a b", "a b"), "L2": ()}


def test_collect_no_match():
    m = make_model({"L1": ["a b"], "L2": ["c"]}, {"a b": (1, 0), "c": (0, 1)})
    obs = collect_observations(m, [("x", "y")])
    assert obs.global_ == () and obs.per_language == {"L1": (), "L2": ()}


def test_collect_multi_membership():
    m = make_model({"L1": ["a"], "L2": ["a"]}, {"a": (1, 1)})
    obs = collect_observations(m, [("a",)])
    assert obs.global_ == _seqs("a")
    assert obs.per_language == {"L1": _seqs("a"), "L2": _seqs("a")}


def test_collect_does_not_span_utterances():
    m = make_model({"L1": ["a b"], "L2": ["c"]}, {"a b": (1, 0), "c": (0, 1)})
    assert collect_observations(m, [("a",), ("b",)]).global_ == ()


def test_collect_nonoverlap_model():
    base = make_model({"L1": ["a a"], "L2": ["c"]}, {"a a": (1, 0), "c": (0, 1)})
    m = SequenceModel(base.languages, base.sets, base.counts, base.epsilon, overlap=False)
    assert len(collect_observations(m, [("a", "a", "a")]).global_) == 1
    assert len(collect_observations(base, [("a", "a", "a")]).global_) == 2


def test_global_dominance():
    m = make_model({"L1": ["a"], "L2": ["b"]}, {"a": (2, 0), "b": (0, 2)})
    res = classify(m, [("b",) * 10], GLOBAL)
    assert res.decision == "L2" and res.mode == GLOBAL
    assert len(res.observations) == 10


def test_global_symmetric_tie_goes_to_first_language():
    m = make_model({"L1": ["a"], "L2": ["b"]}, {"a": (3, 1), "b": (1, 3)}, epsilon=1e-6)
    res = classify(m, [("a", "b")], GLOBAL)
    assert res.scores["L1"] == res.scores["L2"]
    assert res.decision == "L1"


def _direct_product(counts, masses, obs, i):
    prior = Fraction(masses[i]) / sum(Fraction(x) for x in masses)
    out = prior ** (1 - len(obs))
    for s in obs:
        out *= Fraction(counts[s][i]) / sum(Fraction(x) for x in counts[s])
    return out


def test_global_three_languages_against_oracle():
    counts = {"s1": (5, 1, 1), "s2": (4, 1, 1), "s3": (0, 3, 0), "s4": (0, 0, 3)}
    m = make_model({"L1": ["s1", "s2"], "L2": ["s3"], "L3": ["s4"]}, counts)
    res = classify_global(m, ObservationList(_seqs("s1", "s2"), {}))
    masses = (9, 3, 3)
    for i, lang in enumerate(m.languages):
        want = _direct_product(counts, masses, ["s1", "s2"], i)
        assert math.exp(res.scores[lang]) == pytest.approx(float(want), rel=1e-12)
    assert res.decision == "L1"


def test_global_no_evidence():
    m = make_model({"L1": ["a"], "L2": ["b"]}, {"a": (2, 0), "b": (0, 2)})
    with pytest.raises(NoEvidenceError):
        classify(m, [("z",)], GLOBAL)


def test_beta_rule():
    assert ignored_languages({"L1": 10, "L2": 3}, 2.5) == {"L2"}
    assert ignored_languages({"L1": 5, "L2": 5}, 2.5) == frozenset()
    assert ignored_languages({"L1": 5, "L2": 2}, 2.5) == {"L2"}  # boundary: 5 >= 2.5 * 2
    assert ignored_languages({"L1": 5, "L2": 0}, 2.5) == {"L2"}
    # beta = 1 keeps tied leaders
    assert ignored_languages({"L1": 4, "L2": 4, "L3": 3}, 1.0) == {"L3"}
    assert DEFAULT_BETA == 2.5


@given(st.dictionaries(st.sampled_from("ABCDE"), st.integers(0, 50), min_size=1), st.floats(1, 10))
def test_largest_list_never_ignored(cards, beta):
    if max(cards.values()) == 0:
        return
    ignored = ignored_languages(cards, beta)
    top = max(cards.values())
    assert all(lang not in ignored for lang, c in cards.items() if c == top)


def test_local_scores_are_length_normalized():
    counts = {"a": (3, 1), "b": (1, 1), "c": (0, 2)}
    m = make_model({"L1": ["a", "b"], "L2": ["c"]}, counts, epsilon=1e-6)
    utt = [("a", "b", "a", "c", "c")]
    obs = collect_observations(m, utt)
    assert obs.cardinalities() == {"L1": 3, "L2": 2}
    res = classify_local(m, obs, beta=2.5)
    assert res.ignored == frozenset()
    for lang in m.languages:
        lp = m.log_posterior_given_obs(obs.per_language[lang], lang)
        assert res.scores[lang] == lp / len(obs.per_language[lang])
    assert res.decision == max(m.languages, key=lambda l: res.scores[l])


def test_local_ignored_language_excluded_but_scored():
    counts = {"a": (1, 10), "c": (0, 2)}
    m = make_model({"L1": ["a"], "L2": ["c"]}, counts, epsilon=1e-6)
    obs = collect_observations(m, [("a",) * 10 + ("c",) * 3])
    res = classify_local(m, obs, 2.5)
    assert res.ignored == {"L2"}
    assert "L2" in res.scores
    assert res.decision == "L1"
    assert res.scores["L2"] > res.scores["L1"]  # would win if not pruned


def test_local_prior_switch():
    counts = {"a": (3, 1), "b": (1, 1), "c": (0, 2)}
    m = make_model({"L1": ["a", "b"], "L2": ["c"]}, counts, epsilon=1e-6)
    obs = collect_observations(m, [("a", "b", "c", "c")])
    with_prior = classify_local(m, obs, 2.5)
    without = classify_local(m, obs, 2.5, include_prior=False)
    h = len(obs.per_language["L1"])
    assert with_prior.scores["L1"] - without.scores["L1"] == pytest.approx((1 - h) * math.log(m.prior("L1")) / h)


def test_local_no_evidence_and_bad_beta():
    m = make_model({"L1": ["a"], "L2": ["b"]}, {"a": (2, 0), "b": (0, 2)})
    obs = collect_observations(m, [("z",)])
    with pytest.raises(NoEvidenceError):
        classify_local(m, obs)
    with pytest.raises(ValueError):
        classify_local(m, collect_observations(m, [("a",)]), beta=0.5)


def test_argmax_shift_invariance():
    rng = random.Random(1)
    for _ in range(50):
        m = random_model(rng, epsilon=1e-6)
        seqs = m.sequences()
        utt = [tuple(p for s in rng.choices(seqs, k=8) for p in s)]
        res = classify(m, utt, GLOBAL)
        c = rng.uniform(-100, 100)
        shifted = {l: v + c for l, v in res.scores.items()}
        assert max(m.languages, key=lambda l: (shifted[l], -m.languages.index(l))) == res.decision


def test_single_sequence_uniform_prior_matches_posterior_argmax():
    m = make_model({"L1": ["a"], "L2": ["b"], "L3": ["c"]},
                   {"a": (3, 1, 2), "b": (1, 3, 0), "c": (0, 0, 4)})
    for s in m.sequences():
        res = classify(m, [s], GLOBAL)
        best = max(m.languages, key=lambda l: m.posterior_given_seq(s, l))
        assert res.decision == best


def test_deterministic():
    rng = random.Random(8)
    m = random_model(rng, epsilon=1e-6)
    utt = [tuple(p for s in m.sequences()[:6] for p in s)]
    for mode in (GLOBAL, LOCAL):
        assert classify(m, utt, mode) == classify(m, utt, mode)


def test_unknown_mode():
    m = make_model({"L1": ["a"], "L2": ["b"]}, {"a": (2, 0), "b": (0, 2)})
    with pytest.raises(ValueError):
        classify(m, [("a",)], "neither")

"""Independent oracles and random-instance builders for the test suite."""

import random
import re
from collections import Counter
from fractions import Fraction

import mpmath

from phonoseq.counting import CountTable
from phonoseq.extraction import DiscriminativeSet
from phonoseq.model import SequenceModel


def brute_force_counts(utterances, max_p):
    """Enumerate every (start, length) pair; keys are space-joined strings."""
    out = Counter()
    for phones in utterances:
        m = len(phones)
        for start in range(m):
            for length in range(1, max_p + 1):
                if start + length <= m:
                    out[" ".join(phones[start:start + length])] += 1
    return out


def regex_counts(utterances, spelled, nonoverlap=False):
    """Count one sequence by regex over a one-char-per-phone encoding.

    Lookahead gives overlapping matches; plain ``str.count`` gives
    non-overlapping ones.
    """
    symbols = sorted({p for u in utterances for p in u} | set(spelled))
    code = {p: chr(0x4E00 + i) for i, p in enumerate(symbols)}
    needle = "".join(code[p] for p in spelled)
    total = 0
    for u in utterances:
        hay = "".join(code[p] for p in u)
        if nonoverlap:
            total += hay.count(needle)
        else:
            total += len(re.findall("(?=" + re.escape(needle) + ")", hay))
    return total


def table(language, raw, sentences=1, max_p=3):
    """CountTable from ``{"a b": raw_count}``; normalized = raw / sentences."""
    return CountTable(language, sentences, {tuple(k.split()): v for k, v in raw.items()}, max_p)


def make_model(sets, counts, epsilon=0.0):
    """``sets``: {lang: ["a b", ...]}, ``counts``: {seq: (n_1, ..., n_n)} in language order."""
    langs = tuple(sets)
    dsets = tuple(DiscriminativeSet(l, tuple(tuple(s.split()) for s in sets[l])) for l in langs)
    cmap = {}
    for seq, values in counts.items():
        for l, v in zip(langs, values):
            cmap[(l, tuple(seq.split()))] = float(v)
    return SequenceModel(langs, dsets, cmap, epsilon)


def random_model(rng: random.Random, n_langs=None, n_seqs=None, epsilon=0.0, integer=False):
    n = n_langs or rng.randint(2, 6)
    k = n_seqs or rng.randint(n, 50)
    langs = [f"L{i}" for i in range(n)]
    seqs = []
    seen = set()
    while len(seqs) < k:
        s = tuple(rng.choice("abcdefgh") for _ in range(rng.randint(1, 3)))
        if s not in seen:
            seen.add(s)
            seqs.append(s)
    owner = {s: langs[i % n] for i, s in enumerate(seqs)}
    counts = {}
    for s in seqs:
        for l in langs:
            if integer:
                v = float(rng.randint(1 if l == owner[s] else 0, 20))
            else:
                v = rng.uniform(0.01, 5.0) if l == owner[s] else rng.choice([0.0, rng.uniform(0, 3.0)])
            counts[(l, s)] = v
    dsets = tuple(DiscriminativeSet(l, tuple(s for s in seqs if owner[s] == l)) for l in langs)
    return SequenceModel(tuple(langs), dsets, counts, epsilon)


def oracle_direct_product(model, observations, language, dps=50):
    """Direct product P(L)^(1-h) * prod P(L|s) in extended precision.

    Recomputes prior and posteriors from the raw count dictionary.
    """
    with mpmath.workdps(dps):
        mass = {l: mpmath.fsum(mpmath.mpf(model.counts[(l, s)]) for s in d.sequences)
                for l, d in zip(model.languages, model.sets)}
        prior = mass[language] / mpmath.fsum(mass.values())
        eps = mpmath.mpf(model.epsilon)
        prod = prior ** (1 - len(observations))
        for s in observations:
            num = mpmath.mpf(model.counts[(language, s)]) + eps
            den = mpmath.fsum(mpmath.mpf(model.counts[(l, s)]) + eps for l in model.languages)
            prod *= num / den
        return prod


def exact_posterior(model, s, language):
    num = Fraction(model.counts[(language, s)])
    return num / sum(Fraction(model.counts[(l, s)]) for l in model.languages)

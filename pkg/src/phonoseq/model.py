"""
Maximum-likelihood sequence model over the discriminative sets.

All probabilities are derived from the normalized counts n_l(s) of the
sequences in the union of the sets. Scores over observation lists are
computed in log space under the independence assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ModelError
from .extraction import DiscriminativeSet

DEFAULT_EPSILON = 1e-6
MAGIC = "phoneseq-model"
VERSION = "v1"


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class SequenceModel:
    """Discriminative sets plus the cross-language counts of their members.

    ``counts`` maps ``(language, sequence)`` to n_l(s) for every language
    and every sequence in the union of the sets. ``epsilon`` is the
    additive floor used by :meth:`posterior_given_seq`; 0 gives the
    unsmoothed closed form.
    """

    languages: tuple
    sets: tuple
    counts: dict
    epsilon: float = DEFAULT_EPSILON
    overlap: bool = True
    _members: dict = field(init=False, repr=False, compare=False)
    _mass: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        object.__setattr__(self, "sets", tuple(self.sets))
        if len(set(self.languages)) != len(self.languages):
            raise ModelError("duplicate language id")
        if [s.language for s in self.sets] != list(self.languages):
            raise ModelError("sets must be given in model language order")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ModelError(f"epsilon must be finite and >= 0, got {self.epsilon}")

        members: dict = {}
        for dset in self.sets:
            for seq in dset.sequences:
                members.setdefault(seq, []).append(dset.language)
        for seq in members:
            for lang in self.languages:
                v = self.counts.get((lang, seq))
                if v is None:
                    raise ModelError(f"missing count for {lang!r} {' '.join(seq)!r}")
                if not (math.isfinite(v) and v >= 0):
                    raise ModelError(f"invalid count {v!r} for {lang!r} {' '.join(seq)!r}")
        object.__setattr__(self, "_members", {s: tuple(ls) for s, ls in members.items()})

        mass = {}
        for dset in self.sets:
            m = math.fsum(self.counts[(dset.language, s)] for s in dset.sequences)
            if not m > 0:
                raise ModelError(
                    f"language {dset.language!r} has no discriminative sequence with positive count"
                )
            mass[dset.language] = m
        object.__setattr__(self, "_mass", mass)

    @classmethod
    def from_tables(cls, tables, sets, epsilon=DEFAULT_EPSILON, overlap=True):
        tables = list(tables)
        languages = [t.language for t in tables]
        by_lang = {s.language: s for s in sets}
        ordered = [by_lang[lang] for lang in languages]
        union = {seq for dset in ordered for seq in dset.sequences}
        counts = {(t.language, seq): t[seq] for t in tables for seq in union}
        return cls(tuple(languages), tuple(ordered), counts, epsilon, overlap)

    # -- structure

    @property
    def max_p(self) -> int:
        return max((len(s) for s in self._members), default=0)

    def set_for(self, language):
        return self.sets[self._lang_index(language)]

    def member_languages(self, seq) -> tuple:
        """Languages whose set contains ``seq`` (empty if none)."""
        return self._members.get(tuple(seq), ())

    def __contains__(self, seq):
        return tuple(seq) in self._members

    def sequences(self) -> list:
        return list(self._members)

    def count(self, language, seq) -> float:
        return self.counts[(language, self._check_seq(seq))]

    def language_mass(self, language) -> float:
        self._lang_index(language)
        return self._mass[language]

    def total_mass(self) -> float:
        return math.fsum(self._mass.values())

    def _lang_index(self, language) -> int:
        try:
            return self.languages.index(language)
        except ValueError:
            raise ModelError(f"unknown language {language!r}") from None

    def _check_seq(self, seq):
        seq = tuple(seq)
        if seq not in self._members:
            raise ModelError(f"sequence {' '.join(seq)!r} is not in the model")
        return seq

    # -- probabilities

    def prior(self, language) -> float:
        """P(L_i): the language's share of the total discriminative mass."""
        return self.language_mass(language) / self.total_mass()

    def seq_prob(self, seq) -> float:
        """P(s) = sum_l n_l(s) / total mass."""
        seq = self._check_seq(seq)
        return math.fsum(self.counts[(l, seq)] for l in self.languages) / self.total_mass()

    def seq_given_lang(self, seq, language) -> float:
        """P(s | L_i) = n_i(s) / mass_i."""
        seq = self._check_seq(seq)
        return self.counts[(language, seq)] / self.language_mass(language)

    def posterior_given_seq(self, seq, language) -> float:
        """P(L_i | s) with additive smoothing ``epsilon`` on every count."""
        seq = self._check_seq(seq)
        self._lang_index(language)
        eps = self.epsilon
        denom = math.fsum(self.counts[(l, seq)] + eps for l in self.languages)
        if denom == 0:
            raise ModelError(f"sequence {' '.join(seq)!r} has zero count in every language")
        return (self.counts[(language, seq)] + eps) / denom

    def log_posterior_given_obs(self, observations, language, include_prior: bool = True) -> float:
        """log P(L_i | O) for a list of (possibly repeated) sequences.

        Computes ``(1 - h) log P(L_i) + sum_m log P(L_i | s_m)``. With
        ``include_prior=False`` the prior-correction term is dropped.
        Returns ``-inf`` when an unsmoothed factor is zero.
        """
        observations = list(observations)
        h = len(observations)
        if h == 0:
            raise ModelError("empty observation list")
        total = math.fsum(_log(self.posterior_given_seq(s, language)) for s in observations)
        if include_prior and h != 1:
            total += (1 - h) * math.log(self.prior(language))
        return total


# -- model file

def _fmt(x: float) -> str:
    return format(x, ".17g")


def format_model(model: SequenceModel) -> str:
    """Text model file.

    Header ``phoneseq-model v1 <n> <epsilon>``, one count line per
    (language, sequence) and one ``SET`` line per set member, in model
    order. Non-default matching options go in ``#`` directive lines.
    """
    lines = [f"{MAGIC} {VERSION} {len(model.languages)} {_fmt(model.epsilon)}"]
    if not model.overlap:
        lines.append("# overlap 0")
    for dset in model.sets:
        for seq in dset.sequences:
            lines.append(f"SET {dset.language} {' '.join(seq)}")
    union = []
    seen = set()
    for dset in model.sets:
        for seq in dset.sequences:
            if seq not in seen:
                seen.add(seq)
                union.append(seq)
    for lang in model.languages:
        for seq in union:
            lines.append(f"{lang}\t{_fmt(model.counts[(lang, seq)])}\t{' '.join(seq)}")
    return "".join(line + "\n" for line in lines)


def parse_model(stream, source=None) -> SequenceModel:
    if isinstance(stream, str):
        stream = stream.splitlines()
    it = iter(enumerate(stream, start=1))
    where = f"{source}: " if source else ""

    header = None
    for lineno, raw in it:
        if raw.strip():
            header = (lineno, raw.split())
            break
    if header is None:
        raise ModelError(f"{where}empty model file")
    lineno, parts = header
    if len(parts) != 4 or parts[0] != MAGIC or parts[1] != VERSION:
        raise ModelError(f"{where}line {lineno}: bad header {' '.join(parts)!r}")
    try:
        n = int(parts[2])
        epsilon = float(parts[3])
    except ValueError:
        raise ModelError(f"{where}line {lineno}: bad header values") from None

    overlap = True
    languages: list = []
    members: dict = {}
    counts: dict = {}
    for lineno, raw in it:
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if len(tokens) == 2 and tokens[0] == "overlap":
                overlap = tokens[1] not in ("0", "false", "False")
            continue
        if line.startswith("SET "):
            tokens = line.split()
            if len(tokens) < 3:
                raise ModelError(f"{where}line {lineno}: SET line without phones")
            lang = tokens[1]
            if lang not in members:
                languages.append(lang)
                members[lang] = []
            members[lang].append(tuple(tokens[2:]))
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not fields[2].strip():
            raise ModelError(f"{where}line {lineno}: expected '<language>\\t<count>\\t<phones>'")
        try:
            value = float(fields[1])
        except ValueError:
            raise ModelError(f"{where}line {lineno}: bad count {fields[1]!r}") from None
        counts[(fields[0], tuple(fields[2].split()))] = value

    if len(languages) != n:
        raise ModelError(f"{where}header declares {n} languages, SET lines name {len(languages)}")
    sets = tuple(DiscriminativeSet(lang, tuple(members[lang])) for lang in languages)
    return SequenceModel(tuple(languages), sets, counts, epsilon, overlap)


def write_model(model: SequenceModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_model(model))


def read_model(path) -> SequenceModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read().splitlines(), source=str(path))

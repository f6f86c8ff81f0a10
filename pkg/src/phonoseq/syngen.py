"""
Seeded synthetic corpora with planted language-specific signatures.

Each sentence is ``sentence_length`` background phones drawn i.i.d. from a
categorical distribution. For every signature of the speaker's language a
Poisson(rate) number of copies is spliced in, replacing background
phones, at uniformly random non-overlapping positions. Copies that do not
fit in the sentence are dropped.

Randomness comes from ``numpy.random.default_rng(seed)`` only, so the
seed-to-corpus mapping is fixed for a given numpy bit generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import LabeledCorpus, Speaker, Utterance, check_token
from .errors import SpecError

# ARPAbet-style inventory, used by the default paper-shaped spec.
ARPABET = (
    "aa ae ah ao aw ay b ch d dh eh er ey f g hh ih iy jh k l m n ng "
    "ow oy p r s sh t th uh uw v w y z zh"
).split()

PAPER_LANGUAGES = ("French", "Greek", "Italian", "Spanish")
PAPER_SPEAKERS = (31, 20, 20, 10)


@dataclass(frozen=True)
class SynthSpec:
    languages: tuple
    speakers_per_language: object  # int, or one int per language
    sentences_per_speaker: int
    sentence_length: int
    phone_inventory: tuple
    signatures: dict = field(default_factory=dict)
    background: tuple | None = None  # weights over the inventory; None = uniform
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        object.__setattr__(self, "phone_inventory", tuple(self.phone_inventory))
        sigs = {
            lang: tuple((tuple(seq), float(rate)) for seq, rate in entries)
            for lang, entries in self.signatures.items()
        }
        object.__setattr__(self, "signatures", sigs)
        if self.background is not None:
            object.__setattr__(self, "background", tuple(float(w) for w in self.background))
        self.validate()

    def speaker_counts(self) -> tuple:
        n = self.speakers_per_language
        if isinstance(n, int):
            return (n,) * len(self.languages)
        return tuple(int(x) for x in n)

    def validate(self):
        if not self.languages:
            raise SpecError("languages", "at least one language required")
        if len(set(self.languages)) != len(self.languages):
            raise SpecError("languages", "duplicate language id")
        for lang in self.languages:
            try:
                check_token(lang, "language id")
            except ValueError as exc:
                raise SpecError("languages", str(exc)) from None
        counts = self.speaker_counts()
        if len(counts) != len(self.languages):
            raise SpecError("speakers_per_language", "need one count per language")
        if any(c < 1 for c in counts):
            raise SpecError("speakers_per_language", "counts must be positive")
        if self.sentences_per_speaker < 1:
            raise SpecError("sentences_per_speaker", "must be positive")
        if self.sentence_length < 1:
            raise SpecError("sentence_length", "must be positive")
        if not self.phone_inventory:
            raise SpecError("phone_inventory", "empty inventory")
        if len(set(self.phone_inventory)) != len(self.phone_inventory):
            raise SpecError("phone_inventory", "duplicate phone")
        for p in self.phone_inventory:
            try:
                check_token(p)
            except ValueError as exc:
                raise SpecError("phone_inventory", str(exc)) from None
        if self.background is not None:
            if len(self.background) != len(self.phone_inventory):
                raise SpecError("background", "one weight per inventory phone required")
            if any(w < 0 for w in self.background) or sum(self.background) <= 0:
                raise SpecError("background", "weights must be >= 0 with positive sum")
        inv = set(self.phone_inventory)
        for lang, entries in self.signatures.items():
            if lang not in self.languages:
                raise SpecError("signatures", f"unknown language {lang!r}")
            for seq, rate in entries:
                if not seq:
                    raise SpecError("signatures", f"{lang}: empty signature")
                if len(seq) > self.sentence_length:
                    raise SpecError(
                        "signatures",
                        f"{lang}: signature {' '.join(seq)!r} longer than sentence_length={self.sentence_length}",
                    )
                missing = [p for p in seq if p not in inv]
                if missing:
                    raise SpecError("signatures", f"{lang}: phones not in inventory: {' '.join(missing)}")
                if not rate >= 0:
                    raise SpecError("signatures", f"{lang}: injection rate must be >= 0")


def _splice(background: list, items: list, rng) -> list:
    L = len(background)
    while items and sum(len(s) for s in items) > L:
        items.pop()
    if not items:
        return background
    total = sum(len(s) for s in items)
    m = len(items)
    slots = np.sort(rng.choice(L - total + m, size=m, replace=False))
    out = list(background)
    offset = 0
    for j, (slot, seq) in enumerate(zip(slots, items)):
        start = int(slot) - j + offset
        out[start:start + len(seq)] = seq
        offset += len(seq)
    return out


def generate(spec: SynthSpec) -> LabeledCorpus:
    rng = np.random.default_rng(spec.seed)
    inv = spec.phone_inventory
    if spec.background is None:
        probs = None
    else:
        w = np.asarray(spec.background, dtype=float)
        probs = w / w.sum()
    width = len(str(max(spec.speaker_counts())))
    speakers = []
    for lang, n_spk in zip(spec.languages, spec.speaker_counts()):
        sigs = spec.signatures.get(lang, ())
        for k in range(1, n_spk + 1):
            sid = f"{lang}_{k:0{width}d}"
            utts = []
            for _ in range(spec.sentences_per_speaker):
                bg = [inv[i] for i in rng.choice(len(inv), size=spec.sentence_length, p=probs)]
                items = []
                for seq, rate in sigs:
                    items.extend([seq] * int(rng.poisson(rate)))
                if items:
                    items = [items[i] for i in rng.permutation(len(items))]
                utts.append(Utterance(sid, tuple(_splice(bg, items, rng))))
            speakers.append(Speaker(sid, lang, tuple(utts)))
    return LabeledCorpus(spec.languages, tuple(speakers))


def paper_shaped_spec(seed: int = 1, rate: float = 1.0, sentence_length: int = 20,
                      signatures_per_language: int = 2) -> SynthSpec:
    """Four languages, 31/20/20/10 speakers, 100 sentences each.

    Signatures are trigrams over pairwise-disjoint phones, so no two
    languages share a planted bigram.
    """
    n_sig = len(PAPER_LANGUAGES) * signatures_per_language
    if 3 * n_sig > len(ARPABET):
        raise SpecError("signatures", "not enough phones for disjoint trigram signatures")
    # take signature phones from the end so common vowels stay background-only
    pool = list(reversed(ARPABET))
    sigs = {}
    for i, lang in enumerate(PAPER_LANGUAGES):
        entries = []
        for j in range(signatures_per_language):
            k = 3 * (i * signatures_per_language + j)
            entries.append((tuple(pool[k:k + 3]), rate))
        sigs[lang] = entries
    return SynthSpec(
        languages=PAPER_LANGUAGES,
        speakers_per_language=PAPER_SPEAKERS,
        sentences_per_speaker=100,
        sentence_length=sentence_length,
        phone_inventory=tuple(ARPABET),
        signatures=sigs,
        seed=seed,
    )


# -- spec file

def parse_spec(text: str, source=None) -> SynthSpec:
    """Parse a flat ``key = value`` generation spec.

    Keys: ``seed``, ``languages``, ``speakers_per_language`` (one int, or
    one per language), ``sentences_per_speaker``, ``sentence_length``,
    ``inventory`` (phones) or ``inventory_size``, optional ``background``
    weights, and ``signature.<language> = p p p @ rate, p p @ rate``.
    """
    kv = {}
    sigs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}", "expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key.startswith("signature."):
            lang = key[len("signature."):]
            entries = []
            for chunk in filter(None, (c.strip() for c in value.split(","))):
                if "@" not in chunk:
                    raise SpecError(key, f"expected '<phones> @ <rate>', got {chunk!r}")
                phones, rate = chunk.rsplit("@", 1)
                try:
                    entries.append((tuple(phones.split()), float(rate)))
                except ValueError:
                    raise SpecError(key, f"bad rate {rate.strip()!r}") from None
            sigs.setdefault(lang, []).extend(entries)
        else:
            kv[key] = value

    def need(key):
        if key not in kv:
            raise SpecError(key, "missing")
        return kv.pop(key)

    def as_int(key, value):
        try:
            return int(value)
        except ValueError:
            raise SpecError(key, f"expected an integer, got {value!r}") from None

    languages = tuple(need("languages").split())
    spk = [as_int("speakers_per_language", v) for v in need("speakers_per_language").split()]
    spk_value = spk[0] if len(spk) == 1 else tuple(spk)
    sentences = as_int("sentences_per_speaker", need("sentences_per_speaker"))
    length = as_int("sentence_length", need("sentence_length"))
    if "inventory" in kv:
        inventory = tuple(kv.pop("inventory").split())
        kv.pop("inventory_size", None)
    elif "inventory_size" in kv:
        size = as_int("inventory_size", kv.pop("inventory_size"))
        inventory = tuple(f"p{i:0{len(str(size - 1))}d}" for i in range(size))
    else:
        raise SpecError("inventory", "missing (give 'inventory' or 'inventory_size')")
    background = None
    if "background" in kv:
        try:
            background = tuple(float(w) for w in kv.pop("background").split())
        except ValueError:
            raise SpecError("background", "weights must be numbers") from None
    seed = as_int("seed", kv.pop("seed", "0"))
    if kv:
        raise SpecError(sorted(kv)[0], "unknown key")
    return SynthSpec(languages, spk_value, sentences, length, inventory, sigs, background, seed)


def format_spec(spec: SynthSpec) -> str:
    counts = spec.speaker_counts()
    lines = [
        f"seed = {spec.seed}",
        f"languages = {' '.join(spec.languages)}",
        f"speakers_per_language = {' '.join(map(str, counts))}",
        f"sentences_per_speaker = {spec.sentences_per_speaker}",
        f"sentence_length = {spec.sentence_length}",
        f"inventory = {' '.join(spec.phone_inventory)}",
    ]
    if spec.background is not None:
        lines.append("background = " + " ".join(repr(w) for w in spec.background))
    for lang in spec.languages:
        entries = spec.signatures.get(lang)
        if entries:
            body = ", ".join(f"{' '.join(seq)} @ {rate!r}" for seq, rate in entries)
            lines.append(f"signature.{lang} = {body}")
    return "\n".join(lines) + "\n"

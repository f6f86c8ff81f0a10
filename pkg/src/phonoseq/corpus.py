"""
Data model and ingestion for phone-transcribed, language-labeled speech.

Transcription format, one utterance per line::

    <speaker_id> <language_id> <phone> <phone> ...

Fields are separated by runs of spaces or tabs. ``#`` starts a comment
line, blank lines are skipped, and a line with only the speaker and the
language is an empty utterance. The backslash is reserved; no escape
sequences are defined, so any token containing one is rejected.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .errors import CorpusFormatError

Phone = str
PhoneSequence = tuple  # tuple[str, ...]; kept as a plain alias for readability
LanguageId = str

_FIELD_SEP = re.compile(r"[ \t]+")
_BAD_CHARS = re.compile(r"[\s\\]")


def check_token(token: str, what: str = "phone") -> str:
    if not token:
        raise ValueError(f"empty {what}")
    if _BAD_CHARS.search(token):
        raise ValueError(f"invalid {what} {token!r}: whitespace or backslash")
    return token


@dataclass(frozen=True)
class Utterance:
    speaker_id: str
    phones: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "phones", tuple(self.phones))
        check_token(self.speaker_id, "speaker id")
        for p in self.phones:
            check_token(p)

    def __len__(self):
        return len(self.phones)


@dataclass(frozen=True)
class Speaker:
    speaker_id: str
    language: LanguageId
    utterances: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        check_token(self.speaker_id, "speaker id")
        check_token(self.language, "language id")
        for utt in self.utterances:
            if utt.speaker_id != self.speaker_id:
                raise ValueError(
                    f"utterance of {utt.speaker_id!r} attached to speaker {self.speaker_id!r}"
                )

    @property
    def sentence_count(self) -> int:
        return len(self.utterances)


@dataclass(frozen=True)
class LabeledCorpus:
    """Utterances grouped by speaker; each speaker carries a native language.

    ``languages`` fixes the order L_1..L_n used everywhere downstream
    (tie-breaks, matrix rows, model files).
    """

    languages: tuple
    speakers: tuple
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        object.__setattr__(self, "speakers", tuple(self.speakers))
        if len(set(self.languages)) != len(self.languages):
            raise ValueError("duplicate language id")
        known = set(self.languages)
        index = {}
        for spk in self.speakers:
            if spk.language not in known:
                raise ValueError(f"speaker {spk.speaker_id!r} has undeclared language {spk.language!r}")
            if spk.speaker_id in index:
                raise ValueError(f"duplicate speaker id {spk.speaker_id!r}")
            index[spk.speaker_id] = spk
        object.__setattr__(self, "_index", index)

    def speaker(self, speaker_id: str) -> Speaker:
        try:
            return self._index[speaker_id]
        except KeyError:
            raise KeyError(f"unknown speaker id {speaker_id!r}") from None

    def __contains__(self, speaker_id):
        return speaker_id in self._index

    @property
    def speaker_ids(self) -> list:
        return [s.speaker_id for s in self.speakers]

    def utterances(self) -> list:
        return [u for s in self.speakers for u in s.utterances]


def parse_corpus(stream: TextIO | str | Iterable[str], source: str | None = None) -> LabeledCorpus:
    """Parse a transcription stream into a :class:`LabeledCorpus`.

    Utterance order per speaker is preserved, and both languages and
    speakers are listed in order of first appearance. A speaker may span
    several (not necessarily adjacent) lines, but must always carry the
    same language.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    languages: list = []
    speaker_lang: dict = {}
    speaker_utts: dict = {}

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        fields = _FIELD_SEP.split(stripped)
        if len(fields) < 2:
            raise CorpusFormatError("expected '<speaker_id> <language_id> [phones...]'", lineno, source)
        for tok in fields:
            if "\\" in tok:
                raise CorpusFormatError(f"unknown escape in token {tok!r}", lineno, source)
            if _BAD_CHARS.search(tok):
                raise CorpusFormatError(f"invalid whitespace in token {tok!r}", lineno, source)
        spk, lang, phones = fields[0], fields[1], tuple(fields[2:])
        prev = speaker_lang.get(spk)
        if prev is None:
            speaker_lang[spk] = lang
            speaker_utts[spk] = []
            if lang not in languages:
                languages.append(lang)
        elif prev != lang:
            raise CorpusFormatError(
                f"speaker {spk!r} labeled {lang!r} but earlier labeled {prev!r}", lineno, source
            )
        speaker_utts[spk].append(Utterance(spk, phones))

    if not speaker_utts:
        raise CorpusFormatError("no utterances", None, source)

    speakers = [Speaker(spk, speaker_lang[spk], utts) for spk, utts in speaker_utts.items()]
    return LabeledCorpus(tuple(languages), tuple(speakers))


def format_corpus(corpus: LabeledCorpus) -> str:
    """Serialize grouped by speaker; ``parse_corpus`` inverts this exactly."""
    lines = []
    for spk in corpus.speakers:
        for utt in spk.utterances:
            lines.append(" ".join((spk.speaker_id, spk.language) + utt.phones))
    return "".join(line + "\n" for line in lines)


def write_corpus(corpus: LabeledCorpus, stream: TextIO) -> None:
    stream.write(format_corpus(corpus))


def read_corpus(path) -> LabeledCorpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, source=str(path))


def partition_by_language(corpus: LabeledCorpus) -> dict:
    """Group speakers into B_1..B_n; every declared language gets a key."""
    parts = {lang: [] for lang in corpus.languages}
    for spk in corpus.speakers:
        parts[spk.language].append(spk)
    return parts


def leave_one_out_split(corpus: LabeledCorpus, held_out: str):
    """Return ``(train, test)`` with ``test`` the held-out speaker.

    Only the held-out speaker's language loses data; the language list is
    unchanged even if that language is left with no speakers.
    """
    test = corpus.speaker(held_out)
    train = LabeledCorpus(
        corpus.languages,
        tuple(s for s in corpus.speakers if s.speaker_id != held_out),
    )
    return train, test

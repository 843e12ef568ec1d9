"""The LaMIT lexicon: word -> stressed ARPAbet phoneme sequence."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources

from .features import (FeatureBundle, FeatureInventory, LookupError_,
                       MajorClass, PhonemeId, features_of)


class LexiconParseError(ValueError):
    pass


@dataclass(frozen=True)
class PhonemeToken:
    phoneme: PhonemeId
    stressed: bool = False

    @property
    def label(self) -> str:
        return self.phoneme.arpabet + ('1' if self.stressed else '')


@dataclass(frozen=True)
class LexEntry:
    orthography: str
    phonemes: tuple[PhonemeToken, ...]

    @property
    def stress_index(self) -> int | None:
        for i, t in enumerate(self.phonemes):
            if t.stressed:
                return i
        return None

    def labels(self) -> list[str]:
        return [t.label for t in self.phonemes]


@dataclass
class Lexicon:
    entries: dict[str, LexEntry]
    inventory: FeatureInventory

    def __len__(self):
        return len(self.entries)

    def __contains__(self, orthography: str):
        return orthography.upper() in self.entries

    def entry(self, orthography: str) -> LexEntry:
        key = orthography.upper()
        if key not in self.entries:
            raise LookupError_(f'unknown word {orthography!r}')
        return self.entries[key]


def parse_arpabet(tokens: str, inv: FeatureInventory) -> list[PhonemeToken]:
    """Whitespace-separated ARPAbet labels, '1' suffix = primary stress."""
    out = []
    for pos, tok in enumerate(tokens.split(), 1):
        stressed = tok.endswith('1')
        label = tok[:-1] if stressed else tok
        if label not in inv.by_arpabet:
            raise LexiconParseError(
                f'unknown label {tok}, position {pos}')
        p = inv.by_arpabet[label]
        if stressed and p.major_class is not MajorClass.VOWEL:
            raise LexiconParseError(
                f'stress mark on non-vowel {tok}, position {pos}')
        out.append(PhonemeToken(p, stressed))
    return out


def load_lexicon(text: str, inv: FeatureInventory) -> Lexicon:
    """One entry per line: ORTHOGRAPHY<TAB or spaces>ARPABET TOKENS."""
    entries: dict[str, LexEntry] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise LexiconParseError(f'line {lineno}: no phoneme tokens')
        orth, rest = parts[0].upper(), parts[1]
        try:
            phonemes = parse_arpabet(rest, inv)
        except LexiconParseError as e:
            raise LexiconParseError(f'{e}, line {lineno}') from None
        stresses = sum(1 for t in phonemes if t.stressed)
        if stresses > 1:
            raise LexiconParseError(
                f'line {lineno}: {stresses} primary stresses in {orth}')
        if orth in entries:
            warnings.warn(f'duplicate entry {orth} at line {lineno}; '
                          'last one wins')
        entries[orth] = LexEntry(orth, tuple(phonemes))
    return Lexicon(entries, inv)


def serialize_lexicon(lex: Lexicon) -> str:
    lines = [f'{e.orthography}\t' + ' '.join(e.labels())
             for e in sorted(lex.entries.values(),
                             key=lambda e: e.orthography)]
    return '\n'.join(lines) + '\n'


def expand_word(lex: Lexicon, orthography: str) -> list[FeatureBundle]:
    """Feature-bundle sequence for a lexical entry, one bundle per token."""
    entry = lex.entry(orthography)
    return [features_of(lex.inventory, t.phoneme) for t in entry.phonemes]


def geminate_of(inv: FeatureInventory, phoneme) -> PhonemeId | None:
    """The geminate counterpart, when the inventory defines one."""
    p = inv.phoneme(phoneme)
    if p.geminate:
        return p
    for g in inv.geminates():
        if g.singleton_base == p.ipa:
            return g
    return None


def singleton_of(inv: FeatureInventory, phoneme) -> PhonemeId:
    """The singleton base of a geminate; identity on singletons."""
    p = inv.phoneme(phoneme)
    if p.geminate:
        return inv.phoneme(p.singleton_base)
    return p


def load_lamit_lexicon(inv: FeatureInventory) -> Lexicon:
    text = (resources.files('lamit') / 'data' / 'lamit_lexicon.tsv') \
        .read_text('utf-8')
    return load_lexicon(text, inv)

"""Distinctive-feature inventories and queries over them."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources


class FeatureValue(enum.Enum):
    PLUS = '+'
    MINUS = '-'
    PLUSMINUS = '±'
    UNSPECIFIED = '.'


PLUS = FeatureValue.PLUS
MINUS = FeatureValue.MINUS
PLUSMINUS = FeatureValue.PLUSMINUS
UNSPECIFIED = FeatureValue.UNSPECIFIED

# articulator-free features carry no articulator; everything else is bound
ARTICULATOR_FREE = ('vowel', 'glide', 'cons', 'cont', 'son', 'strid')

ARTICULATOR_GROUP = {
    'lips': 'oral-cavity', 'blade': 'oral-cavity', 'body': 'oral-cavity',
    'round': 'oral-cavity', 'ant': 'oral-cavity', 'dist': 'oral-cavity',
    'lat': 'oral-cavity', 'rhot': 'oral-cavity', 'high': 'oral-cavity',
    'low': 'oral-cavity', 'back': 'oral-cavity',
    'atr': 'pharyngeal-laryngeal', 'ctr': 'pharyngeal-laryngeal',
    'spread': 'pharyngeal-laryngeal', 'constr': 'pharyngeal-laryngeal',
    'nasal': 'soft-palate',
    'stiff': 'vocal-folds', 'slack': 'vocal-folds',
}


@dataclass(frozen=True)
class FeatureName:
    name: str

    @property
    def kind(self) -> str:
        return ('articulator-free' if self.name in ARTICULATOR_FREE
                else 'articulator-bound')

    @property
    def articulator_group(self) -> str:
        return ARTICULATOR_GROUP.get(self.name, 'none')


class MajorClass(enum.Enum):
    VOWEL = 'vowel'
    GLIDE = 'glide'
    CONSONANT = 'consonant'


@dataclass(frozen=True)
class PhonemeId:
    ipa: str
    arpabet: str
    major_class: MajorClass
    geminate: bool = False
    singleton_base: str | None = None   # ipa of the base phoneme

    def __str__(self):
        return self.ipa


class FeatureBundle(dict):
    """Mapping feature name -> FeatureValue; absent names are unspecified."""

    def value(self, feature: str) -> FeatureValue:
        return self.get(feature, UNSPECIFIED)

    def specified(self):
        return {f: v for f, v in self.items() if v is not UNSPECIFIED}


class InventoryError(ValueError):
    pass


class ParseError(InventoryError):
    pass


class LookupError_(KeyError):
    pass


@dataclass
class FeatureInventory:
    language_tag: str
    phonemes: list[PhonemeId]
    bundles: dict[str, FeatureBundle]      # keyed by ipa
    features: list[str]
    by_ipa: dict[str, PhonemeId] = field(default_factory=dict)
    by_arpabet: dict[str, PhonemeId] = field(default_factory=dict)

    def __post_init__(self):
        self.by_ipa = {p.ipa: p for p in self.phonemes}
        self.by_arpabet = {p.arpabet: p for p in self.phonemes}

    # -- basic lookups ----------------------------------------------------
    def phoneme(self, key) -> PhonemeId:
        if isinstance(key, PhonemeId):
            key = key.ipa
        if key in self.by_ipa:
            return self.by_ipa[key]
        if key in self.by_arpabet:
            return self.by_arpabet[key]
        raise LookupError_(f'unknown phoneme {key!r}')

    def singletons(self) -> list[PhonemeId]:
        return [p for p in self.phonemes if not p.geminate]

    def geminates(self) -> list[PhonemeId]:
        return [p for p in self.phonemes if p.geminate]


def classify_major(bundle: FeatureBundle) -> MajorClass:
    """Major class from the vowel/glide/cons features; exactly one is +."""
    plus = [f for f in ('vowel', 'glide', 'cons')
            if bundle.value(f) is PLUS]
    if len(plus) != 1:
        raise InventoryError(
            f'major-class features not a partition: {plus or "none"} set')
    return {'vowel': MajorClass.VOWEL, 'glide': MajorClass.GLIDE,
            'cons': MajorClass.CONSONANT}[plus[0]]


def features_of(inv: FeatureInventory, phoneme) -> FeatureBundle:
    """The stored bundle; geminates share their singleton's bundle."""
    p = inv.phoneme(phoneme)
    return inv.bundles[p.ipa]


def distinguishing_features(inv: FeatureInventory, p1, p2) -> set[str]:
    """Features whose values differ; unspecified-vs-anything differs."""
    b1, b2 = features_of(inv, p1), features_of(inv, p2)
    return {f for f in inv.features if b1.value(f) is not b2.value(f)}


def natural_class(inv: FeatureInventory,
                  constraints: dict[str, FeatureValue]) -> set[PhonemeId]:
    """Singletons matching every constraint; ± matches both polarities."""
    for f in constraints:
        if f not in inv.features:
            raise LookupError_(f'unknown feature {f!r}')
    out = set()
    for p in inv.singletons():
        b = inv.bundles[p.ipa]
        ok = True
        for f, want in constraints.items():
            have = b.value(f)
            if have is want:
                continue
            if have is PLUSMINUS and want in (PLUS, MINUS):
                continue
            ok = False
            break
        if ok:
            out.add(p)
    return out


def load_inventory(text: str) -> FeatureInventory:
    """Parse an inventory file (see the data files for the format)."""
    language = ''
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip('\n')
        if line.startswith('# language:'):
            language = line.split(':', 1)[1].strip()
        if not line or line.startswith('#'):
            continue
        cells = line.split('\t')
        if header is None:
            if cells[0] != 'phoneme' or cells[1] != 'arpabet':
                raise ParseError(f'line {lineno}: malformed header')
            header = cells
            continue
        if len(cells) != len(header):
            raise ParseError(
                f'line {lineno}: expected {len(header)} cells, '
                f'got {len(cells)}')
        rows.append((lineno, cells))
    if header is None or not rows:
        raise ParseError('no phoneme rows')

    has_base = header[-1] == 'base'
    features = header[2:-1] if has_base else header[2:]
    if len(set(features)) != len(features):
        dupes = {f for f in features if features.count(f) > 1}
        raise ParseError(f'duplicated feature column(s): {sorted(dupes)}')
    valmap = {v.value: v for v in FeatureValue}

    phonemes: list[PhonemeId] = []
    bundles: dict[str, FeatureBundle] = {}
    pending = []    # geminate rows, resolved after singletons
    for lineno, cells in rows:
        ipa, arp = cells[0], cells[1]
        base = cells[-1] if has_base else '.'
        vals = cells[2:-1] if has_base else cells[2:]
        if any(p.ipa == ipa for p in phonemes) or ipa in (g for g, _, _ in pending):
            raise InventoryError(f'line {lineno}: duplicate phoneme {arp!r}')
        if base != '.':
            pending.append((ipa, arp, base))
            continue
        bundle = FeatureBundle()
        for f, c in zip(features, vals):
            if c not in valmap:
                raise ParseError(f'line {lineno}: bad cell {c!r}')
            if c != '.':
                bundle[f] = valmap[c]
        cls = classify_major(bundle)
        phonemes.append(PhonemeId(ipa, arp, cls))
        bundles[ipa] = bundle

    for ipa, arp, base in pending:
        if base not in bundles:
            raise InventoryError(
                f'geminate {ipa!r} references unknown base {base!r}')
        basep = next(p for p in phonemes if p.ipa == base)
        phonemes.append(PhonemeId(ipa, arp, basep.major_class,
                                  geminate=True, singleton_base=base))
        bundles[ipa] = bundles[base]

    # every singleton bundle must be pairwise distinct
    sing = [p for p in phonemes if not p.geminate]
    for i, a in enumerate(sing):
        for b in sing[i + 1:]:
            if bundles[a.ipa].specified() == bundles[b.ipa].specified():
                raise InventoryError(
                    f'non-distinct bundles: {a.arpabet} vs {b.arpabet}')

    return FeatureInventory(language, phonemes, bundles, list(features))


def serialize_inventory(inv: FeatureInventory) -> str:
    """Inverse of load_inventory (comments are not preserved)."""
    lines = [f'# language: {inv.language_tag}',
             'phoneme\tarpabet\t' + '\t'.join(inv.features) + '\tbase']
    for p in inv.phonemes:
        if p.geminate:
            cells = ['.'] * len(inv.features) + [p.singleton_base]
        else:
            b = inv.bundles[p.ipa]
            cells = [b.value(f).value for f in inv.features] + ['.']
        lines.append(f'{p.ipa}\t{p.arpabet}\t' + '\t'.join(cells))
    return '\n'.join(lines) + '\n'


def _read_data(name: str) -> str:
    return (resources.files('lamit') / 'data' / name).read_text('utf-8')


def load_italian() -> FeatureInventory:
    return load_inventory(_read_data('italian_features.tsv'))


def load_english() -> FeatureInventory:
    return load_inventory(_read_data('english_features.tsv'))

"""Praat long-format TextGrid reading and writing."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field


class TextGridError(ValueError):
    pass


class TextGridParseError(TextGridError):
    pass


def _fmt(x: float) -> str:
    """Times with up to 9 decimal digits, trailing zeros trimmed."""
    s = f'{x:.9f}'.rstrip('0').rstrip('.')
    return s if s else '0'


def _check_time(t: float):
    if not math.isfinite(t) or t < 0:
        raise TextGridError(f'bad time {t!r}')


@dataclass(frozen=True)
class Interval:
    t_start: float
    t_end: float
    label: str = ''

    def __post_init__(self):
        _check_time(self.t_start)
        _check_time(self.t_end)
        if self.t_start >= self.t_end:
            raise TextGridError(
                f'empty interval [{self.t_start}, {self.t_end}]')

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_start + self.t_end)


@dataclass(frozen=True)
class Point:
    time: float
    label: str = ''

    def __post_init__(self):
        _check_time(self.time)


@dataclass
class IntervalTier:
    name: str
    items: list[Interval] = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.items, self.items[1:]):
            if b.t_start < a.t_end:
                raise TextGridError(
                    f'tier {self.name!r}: overlapping intervals at '
                    f'{a.t_end}/{b.t_start}')

    @property
    def t_end(self) -> float:
        return self.items[-1].t_end if self.items else 0.0

    def labelled(self) -> list[Interval]:
        return [iv for iv in self.items if iv.label]


@dataclass
class PointTier:
    name: str
    items: list[Point] = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.items, self.items[1:]):
            if b.time <= a.time:
                raise TextGridError(
                    f'tier {self.name!r}: points not strictly increasing')

    @property
    def t_end(self) -> float:
        return self.items[-1].time if self.items else 0.0


Tier = IntervalTier | PointTier


@dataclass
class AnnotationDocument:
    duration: float
    tiers: list[Tier] = field(default_factory=list)

    def __post_init__(self):
        for tier in self.tiers:
            if tier.t_end > self.duration + 1e-12:
                raise TextGridError(
                    f'tier {tier.name!r} extends past document end '
                    f'({tier.t_end} > {self.duration})')

    def tier(self, name: str) -> Tier:
        for t in self.tiers:
            if t.name == name:
                return t
        raise TextGridError(f'no tier named {name!r}')

    def has_tier(self, name: str) -> bool:
        return any(t.name == name for t in self.tiers)

    def with_tier(self, tier: Tier) -> 'AnnotationDocument':
        return AnnotationDocument(self.duration, [*self.tiers, tier])


def decode_textgrid_bytes(data: bytes) -> str:
    if data[:2] in (b'\xff\xfe', b'\xfe\xff'):
        return data.decode('utf-16')
    return data.decode('utf-8-sig')


_NUM = re.compile(r'^\s*(?:\w+\s*=\s*|number\s*=\s*)?(-?\d+(?:\.\d+)?(?:e-?\d+)?)\s*$',
                  re.IGNORECASE)


class _Scanner:
    """Token scanner over the numbers and quoted strings of a TextGrid.

    Praat's long format is key = value noise around an ordered stream of
    values, so scanning the values in order is enough to rebuild it.
    """

    def __init__(self, text: str):
        # bracketed item indices ("item [1]:") are structure, not values
        text = re.sub(r'\[\s*\d*\s*\]', '[]', text)
        self.tokens = re.findall(r'"(?:[^"]|"")*"|-?\d+(?:\.\d+)?(?:[eE]-?\d+)?',
                                 text)
        self.pos = 0

    def next_number(self) -> float:
        while self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            self.pos += 1
            if not tok.startswith('"'):
                return float(tok)
        raise TextGridParseError('unexpected end of file (number expected)')

    def next_string(self) -> str:
        while self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            self.pos += 1
            if tok.startswith('"'):
                return tok[1:-1].replace('""', '"')
        raise TextGridParseError('unexpected end of file (string expected)')


def parse_textgrid(document: str | bytes) -> AnnotationDocument:
    """Parse a Praat long-format TextGrid (UTF-8 or UTF-16)."""
    if isinstance(document, bytes):
        document = decode_textgrid_bytes(document)
    head = document.lstrip()
    if not (head.startswith('File type = "ooTextFile"') or
            head.startswith('"ooTextFile"')):
        raise TextGridParseError('malformed header: not an ooTextFile')
    if 'TextGrid' not in head[:200]:
        raise TextGridParseError('malformed header: not a TextGrid')
    sc = _Scanner(document)
    if sc.next_string() != 'ooTextFile':
        raise TextGridParseError('malformed header')
    if sc.next_string() != 'TextGrid':
        raise TextGridParseError('malformed header')
    xmin = sc.next_number()
    xmax = sc.next_number()
    ntiers = int(sc.next_number())
    tiers: list[Tier] = []
    for _ in range(ntiers):
        klass = sc.next_string()
        name = sc.next_string()
        sc.next_number()    # tier xmin
        sc.next_number()    # tier xmax
        size = int(sc.next_number())
        if klass == 'IntervalTier':
            items = []
            for _ in range(size):
                t0 = sc.next_number()
                t1 = sc.next_number()
                label = sc.next_string()
                items.append(Interval(t0, t1, label))
            tiers.append(IntervalTier(name, items))
        elif klass == 'TextTier':
            pts = []
            for _ in range(size):
                t = sc.next_number()
                mark = sc.next_string()
                pts.append(Point(t, mark))
            tiers.append(PointTier(name, pts))
        else:
            raise TextGridParseError(f'unknown tier class {klass!r}')
    if xmin != 0:
        raise TextGridError(f'document must start at 0, not {xmin}')
    return AnnotationDocument(xmax, tiers)


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def serialize_textgrid(doc: AnnotationDocument) -> str:
    out = ['File type = "ooTextFile"',
           'Object class = "TextGrid"',
           '',
           'xmin = 0',
           f'xmax = {_fmt(doc.duration)}',
           'tiers? <exists>',
           f'size = {len(doc.tiers)}',
           'item []:']
    for k, tier in enumerate(doc.tiers, 1):
        out.append(f'    item [{k}]:')
        if isinstance(tier, IntervalTier):
            out.append('        class = "IntervalTier"')
            out.append(f'        name = {_quote(tier.name)}')
            out.append('        xmin = 0')
            out.append(f'        xmax = {_fmt(doc.duration)}')
            out.append(f'        intervals: size = {len(tier.items)}')
            for i, iv in enumerate(tier.items, 1):
                out.append(f'        intervals [{i}]:')
                out.append(f'            xmin = {_fmt(iv.t_start)}')
                out.append(f'            xmax = {_fmt(iv.t_end)}')
                out.append(f'            text = {_quote(iv.label)}')
        else:
            out.append('        class = "TextTier"')
            out.append(f'        name = {_quote(tier.name)}')
            out.append('        xmin = 0')
            out.append(f'        xmax = {_fmt(doc.duration)}')
            out.append(f'        points: size = {len(tier.items)}')
            for i, pt in enumerate(tier.items, 1):
                out.append(f'        points [{i}]:')
                out.append(f'            number = {_fmt(pt.time)}')
                out.append(f'            mark = {_quote(pt.label)}')
    return '\n'.join(out) + '\n'

"""Landmark detection: vowel peaks, glide dips, consonantal discontinuities."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .config import AnalysisConfig
from .dsp import AudioBuffer, BandEnergyTracks, rate_of_rise, standard_tracks


class LandmarkError(ValueError):
    pass


class LandmarkKind(enum.Enum):
    VOWEL = 'Vowel'
    GLIDE = 'Glide'
    CLOSURE = 'ConsonantClosure'
    RELEASE = 'ConsonantRelease'


class Manner(enum.Enum):
    SONORANT = 'sonorant'
    CONTINUANT = 'continuant'
    NONCONTINUANT = 'noncontinuant'


@dataclass(frozen=True)
class Landmark:
    time: float
    kind: LandmarkKind
    manner: Manner | None = None
    strength: float = 0.0      # dB prominence or peak |rate of rise|

    def __post_init__(self):
        is_consonant = self.kind in (LandmarkKind.CLOSURE,
                                     LandmarkKind.RELEASE)
        if is_consonant != (self.manner is not None):
            raise LandmarkError(
                'manner is set exactly on consonant landmarks')


_BROAD = {LandmarkKind.VOWEL: 'V', LandmarkKind.GLIDE: 'G',
          LandmarkKind.CLOSURE: 'Ccl', LandmarkKind.RELEASE: 'Crel'}


@dataclass
class LandmarkSequence:
    items: list[Landmark] = field(default_factory=list)

    def __post_init__(self):
        times = [lm.time for lm in self.items]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise LandmarkError('landmark times must strictly increase')

    @property
    def broad_class_string(self) -> list[str]:
        return [_BROAD[lm.kind] for lm in self.items]


# indices into the standard band stack
LOW, F1, MID, HIGH = range(4)

# an utterance exists only when the low band rises above this level;
# below it the whole buffer is treated as silence
SILENCE_DB = -90.0


def _relative(tracks: BandEnergyTracks, cfg: AnalysisConfig) -> np.ndarray:
    """Energies relative to the utterance peak, clipped at -gate_db.

    The clip level moves with the recording gain, which is what makes
    every detection decision (and every reported strength) invariant
    under rescaling of the input samples.
    """
    e = tracks.energy
    return np.maximum(e - float(e.max()), -cfg.gate_db)


def _gate(tracks: BandEnergyTracks, cfg: AnalysisConfig, rel=None):
    """Active utterance span, padded by the rate-of-rise window."""
    if float(tracks.energy[LOW].max()) <= SILENCE_DB:
        return None
    rel = _relative(tracks, cfg) if rel is None else rel
    active = rel[LOW] > -cfg.gate_db
    min_run = max(1, int(round(cfg.gate_min_duration / tracks.frame_step)))
    best = None
    i = 0
    n = len(active)
    while i < n:
        if active[i]:
            j = i
            while j < n and active[j]:
                j += 1
            if j - i >= min_run:
                best = (i, j - 1) if best is None else (best[0], j - 1)
            i = j
        else:
            i += 1
    if best is None:
        return None
    return (tracks.times[best[0]] - cfg.ror_window,
            tracks.times[best[1]] + cfg.ror_window)


def detect_vowel_landmarks(tracks: BandEnergyTracks,
                           cfg: AnalysisConfig | None = None) -> list[Landmark]:
    """Local maxima of the low-band energy with sufficient prominence."""
    cfg = cfg or AnalysisConfig()
    _require_bands(tracks, 1)
    rel = _relative(tracks, cfg)
    span = _gate(tracks, cfg, rel)
    if span is None:
        return []
    dist = max(1, int(round(cfg.vowel_min_separation / tracks.frame_step)))
    peaks, props = scipy.signal.find_peaks(
        rel[LOW], prominence=cfg.vowel_prominence_db, distance=dist)
    out = []
    for p, prom in zip(peaks, props['prominences']):
        t = float(tracks.times[p])
        if span[0] <= t <= span[1]:
            out.append(Landmark(t, LandmarkKind.VOWEL,
                                strength=float(prom)))
    return out


def detect_glide_landmarks(tracks: BandEnergyTracks,
                           vowels: list[Landmark],
                           cfg: AnalysisConfig | None = None) -> list[Landmark]:
    """Smooth low-band dips adjacent to vowel landmarks."""
    cfg = cfg or AnalysisConfig()
    _require_bands(tracks, 1)
    if not vowels:
        return []
    rel = _relative(tracks, cfg)
    low = rel[LOW]
    ror = rate_of_rise(low, cfg.ror_window, tracks.frame_step)
    dips, props = scipy.signal.find_peaks(-low, prominence=cfg.glide_dip_db)
    vtimes = np.array([v.time for v in vowels])
    out = []
    for d, prom, lo, hi in zip(dips, props['prominences'],
                               props['left_bases'], props['right_bases']):
        t = float(tracks.times[d])
        if not np.any(np.abs(vtimes - t) <= cfg.glide_window):
            continue
        # the whole dip must be free of abrupt edges, else it is a consonant
        if np.max(np.abs(ror[lo:hi + 1])) >= cfg.ror_threshold:
            continue
        out.append(Landmark(t, LandmarkKind.GLIDE, strength=float(prom)))
    return out


def detect_consonant_landmarks(tracks: BandEnergyTracks,
                               cfg: AnalysisConfig | None = None
                               ) -> list[Landmark]:
    """Abrupt multi-band discontinuities, split into closures/releases."""
    cfg = cfg or AnalysisConfig()
    _require_bands(tracks, 4)
    rel = _relative(tracks, cfg)
    span = _gate(tracks, cfg, rel)
    if span is None:
        return []
    step = tracks.frame_step
    rors = np.vstack([rate_of_rise(rel[b], cfg.ror_window, step)
                      for b in (LOW, MID, HIGH)])
    # a frame qualifies when >= 2 bands cross the magnitude threshold;
    # polarity comes from the low band (vocal-tract openness), so a
    # vowel-to-fricative transition reads as a closure even though the
    # high band rises
    hits = (np.abs(rors) >= cfg.ror_threshold).sum(axis=0) >= 2
    out = []
    for i0, i1 in _runs(hits):
        seg = rors[:, i0:i1]
        mag = np.abs(seg).sum(axis=0)
        k = i0 + int(np.argmax(mag))
        t = float(tracks.times[k])
        if not span[0] <= t <= span[1]:
            continue
        polarity = rors[0, k] if abs(rors[0, k]) > 1e-9 else rors[:, k].sum()
        kind = (LandmarkKind.RELEASE if polarity > 0
                else LandmarkKind.CLOSURE)
        manner = _classify_manner(rel, k, step, cfg)
        out.append(Landmark(t, kind, manner,
                            strength=float(np.abs(rors[:, k]).max())))
    out.sort(key=lambda lm: lm.time)
    return out


def _runs(mask: np.ndarray):
    i = 0
    n = len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j < n and mask[j]:
                j += 1
            yield i, j
            i = j
        else:
            i += 1


def _frication(rel: np.ndarray, lo: int, hi: int,
               cfg: AnalysisConfig) -> bool:
    """Sustained frication in [lo, hi): high band dominant and energetic."""
    lo = max(0, lo)
    hi = min(rel.shape[1], hi)
    if hi <= lo:
        return False
    high = rel[HIGH, lo:hi]
    low = rel[LOW, lo:hi]
    dominant = float(np.median(high - low)) >= cfg.noise_dominance_db
    energetic = float(np.median(high)) > -(cfg.gate_db - 10.0)
    return dominant and energetic


def _classify_manner(rel: np.ndarray, k: int, step: float,
                     cfg: AnalysisConfig) -> Manner:
    low = rel[LOW]
    d = max(1, int(round(0.030 / step)))
    before = low[max(0, k - d)]
    after = low[min(len(low) - 1, k + d)]
    if abs(after - before) <= cfg.sonorant_window_db:
        return Manner.SONORANT
    # continuant: sustained high-band noise on either side of the event
    n = max(1, int(round(cfg.noise_min_duration / step)))
    off = max(1, int(round(0.005 / step)))
    if _frication(rel, k + off, k + off + n, cfg) or \
            _frication(rel, k - off - n, k - off, cfg):
        return Manner.CONTINUANT
    return Manner.NONCONTINUANT


def _require_bands(tracks: BandEnergyTracks, n: int):
    if tracks.energy.shape[0] < n:
        raise LandmarkError(
            f'expected the standard band stack (low, f1, mid, high); '
            f'got {tracks.energy.shape[0]} bands')


_PRIORITY = {LandmarkKind.CLOSURE: 2, LandmarkKind.RELEASE: 2,
             LandmarkKind.VOWEL: 1, LandmarkKind.GLIDE: 0}


def landmark_sequence(vowels, glides, consonants,
                      cfg: AnalysisConfig | None = None) -> LandmarkSequence:
    """Merge detector outputs; collisions collapse by priority C > V > G."""
    cfg = cfg or AnalysisConfig()
    pool = sorted([*vowels, *glides, *consonants], key=lambda lm: lm.time)
    kept: list[Landmark] = []
    for lm in pool:
        if kept and lm.time - kept[-1].time < cfg.merge_window:
            prev = kept[-1]
            if (_PRIORITY[lm.kind], lm.strength) > \
                    (_PRIORITY[prev.kind], prev.strength):
                kept[-1] = lm
            continue
        kept.append(lm)
    return LandmarkSequence(kept)


def detect_all(audio: AudioBuffer,
               cfg: AnalysisConfig | None = None) -> LandmarkSequence:
    """Full detection pipeline over one utterance."""
    cfg = cfg or AnalysisConfig()
    tracks = standard_tracks(audio, cfg)
    vowels = detect_vowel_landmarks(tracks, cfg)
    glides = detect_glide_landmarks(tracks, vowels, cfg)
    consonants = detect_consonant_landmarks(tracks, cfg)
    return landmark_sequence(vowels, glides, consonants, cfg)


def landmarks_csv(seq: LandmarkSequence) -> str:
    """CSV 'time_s,kind,manner,strength_dB'."""
    lines = ['time_s,kind,manner,strength_dB']
    for lm in seq.items:
        manner = lm.manner.value if lm.manner else ''
        lines.append(f'{lm.time:.6f},{lm.kind.value},{manner},'
                     f'{lm.strength:.2f}')
    return '\n'.join(lines) + '\n'

"""Lexical access: estimated feature bundles matched against the lexicon."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import AnalysisConfig
from .dsp import ParameterTrack
from .features import (FeatureBundle, FeatureInventory, MINUS, PLUS,
                       PLUSMINUS, UNSPECIFIED, FeatureName)
from .landmarks import LandmarkKind, LandmarkSequence, Manner
from .lexicon import Lexicon
from .textgrid import AnnotationDocument


class MatchError(ValueError):
    pass


@dataclass
class EstimatedSegment:
    window: tuple[float, float]
    bundle: FeatureBundle
    source_landmarks: tuple[int, ...] = ()

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.window[0] + self.window[1])


@dataclass(frozen=True)
class DistanceWeights:
    w_free: float = 2.0
    w_bound: float = 1.0
    unspecified_cost: float = 0.25

    def __post_init__(self):
        if not self.w_free >= self.w_bound > 0:
            raise MatchError('need w_free >= w_bound > 0')
        if self.unspecified_cost < 0:
            raise MatchError('unspecified_cost must be non-negative')

    @classmethod
    def from_config(cls, cfg: AnalysisConfig) -> 'DistanceWeights':
        return cls(cfg.w_free, cfg.w_bound, cfg.unspecified_cost)


@dataclass(frozen=True)
class MatchResult:
    word: str
    score: float
    cohort_rank: int


# ------------------------------------------------------------------ cues

def _vowel_rules(frame, bundle: FeatureBundle, cfg: AnalysisConfig):
    openness = frame.f1_proxy_db - frame.low_band_db
    if openness >= cfg.open_vowel_db:
        bundle['low'] = PLUS
        bundle['high'] = MINUS
    elif openness <= cfg.close_vowel_db:
        bundle['high'] = PLUS
        bundle['low'] = MINUS
    if frame.spectral_tilt <= cfg.back_tilt_db:
        bundle['back'] = PLUS
        bundle['round'] = PLUS


def cues_to_bundles(seq: LandmarkSequence, params: ParameterTrack,
                    cfg: AnalysisConfig | None = None
                    ) -> list[EstimatedSegment]:
    """One estimated segment per vowel/glide landmark and per
    closure-release pair; articulator-bound features only where a
    parameter rule fires, everything else unspecified."""
    cfg = cfg or AnalysisConfig()
    out: list[EstimatedSegment] = []
    items = seq.items
    i = 0
    while i < len(items):
        lm = items[i]
        if lm.kind is LandmarkKind.VOWEL:
            bundle = FeatureBundle({'vowel': PLUS})
            _vowel_rules(params.at(lm.time), bundle, cfg)
            out.append(EstimatedSegment((lm.time - 0.05, lm.time + 0.05),
                                        bundle, (i,)))
            i += 1
        elif lm.kind is LandmarkKind.GLIDE:
            out.append(EstimatedSegment((lm.time - 0.05, lm.time + 0.05),
                                        FeatureBundle({'glide': PLUS}), (i,)))
            i += 1
        elif lm.kind is LandmarkKind.CLOSURE and i + 1 < len(items) \
                and items[i + 1].kind is LandmarkKind.RELEASE:
            out.append(_consonant_segment(items, i, i + 1, params, cfg))
            i += 2
        else:
            # unpaired consonant landmark: only the broad features
            bundle = FeatureBundle({'cons': PLUS})
            _manner_features(lm.manner, bundle)
            out.append(EstimatedSegment((lm.time - 0.05, lm.time + 0.08),
                                        bundle, (i,)))
            i += 1
    return out


def _manner_features(manner: Manner | None, bundle: FeatureBundle):
    if manner is Manner.SONORANT:
        bundle['son'] = PLUS
    elif manner is Manner.CONTINUANT:
        bundle['son'] = MINUS
        bundle['cont'] = PLUS
    elif manner is Manner.NONCONTINUANT:
        bundle['son'] = MINUS
        bundle['cont'] = MINUS


def _consonant_segment(items, i_cl, i_rel, params: ParameterTrack,
                       cfg: AnalysisConfig) -> EstimatedSegment:
    closure, release = items[i_cl], items[i_rel]
    bundle = FeatureBundle({'cons': PLUS})
    manner = release.manner if release.manner is not None else closure.manner
    _manner_features(manner, bundle)
    inside = params.window(closure.time, release.time)
    if manner is Manner.CONTINUANT and inside:
        high_in = float(np.median([f.high_band_db for f in inside]))
        neighbours = params.window(closure.time - 0.08, closure.time - 0.02) \
            + params.window(release.time + 0.02, release.time + 0.08)
        if neighbours:
            high_out = float(np.median([f.high_band_db for f in neighbours]))
            bundle['strid'] = (PLUS if high_in >
                               high_out + cfg.strident_margin_db else MINUS)
    if manner is not Manner.SONORANT and inside:
        voiced = np.mean([f.f0 is not None for f in inside])
        if voiced >= 0.5:
            bundle['slack'] = PLUS
            bundle['stiff'] = MINUS
        else:
            bundle['stiff'] = PLUS
            bundle['slack'] = MINUS
    return EstimatedSegment((closure.time - 0.05, release.time + 0.08),
                            bundle, (i_cl, i_rel))


# -------------------------------------------------------------- distance

def feature_distance(est: FeatureBundle, lexical: FeatureBundle,
                     w: DistanceWeights, inv: FeatureInventory) -> float:
    """Weighted per-feature mismatch; see DistanceWeights for the knobs."""
    for name in (*est, *lexical):
        if name not in inv.features:
            raise MatchError(f'feature {name!r} not in this inventory')
    total = 0.0
    for f in inv.features:
        e, l = est.value(f), lexical.value(f)
        if e is l:
            continue
        if l is PLUSMINUS and e in (PLUS, MINUS):
            continue        # the lexical ± accepts either polarity
        if e is UNSPECIFIED:
            total += w.unspecified_cost
        elif l is UNSPECIFIED:
            continue        # lexicon requires nothing here
        else:
            total += (w.w_free if FeatureName(f).kind == 'articulator-free'
                      else w.w_bound)
    return total


# ---------------------------------------------------------------- cohort

def score_candidate(segments, bundles, w: DistanceWeights,
                    inv: FeatureInventory) -> float:
    """Left-to-right alignment with end-gap penalties of w_free each."""
    n = min(len(segments), len(bundles))
    total = sum(feature_distance(segments[i].bundle, bundles[i], w, inv)
                for i in range(n))
    total += w.w_free * abs(len(segments) - len(bundles))
    return total


def cohort_match(segments, lex: Lexicon, w: DistanceWeights | None = None,
                 k: int = 10, word_freq: dict[str, int] | None = None
                 ) -> list[MatchResult]:
    """Top-k candidates by incremental cohort scoring.

    Lossless pruning: a candidate is dropped only when its prefix score
    already exceeds a known k-th best full score, which can never remove
    a true top-k member (scores are non-decreasing left to right).
    """
    w = w or DistanceWeights()
    if not lex.entries:
        raise MatchError('empty lexicon')
    if k < 1:
        raise MatchError('k must be positive')
    segments = list(segments)
    if not segments:
        raise MatchError('no segments to match')
    inv = lex.inventory
    freq = word_freq or {}
    n = len(segments)

    # lexical bundles are shared per phoneme, so each segment needs one
    # distance per inventory phoneme rather than one per lexicon entry
    cost = [{ipa: feature_distance(seg.bundle, inv.bundles[ipa], w, inv)
             for ipa in inv.bundles} for seg in segments]
    phones = {orth: [t.phoneme.ipa for t in entry.phonemes]
              for orth, entry in lex.entries.items()}

    def full_score(orth):
        ps = phones[orth]
        m = min(len(ps), n)
        return sum(cost[i][ps[i]] for i in range(m)) + \
            w.w_free * abs(len(ps) - n)

    # seed the pruning bound with the k entries closest in length
    seeds = sorted(phones, key=lambda o: abs(len(phones[o]) - n))[:k]
    seed_scores = sorted(full_score(o) for o in seeds)
    bound = seed_scores[min(k, len(seed_scores)) - 1]

    alive = {orth: 0.0 for orth in phones}
    for i in range(n):
        ci = cost[i]
        nxt = {}
        for orth, prefix in alive.items():
            ps = phones[orth]
            if i < len(ps):
                prefix += ci[ps[i]]
            if prefix <= bound:
                nxt[orth] = prefix
        alive = nxt
    finals = []
    for orth, prefix in alive.items():
        score = prefix + w.w_free * abs(len(phones[orth]) - n)
        finals.append((score, -freq.get(orth, 0), orth))
    finals.sort()
    # competition ranking: candidates with equal scores (homophones)
    # share a rank
    results = []
    rank = 0
    prev_score = None
    for pos, (score, negfreq, orth) in enumerate(finals[:k], 1):
        if prev_score is None or score > prev_score:
            rank = pos
            prev_score = score
        results.append(MatchResult(orth, score, rank))
    return results


@dataclass
class WordMatch:
    interval_index: int
    word_label: str
    results: list[MatchResult] = field(default_factory=list)
    no_evidence: bool = False


def match_in_word_intervals(doc: AnnotationDocument, segments, lex: Lexicon,
                            w: DistanceWeights | None = None, k: int = 10,
                            word_freq: dict[str, int] | None = None):
    """Per-word cohort matching; segments are assigned to the word
    interval containing their midpoint.  Returns (matches, orphans)."""
    word_tier = doc.tier('Word')
    labelled = [(i, iv) for i, iv in enumerate(word_tier.items) if iv.label]
    per_word: dict[int, list] = {i: [] for i, _ in labelled}
    orphans = []
    for seg in segments:
        t = seg.midpoint
        home = None
        for i, iv in labelled:
            if iv.t_start <= t <= iv.t_end:
                home = i
                break
        if home is None:
            orphans.append(seg)
        else:
            per_word[home].append(seg)
    matches = []
    for idx, (i, iv) in enumerate(labelled):
        segs = per_word[i]
        if not segs:
            matches.append(WordMatch(i, iv.label, [], no_evidence=True))
        else:
            matches.append(WordMatch(
                i, iv.label, cohort_match(segs, lex, w, k, word_freq)))
    return matches, orphans


def matches_csv(matches: list[WordMatch]) -> str:
    """CSV 'word_interval_index,candidate,score,rank'."""
    lines = ['word_interval_index,candidate,score,rank']
    for m in matches:
        if m.no_evidence:
            lines.append(f'{m.interval_index},<no evidence>,,')
        for r in m.results:
            lines.append(f'{m.interval_index},{r.word},{r.score:.4f},'
                         f'{r.cohort_rank}')
    return '\n'.join(lines) + '\n'

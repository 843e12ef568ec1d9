import random

import pytest

from lamit.access import (DistanceWeights, EstimatedSegment, MatchError,
                          cohort_match, cues_to_bundles, feature_distance,
                          match_in_word_intervals, matches_csv,
                          score_candidate)
from lamit.config import AnalysisConfig
from lamit.dsp import parameter_frames
from lamit.features import (FeatureBundle, MINUS, PLUS, UNSPECIFIED,
                            features_of)
from lamit.landmarks import detect_all
from lamit.lexicon import Lexicon, expand_word
from lamit.textgrid import AnnotationDocument, Interval, IntervalTier

import synth

W = DistanceWeights()


def seg(bundle, t0=0.0, t1=0.1):
    return EstimatedSegment((t0, t1), bundle)


def segs_for(lex, word, spacing=0.2):
    out = []
    for i, b in enumerate(expand_word(lex, word)):
        t = 0.05 + i * spacing
        out.append(EstimatedSegment((t - 0.04, t + 0.04), FeatureBundle(b)))
    return out


def brute_force(segments, lex, w, k):
    """Exhaustive scorer, independent of the incremental matcher."""
    inv = lex.inventory
    scored = []
    for orth, entry in lex.entries.items():
        bundles = [inv.bundles[t.phoneme.ipa] for t in entry.phonemes]
        scored.append((score_candidate(segments, bundles, w, inv), 0, orth))
    scored.sort()
    return scored[:k]


# ------------------------------------------------------------- distance

def test_distance_identity(italian):
    b = features_of(italian, 'a')
    assert feature_distance(b, b, W, italian) == 0.0


def test_distance_single_bound_conflict(italian):
    a = FeatureBundle({'cons': PLUS, 'ant': PLUS})
    b = FeatureBundle({'cons': PLUS, 'ant': MINUS})
    assert feature_distance(a, b, W, italian) == W.w_bound


def test_distance_t_vs_d(italian):
    # t and d differ in the two voicing features in the shipped chart
    t = features_of(italian, 't')
    d = features_of(italian, 'd')
    assert feature_distance(t, d, DistanceWeights(w_bound=1.0),
                            italian) == 2.0


def test_distance_free_vs_bound_weights(italian):
    a = FeatureBundle({'cons': PLUS})
    b = FeatureBundle({'vowel': PLUS})
    # cons +/unspec and vowel unspec/+ -> one unspecified_cost each way
    d = feature_distance(a, b, W, italian)
    assert d == pytest.approx(W.unspecified_cost)
    c = FeatureBundle({'cons': MINUS})
    d2 = feature_distance(c, FeatureBundle({'cons': PLUS}), W, italian)
    assert d2 == W.w_free


def test_distance_plusminus_matches_both(italian):
    ts = features_of(italian, 'ts')        # cont is ±
    stop = FeatureBundle(dict(ts, cont=MINUS))
    fric = FeatureBundle(dict(ts, cont=PLUS))
    assert feature_distance(stop, ts, W, italian) == 0.0
    assert feature_distance(fric, ts, W, italian) == 0.0


def test_distance_unspecified_estimate_costs(italian):
    est = FeatureBundle({'cons': PLUS})
    lexical = features_of(italian, 't')
    d = feature_distance(est, lexical, W, italian)
    specified = len(lexical.specified()) - 1    # cons matches
    assert d == pytest.approx(specified * W.unspecified_cost)


def test_distance_unknown_feature_errors(italian):
    with pytest.raises(MatchError):
        feature_distance(FeatureBundle({'nasalized': PLUS}),
                         FeatureBundle(), W, italian)


def test_distance_symmetric_in_polarity(italian):
    a = FeatureBundle({'ant': PLUS})
    b = FeatureBundle({'ant': MINUS})
    assert feature_distance(a, b, W, italian) == \
        feature_distance(b, a, W, italian)


def test_weights_validation():
    with pytest.raises(MatchError):
        DistanceWeights(w_free=1.0, w_bound=2.0)
    with pytest.raises(MatchError):
        DistanceWeights(unspecified_cost=-1)


# --------------------------------------------------------------- cohort

def test_exact_match_casa(lamit_lexicon):
    results = cohort_match(segs_for(lamit_lexicon, 'CASA'), lamit_lexicon,
                           W, k=5)
    assert results[0].word == 'CASA'
    assert results[0].score == 0.0
    assert results[0].cohort_rank == 1
    # unique zero score
    assert all(r.score > 0 for r in results[1:])


def test_underspecified_final_vowel_cohort(lamit_lexicon):
    segments = segs_for(lamit_lexicon, 'CASA')
    segments[-1] = seg(FeatureBundle({'vowel': PLUS}),
                       *segments[-1].window)
    results = cohort_match(segments, lamit_lexicon, W, k=5)
    top_score = results[0].score
    top_set = {r.word for r in results if r.score == top_score}
    assert top_set == {'CASA', 'CASO'}


def test_word_not_in_lexicon_scores_positive(italian, lamit_lexicon):
    from lamit.lexicon import load_lexicon, serialize_lexicon
    text = '\n'.join(ln for ln in
                     serialize_lexicon(lamit_lexicon).splitlines()
                     if not ln.startswith('ZOO\t'))
    smaller = load_lexicon(text, italian)
    zoo = segs_for(lamit_lexicon, 'ZOO')
    results = cohort_match(zoo, smaller, W, k=3)
    assert results[0].score > 0


def test_cohort_errors(lamit_lexicon, italian):
    with pytest.raises(MatchError):
        cohort_match([], lamit_lexicon, W, k=5)
    with pytest.raises(MatchError):
        cohort_match(segs_for(lamit_lexicon, 'CASA'), lamit_lexicon, W, k=0)
    empty = Lexicon({}, italian)
    with pytest.raises(MatchError):
        cohort_match(segs_for(lamit_lexicon, 'CASA'), empty, W, k=5)


def _random_segments(rng, lex, max_len=6):
    orth = rng.choice(sorted(lex.entries))
    segments = segs_for(lex, orth)[:max_len]
    inv = lex.inventory
    for s in segments:
        b = s.bundle
        for f in list(b):
            roll = rng.random()
            if roll < 0.25 and f not in ('vowel', 'glide', 'cons'):
                del b[f]                       # forget the feature
            elif roll < 0.35 and b[f] in (PLUS, MINUS) \
                    and f not in ('vowel', 'glide', 'cons'):
                b[f] = MINUS if b[f] is PLUS else PLUS
    if rng.random() < 0.3 and len(segments) > 1:
        segments = segments[:-1]               # missing final landmark
    return segments


def test_oracle_equivalence_random(lamit_lexicon, italian):
    from lamit.lexicon import load_lexicon, serialize_lexicon
    rng = random.Random(42)
    all_lines = [ln for ln in
                 serialize_lexicon(lamit_lexicon).splitlines() if ln]
    for trial in range(60):
        lines = rng.sample(all_lines, 50)
        sub = load_lexicon('\n'.join(lines), italian)
        segments = _random_segments(rng, sub)
        mine = cohort_match(segments, sub, W, k=10)
        oracle = brute_force(segments, sub, W, k=10)
        assert [r.score for r in mine] == \
            pytest.approx([s for s, _, _ in oracle])
        # equal-score groups must contain the same words
        by_score = {}
        for r in mine:
            by_score.setdefault(round(r.score, 9), set()).add(r.word)
        for s, _, o in oracle:
            assert o in by_score[round(s, 9)]


# score-0 ties in the shipped lexicon: A/HA are true homophones (silent
# h); an estimated affricate also matches the fricative entry through
# the two-sided [cont] cell (SCI -> CI)
HOMOPHONE_SETS = {
    'A': {'A', 'HA'}, 'HA': {'A', 'HA'},
    'SCI': {'SCI', 'CI'},
}


def test_self_retrieval_all_entries(lamit_lexicon):
    failures = []
    for orth in lamit_lexicon.entries:
        results = cohort_match(segs_for(lamit_lexicon, orth),
                               lamit_lexicon, W, k=3)
        hit = next((r for r in results if r.word == orth), None)
        if hit is None or hit.cohort_rank != 1 or hit.score != 0.0:
            failures.append(orth)
            continue
        zero = {r.word for r in results if r.score == 0.0}
        if zero != HOMOPHONE_SETS.get(orth, {orth}):
            failures.append(f'{orth} (score-0 set {sorted(zero)})')
    assert not failures, failures


def test_score_monotone_in_conflicts(lamit_lexicon, italian):
    segments = segs_for(lamit_lexicon, 'MAMMA')
    entry_bundles = [italian.bundles[t.phoneme.ipa]
                     for t in lamit_lexicon.entry('MAMMA').phonemes]
    base = score_candidate(segments, entry_bundles, W, italian)
    # flipping one specified feature strictly increases the score
    segments[1].bundle['low'] = MINUS
    one = score_candidate(segments, entry_bundles, W, italian)
    assert one > base
    segments[1].bundle['back'] = PLUS
    two = score_candidate(segments, entry_bundles, W, italian)
    assert two > one


def test_ranking_invariant_under_weight_scaling(lamit_lexicon):
    segments = segs_for(lamit_lexicon, 'BENE')
    segments[0].bundle.pop('slack', None)
    a = cohort_match(segments, lamit_lexicon, W, k=10)
    scaled = DistanceWeights(W.w_free * 3, W.w_bound * 3,
                             W.unspecified_cost * 3)
    b = cohort_match(segments, lamit_lexicon, scaled, k=10)
    assert [r.word for r in a] == [r.word for r in b]
    for x, y in zip(a, b):
        assert y.score == pytest.approx(3 * x.score)


def test_tie_break_by_corpus_frequency(lamit_lexicon, lamit_corpus):
    from lamit.corpus import word_frequencies
    freq = word_frequencies(lamit_corpus, lamit_lexicon)
    segments = segs_for(lamit_lexicon, 'CASA')
    segments[-1] = seg(FeatureBundle({'vowel': PLUS}),
                       *segments[-1].window)
    results = cohort_match(segments, lamit_lexicon, W, k=5, word_freq=freq)
    tied = [r for r in results if r.score == results[0].score]
    counts = [freq.get(r.word, 0) for r in tied]
    assert counts == sorted(counts, reverse=True)


# ------------------------------------------------------------ cue rules

def test_open_vowel_cue():
    audio, peak_t = synth.vowel_rise_fall(0.3,
                                          formants=(700., 1200., 2600.))
    cfg = AnalysisConfig()
    seq = detect_all(audio, cfg)
    segments = cues_to_bundles(seq, parameter_frames(audio, cfg), cfg)
    vowel = next(s for s in segments if s.bundle.value('vowel') is PLUS)
    assert vowel.bundle.value('low') is PLUS


def test_close_vowel_cue():
    audio, _ = synth.vowel_rise_fall(0.3, formants=(280., 2300., 3000.))
    cfg = AnalysisConfig()
    seq = detect_all(audio, cfg)
    segments = cues_to_bundles(seq, parameter_frames(audio, cfg), cfg)
    vowel = next(s for s in segments if s.bundle.value('vowel') is PLUS)
    assert vowel.bundle.value('high') is PLUS


def test_back_vowel_cue():
    audio, _ = synth.vowel_rise_fall(0.3, formants=(300., 700., 2200.))
    cfg = AnalysisConfig()
    seq = detect_all(audio, cfg)
    segments = cues_to_bundles(seq, parameter_frames(audio, cfg), cfg)
    vowel = next(s for s in segments if s.bundle.value('vowel') is PLUS)
    assert vowel.bundle.value('back') is PLUS
    assert vowel.bundle.value('round') is PLUS


def test_strident_continuant_cue():
    audio, _ = synth.fricative_vcv()
    cfg = AnalysisConfig()
    seq = detect_all(audio, cfg)
    segments = cues_to_bundles(seq, parameter_frames(audio, cfg), cfg)
    fric = next(s for s in segments if s.bundle.value('cons') is PLUS)
    assert fric.bundle.value('cont') is PLUS
    assert fric.bundle.value('strid') is PLUS
    assert fric.bundle.value('son') is MINUS


def test_stop_segment_default_underspecified():
    audio, _ = synth.vcv_stop()
    cfg = AnalysisConfig()
    seq = detect_all(audio, cfg)
    segments = cues_to_bundles(seq, parameter_frames(audio, cfg), cfg)
    stop = next(s for s in segments if s.bundle.value('cons') is PLUS)
    assert stop.bundle.value('cont') is MINUS
    # no place evidence: articulator features left unspecified
    for f in ('lips', 'blade', 'body', 'ant'):
        assert stop.bundle.value(f) is UNSPECIFIED


def test_empty_landmark_sequence_gives_no_segments():
    from lamit.landmarks import LandmarkSequence
    audio = synth.steady_vowel(0.2)
    params = parameter_frames(audio)
    assert cues_to_bundles(LandmarkSequence([]), params) == []


# -------------------------------------------------- word-interval match

def make_word_doc(lex, words, word_dur=1.0):
    items = []
    for i, w in enumerate(words):
        items.append(Interval(i * word_dur, (i + 1) * word_dur, w))
    doc = AnnotationDocument(len(words) * word_dur,
                             [IntervalTier('Word', items)])
    segments = []
    for i, w in enumerate(words):
        for j, b in enumerate(expand_word(lex, w)):
            t = i * word_dur + 0.1 + 0.08 * j
            segments.append(EstimatedSegment((t - 0.03, t + 0.03),
                                             FeatureBundle(b)))
    return doc, segments


def test_match_per_word_exact(lamit_lexicon):
    words = ['MAMMA', 'E', 'PAPÀ', 'TI', 'VOGLIONO', 'BENE']
    doc, segments = make_word_doc(lamit_lexicon, words)
    matches, orphans = match_in_word_intervals(doc, segments, lamit_lexicon,
                                               W, k=3)
    assert not orphans
    assert [m.results[0].word for m in matches] == words
    assert all(m.results[0].score == 0.0 for m in matches)


def test_match_empty_word_flagged(lamit_lexicon):
    doc, segments = make_word_doc(lamit_lexicon, ['MAMMA', 'BENE'])
    segments = [s for s in segments if s.midpoint < 1.0]
    matches, _ = match_in_word_intervals(doc, segments, lamit_lexicon, W)
    assert matches[0].results
    assert matches[1].no_evidence


def test_match_orphan_excluded(lamit_lexicon):
    doc, segments = make_word_doc(lamit_lexicon, ['MAMMA'])
    stray = EstimatedSegment((5.0, 5.1), FeatureBundle({'vowel': PLUS}))
    matches, orphans = match_in_word_intervals(doc, segments + [stray],
                                               lamit_lexicon, W)
    assert orphans == [stray]
    assert matches[0].results[0].word == 'MAMMA'


def test_straddling_segment_assigned_by_midpoint(lamit_lexicon):
    doc, segments = make_word_doc(lamit_lexicon, ['MAMMA', 'BENE'])
    straddler = EstimatedSegment((0.9, 1.3), FeatureBundle({'vowel': PLUS}))
    matches, orphans = match_in_word_intervals(doc, [straddler],
                                               lamit_lexicon, W)
    assert not orphans
    # midpoint 1.1 belongs to the second word
    assert matches[0].no_evidence
    assert matches[1].results


def test_matches_csv(lamit_lexicon):
    doc, segments = make_word_doc(lamit_lexicon, ['MAMMA'])
    matches, _ = match_in_word_intervals(doc, segments, lamit_lexicon, W,
                                         k=2)
    csv = matches_csv(matches)
    lines = csv.strip().split('\n')
    assert lines[0] == 'word_interval_index,candidate,score,rank'
    assert lines[1].startswith('0,MAMMA,0.0000,1')

"""Command-line surface: stats, lexi, landmarks, match, validate."""
from __future__ import annotations

import argparse
import itertools
import os
import sys
from importlib import resources
from pathlib import Path

from . import access, annotation, corpus, dsp, features, landmarks, lexicon
from .config import AnalysisConfig, ConfigError, parse_config_file, \
    render_config
from .textgrid import TextGridError, parse_textgrid, serialize_textgrid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_RESOLUTION = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def data_dir() -> Path:
    override = os.environ.get('LAMIT_DATA_DIR')
    if override:
        return Path(override)
    return Path(str(resources.files('lamit') / 'data'))


def _data_file(explicit, name) -> Path:
    path = Path(explicit) if explicit else data_dir() / name
    if not path.exists():
        raise CliError(f'missing file: {path}', EXIT_USAGE)
    return path


def _load_config(args) -> AnalysisConfig:
    cfg = AnalysisConfig()
    if getattr(args, 'config', None):
        path = Path(args.config)
        if not path.exists():
            raise CliError(f'missing config file: {path}')
        try:
            cfg = parse_config_file(path.read_text('utf-8'), cfg)
        except ConfigError as e:
            raise CliError(f'bad config: {e}') from None
    if getattr(args, 'weights', None):
        path = Path(args.weights)
        if not path.exists():
            raise CliError(f'missing weights file: {path}')
        try:
            cfg = parse_config_file(path.read_text('utf-8'), cfg)
        except ConfigError as e:
            raise CliError(f'bad weights: {e}') from None
    return cfg


def _load_italian(args):
    path = _data_file(getattr(args, 'inventory', None),
                      'italian_features.tsv')
    try:
        return features.load_inventory(path.read_text('utf-8'))
    except features.InventoryError as e:
        raise CliError(f'inventory: {e}', EXIT_VALIDATION) from None


def _load_lexicon(args, inv):
    path = _data_file(getattr(args, 'lexicon', None), 'lamit_lexicon.tsv')
    try:
        return lexicon.load_lexicon(path.read_text('utf-8'), inv)
    except lexicon.LexiconParseError as e:
        raise CliError(f'lexicon: {e}', EXIT_VALIDATION) from None


def _write_output(args, text, default_stream=True):
    if getattr(args, 'out', None):
        Path(args.out).write_text(text, encoding='utf-8')
    elif default_stream:
        sys.stdout.write(text)


# ---------------------------------------------------------------- stats

def cmd_stats(args) -> int:
    inv = _load_italian(args)
    path = _data_file(args.corpus, 'lamit_transcriptions.tsv')
    try:
        sentences = corpus.parse_corpus(path.read_text('utf-8'), inv)
        table = corpus.phoneme_frequencies(sentences, inv)
    except corpus.TranscriptionError as e:
        raise CliError(f'corpus: {e}', EXIT_VALIDATION) from None
    csv = corpus.frequency_csv(table)
    _write_output(args, csv)
    if args.out:
        rows = sorted(table.counts.items(), key=lambda kv: -kv[1])
        print(f'{"phoneme":>8} {"arpabet":>8} {"count":>6} {"percent":>8}')
        for p, n in rows:
            print(f'{p.ipa:>8} {p.arpabet:>8} {n:6d} '
                  f'{table.percentages[p]:8.2f}')
        print(f'{"total":>8} {"":>8} {table.total:6d} {100.0:8.2f}')
    return EXIT_OK


# ----------------------------------------------------------------- lexi

def cmd_lexi(args) -> int:
    inv = _load_italian(args)
    lex = _load_lexicon(args, inv)
    path = Path(args.textgrid)
    if not path.exists():
        raise CliError(f'missing TextGrid: {path}')
    try:
        doc = parse_textgrid(path.read_bytes())
    except TextGridError as e:
        raise CliError(f'TextGrid: {e}') from None
    if not doc.has_tier('Word'):
        raise CliError('input has no Word tier', EXIT_RESOLUTION)
    sent = None
    if args.transcription:
        tpath = Path(args.transcription)
        if not tpath.exists():
            raise CliError(f'missing transcription: {tpath}')
        lines = [ln for ln in tpath.read_text('utf-8').splitlines()
                 if ln.strip() and not ln.startswith('#')]
        wanted = None
        for ln in lines:
            parsed = corpus.parse_transcription(ln, inv)
            if args.sentence is None or parsed.id == args.sentence:
                wanted = parsed
                break
        if wanted is None:
            raise CliError(f'sentence {args.sentence} not found',
                           EXIT_RESOLUTION)
        sent = wanted
    try:
        tier = annotation.generate_lexi_tier(doc.tier('Word'), lex, sent)
    except annotation.AnnotationError as e:
        raise CliError(str(e), EXIT_RESOLUTION) from None
    out_doc = doc.with_tier(tier)
    text = serialize_textgrid(out_doc)
    if not args.out:
        raise CliError('--out is required for lexi')
    Path(args.out).write_text(text, encoding='utf-8')
    print(f'wrote {args.out} ({len(tier.labelled())} phoneme intervals)')
    return EXIT_OK


# ------------------------------------------------------------ landmarks

def cmd_landmarks(args) -> int:
    cfg = _load_config(args)
    path = Path(args.wav)
    if not path.exists():
        raise CliError(f'missing wav: {path}')
    try:
        audio = dsp.read_wav(path)
    except dsp.DspError as e:
        raise CliError(f'wav: {e}') from None
    seq = landmarks.detect_all(audio, cfg)
    csv = landmarks.landmarks_csv(seq)
    out = Path(args.out) if args.out else path.with_suffix('')
    csv_path = out.with_suffix('.csv')
    tg_path = out.with_suffix('.TextGrid')
    csv_path.write_text(csv, encoding='utf-8')
    tier = annotation.landmark_tier_from(seq.items)
    doc_dur = max(audio.duration, tier.t_end)
    from .textgrid import AnnotationDocument
    tg_path.write_text(
        serialize_textgrid(AnnotationDocument(doc_dur, [tier])),
        encoding='utf-8')
    print(f'wrote {csv_path} and {tg_path} ({len(seq.items)} landmarks)')
    return EXIT_OK


# ---------------------------------------------------------------- match

def _segments_from_args(args, cfg):
    source = Path(args.wav or args.landmarks)
    if not source.exists():
        raise CliError(f'missing input: {source}')
    if args.wav:
        audio = dsp.read_wav(source)
        seq = landmarks.detect_all(audio, cfg)
        params = dsp.parameter_frames(audio, cfg)
        return access.cues_to_bundles(seq, params, cfg)
    # landmark CSV: broad-class evidence only
    from .features import FeatureBundle, PLUS
    from .landmarks import Landmark, LandmarkKind, LandmarkSequence, Manner
    items = []
    for lineno, ln in enumerate(source.read_text('utf-8').splitlines()):
        if lineno == 0 or not ln.strip():
            continue
        t, kind, manner, strength = ln.split(',')
        items.append(Landmark(float(t), LandmarkKind(kind),
                              Manner(manner) if manner else None,
                              float(strength)))
    segments = []
    seq = LandmarkSequence(items)
    i = 0
    while i < len(items):
        lm = items[i]
        if lm.kind is LandmarkKind.VOWEL:
            segments.append(access.EstimatedSegment(
                (lm.time - 0.05, lm.time + 0.05),
                FeatureBundle({'vowel': PLUS}), (i,)))
            i += 1
        elif lm.kind is LandmarkKind.GLIDE:
            segments.append(access.EstimatedSegment(
                (lm.time - 0.05, lm.time + 0.05),
                FeatureBundle({'glide': PLUS}), (i,)))
            i += 1
        elif lm.kind is LandmarkKind.CLOSURE and i + 1 < len(items) and \
                items[i + 1].kind is LandmarkKind.RELEASE:
            bundle = FeatureBundle({'cons': PLUS})
            access._manner_features(items[i + 1].manner or lm.manner, bundle)
            segments.append(access.EstimatedSegment(
                (lm.time - 0.05, items[i + 1].time + 0.08), bundle,
                (i, i + 1)))
            i += 2
        else:
            bundle = FeatureBundle({'cons': PLUS})
            access._manner_features(lm.manner, bundle)
            segments.append(access.EstimatedSegment(
                (lm.time - 0.05, lm.time + 0.08), bundle, (i,)))
            i += 1
    return segments


def cmd_match(args) -> int:
    if bool(args.wav) == bool(args.landmarks):
        raise CliError('need exactly one of --wav or --landmarks')
    if args.topk < 1:
        raise CliError('--topk must be positive')
    cfg = _load_config(args)
    inv = _load_italian(args)
    lex = _load_lexicon(args, inv)
    path = Path(args.textgrid)
    if not path.exists():
        raise CliError(f'missing TextGrid: {path}')
    doc = parse_textgrid(path.read_bytes())
    if not doc.has_tier('Word'):
        raise CliError('input has no Word tier', EXIT_RESOLUTION)
    segments = _segments_from_args(args, cfg)
    weights = access.DistanceWeights.from_config(cfg)
    matches, orphans = access.match_in_word_intervals(
        doc, segments, lex, weights, args.topk)
    csv = access.matches_csv(matches)
    _write_output(args, csv)
    if orphans:
        sidecar = Path(args.out).with_suffix('.orphans.txt') if args.out \
            else None
        lines = [f'{seg.window[0]:.6f},{seg.window[1]:.6f}'
                 for seg in orphans]
        if sidecar:
            sidecar.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        print(f'warning: {len(orphans)} orphan segment(s) excluded',
              file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------- validate

def _independent_recount(text: str):
    """Character-level recount used as the corpus counting oracle."""
    import collections
    units = ['tsts', 'dzdz', 'tʃtʃ', 'dʒdʒ', 'ts', 'dz', 'tʃ', 'dʒ']
    gem2sing = {'ll': 'l', 'ʎʎ': 'ʎ', 'rr': 'r', 'nn': 'n', 'mm': 'm',
                'ɲɲ': 'ɲ', 'pp': 'p', 'bb': 'b', 'kk': 'k', 'gg': 'g',
                'tt': 't', 'dd': 'd', 'ff': 'f', 'vv': 'v', 'ss': 's',
                'ʃʃ': 'ʃ', 'tʃtʃ': 'tʃ', 'dʒdʒ': 'dʒ', 'tsts': 'ts',
                'dzdz': 'dz'}
    counts = collections.Counter()
    for ln in text.splitlines():
        if not ln.strip() or ln.startswith('#'):
            continue
        _, _, body = ln.partition('\t')
        for word in body.split():
            s = word.replace("'", '')
            toks = []
            i = 0
            while i < len(s):
                for u in units:
                    if s.startswith(u, i):
                        toks.append(u)
                        i += len(u)
                        break
                else:
                    toks.append(s[i])
                    i += 1
            merged = []
            for t in toks:
                if merged and merged[-1] == t and t not in 'aeiouɛɔjw':
                    merged[-1] = t + t
                else:
                    merged.append(t)
            if merged and merged[0] in gem2sing:
                merged[0] = gem2sing[merged[0]]
            counts.update(merged)
    return counts


def cmd_validate(args) -> int:
    results = []

    def suite(name, fn):
        try:
            detail = fn()
            results.append((name, True, detail))
        except Exception as e:     # report, do not crash
            results.append((name, False, str(e)))

    inv = _load_italian(args)

    def inventory_suite():
        singles = inv.singletons()
        for a, b in itertools.combinations(singles, 2):
            if not features.distinguishing_features(inv, a, b):
                raise AssertionError(f'{a.arpabet}/{b.arpabet} not distinct')
        sizes = {'vowel': 0, 'glide': 0, 'consonant': 0}
        for p in singles:
            sizes[p.major_class.value] += 1
        if (sizes['vowel'], sizes['glide'], sizes['consonant']) != (7, 2, 21):
            raise AssertionError(f'bad class partition {sizes}')
        for g in inv.geminates():
            if features.features_of(inv, g) != \
                    features.features_of(inv, g.singleton_base):
                raise AssertionError(f'{g.arpabet} differs from its base')
        return f'{len(singles)} singletons distinct, partition 7/2/21'

    def lexicon_suite():
        lex = _load_lexicon(args, inv)
        if len(lex) != 563:
            raise AssertionError(f'expected 563 entries, got {len(lex)}')
        for e in lex.entries.values():
            if sum(t.stressed for t in e.phonemes) > 1:
                raise AssertionError(f'{e.orthography}: multiple stresses')
        return '563 entries resolve, stress is unique'

    corpus_path = _data_file(getattr(args, 'corpus', None),
                             'lamit_transcriptions.tsv')
    corpus_text = corpus_path.read_text('utf-8')

    def corpus_suite():
        sentences = corpus.parse_corpus(corpus_text, inv)
        table = corpus.phoneme_frequencies(sentences, inv)
        oracle = _independent_recount(corpus_text)
        mine = {p.ipa: n for p, n in table.counts.items()}
        if mine != dict(oracle):
            diff = {k: (mine.get(k), oracle.get(k))
                    for k in set(mine) | set(oracle)
                    if mine.get(k) != oracle.get(k)}
            raise AssertionError(f'recount mismatch: {diff}')
        return f'{table.total} tokens match the independent recount'

    def frequency_suite():
        sentences = corpus.parse_corpus(corpus_text, inv)
        table = corpus.phoneme_frequencies(sentences, inv)
        ref_path = _data_file(None, 'reference_frequencies.tsv')
        worst = (0.0, '')
        for ln in ref_path.read_text('utf-8').splitlines():
            if ln.startswith('#') or ln.startswith('phoneme') or not ln:
                continue
            ipa, _, pct = ln.split('\t')
            have = table.percent(inv.phoneme(ipa))
            dev = abs(have - float(pct))
            if dev > worst[0]:
                worst = (dev, ipa)
            if dev > 0.15:
                raise AssertionError(
                    f'/{ipa}/ deviates {dev:.2f} points '
                    f'({have:.2f} vs {pct})')
        return f'50 phonemes within 0.15 points (worst {worst[0]:.2f} ' \
               f'on /{worst[1]}/)'

    suite('inventory-distinctness', inventory_suite)
    suite('lexicon-resolution', lexicon_suite)
    suite('corpus-counting-oracle', corpus_suite)
    suite('frequency-reproduction', frequency_suite)

    ok = True
    for name, passed, detail in results:
        print(f'{name}: {"PASS" if passed else "FAIL"} - {detail}')
        ok = ok and passed
    print(f'{sum(p for _, p, _ in results)}/{len(results)} suites passed')
    return EXIT_OK if ok else EXIT_VALIDATION


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='lamit',
        description='Landmark-based lexical access toolkit for Italian')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p, *, config=True):
        p.add_argument('--inventory', help='feature inventory file')
        p.add_argument('--lexicon', help='lexicon file')
        p.add_argument('--out', help='output path')
        if config:
            p.add_argument('--config', help='key=value analysis parameters')
            p.add_argument('--weights', help='key=value matcher weights')
        p.add_argument('--show-config', action='store_true',
                       help='print the effective configuration and exit')

    p = sub.add_parser('stats', help='phoneme frequency statistics')
    p.add_argument('--corpus', help='transcription file')
    common(p)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser('lexi', help='generate the predicted phoneme tier')
    p.add_argument('--textgrid', required=True)
    p.add_argument('--transcription', help='transcription file for '
                   'syntactic doubling')
    p.add_argument('--sentence', type=int, help='sentence id to use')
    common(p)
    p.set_defaults(fn=cmd_lexi)

    p = sub.add_parser('landmarks', help='detect landmarks in a wav file')
    p.add_argument('--wav', required=True)
    common(p)
    p.set_defaults(fn=cmd_landmarks)

    p = sub.add_parser('match', help='rank word candidates per interval')
    p.add_argument('--wav', help='audio input (full cue extraction)')
    p.add_argument('--landmarks', help='landmark CSV input (broad class '
                   'evidence only)')
    p.add_argument('--textgrid', required=True, help='Word tier TextGrid')
    p.add_argument('--topk', type=int, default=10)
    common(p)
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser('validate', help='run the shipped-data checks')
    p.add_argument('--corpus', help='transcription file')
    common(p)
    p.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        if getattr(args, 'show_config', False):
            print(render_config(_load_config(args)), end='')
            return EXIT_OK
        return args.fn(args)
    except CliError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.code
    except (features.InventoryError, lexicon.LexiconParseError,
            corpus.TranscriptionError, TextGridError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_VALIDATION
    except access.MatchError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())

"""Signal-analysis substrate: spectrograms, band energies, rate of rise, F0."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.io.wavfile

from .config import AnalysisConfig

DB_FLOOR = -120.0


class DspError(ValueError):
    pass


@dataclass
class AudioBuffer:
    samples: np.ndarray        # float, nominally within [-1, 1]
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise DspError('audio must be mono')
        if self.sample_rate < 16000:
            raise DspError(
                f'sample rate {self.sample_rate} Hz below the 16 kHz minimum')
        if not np.all(np.isfinite(self.samples)):
            raise DspError('audio contains non-finite samples')

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path) -> AudioBuffer:
    """RIFF PCM 16-bit or IEEE float-32, mono, >= 16 kHz."""
    rate, data = scipy.io.wavfile.read(path)
    if data.ndim != 1:
        raise DspError(f'{path}: expected mono audio, got {data.shape[1]} '
                       'channels')
    if data.dtype == np.int16:
        samples = data / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise DspError(f'{path}: unsupported sample format {data.dtype}')
    return AudioBuffer(samples, int(rate))


def write_wav(path, audio: AudioBuffer):
    scipy.io.wavfile.write(path, audio.sample_rate,
                           audio.samples.astype(np.float32))


@dataclass
class Spectrogram:
    frames: np.ndarray         # (n_frames, n_bins) log magnitude, dB
    frame_step: float
    frame_length: float
    freq_resolution: float
    t0: float                  # centre time of frame 0

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def times(self) -> np.ndarray:
        return self.t0 + self.frame_step * np.arange(self.n_frames)

    @property
    def nyquist(self) -> float:
        return self.freq_resolution * (self.frames.shape[1] - 1)


def compute_spectrogram(audio: AudioBuffer, frame_length: float = 0.025,
                        frame_step: float = 0.005) -> Spectrogram:
    """Hann-windowed magnitude spectrogram in dB, floored at -120 dB."""
    if not frame_length >= frame_step > 0:
        raise DspError('need frame_length >= frame_step > 0')
    if len(audio.samples) == 0:
        raise DspError('empty audio')
    sr = audio.sample_rate
    nwin = int(round(frame_length * sr))
    step = int(round(frame_step * sr))
    if nwin > len(audio.samples):
        raise DspError('frame length exceeds signal duration')
    n_frames = (len(audio.samples) - nwin) // step + 1
    window = np.hanning(nwin)
    idx = np.arange(nwin)[None, :] + step * np.arange(n_frames)[:, None]
    mag = np.abs(np.fft.rfft(audio.samples[idx] * window, axis=1))
    db = 20.0 * np.log10(np.maximum(mag, 10 ** (DB_FLOOR / 20.0)))
    return Spectrogram(db, frame_step, frame_length, sr / nwin,
                       t0=frame_length / 2)


@dataclass
class BandEnergyTracks:
    bands: list[tuple[float, float]]
    energy: np.ndarray         # (n_bands, n_frames) dB
    times: np.ndarray
    frame_step: float = field(default=0.0)

    def track(self, i: int) -> np.ndarray:
        return self.energy[i]


def band_energies(spec: Spectrogram,
                  bands: list[tuple[float, float]]) -> BandEnergyTracks:
    """Per-frame energy of each band: bin powers summed, then to dB."""
    nyq = spec.nyquist
    for lo, hi in bands:
        if not 0 <= lo < hi:
            raise DspError(f'degenerate band ({lo}, {hi})')
        if hi > nyq + 1e-9:
            raise DspError(f'band ({lo}, {hi}) beyond Nyquist {nyq:.0f} Hz')
    power = 10.0 ** (spec.frames / 10.0)
    freqs = spec.freq_resolution * np.arange(spec.frames.shape[1])
    rows = []
    for lo, hi in bands:
        mask = (freqs >= lo) & (freqs <= hi)
        if not mask.any():
            raise DspError(f'band ({lo}, {hi}) contains no bins')
        rows.append(10.0 * np.log10(np.maximum(power[:, mask].sum(axis=1),
                                               10 ** (DB_FLOOR / 10.0))))
    return BandEnergyTracks(list(bands), np.vstack(rows), spec.times(),
                            spec.frame_step)


def rate_of_rise(track: np.ndarray, window: float,
                 frame_step: float) -> np.ndarray:
    """Centered difference of the smoothed track, in dB/s.

    `window` is the moving-average smoothing span; edges are zero-padded
    so the output length equals the input length.
    """
    track = np.asarray(track, dtype=np.float64)
    n = int(round(window / frame_step))
    if n < 2:
        raise DspError(f'window {window}s shorter than two frame steps')
    if n % 2 == 0:
        n += 1
    if len(track) < 3:
        return np.zeros_like(track)
    kernel = np.ones(n) / n
    pad = np.pad(track, n // 2, mode='edge')
    smooth = np.convolve(pad, kernel, mode='valid')
    out = np.zeros_like(track)
    out[1:-1] = (smooth[2:] - smooth[:-2]) / (2.0 * frame_step)
    return out


def estimate_f0(audio: AudioBuffer, times: np.ndarray,
                cfg: AnalysisConfig | None = None) -> np.ndarray:
    """Autocorrelation F0 per frame; NaN where unvoiced."""
    cfg = cfg or AnalysisConfig()
    sr = audio.sample_rate
    nwin = int(round(cfg.f0_frame_length * sr))
    lag_min = int(sr / cfg.f0_max)
    lag_max = min(int(np.ceil(sr / cfg.f0_min)), nwin - 2)
    x = audio.samples
    out = np.full(len(times), np.nan)
    for i, t in enumerate(np.asarray(times)):
        start = int(round(t * sr)) - nwin // 2
        start = max(0, min(start, len(x) - nwin))
        if len(x) < nwin:
            break
        frame = x[start:start + nwin]
        frame = frame - frame.mean()
        e0 = float(np.dot(frame, frame))
        if e0 < 1e-12:
            continue
        ac = np.correlate(frame, frame, mode='full')[nwin - 1:]
        ac = ac / e0
        seg = ac[lag_min:lag_max + 1]
        if len(seg) < 3:
            continue
        best = float(seg.max())
        if best < cfg.f0_voicing_threshold:
            continue
        # earliest near-maximal lag, to avoid subharmonic octave errors
        k = int(np.argmax(seg >= 0.9 * best))
        lag = lag_min + k
        # parabolic interpolation around the peak
        if 0 < k < len(seg) - 1:
            a, b, c = seg[k - 1], seg[k], seg[k + 1]
            denom = a - 2 * b + c
            if abs(denom) > 1e-12:
                lag = lag + 0.5 * (a - c) / denom
        f0 = sr / lag
        if cfg.f0_min <= f0 <= cfg.f0_max:
            out[i] = f0
    return out


def spectral_tilt(tracks: BandEnergyTracks,
                  band_idx: tuple[int, ...] = (1, 2, 3)) -> np.ndarray:
    """Least-squares spectral slope in dB/octave over the given bands."""
    centers = np.array([0.5 * (tracks.bands[i][0] + tracks.bands[i][1])
                        for i in band_idx])
    x = np.log2(centers)
    x = x - x.mean()
    y = tracks.energy[list(band_idx), :]
    return (x @ (y - y.mean(axis=0))) / float(x @ x)


@dataclass
class ParameterFrame:
    time: float
    low_band_db: float
    mid_band_db: float
    high_band_db: float
    f1_proxy_db: float
    f0: float | None           # Hz, None when unvoiced
    spectral_tilt: float       # mid minus low, dB
    flags: dict = field(default_factory=dict)


@dataclass
class ParameterTrack:
    frames: list[ParameterFrame]
    tracks: BandEnergyTracks

    def at(self, t: float) -> ParameterFrame:
        times = self.tracks.times
        i = int(np.clip(np.searchsorted(times, t), 0, len(self.frames) - 1))
        if i > 0 and abs(times[i - 1] - t) < abs(times[i] - t):
            i -= 1
        return self.frames[i]

    def window(self, t0: float, t1: float) -> list[ParameterFrame]:
        return [f for f in self.frames if t0 <= f.time <= t1]


STANDARD_BANDS = ('low_band', 'f1_band', 'mid_band', 'high_band')


def standard_tracks(audio: AudioBuffer,
                    cfg: AnalysisConfig | None = None) -> BandEnergyTracks:
    cfg = cfg or AnalysisConfig()
    spec = compute_spectrogram(audio, cfg.frame_length, cfg.frame_step)
    nyq = spec.nyquist
    bands = []
    for name in STANDARD_BANDS:
        lo, hi = getattr(cfg, name)
        bands.append((lo, min(hi, nyq)))
    return band_energies(spec, bands)


def parameter_frames(audio: AudioBuffer,
                     cfg: AnalysisConfig | None = None) -> ParameterTrack:
    """Per-frame acoustic parameters used for cue extraction.

    The flags field records which of the measurable parameter groups are
    informative at each frame: vocalic posture and glottal state (1, 4,
    5), rapid articulator movement (3), frication place (6), pressurised
    glottis (7), murmur (2, 8); group 10 is the landmark timing itself.
    """
    cfg = cfg or AnalysisConfig()
    tracks = standard_tracks(audio, cfg)
    low, f1, mid, high = tracks.energy
    f0 = estimate_f0(audio, tracks.times, cfg)
    ror_low = rate_of_rise(low, cfg.ror_window, tracks.frame_step)
    ror_high = rate_of_rise(high, cfg.ror_window, tracks.frame_step)
    tilts = spectral_tilt(tracks)
    peak = float(low.max())
    frames = []
    for i, t in enumerate(tracks.times):
        voiced = not np.isnan(f0[i])
        vocalic = voiced and low[i] >= peak - cfg.gate_db
        tilt = float(tilts[i])
        frames.append(ParameterFrame(
            time=float(t), low_band_db=float(low[i]),
            mid_band_db=float(mid[i]), high_band_db=float(high[i]),
            f1_proxy_db=float(f1[i]),
            f0=float(f0[i]) if voiced else None,
            spectral_tilt=float(tilt),
            flags={
                1: vocalic, 2: vocalic and tilt < cfg.back_tilt_db,
                3: abs(ror_low[i]) >= cfg.ror_threshold
                   or abs(ror_high[i]) >= cfg.ror_threshold,
                4: voiced, 5: vocalic,
                6: high[i] > low[i], 7: not voiced and high[i] > peak - cfg.gate_db,
                8: voiced and high[i] < low[i] - 30.0,
                10: True,
            }))
    return ParameterTrack(frames, tracks)

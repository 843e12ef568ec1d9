"""Analysis parameters with file overrides (key = value format)."""
from __future__ import annotations

from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    pass


@dataclass
class AnalysisConfig:
    # front-end framing
    frame_length: float = 0.025
    frame_step: float = 0.005
    # analysis bands (Hz); the f1 band proxies first-formant strength
    low_band: tuple[float, float] = (0.0, 400.0)
    f1_band: tuple[float, float] = (300.0, 900.0)
    mid_band: tuple[float, float] = (800.0, 2500.0)
    high_band: tuple[float, float] = (2500.0, 8000.0)
    # rate-of-rise smoothing window (s)
    ror_window: float = 0.020
    # F0 tracking
    f0_frame_length: float = 0.040
    f0_min: float = 50.0
    f0_max: float = 500.0
    f0_voicing_threshold: float = 0.30
    # landmark detection thresholds
    vowel_prominence_db: float = 9.0       # P_v
    vowel_min_separation: float = 0.060    # D_v
    glide_dip_db: float = 6.0              # P_g
    glide_window: float = 0.150            # W_g
    ror_threshold: float = 300.0           # R_c, dB/s
    sonorant_window_db: float = 10.0       # S_son
    noise_min_duration: float = 0.030      # N_ms
    noise_dominance_db: float = 0.0        # high minus low band for frication
    merge_window: float = 0.015            # T_merge
    # utterance energy gate: active within gate_db of the peak
    gate_db: float = 60.0
    gate_min_duration: float = 0.100
    # cue-rule thresholds (articulator-bound feature stand-ins)
    open_vowel_db: float = -6.0      # f1 minus low band >= this -> [+low]
    close_vowel_db: float = -13.0    # f1 minus low band <= this -> [+high]
    back_tilt_db: float = -11.0      # spectral tilt (dB/oct) <= this -> [+back]
    strident_margin_db: float = 0.0
    # matcher weights
    w_free: float = 2.0
    w_bound: float = 1.0
    unspecified_cost: float = 0.25


_TUPLE_FIELDS = {'low_band', 'f1_band', 'mid_band', 'high_band'}


def parse_config_file(text: str, base: AnalysisConfig | None = None
                      ) -> AnalysisConfig:
    cfg = base or AnalysisConfig()
    known = {f.name for f in fields(AnalysisConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'line {lineno}: expected key = value')
        key, _, val = line.partition('=')
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f'line {lineno}: unknown parameter {key!r}')
        try:
            if key in _TUPLE_FIELDS:
                lo, hi = (float(x) for x in val.replace(',', ' ').split())
                setattr(cfg, key, (lo, hi))
            else:
                setattr(cfg, key, float(val))
        except ValueError:
            raise ConfigError(f'line {lineno}: bad value {val!r}') from None
    return cfg


def render_config(cfg: AnalysisConfig) -> str:
    lines = []
    for f in fields(AnalysisConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = f'{v[0]:g} {v[1]:g}'
        else:
            v = f'{v:g}'
        lines.append(f'{f.name} = {v}')
    return '\n'.join(lines) + '\n'

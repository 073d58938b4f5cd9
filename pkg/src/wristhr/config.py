"""Flat key=value configuration files and override handling.

Pipeline configs and synthetic-recording specs share one plain-text format:
one ``key = value`` pair per line, ``#`` comments, blank lines ignored.  Keys
may repeat only where documented (the ``tone`` key of a synth spec).  CLI
``--set key=value`` flags use the same keys and take precedence over the file.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from .adaptive import CascadeConfig
from .errors import ParameterError
from .pipeline import MODES, PipelineConfig
from .synth import SynthSpec, ToneSpec
from .tracker import TrackerParams


def parse_config_text(text: str, source: str = "<config>") -> list[tuple[str, str]]:
    """Parse key=value lines, preserving order and repeated keys."""
    pairs = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"{source}:{ln}: expected 'key = value', got {line!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def parse_config_file(path: str | Path) -> list[tuple[str, str]]:
    path = Path(path)
    return parse_config_text(path.read_text(), str(path))


def _bool(value: str) -> bool:
    v = value.lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ParameterError(f"expected a boolean, got {value!r}")


def _axes(value: str) -> tuple[str, ...]:
    return tuple(a.strip() for a in value.split(",") if a.strip())


# key -> (section, field, parser); sections: "" (pipeline), "cascade", "tracker"
_PIPELINE_KEYS = {
    "mode": ("", "mode", str.upper),
    "window_seconds": ("", "window_seconds", float),
    "shift_seconds": ("", "shift_seconds", float),
    "band_low": ("", None, float),
    "band_high": ("", None, float),
    "n_fft": ("", "n_fft", int),
    "epsilon": ("", "epsilon", float),
    "ssa_window": ("", "ssa_window", int),
    "ssa_mass": ("", "ssa_mass", float),
    "ssa_group_tol_bins": ("", "ssa_group_tol_bins", float),
    "ssa_guard_bpm": ("", "ssa_guard_bpm", float),
    "signed_fusion": ("", "signed_fusion", _bool),
    "algo": ("cascade", "algo", str.lower),
    "filter_length": ("cascade", "m", int),
    "forgetting": ("cascade", "lam", float),
    "p_init": ("cascade", "p_init", float),
    "mu": ("cascade", "mu", float),
    "stage_order": ("cascade", "stage_order", _axes),
    "delta_s": ("tracker", "delta_s", int),
    "alpha": ("tracker", "alpha", float),
    "beta": ("tracker", "beta", float),
    "gamma": ("tracker", "gamma", float),
    "lambda_inc": ("tracker", "lambda_inc", float),
    "lambda_dec": ("tracker", "lambda_dec", float),
}


def pipeline_config(
    pairs: list[tuple[str, str]] | dict[str, str] | None = None,
    base: PipelineConfig | None = None,
) -> PipelineConfig:
    """Apply key=value overrides on top of a base config (defaults if omitted)."""
    cfg = base or PipelineConfig()
    if not pairs:
        return cfg
    items = dict(pairs) if not isinstance(pairs, dict) else dict(pairs)

    top: dict = {}
    cascade: dict = {}
    tracker: dict = {}
    band = list(cfg.band)
    for key, raw in items.items():
        if key not in _PIPELINE_KEYS:
            raise ParameterError(f"unknown config key {key!r}")
        section, fieldname, parse = _PIPELINE_KEYS[key]
        try:
            value = parse(raw)
        except ParameterError:
            raise
        except ValueError:
            raise ParameterError(f"config key {key!r}: cannot parse {raw!r}")
        if key == "band_low":
            band[0] = value
        elif key == "band_high":
            band[1] = value
        elif section == "cascade":
            cascade[fieldname] = value
        elif section == "tracker":
            tracker[fieldname] = value
        else:
            top[fieldname] = value
    if tuple(band) != cfg.band:
        top["band"] = tuple(band)
    if cascade:
        top["cascade"] = replace(cfg.cascade, **cascade)
    if tracker:
        top["tracker"] = replace(cfg.tracker, **tracker)
    return replace(cfg, **top)


def parse_overrides(flags: list[str]) -> list[tuple[str, str]]:
    """Parse repeated --set KEY=VALUE flags."""
    pairs = []
    for flag in flags:
        key, sep, value = flag.partition("=")
        if not sep:
            raise ParameterError(f"--set expects KEY=VALUE, got {flag!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _heart_knots(value: str) -> tuple[tuple[float, float], ...]:
    # "0:70, 100:150" -> ((0, 70), (100, 150))
    knots = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        t, sep, bpm = part.partition(":")
        if not sep:
            raise ParameterError(f"heart_bpm knot must be time:bpm, got {part!r}")
        knots.append((float(t), float(bpm)))
    return tuple(knots)


def _tone(value: str) -> ToneSpec:
    # "freq=1.8 amp=0.6 axes=x,y fir=0.8,0.4"
    fields: dict[str, str] = {}
    for token in value.split():
        key, sep, val = token.partition("=")
        if not sep:
            raise ParameterError(f"tone field must be key=value, got {token!r}")
        fields[key] = val
    unknown = set(fields) - {"freq", "amp", "axes", "fir"}
    if unknown:
        raise ParameterError(f"unknown tone fields {sorted(unknown)}")
    for req in ("freq", "amp"):
        if req not in fields:
            raise ParameterError(f"tone is missing required field {req!r}")
    return ToneSpec(
        freq_hz=float(fields["freq"]),
        amplitude=float(fields["amp"]),
        axes=_axes(fields.get("axes", "x")),
        fir=tuple(float(v) for v in fields.get("fir", "1").split(",")),
    )


_SYNTH_KEYS = {
    "duration_s": float,
    "fs": float,
    "heart_amplitude": float,
    "noise_std": float,
    "seed": int,
    "subject_id": str,
    "window_seconds": float,
    "shift_seconds": float,
    "heart_bpm": _heart_knots,
}


def synth_spec(pairs: list[tuple[str, str]]) -> SynthSpec:
    """Build a synthetic-recording spec from parsed key=value pairs."""
    kwargs: dict = {}
    tones: list[ToneSpec] = []
    for key, raw in pairs:
        if key == "tone":
            tones.append(_tone(raw))
        elif key in _SYNTH_KEYS:
            try:
                kwargs[key] = _SYNTH_KEYS[key](raw)
            except ParameterError:
                raise
            except ValueError:
                raise ParameterError(f"synth key {key!r}: cannot parse {raw!r}")
        else:
            raise ParameterError(f"unknown synth spec key {key!r}")
    return SynthSpec(tones=tuple(tones), **kwargs)

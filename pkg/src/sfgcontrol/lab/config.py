"""Experiment configuration: JSON in, normalized dataclasses out.

Physical quantities carry their unit in the key name.  Frequency-like
quantities accept either ``<name>_nm`` or ``<name>_rad_per_fs`` (never both);
wavelength widths are converted at the wavelength where that quantity lives:
the pump linewidth and detector resolution at the pump wavelength, the
squeezed-vacuum bandwidth and grid span at the degenerate wavelength.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field

from ..grid import angular_to_wavelength, fwhm_wavelength_to_angular, wavelength_to_angular
from ..shaper import descriptor_from_dict

SOURCE_KINDS = ("coherent", "squeezed", "uncorrelated")
EXPERIMENTS = ("spectrum", "delay_scan", "theta_scan", "ratio_sweep")
PROFILES = ("flat", "gaussian")
LINESHAPES = ("gaussian", "lorentzian")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str, line: int | None = None):
        self.field = field_name
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"{field_name}: {message}{where}")


@dataclass(frozen=True)
class SourceConfig:
    kind: str
    pump_freq: float
    bandwidth: float
    photons: float
    profile: str = "flat"
    pump_linewidth: float = 0.0
    pump_lineshape: str = "lorentzian"
    envelope_jitter: float = 0.0
    carrier_scaling: bool = False


@dataclass(frozen=True)
class GridConfig:
    n_modes: int
    half_span: float


@dataclass(frozen=True)
class DetectorConfig:
    fwhm: float
    lineshape: str = "gaussian"


@dataclass(frozen=True)
class MaskConfig:
    descriptor: dict = field(default_factory=lambda: {"kind": "zero"})
    pixels: int | None = None


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    shots: int = 2000
    master_seed: int = 0
    stochastic: bool = False
    tau: tuple = ()
    theta: tuple = ()
    alpha: float | str = "auto"
    beta: float | str = "auto"
    photons: tuple = ()
    bandwidth_ratio: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig
    grid: GridConfig
    mask: MaskConfig
    detector: DetectorConfig
    run: RunConfig

    def to_dict(self) -> dict:
        """Normalized document in native units; parses back to an equal config."""
        s, g, d, r = self.source, self.grid, self.detector, self.run
        run = {"experiment": r.experiment, "shots": r.shots, "master_seed": r.master_seed,
               "stochastic": r.stochastic}
        if r.tau:
            run["tau_fs"] = list(r.tau)
        if r.theta:
            run["theta_rad"] = list(r.theta)
        if r.experiment == "theta_scan":
            run["alpha_rad"] = r.alpha
            run["beta_fs"] = r.beta
        if r.photons:
            run["photons"] = list(r.photons)
        if r.bandwidth_ratio:
            run["bandwidth_ratio"] = list(r.bandwidth_ratio)
        mask = dict(self.mask.descriptor)
        if self.mask.pixels is not None:
            mask["pixels"] = self.mask.pixels
        return {
            "source": {"kind": s.kind, "pump_freq_rad_per_fs": s.pump_freq,
                       "bandwidth_rad_per_fs": s.bandwidth, "photons": s.photons,
                       "profile": s.profile, "pump_linewidth_rad_per_fs": s.pump_linewidth,
                       "pump_lineshape": s.pump_lineshape, "envelope_jitter": s.envelope_jitter,
                       "carrier_scaling": s.carrier_scaling},
            "grid": {"n_modes": g.n_modes, "half_span_rad_per_fs": g.half_span},
            "mask": mask,
            "detector": {"fwhm_rad_per_fs": d.fwhm, "lineshape": d.lineshape},
            "run": run,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def pump_wavelength_nm(self) -> float:
        return angular_to_wavelength(self.source.pump_freq)


class _Reader:
    """Pulls typed values out of one config block, reporting errors by dotted name."""

    def __init__(self, text: str, block: str, data):
        self.text = text
        self.block = block
        if not isinstance(data, dict):
            raise ConfigError(block, "missing or not an object", _line_of(text, block))
        self.data = data

    def fail(self, key, message):
        raise ConfigError(f"{self.block}.{key}", message,
                          _line_of(self.text, key) or _line_of(self.text, self.block))

    def has(self, key):
        return key in self.data

    def number(self, key, default=None, minimum=None, strict=False):
        if key not in self.data:
            if default is None:
                self.fail(key, "required")
            return default
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(key, "must be a finite number")
        if minimum is not None and (v <= minimum if strict else v < minimum):
            self.fail(key, f"must be {'>' if strict else '>='} {minimum}")
        return float(v)

    def integer(self, key, default=None, minimum=None):
        if key not in self.data:
            if default is None:
                self.fail(key, "required")
            return default
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(key, "must be an integer")
        if minimum is not None and v < minimum:
            self.fail(key, f"must be >= {minimum}")
        return int(v)

    def choice(self, key, options, default=None):
        v = self.data.get(key, default)
        if v is None:
            self.fail(key, "required")
        if v not in options:
            self.fail(key, f"must be one of {list(options)}")
        return v

    def flag(self, key, default=False):
        v = self.data.get(key, default)
        if not isinstance(v, bool):
            self.fail(key, "must be true or false")
        return v

    def number_list(self, key):
        v = self.data.get(key)
        if not isinstance(v, list) or not v:
            self.fail(key, "must be a nonempty list of numbers")
        for x in v:
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                self.fail(key, "must be a nonempty list of numbers")
        return tuple(float(x) for x in v)

    def frequency(self, name, center_nm=None, default=None, minimum=0.0, strict=False):
        """Read ``name_rad_per_fs`` or ``name_nm`` (a width converted at center_nm)."""
        native, nm = f"{name}_rad_per_fs", f"{name}_nm"
        if native in self.data and nm in self.data:
            self.fail(name, f"give only one of {native!r} and {nm!r}")
        if native in self.data:
            return self.number(native, minimum=minimum, strict=strict)
        if nm in self.data:
            v = self.number(nm, minimum=minimum, strict=strict)
            return fwhm_wavelength_to_angular(center_nm, v)
        if default is None:
            self.fail(name, f"required (as {native!r} or {nm!r})")
        return default


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _mask(text: str, data) -> MaskConfig:
    if data is None:
        return MaskConfig()
    rd = _Reader(text, "mask", data)
    pixels = rd.integer("pixels", minimum=1) if rd.has("pixels") else None
    desc = {k: v for k, v in data.items() if k != "pixels"}
    desc.setdefault("kind", "zero")
    try:
        descriptor_from_dict(desc)
    except (KeyError, ValueError, TypeError) as exc:
        rd.fail(str(exc).strip("'"), "invalid mask parameters")
    return MaskConfig(_normalize_descriptor(desc), pixels)


def _normalize_descriptor(desc: dict) -> dict:
    return descriptor_from_dict(desc).to_dict()


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment config."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be an object", 1)

    src = _Reader(text, "source", doc.get("source"))
    kind = src.choice("kind", SOURCE_KINDS)
    if src.has("pump_wavelength_nm") and src.has("pump_freq_rad_per_fs"):
        src.fail("pump", "give only one of pump_wavelength_nm and pump_freq_rad_per_fs")
    if src.has("pump_wavelength_nm"):
        pump_freq = wavelength_to_angular(src.number("pump_wavelength_nm", minimum=0, strict=True))
    else:
        pump_freq = src.number("pump_freq_rad_per_fs", minimum=0, strict=True)
    pump_nm = angular_to_wavelength(pump_freq)
    bandwidth = src.frequency("bandwidth", 2.0 * pump_nm, minimum=0.0, strict=True)
    source = SourceConfig(
        kind=kind, pump_freq=pump_freq, bandwidth=bandwidth,
        photons=src.number("photons", minimum=0.0, strict=True),
        profile=src.choice("profile", PROFILES, "flat"),
        pump_linewidth=src.frequency("pump_linewidth", pump_nm, default=0.0),
        pump_lineshape=src.choice("pump_lineshape", LINESHAPES, "lorentzian"),
        envelope_jitter=src.number("envelope_jitter", 0.0, minimum=0.0),
        carrier_scaling=src.flag("carrier_scaling"),
    )

    grd = _Reader(text, "grid", doc.get("grid", {}))
    n_modes = grd.integer("n_modes", 1024, minimum=4)
    if n_modes % 2:
        grd.fail("n_modes", "must be even")
    half_span = grd.frequency("half_span", 2.0 * pump_nm, default=0.6 * bandwidth,
                              minimum=0.0, strict=True)
    if not pump_freq / 2.0 - half_span > 0:
        grd.fail("half_span", "grid would reach nonpositive frequencies")
    grid = GridConfig(n_modes, half_span)

    det = _Reader(text, "detector", doc.get("detector"))
    detector = DetectorConfig(det.frequency("fwhm", pump_nm, minimum=0.0),
                              det.choice("lineshape", LINESHAPES, "gaussian"))

    mask = _mask(text, doc.get("mask"))

    rn = _Reader(text, "run", doc.get("run"))
    exp = rn.choice("experiment", EXPERIMENTS)
    kw = dict(experiment=exp, shots=rn.integer("shots", 2000, minimum=1),
              master_seed=rn.integer("master_seed", 0, minimum=0),
              stochastic=rn.flag("stochastic"))
    if exp == "delay_scan":
        kw["tau"] = rn.number_list("tau_fs")
    elif exp == "theta_scan":
        kw["theta"] = rn.number_list("theta_rad")
        for key, name in (("alpha_rad", "alpha"), ("beta_fs", "beta")):
            v = rn.data.get(key, "auto")
            kw[name] = v if v == "auto" else rn.number(key)
    elif exp == "ratio_sweep":
        kw["photons"] = rn.number_list("photons")
        kw["bandwidth_ratio"] = rn.number_list("bandwidth_ratio")
    if kind == "uncorrelated" and exp != "spectrum":
        rn.fail("experiment", "the uncorrelated control source only supports 'spectrum'")
    if kind == "coherent" and kw["stochastic"]:
        rn.fail("stochastic", "coherent sources have no stochastic path")
    return ExperimentConfig(source, grid, mask, detector, RunConfig(**kw))


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def reference_defaults(experiment: str = "spectrum", **run) -> dict:
    """Config document mirroring the published setup (532 nm pump, 60 nm band, 0.03 nm resolution)."""
    doc = {
        "source": {"kind": "squeezed", "pump_wavelength_nm": 532.0, "pump_linewidth_nm": 0.01,
                   "pump_lineshape": "lorentzian", "bandwidth_nm": 60.0, "profile": "flat",
                   "photons": 10.0},
        "grid": {"n_modes": 1024},
        "mask": {"kind": "zero"},
        "detector": {"fwhm_nm": 0.03, "lineshape": "gaussian"},
        "run": {"experiment": experiment, "shots": 2000, "master_seed": 1},
    }
    doc["run"].update(run)
    return doc


def with_overrides(cfg: ExperimentConfig, **run) -> ExperimentConfig:
    d = asdict(cfg.run)
    d.update(run)
    return ExperimentConfig(cfg.source, cfg.grid, cfg.mask, cfg.detector, RunConfig(**d))

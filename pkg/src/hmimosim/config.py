# Scenario parameterization: every constant of the simulated networks lives here.

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from enum import Enum

NOISE_PSD_DBM_PER_HZ = -174.0
MIN_LINK_DISTANCE_M = 1.0  # UE-to-node distances are clamped to avoid path-loss singularities

ENV_PREFIX = "HMIMOSIM_"


class Paradigm(str, Enum):
    CELLULAR = "cellular"
    CELL_FREE = "cell-free"
    HETERO = "hetero"


class PowerControlMode(str, Enum):
    FULL_EQUAL = "full-equal"
    MAXMIN = "maxmin"


class EstimatorNormalization(str, Enum):
    PAPER_VERBATIM = "paper-verbatim"
    STANDARD_MMSE = "standard-mmse"


class EapPlacement(str, Enum):
    UNIFORM = "uniform"
    EDGE_BAND = "edge-band"


@dataclass(frozen=True)
class PathLossParams:
    """Three-slope path loss: constant below d0, 20 dB/decade to d1, 35 dB/decade beyond.

    L_ref is the far-slope reference loss in dB at 1 km; d0/d1 are the
    breakpoints in meters. The segments are continuous at both breakpoints.
    """

    L_ref: float = 140.7
    d0: float = 10.0
    d1: float = 50.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameterization of one experiment.

    Immutable after construction; safe to share read-only across workers.
    Powers are in watts, distances in meters, angles in radians.
    """

    paradigm: Paradigm
    num_cells: int                  # cellular/hetero only; 0 for cell-free
    area_side: float                # coverage square edge
    cbs_antennas: int               # per cBS (hetero) or per BS (cellular); 0 for cell-free
    eap_count: int                  # per cell (hetero) or total APs (cell-free); 0 for cellular
    eap_antennas: int
    users_total: int
    users_per_cell: int             # users_total / num_cells; equals users_total for cell-free
    coherence_block: int            # channel uses per coherence block
    pilot_length: int               # channel uses spent on pilots
    ue_power: float                 # per-UE uplink power constraint
    dl_power: float                 # per-node downlink power budget
    noise_power: float              # receiver noise power in watts
    bandwidth: float
    noise_figure: float             # dB
    shadowing_std: float            # dB
    asd: float                      # angular standard deviation of local scattering
    pathloss: PathLossParams = field(default_factory=PathLossParams)
    power_control: PowerControlMode = PowerControlMode.FULL_EQUAL
    estimator_normalization: EstimatorNormalization = EstimatorNormalization.PAPER_VERBATIM
    epochs: int = 2000
    fading_draws_per_epoch: int = 10
    seed: int = 1
    # Behavioral switches documented in the module design notes.
    balanced_drop: bool = True          # redraw exactly users_per_cell users inside each cell square
    eap_placement: EapPlacement = EapPlacement.UNIFORM
    edge_band_width: float = 125.0      # outer-ring width for edge-band eAP placement
    dl_prelog: bool = False             # apply the pilot prelog to downlink SE as well
    ul_samples_per_draw: bool = False   # emit one UL sample per fading draw instead of the per-epoch average


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


class ConfigError(ValueError):
    """Raised when a scenario configuration cannot be parsed or fails validation."""


def thermal_noise_watts(bandwidth: float, noise_figure_db: float) -> float:
    """Receiver noise power for a -174 dBm/Hz floor plus the given noise figure."""
    dbm = NOISE_PSD_DBM_PER_HZ + 10.0 * math.log10(bandwidth) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _base_preset(**overrides) -> ScenarioConfig:
    base = dict(
        area_side=1000.0,
        users_total=32,
        coherence_block=200,
        pilot_length=8,
        ue_power=0.1,
        dl_power=0.2,
        bandwidth=5e6,
        noise_figure=9.0,
        noise_power=thermal_noise_watts(5e6, 9.0),
        shadowing_std=8.0,
        asd=math.radians(15.0),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def paradigm_preset(name: str) -> ScenarioConfig:
    """Return one of the four benchmark scenarios (512 service antennas, 32 users)."""
    key = _canonical_preset_name(name)
    if key == "cellular-512":
        return _base_preset(
            paradigm=Paradigm.CELLULAR, num_cells=4, cbs_antennas=128,
            eap_count=0, eap_antennas=4, users_per_cell=8,
        )
    if key == "cell-free-512":
        return _base_preset(
            paradigm=Paradigm.CELL_FREE, num_cells=0, cbs_antennas=0,
            eap_count=128, eap_antennas=4, users_per_cell=32,
        )
    if key == "hetero-quarter":
        return _base_preset(
            paradigm=Paradigm.HETERO, num_cells=4, cbs_antennas=32,
            eap_count=24, eap_antennas=4, users_per_cell=8,
        )
    if key == "hetero-half":
        return _base_preset(
            paradigm=Paradigm.HETERO, num_cells=4, cbs_antennas=64,
            eap_count=16, eap_antennas=4, users_per_cell=8,
        )
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


PRESET_NAMES = ("cellular-512", "cell-free-512", "hetero-quarter", "hetero-half")

_PRESET_ALIASES = {
    "cellular": "cellular-512",
    "cellular512": "cellular-512",
    "cellular-512": "cellular-512",
    "cellfree": "cell-free-512",
    "cell-free": "cell-free-512",
    "cellfree512": "cell-free-512",
    "cell-free-512": "cell-free-512",
    "heteroquarter": "hetero-quarter",
    "hetero-quarter": "hetero-quarter",
    "heterohalf": "hetero-half",
    "hetero-half": "hetero-half",
}


def _canonical_preset_name(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    key = _PRESET_ALIASES.get(key, key)
    if key not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return key


def _is_perfect_square(n: int) -> bool:
    if n < 1:
        return False
    r = math.isqrt(n)
    return r * r == n


def validate(config: ScenarioConfig) -> ValidationReport:
    """Check every scenario invariant; failures name the offending fields."""
    bad: list[str] = []

    def positive(name, value):
        if not value > 0:
            bad.append(f"{name}: must be strictly positive (got {value})")

    positive("area_side", config.area_side)
    positive("ue_power", config.ue_power)
    positive("dl_power", config.dl_power)
    positive("noise_power", config.noise_power)
    positive("bandwidth", config.bandwidth)
    positive("users_total", config.users_total)
    positive("coherence_block", config.coherence_block)
    positive("pilot_length", config.pilot_length)
    positive("fading_draws_per_epoch", config.fading_draws_per_epoch)
    if config.epochs < 0:
        bad.append(f"epochs: must be nonnegative (got {config.epochs})")
    if config.shadowing_std < 0:
        bad.append(f"shadowing_std: must be nonnegative (got {config.shadowing_std})")
    if not 0.0 < config.asd < math.pi / 2:
        bad.append(f"asd: must lie in (0, pi/2) (got {config.asd})")
    if not config.pathloss.d0 > 0:
        bad.append(f"pathloss.d0: must be strictly positive (got {config.pathloss.d0})")
    if not config.pathloss.d0 < config.pathloss.d1:
        bad.append("pathloss.d1: breakpoints must satisfy d0 < d1")
    if config.pilot_length >= config.coherence_block:
        bad.append("pilot_length: pilot_length < coherence_block violated")
    if config.edge_band_width <= 0:
        bad.append(f"edge_band_width: must be strictly positive (got {config.edge_band_width})")

    if config.paradigm is Paradigm.CELL_FREE:
        if config.cbs_antennas != 0:
            bad.append("cbs_antennas: cell-free paradigm has no central BS (must be 0)")
        if config.eap_count < 1:
            bad.append("eap_count: cell-free paradigm needs at least one AP")
        if config.eap_antennas < 1:
            bad.append("eap_antennas: must be at least 1")
        if config.users_per_cell != config.users_total:
            bad.append("users_per_cell: must equal users_total for cell-free")
        # Pilots are modeled as contamination-free even when pilot_length < users_total,
        # matching the estimator's orthogonal-pilot assumption; no bound is enforced here.
    else:
        if not _is_perfect_square(config.num_cells):
            bad.append(f"num_cells: must be a positive perfect square for a square cell grid (got {config.num_cells})")
        if config.cbs_antennas < 1:
            bad.append("cbs_antennas: cellular/hetero cells need a central array")
        if config.users_per_cell * max(config.num_cells, 1) != config.users_total:
            bad.append("users_per_cell: users_per_cell * num_cells != users_total")
        if config.pilot_length < config.users_per_cell:
            bad.append("pilot_length: pilot_length >= users_per_cell violated (pilots orthogonal within a cell)")
        if config.paradigm is Paradigm.CELLULAR and config.eap_count != 0:
            bad.append("eap_count: cellular paradigm has no distributed nodes (must be 0)")
        if config.paradigm is Paradigm.HETERO:
            if config.eap_count < 1:
                bad.append("eap_count: hetero paradigm needs at least one eAP per cell")
            if config.eap_antennas < 1:
                bad.append("eap_antennas: must be at least 1")

    return ValidationReport(passed=not bad, failures=tuple(bad))


def require_valid(config: ScenarioConfig) -> ScenarioConfig:
    report = validate(config)
    if not report:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(report.failures))
    return config


# --- serialization -----------------------------------------------------------

_ENUM_FIELDS = {
    "paradigm": Paradigm,
    "power_control": PowerControlMode,
    "estimator_normalization": EstimatorNormalization,
    "eap_placement": EapPlacement,
}


def config_to_dict(config: ScenarioConfig) -> dict:
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, Enum):
            value = value.value
        elif isinstance(value, PathLossParams):
            value = {"L_ref": value.L_ref, "d0": value.d0, "d1": value.d1}
        out[f.name] = value
    return out


def config_from_dict(data: dict) -> ScenarioConfig:
    data = dict(data)
    unknown = set(data) - {f.name for f in fields(ScenarioConfig)}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        for name, enum_cls in _ENUM_FIELDS.items():
            if name in data and not isinstance(data[name], enum_cls):
                data[name] = enum_cls(data[name])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(data.get("pathloss"), dict):
        data["pathloss"] = PathLossParams(**data["pathloss"])
    # Derivable fields may be omitted in files.
    if data.get("noise_power") is None and "bandwidth" in data and "noise_figure" in data:
        data["noise_power"] = thermal_noise_watts(data["bandwidth"], data["noise_figure"])
    if data.get("users_per_cell") is None and "users_total" in data:
        cells = data.get("num_cells", 0)
        data["users_per_cell"] = data["users_total"] // cells if cells else data["users_total"]
    try:
        return ScenarioConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def render_config(config: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    return config_from_dict(data)


def save_config(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_config(config))


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def apply_env_overrides(config: ScenarioConfig, environ=None, prefix: str = ENV_PREFIX) -> ScenarioConfig:
    """Override config fields from HMIMOSIM_* environment variables.

    Scalar fields map directly (HMIMOSIM_EPOCHS=500); path-loss parameters use
    HMIMOSIM_PATHLOSS_L_REF / _D0 / _D1.
    """
    environ = os.environ if environ is None else environ
    updates: dict = {}
    pl_updates: dict = {}
    field_map = {f.name.upper(): f for f in fields(ScenarioConfig)}
    for key, raw in environ.items():
        if not key.startswith(prefix):
            continue
        name = key[len(prefix):]
        if name.startswith("PATHLOSS_"):
            sub = name[len("PATHLOSS_"):].lower()
            sub = {"l_ref": "L_ref"}.get(sub, sub)
            if sub not in ("L_ref", "d0", "d1"):
                raise ConfigError(f"unknown path-loss key in {key}")
            pl_updates[sub] = float(raw)
            continue
        f = field_map.get(name)
        if f is None:
            raise ConfigError(f"unknown config key in environment variable {key}")
        updates[f.name] = _parse_field(f, raw)
    if pl_updates:
        current = config.pathloss
        updates["pathloss"] = PathLossParams(**{**{"L_ref": current.L_ref, "d0": current.d0, "d1": current.d1}, **pl_updates})
    return replace(config, **updates) if updates else config


def _parse_field(f, raw: str):
    if f.name in _ENUM_FIELDS:
        try:
            return _ENUM_FIELDS[f.name](raw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if f.type in ("int", int):
        return int(raw)
    if f.type in ("float", float):
        return float(raw)
    if f.type in ("bool", bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean from {raw!r}")
    raise ConfigError(f"field {f.name} cannot be set from the environment")

"""System-level StoB-phase estimates for CNN inference.

Each point of a layer's output tensor needs one stochastic-to-binary
conversion.  Conversions are scheduled layer by layer over the available
tiles; a tile performs `conversions_per_cycle` conversions every back-end
cycle (L/N BLgroups for the in-DRAM substrate, one converter instance per
tile for the pop-counter baselines, configurable).

Absolute tile counts are not part of the published comparison, so reports
are normalized: latency to (ParallelPC, Inception_V3) and EDP to
(AGNI, ShuffleNet_V2), plus geometric-mean advantage ratios.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .costmodel import BaselineConstants, cost_for
from .errors import ConfigError, FormatError

BACKENDS = ("AGNI", "ParallelPC", "SerialPC")

# Group size for system runs; at 512 bitlines/tile this leaves two parallel
# conversions per tile cycle.
DEFAULT_SYSTEM_N = 256
DEFAULT_TILES = 128

BUILTIN_MODELS = ("shufflenet_v2", "mobilenet_v2", "densenet121", "inception_v3")


@dataclass(frozen=True)
class CnnModelSpec:
    name: str
    layers: tuple  # of (layer name, output element count)

    def __post_init__(self):
        if not self.layers:
            raise FormatError(f"model {self.name!r} has no layers")
        if any(e <= 0 for _, e in self.layers):
            raise FormatError(f"model {self.name!r} has non-positive layer size")

    @property
    def total_elements(self) -> int:
        return sum(e for _, e in self.layers)


@dataclass(frozen=True)
class PimSystemConfig:
    backend: str
    tiles: int = DEFAULT_TILES
    l: int = 512
    n: int = DEFAULT_SYSTEM_N
    converters_per_tile: int | None = None  # baselines only; default 1
    constants: BaselineConstants | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}")
        if self.tiles <= 0 or self.l <= 0 or self.n <= 0 or self.l % self.n:
            raise ConfigError("need tiles > 0 and l a positive multiple of n")

    @property
    def conversions_per_tile_cycle(self) -> int:
        if self.backend == "AGNI":
            return self.l // self.n
        return self.converters_per_tile or 1

    def cost(self):
        return cost_for(self.backend, self.n, self.constants)

    @property
    def cycle_latency_ns(self) -> float:
        return self.cost().latency_ns

    @property
    def energy_per_conversion_j(self) -> float:
        return self.cost().energy_j


def parse_model(text: str, source: str = "<string>") -> CnnModelSpec:
    try:
        d = json.loads(text)
        layers = tuple((str(e["name"]), int(e["output_elements"])) for e in d["layers"])
        return CnnModelSpec(name=str(d["name"]), layers=layers)
    except FormatError:
        raise
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad model spec {source}: {exc}") from exc


def load_model(path) -> CnnModelSpec:
    path = Path(path)
    return parse_model(path.read_text(), source=str(path))


def builtin_model(name: str) -> CnnModelSpec:
    from importlib.resources import files

    if name not in BUILTIN_MODELS:
        raise ConfigError(f"unknown builtin model {name!r}; have {BUILTIN_MODELS}")
    text = files("agni.data").joinpath(f"{name}.json").read_text()
    return parse_model(text, source=f"builtin:{name}")


def load_models_dir(path) -> list[CnnModelSpec]:
    paths = sorted(Path(path).glob("*.json"))
    if not paths:
        raise FormatError(f"no model spec JSON files in {path}")
    return [load_model(p) for p in paths]


def stob_phase_latency(model: CnnModelSpec, sys: PimSystemConfig) -> float:
    """Total StoB-phase nanoseconds: per-layer cycles x back-end cycle time."""
    per_cycle = sys.tiles * sys.conversions_per_tile_cycle
    cycles = sum(-(-elements // per_cycle) for _, elements in model.layers)
    return cycles * sys.cycle_latency_ns


def stob_phase_energy(model: CnnModelSpec, sys: PimSystemConfig) -> float:
    return model.total_elements * sys.energy_per_conversion_j


def stob_phase_edp(model: CnnModelSpec, sys: PimSystemConfig) -> float:
    return stob_phase_latency(model, sys) * stob_phase_energy(model, sys)


def _gmean(values) -> float:
    values = list(values)
    return math.exp(sum(math.log(v) for v in values) / len(values))


@dataclass(frozen=True)
class SystemReport:
    models: tuple
    backends: tuple
    latency_ns: dict          # (backend, model) -> ns
    edp: dict                 # (backend, model) -> J*ns
    latency_normalized: dict  # anchor (ParallelPC, Inception_V3) = 1.0
    edp_normalized: dict      # anchor (AGNI, ShuffleNet_V2) = 1.0
    gmean_latency_advantage: dict  # baseline -> gmean(lat_baseline / lat_agni)
    gmean_edp_advantage: dict

    def to_dict(self) -> dict:
        def keyed(d):
            return {f"{b}/{m}": v for (b, m), v in d.items()}

        return {
            "models": list(self.models),
            "backends": list(self.backends),
            "latency_ns": keyed(self.latency_ns),
            "edp_j_ns": keyed(self.edp),
            "latency_normalized": keyed(self.latency_normalized),
            "edp_normalized": keyed(self.edp_normalized),
            "normalization": {
                "latency_anchor": "ParallelPC/Inception_V3 (or first backend/model)",
                "edp_anchor": "AGNI/ShuffleNet_V2 (or first backend/model)",
            },
            "gmean_latency_advantage": self.gmean_latency_advantage,
            "gmean_edp_advantage": self.gmean_edp_advantage,
        }


def _anchor(keys, preferred):
    return preferred if preferred in keys else keys[0]


def report(models, sys_variants) -> SystemReport:
    """Normalized latency / EDP tables plus geometric-mean advantages."""
    models = list(models)
    sys_variants = list(sys_variants)
    if not models or not sys_variants:
        raise ValueError("models and sys_variants must be non-empty")
    backends = [s.backend for s in sys_variants]
    if len(set(backends)) != len(backends):
        raise ConfigError("one system variant per backend")

    lat, edp = {}, {}
    for s in sys_variants:
        for m in models:
            lat[(s.backend, m.name)] = stob_phase_latency(m, s)
            edp[(s.backend, m.name)] = stob_phase_edp(m, s)

    model_names = [m.name for m in models]
    lat_b = _anchor(backends, "ParallelPC")
    lat_m = _anchor(model_names, "Inception_V3")
    edp_b = _anchor(backends, "AGNI")
    edp_m = _anchor(model_names, "ShuffleNet_V2")
    lat_norm = {k: v / lat[(lat_b, lat_m)] for k, v in lat.items()}
    edp_norm = {k: v / edp[(edp_b, edp_m)] for k, v in edp.items()}

    gmean_lat, gmean_edp = {}, {}
    if "AGNI" in backends:
        for b in backends:
            if b == "AGNI":
                continue
            gmean_lat[b] = _gmean(
                lat[(b, m)] / lat[("AGNI", m)] for m in model_names
            )
            gmean_edp[b] = _gmean(
                edp[(b, m)] / edp[("AGNI", m)] for m in model_names
            )

    return SystemReport(
        models=tuple(model_names),
        backends=tuple(backends),
        latency_ns=lat,
        edp=edp,
        latency_normalized=lat_norm,
        edp_normalized=edp_norm,
        gmean_latency_advantage=gmean_lat,
        gmean_edp_advantage=gmean_edp,
    )

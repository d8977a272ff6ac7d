"""Four-step conversion pipeline over one DRAM tile.

Replays a SignalSchedule into the analog model for each BLgroup:

    Step 1  row activation     operand bits latched into the SAs
    Step 2  stochastic->analog lane capacitor charged by the latched-1 SAs
    Step 3  analog->unary      SAs re-used as comparators against the ladder
    Step 4  unary->binary      priority encoder + latch

Latency always equals the schedule's total duration, independent of N.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import analog
from .analog import AnalogParams, AnalogState, ReferenceLadder
from .errors import ConfigError, RangeError, TraceUnavailableError
from .numformat import (
    BinaryWord,
    StochasticWord,
    UnaryWord,
    encoder_width,
    popcount,
    stob_oracle,
    to_unary,
)
from .schedule import Signal, SignalSchedule, default_schedule, signal_level

VALID_GROUP_SIZES = (4, 8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class TileConfig:
    n: int
    l: int = 512
    analog: AnalogParams = field(default_factory=analog.default_params)
    schedule: SignalSchedule = field(default_factory=default_schedule)
    trace_step_ns: float = 0.25

    def __post_init__(self):
        if self.n not in VALID_GROUP_SIZES:
            raise ConfigError(f"n must be one of {VALID_GROUP_SIZES}, got {self.n}")
        if self.l % self.n != 0:
            raise ConfigError(f"l={self.l} not divisible by n={self.n}")

    @property
    def groups_per_tile(self) -> int:
        return self.l // self.n

    @property
    def charge_window_ns(self) -> float:
        start, end = self.schedule.window(Signal.K1)
        return end - start

    def ladder(self) -> ReferenceLadder:
        v_max = analog.lane_voltage(self.analog, self.n, self.charge_window_ns)
        return ReferenceLadder(self.n, v_max)


@dataclass(frozen=True)
class WaveformTrace:
    """Sampled signal and voltage series over one conversion."""

    sample_step_ns: float
    times: np.ndarray
    series: dict[str, np.ndarray]
    annotations: tuple[tuple[float, str], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_ns", "series", "value"])
        for name in sorted(self.series):
            vals = self.series[name]
            for t, v in zip(self.times, vals):
                w.writerow([f"{t:.2f}", name, f"{v:.9g}"])
        for t, label in self.annotations:
            w.writerow([f"{t:.2f}", "annotation", label])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "sample_step_ns": self.sample_step_ns,
                "t_ns": [round(float(t), 6) for t in self.times],
                "series": {k: [float(v) for v in vs] for k, vs in sorted(self.series.items())},
                "annotations": [{"t_ns": t, "label": lbl} for t, lbl in self.annotations],
            }
        )


@dataclass(frozen=True)
class ConversionResult:
    input: StochasticWord
    lane_v_final: float
    unary: UnaryWord
    binary: BinaryWord
    oracle: BinaryWord
    latency_ns: float
    bubble_flag: bool
    saturated: bool
    trace: WaveformTrace | None = None

    def to_dict(self) -> dict:
        return {
            "input": self.input.render(),
            "n": self.input.n,
            "lane_v_final_v": self.lane_v_final,
            "unary": self.unary.render(),
            "binary": self.binary.value,
            "oracle": self.oracle.value,
            "latency_ns": self.latency_ns,
            "bubble_flag": self.bubble_flag,
            "saturated": self.saturated,
        }


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _noise_vector(params: AnalogParams, n: int, explicit, rng_box: list):
    """One length-n threshold-noise draw; rng is created lazily and reused."""
    if explicit is not None:
        if len(explicit) != n:
            raise ConfigError("noise vector length mismatch")
        return list(explicit)
    if params.noise_sigma_mv <= 0:
        return [0.0] * n
    if rng_box[0] is None:
        rng_box[0] = np.random.default_rng(params.rng_seed)
    return rng_box[0].normal(0.0, params.noise_sigma_mv * 1e-3, n)


def step1_activate(cfg: TileConfig, operand: StochasticWord,
                   noise=None, rng=None) -> AnalogState:
    """Read the operand into the SAs: precharge, cell share, sense, replenish."""
    if operand.n != cfg.n:
        raise ConfigError(f"operand length {operand.n} != configured n {cfg.n}")
    p = cfg.analog
    state = AnalogState.initial(operand.bits, p)
    state = analog.precharge(state, p.vdd / 2.0)  # SEL ON: V_REF = VDD/2
    state = analog.cell_share(state, p)
    state = analog.sense_amplify(state, p.vdd / 2.0, p,
                                 noise=noise, rng=rng, wl_on=True)
    _, wl_end = cfg.schedule.window(Signal.WL)
    state.t = wl_end
    return state


def step2_stoa(cfg: TileConfig, state: AnalogState) -> AnalogState:
    """Charge the lane from the latched-1 SAs for the K1 window."""
    k_on = sum(b for b in state.sa_latched if b)
    out = analog.lane_charge(state, cfg.analog, k_on, cfg.charge_window_ns)
    _, out.t = cfg.schedule.window(Signal.K1)
    return out


def step3_atou(cfg: TileConfig, state: AnalogState,
               noise=None, rng=None) -> AnalogState:
    """Re-precharge to the ladder taps (SEL OFF), share with the lane, sense."""
    taps = cfg.ladder().taps
    out = analog.precharge(state, taps)
    out = analog.lane_share(out, cfg.analog)
    out = analog.sense_amplify(out, taps, cfg.analog, noise=noise, rng=rng)
    rise = cfg.schedule.window(Signal.SENSE_N, 1)[0]
    out.t = rise
    return out


def _priority_encode(latched: list[int], n: int) -> tuple[int, bool]:
    """(highest set index + 1, bubble flag); what the N:log2(N) encoder sees."""
    count = 0
    for i, b in enumerate(latched):
        if b:
            count = i + 1
    bubble = sum(latched) != count
    return count, bubble


def step4_utob(cfg: TileConfig, state: AnalogState, operand: StochasticWord,
               trace: WaveformTrace | None = None) -> ConversionResult:
    """Priority-encode the latched pattern and latch the binary result."""
    width = encoder_width(cfg.n)
    count, bubble = _priority_encode([b or 0 for b in state.sa_latched], cfg.n)
    binary = BinaryWord(min(count, 2**width - 1), width)
    return ConversionResult(
        input=operand,
        lane_v_final=state.lane_v,
        unary=to_unary(count, cfg.n),
        binary=binary,
        oracle=stob_oracle(operand),
        latency_ns=cfg.schedule.total_duration,
        bubble_flag=bubble,
        saturated=popcount(operand) == cfg.n,
        trace=trace,
    )


def convert(cfg: TileConfig, operand: StochasticWord, seed=None,
            trace: bool = False, noise_step1=None, noise_step3=None
            ) -> ConversionResult:
    """Run all four steps for one operand under the configured schedule.

    `seed` (int or Generator) overrides the params seed for the noise
    draws; explicit noise vectors bypass the RNG entirely.
    """
    p = cfg.analog
    rng_box = [None]
    if seed is not None and p.noise_sigma_mv > 0:
        rng_box[0] = _as_generator(seed)
    n1 = _noise_vector(p, cfg.n, noise_step1, rng_box)
    state1 = step1_activate(cfg, operand, noise=n1)
    state2 = step2_stoa(cfg, state1)
    n3 = _noise_vector(p, cfg.n, noise_step3, rng_box)
    state3 = step3_atou(cfg, state2, noise=n3)
    wave = None
    if trace:
        wave = _build_trace(cfg, operand, state1, state2, state3)
    return step4_utob(cfg, state3, operand, trace=wave)


def spawn_seeds(base_seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences for per-group conversions."""
    return np.random.SeedSequence(base_seed).spawn(count)


def convert_tile(cfg: TileConfig, operands, seed=None) -> list[ConversionResult]:
    """Convert L/N operands in one parallel schedule replay.

    Results equal element-wise independent convert() calls driven by the
    same spawned per-group seeds; tile latency equals single-conversion
    latency.
    """
    operands = list(operands)
    if len(operands) != cfg.groups_per_tile:
        raise ConfigError(
            f"expected {cfg.groups_per_tile} operands (L/N), got {len(operands)}"
        )
    base = cfg.analog.rng_seed if seed is None else seed
    seqs = spawn_seeds(base, len(operands))
    return [
        convert(cfg, op, seed=np.random.default_rng(sq))
        for op, sq in zip(operands, seqs)
    ]


def emit_trace(result: ConversionResult) -> WaveformTrace:
    if result.trace is None:
        raise TraceUnavailableError("conversion was run without tracing enabled")
    return result.trace


# ---------------------------------------------------------------------------
# Vectorized path for large sweeps (exactly the same decision math as
# convert(); equivalence is asserted by tests).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatchResult:
    k: np.ndarray          # true ones-count per operand
    binary: np.ndarray     # converted value
    oracle: np.ndarray     # min(k, 2**width - 1)
    bubble: np.ndarray     # latched pattern violated the thermometer property
    saturated: np.ndarray  # all-ones operand (count outside encoder range)


def convert_batch(cfg: TileConfig, bits: np.ndarray, seed=None,
                  noise_step1=None, noise_step3=None) -> BatchResult:
    """Convert a (count, n) bit matrix; noise drawn per operand per bitline."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.shape[1] != cfg.n:
        raise ConfigError(f"bits must have shape (count, {cfg.n})")
    p = cfg.analog
    count = bits.shape[0]
    sigma_v = p.noise_sigma_mv * 1e-3
    if noise_step1 is None or noise_step3 is None:
        if sigma_v > 0:
            rng = _as_generator(p.rng_seed if seed is None else seed)
            if noise_step1 is None:
                noise_step1 = rng.normal(0.0, sigma_v, bits.shape)
            if noise_step3 is None:
                noise_step3 = rng.normal(0.0, sigma_v, bits.shape)
        else:
            zeros = np.zeros(bits.shape)
            noise_step1 = zeros if noise_step1 is None else noise_step1
            noise_step3 = zeros if noise_step3 is None else noise_step3

    rho = p.c_ratio_cell_bl
    half = p.vdd / 2.0
    bl1 = (half + rho * bits * p.vdd) / (1.0 + rho)
    latched1 = bl1 > half + noise_step1

    k_on = latched1.sum(axis=1)
    dur = cfg.charge_window_ns
    lane = np.where(
        k_on > 0,
        p.v_sat * (1.0 - np.exp(-k_on * dur / p.tau_eff_ns)),
        0.0,
    )

    taps = np.array(cfg.ladder().taps)
    r = p.c_ratio_lane_bl
    bl3 = (taps[None, :] + r * lane[:, None]) / (1.0 + r)
    latched3 = bl3 > taps[None, :] + noise_step3

    any_set = latched3.any(axis=1)
    highest = cfg.n - 1 - np.argmax(latched3[:, ::-1], axis=1)
    pe_count = np.where(any_set, highest + 1, 0)
    width = encoder_width(cfg.n)
    binary = np.minimum(pe_count, 2**width - 1)

    k = bits.sum(axis=1).astype(np.int64)
    return BatchResult(
        k=k,
        binary=binary.astype(np.int64),
        oracle=np.minimum(k, 2**width - 1),
        bubble=latched3.sum(axis=1) != pe_count,
        saturated=k == cfg.n,
    )


# ---------------------------------------------------------------------------
# Waveform synthesis
# ---------------------------------------------------------------------------

_TAU_PRECHARGE = 0.8   # ns, bitline settle toward a driven reference
_TAU_SHARE = 0.4       # ns, passive charge sharing
_TAU_SENSE = 0.6       # ns, SA regenerative swing

_GLITCH_LABELS = ("glitch 1", "glitch 2", "glitch 3")


def _approach(v_from: float, v_to: float, dt: float, tau: float) -> float:
    return v_to + (v_from - v_to) * math.exp(-dt / tau)


def _build_trace(cfg: TileConfig, operand: StochasticWord, state1: AnalogState,
                 state2: AnalogState, state3: AnalogState) -> WaveformTrace:
    sch = cfg.schedule
    p = cfg.analog
    n = cfg.n
    step = cfg.trace_step_ns
    times = np.arange(0.0, sch.total_duration + step / 2, step)

    eq1 = sch.window(Signal.EQ, 0)
    eq2 = sch.window(Signal.EQ, 1)
    wl = sch.window(Signal.WL, 0)
    sense1 = sch.window(Signal.SENSE_N, 0)[0]
    k1 = sch.window(Signal.K1, 0)
    b1 = sch.window(Signal.B1, 0)[0]
    sense2 = sch.window(Signal.SENSE_N, 1)[0]

    taps = cfg.ladder().taps
    # Per-phase settling targets reconstructed from the step outputs.
    bits = list(operand.bits)
    rho = p.c_ratio_cell_bl
    half = p.vdd / 2.0
    bl_shared = [(half + rho * (b * p.vdd)) / (1.0 + rho) for b in bits]
    full1 = list(state1.bitline_v)
    cell_init = [b * p.vdd for b in bits]
    k_on = sum(b for b in state1.sa_latched if b)
    lane_final = state2.lane_v
    r = p.c_ratio_lane_bl
    bl3_shared = [(taps[i] + r * lane_final) / (1.0 + r) for i in range(n)]
    full3 = list(state3.bitline_v)

    def lane_at(t: float) -> float:
        if t < k1[0] or k_on == 0:
            return 0.0
        dt = min(t, k1[1]) - k1[0]
        return p.v_sat * (1.0 - math.exp(-k_on * dt / p.tau_eff_ns))

    def bl_at(i: int, t: float) -> float:
        if t < eq1[0]:
            return 0.0
        if t < wl[0]:
            return _approach(0.0, half, t - eq1[0], _TAU_PRECHARGE)
        if t < sense1:
            v0 = _approach(0.0, half, wl[0] - eq1[0], _TAU_PRECHARGE)
            return _approach(v0, bl_shared[i], t - wl[0], _TAU_SHARE)
        if t < eq2[0]:
            return _approach(bl_shared[i], full1[i], t - sense1, _TAU_SENSE)
        if t < b1:
            return _approach(full1[i], taps[i], t - eq2[0], _TAU_PRECHARGE)
        if t < sense2:
            v0 = _approach(full1[i], taps[i], b1 - eq2[0], _TAU_PRECHARGE)
            return _approach(v0, bl3_shared[i], t - b1, _TAU_SHARE)
        return _approach(bl3_shared[i], full3[i], t - sense2, _TAU_SENSE)

    def cell_at(i: int, t: float) -> float:
        if t < wl[0]:
            return cell_init[i]
        if t < sense1:
            return _approach(cell_init[i], bl_shared[i], t - wl[0], _TAU_SHARE)
        if t < wl[1]:
            v0 = _approach(cell_init[i], bl_shared[i], sense1 - wl[0], _TAU_SHARE)
            return _approach(v0, full1[i], t - sense1, _TAU_SENSE)
        return full1[i]

    series: dict[str, np.ndarray] = {}
    for sig in Signal:
        series[sig.value] = np.array(
            [1.0 if signal_level(sch, sig, t) else 0.0 for t in times]
        )
    series["lane"] = np.array([lane_at(t) for t in times])
    for i in range(n):
        series[f"bl_{i}"] = np.array([bl_at(i, t) for t in times])
        series[f"cell_{i}"] = np.array([cell_at(i, t) for t in times])

    annotations = tuple(
        zip((eq1[1], wl[1], sch.total_duration), _GLITCH_LABELS)
    )
    return WaveformTrace(step, times, series, annotations)

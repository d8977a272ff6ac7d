"""First-order charge-sharing model for cells, bitlines, and the LANE capacitor.

The LANE capacitor charges as a single-pole exponential with the latched-1
sense amplifiers acting as k parallel drivers:

    v_lane(dt) = v_sat * (1 - exp(-k * dt / (tau_ns * c_ratio_lane_bl)))

Two parameter regimes matter:

* Conversion defaults (:func:`default_params`) sit deep in the linear part
  of that exponential, so the N lane levels are evenly spaced and the
  midpoint reference ladder decodes every ones-count exactly at sigma = 0.
* :func:`calibrate` fits (v_sat, tau) to measured V_MAX targets, where the
  exponential saturates strongly.  Those parameters reproduce the reported
  V_MAX values but are deliberately not used for conversion: a saturating
  lane response is incompatible with evenly spaced ladder taps.

Noise enters only at the comparator decision, as a Gaussian on the
sensing threshold.  Ties latch 0 (strict inequality), which is
deterministic and measure-zero under noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares

from .errors import CalibrationError, RangeError

# Measured maximum lane voltages (all-ones operand, 24 ns charge window).
MEASURED_VMAX_MV = {16: 630.0, 32: 715.0, 64: 735.0, 128: 755.0, 256: 785.0}
N4_VMAX_MV = 514.0

DEFAULT_CHARGE_WINDOW_NS = 24.0


@dataclass(frozen=True)
class AnalogParams:
    vdd: float = 1.2
    v_sat: float = 1.0
    tau_ns: float = 50.0
    c_ratio_cell_bl: float = 0.1
    c_ratio_lane_bl: float = 1000.0
    noise_sigma_mv: float = 0.0
    rng_seed: int = 2024

    def __post_init__(self):
        for name in ("vdd", "v_sat", "tau_ns", "c_ratio_cell_bl", "c_ratio_lane_bl"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.v_sat >= self.vdd:
            raise ValueError("v_sat must be below vdd")
        if self.noise_sigma_mv < 0:
            raise ValueError("noise_sigma_mv must be >= 0")

    @property
    def tau_eff_ns(self) -> float:
        """Effective single-driver charging constant, tau_ns * C_lane/C_bl."""
        return self.tau_ns * self.c_ratio_lane_bl

    def to_dict(self) -> dict:
        return {
            "vdd_v": self.vdd,
            "v_sat_v": self.v_sat,
            "tau_ns": self.tau_ns,
            "c_ratio_cell_bl": self.c_ratio_cell_bl,
            "c_ratio_lane_bl": self.c_ratio_lane_bl,
            "noise_sigma_mv": self.noise_sigma_mv,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalogParams":
        return cls(
            vdd=float(d.get("vdd_v", 1.2)),
            v_sat=float(d.get("v_sat_v", 1.0)),
            tau_ns=float(d.get("tau_ns", 50.0)),
            c_ratio_cell_bl=float(d.get("c_ratio_cell_bl", 0.1)),
            c_ratio_lane_bl=float(d.get("c_ratio_lane_bl", 1000.0)),
            noise_sigma_mv=float(d.get("noise_sigma_mv", 0.0)),
            rng_seed=int(d.get("rng_seed", 2024)),
        )


def default_params(**overrides) -> AnalogParams:
    """Linear-regime conversion parameters (see module docstring)."""
    return AnalogParams(**overrides)


@dataclass
class AnalogState:
    """Time-stamped voltages within one BLgroup."""

    t: float
    bitline_v: list[float]
    cell_v: list[float]
    lane_v: float = 0.0
    sa_latched: list[int | None] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.bitline_v)

    @classmethod
    def initial(cls, bits, params: AnalogParams) -> "AnalogState":
        """Cells store the operand (logic 1 = vdd); bitlines start discharged."""
        n = len(bits)
        return cls(
            t=0.0,
            bitline_v=[0.0] * n,
            cell_v=[params.vdd if b else 0.0 for b in bits],
            lane_v=0.0,
            sa_latched=[None] * n,
        )

    def copy(self) -> "AnalogState":
        return AnalogState(
            self.t, list(self.bitline_v), list(self.cell_v), self.lane_v,
            list(self.sa_latched),
        )


@dataclass(frozen=True)
class ReferenceLadder:
    """Per-bitline comparator references at midpoints (i + 0.5) * v_max / n."""

    n: int
    v_max: float
    taps: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.taps:
            object.__setattr__(
                self, "taps",
                tuple((i + 0.5) * self.v_max / self.n for i in range(self.n)),
            )
        if len(self.taps) != self.n:
            raise ValueError("taps length must equal n")
        if any(not 0 < v < self.v_max for v in self.taps[:-1]) or not (
            0 < self.taps[-1] <= self.v_max
        ):
            raise ValueError("taps must lie in (0, v_max]")
        if any(b <= a for a, b in zip(self.taps, self.taps[1:])):
            raise ValueError("taps must be strictly increasing")


def precharge(state: AnalogState, v_ref) -> AnalogState:
    """Set every bitline to its reference (scalar, or one value per bitline)."""
    out = state.copy()
    if isinstance(v_ref, (int, float)):
        out.bitline_v = [float(v_ref)] * out.n
    else:
        refs = list(v_ref)
        if len(refs) != out.n:
            raise ValueError("per-bitline reference count mismatch")
        out.bitline_v = [float(v) for v in refs]
    return out


def cell_share(state: AnalogState, params: AnalogParams) -> AnalogState:
    """Capacitive divider between each cell and its bitline (WL ON).

    Both nodes settle to the shared potential; the cell dip is restored
    later by sense_amplify while WL is still ON.
    """
    rho = params.c_ratio_cell_bl
    out = state.copy()
    for i in range(out.n):
        shared = (out.bitline_v[i] + rho * out.cell_v[i]) / (1.0 + rho)
        out.bitline_v[i] = shared
        out.cell_v[i] = shared
    return out


def sense_amplify(
    state: AnalogState,
    refs,
    params: AnalogParams,
    noise=None,
    rng: np.random.Generator | None = None,
    wl_on: bool = False,
) -> AnalogState:
    """Latch each bitline against its reference and swing it to full scale.

    bitline i latches 1 iff bitline_v[i] > refs[i] + eta_i, with
    eta_i ~ N(0, noise_sigma_mv).  Exact equality latches 0.
    """
    out = state.copy()
    refs = [float(refs)] * out.n if isinstance(refs, (int, float)) else list(refs)
    if len(refs) != out.n:
        raise ValueError("reference count mismatch")
    if noise is None:
        sigma_v = params.noise_sigma_mv * 1e-3
        if sigma_v > 0:
            gen = rng if rng is not None else np.random.default_rng(params.rng_seed)
            noise = gen.normal(0.0, sigma_v, out.n)
        else:
            noise = [0.0] * out.n
    for i in range(out.n):
        bit = 1 if out.bitline_v[i] > refs[i] + noise[i] else 0
        out.sa_latched[i] = bit
        out.bitline_v[i] = params.vdd if bit else 0.0
        if wl_on:
            out.cell_v[i] = out.bitline_v[i]
    return out


def lane_voltage(params: AnalogParams, k_on: int, duration_ns: float) -> float:
    """Lane voltage after k_on latched-1 SAs drive it for `duration_ns`."""
    if k_on < 0:
        raise RangeError("k_on must be >= 0")
    if k_on == 0:
        return 0.0
    return params.v_sat * (1.0 - math.exp(-k_on * duration_ns / params.tau_eff_ns))


def lane_charge(
    state: AnalogState, params: AnalogParams, k_on: int, duration_ns: float
) -> AnalogState:
    """Charge the LANE capacitor from k_on driving SAs (K1 ON window)."""
    if k_on > state.n:
        raise RangeError(f"k_on {k_on} exceeds group size {state.n}")
    out = state.copy()
    out.t += duration_ns
    if k_on > 0:
        out.lane_v = lane_voltage(params, k_on, duration_ns)
    return out


def lane_share(state: AnalogState, params: AnalogParams) -> AnalogState:
    """Mutual charge sharing between the lane and every bitline (B1 ON)."""
    r = params.c_ratio_lane_bl
    out = state.copy()
    out.bitline_v = [
        (bl + r * out.lane_v) / (1.0 + r) for bl in out.bitline_v
    ]
    return out


@dataclass(frozen=True)
class CalibrationResult:
    mode: str  # "global" or "per_n"
    params: AnalogParams | None
    per_n_params: dict[int, AnalogParams]
    residuals_pct: dict[int, float]
    duration_ns: float

    @property
    def max_abs_residual_pct(self) -> float:
        return max(abs(r) for r in self.residuals_pct.values())

    def params_for(self, n: int) -> AnalogParams:
        if self.mode == "global":
            return self.params
        return self.per_n_params[n]

    def vmax_mv(self, n: int) -> float:
        return 1e3 * lane_voltage(self.params_for(n), n, self.duration_ns)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "duration_ns": self.duration_ns,
            "params": self.params.to_dict() if self.params else None,
            "per_n_params": {str(n): p.to_dict() for n, p in self.per_n_params.items()},
            "residuals_pct": {str(n): r for n, r in self.residuals_pct.items()},
            "max_abs_residual_pct": self.max_abs_residual_pct,
        }


def _single_point_fit(n: int, target_v: float, base: AnalogParams) -> AnalogParams:
    """Exact fit of one (N, V_MAX) pair: pick v_sat above the target, solve tau."""
    v_sat = min(2.0 * target_v, 0.95 * base.vdd)
    if v_sat <= target_v:
        raise CalibrationError(
            f"target {target_v} V not reachable below vdd {base.vdd} V"
        )
    arg = 1.0 - target_v / v_sat
    tau_eff = -n * DEFAULT_CHARGE_WINDOW_NS / math.log(arg)
    return replace(base, v_sat=v_sat, tau_ns=tau_eff / base.c_ratio_lane_bl)


def calibrate(
    targets: dict[int, float],
    base: AnalogParams | None = None,
    mode: str = "auto",
    duration_ns: float = DEFAULT_CHARGE_WINDOW_NS,
    tolerance_pct: float = 10.0,
) -> CalibrationResult:
    """Fit (v_sat, tau) to V_MAX targets given in mV.

    mode="global" fits one parameter pair across all targets, "per_n" fits
    each row exactly, and "auto" tries global first and falls back to
    per-N when any global residual exceeds `tolerance_pct`.
    """
    if not targets:
        raise ValueError("targets must be non-empty")
    if any(v <= 0 for v in targets.values()):
        raise ValueError("targets must be positive (mV)")
    if mode not in ("auto", "global", "per_n"):
        raise ValueError(f"unknown mode {mode!r}")
    base = base or default_params()
    targets_v = {n: mv * 1e-3 for n, mv in sorted(targets.items())}

    def result_for(fit_mode, params=None, per_n=None):
        residuals = {}
        for n, tv in targets_v.items():
            p = params if fit_mode == "global" else per_n[n]
            model = lane_voltage(p, n, duration_ns)
            residuals[n] = 100.0 * (model - tv) / tv
        return CalibrationResult(
            mode=fit_mode,
            params=params,
            per_n_params=per_n or {},
            residuals_pct=residuals,
            duration_ns=duration_ns,
        )

    if mode in ("auto", "global"):
        if len(targets_v) == 1:
            ((n, tv),) = targets_v.items()
            params = _single_point_fit(n, tv, base)
            return result_for("global", params=params)
        ns = np.array(list(targets_v), dtype=float)
        vs = np.array(list(targets_v.values()))

        def resid(x):
            v_sat, tau_eff = x
            return v_sat * (1.0 - np.exp(-ns * duration_ns / tau_eff)) - vs

        v0 = max(vs) * 1.05
        sol = least_squares(
            resid,
            x0=[v0, duration_ns * min(ns)],
            bounds=([max(vs), 1e-3], [0.999 * base.vdd, 1e9]),
        )
        if not sol.success:
            raise CalibrationError("global V_MAX fit did not converge",
                                   residuals=dict(zip(targets_v, sol.fun)))
        v_sat, tau_eff = sol.x
        params = replace(base, v_sat=float(v_sat),
                         tau_ns=float(tau_eff) / base.c_ratio_lane_bl)
        res = result_for("global", params=params)
        if mode == "global" or res.max_abs_residual_pct <= tolerance_pct:
            return res

    per_n = {n: _single_point_fit(n, tv, base) for n, tv in targets_v.items()}
    return result_for("per_n", per_n=per_n)

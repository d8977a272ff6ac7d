"""Timing-signal vocabulary and the default toggle schedule.

The default schedule drives the four conversion steps over a 55 ns window:

    Activate : 0 EQ^  5 EQv  7 WL^  9 sense_n^  12 WLv
    S_to_A   : 13 K1^  37 K1v sense_nv
    A_to_U   : 38 EQ^ SELv  42 EQv  43 B1^  45 sense_n^
    U_to_B   : 45 ISO^  51 L1^  52 L1v  55 B1v ISOv

sense_p is always the complement of sense_n; only sense_n is stored.
SEL starts ON (bitline reference = VDD/2), everything else starts OFF.
An edge takes effect at its own time stamp (right-continuous levels).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import FormatError, RangeError


class Signal(Enum):
    WL = "WL"
    SENSE_N = "sense_n"
    SENSE_P = "sense_p"
    EQ = "EQ"
    K1 = "K1"
    B1 = "B1"
    ISO = "ISO"
    SEL = "SEL"
    L1 = "L1"


class Edge(Enum):
    RISE = "rise"
    FALL = "fall"


# Levels before any edge is applied.
INITIAL_LEVELS = {sig: (sig is Signal.SEL) for sig in Signal if sig is not Signal.SENSE_P}

STEP_NAMES = ("Activate", "S_to_A", "A_to_U", "U_to_B")


@dataclass(frozen=True)
class SignalEvent:
    time_ns: float
    signal: Signal
    edge: Edge


@dataclass(frozen=True)
class SignalSchedule:
    events: tuple[SignalEvent, ...]
    total_duration: float
    step_boundaries: dict[str, tuple[float, float]] = field(default_factory=dict)

    def events_for(self, sig: Signal) -> list[SignalEvent]:
        return [e for e in self.events if e.signal is sig]

    def on_windows(self, sig: Signal) -> list[tuple[float, float]]:
        """Closed-open [rise, fall) windows during which `sig` is ON."""
        windows = []
        level = INITIAL_LEVELS.get(sig, False)
        start = 0.0
        for e in self.events_for(sig):
            if e.edge is Edge.RISE and not level:
                level, start = True, e.time_ns
            elif e.edge is Edge.FALL and level:
                level = False
                windows.append((start, e.time_ns))
        if level:
            windows.append((start, self.total_duration))
        return windows

    def window(self, sig: Signal, index: int = 0) -> tuple[float, float]:
        windows = self.on_windows(sig)
        if index >= len(windows):
            raise RangeError(f"{sig.value} has no ON window #{index}")
        return windows[index]

    def scaled(self, factor: float) -> "SignalSchedule":
        """Same edge pattern with every time stamp multiplied by `factor`."""
        if factor <= 0:
            raise RangeError("scale factor must be positive")
        return SignalSchedule(
            events=tuple(
                SignalEvent(e.time_ns * factor, e.signal, e.edge) for e in self.events
            ),
            total_duration=self.total_duration * factor,
            step_boundaries={
                k: (a * factor, b * factor) for k, (a, b) in self.step_boundaries.items()
            },
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "total_duration_ns": self.total_duration,
                "step_boundaries": {k: list(v) for k, v in self.step_boundaries.items()},
                "events": [
                    {"t_ns": e.time_ns, "signal": e.signal.value, "edge": e.edge.value}
                    for e in self.events
                ],
            },
            indent=2,
        )

    def to_text(self) -> str:
        """One event per line: `t_ns signal edge`."""
        return "\n".join(
            f"{e.time_ns:g} {e.signal.value} {e.edge.value}" for e in self.events
        )

    @classmethod
    def from_json(cls, text: str) -> "SignalSchedule":
        try:
            d = json.loads(text)
            events = tuple(
                SignalEvent(float(e["t_ns"]), Signal(e["signal"]), Edge(e["edge"]))
                for e in d["events"]
            )
            bounds = {
                k: (float(a), float(b))
                for k, (a, b) in d.get("step_boundaries", {}).items()
            }
            return cls(events, float(d["total_duration_ns"]), bounds)
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"bad schedule JSON: {exc}") from exc

    @classmethod
    def from_text(cls, text: str) -> "SignalSchedule":
        events = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                t, sig, edge = line.split()
                events.append(SignalEvent(float(t), Signal(sig), Edge(edge)))
            except ValueError as exc:
                raise FormatError(f"bad schedule line {lineno}: {line!r}") from exc
        if not events:
            raise FormatError("empty schedule")
        total = max(e.time_ns for e in events)
        return cls(tuple(events), total)


# (time, signal, edge) triples transcribed from the toggle-time-stamp table.
_DEFAULT_EVENTS = (
    (0.0, Signal.EQ, Edge.RISE),
    (5.0, Signal.EQ, Edge.FALL),
    (7.0, Signal.WL, Edge.RISE),
    (9.0, Signal.SENSE_N, Edge.RISE),
    (12.0, Signal.WL, Edge.FALL),
    (13.0, Signal.K1, Edge.RISE),
    (37.0, Signal.K1, Edge.FALL),
    (37.0, Signal.SENSE_N, Edge.FALL),
    (38.0, Signal.EQ, Edge.RISE),
    (38.0, Signal.SEL, Edge.FALL),
    (42.0, Signal.EQ, Edge.FALL),
    (43.0, Signal.B1, Edge.RISE),
    (45.0, Signal.SENSE_N, Edge.RISE),
    (45.0, Signal.ISO, Edge.RISE),
    (51.0, Signal.L1, Edge.RISE),
    (52.0, Signal.L1, Edge.FALL),
    (55.0, Signal.B1, Edge.FALL),
    (55.0, Signal.ISO, Edge.FALL),
)

# A_to_U and U_to_B overlap at 45 ns: sense amplification completes at 50 ns
# while ISO already connects the encoder.
_DEFAULT_BOUNDARIES = {
    "Activate": (0.0, 12.0),
    "S_to_A": (13.0, 37.0),
    "A_to_U": (38.0, 45.0),
    "U_to_B": (45.0, 55.0),
}


def default_schedule() -> SignalSchedule:
    """The 55 ns default schedule (15 toggle time stamps, 18 signal edges)."""
    return SignalSchedule(
        events=tuple(SignalEvent(t, s, e) for t, s, e in _DEFAULT_EVENTS),
        total_duration=55.0,
        step_boundaries=dict(_DEFAULT_BOUNDARIES),
    )


def validate(s: SignalSchedule) -> list[str]:
    """Structural checks; returns a list of violations (empty = valid)."""
    violations = []
    times = [e.time_ns for e in s.events]
    if any(t < 0 for t in times):
        violations.append("negative event time")
    if times != sorted(times):
        violations.append("events not sorted by time")
    if any(t > s.total_duration for t in times):
        violations.append("event beyond total_duration")
    # No signal may rise and fall at the same instant.
    seen: dict[tuple[float, Signal], Edge] = {}
    for e in s.events:
        key = (e.time_ns, e.signal)
        if key in seen and seen[key] is not e.edge:
            violations.append(
                f"{e.signal.value} toggles both ways at {e.time_ns} ns"
            )
        seen[key] = e.edge
    if any(e.signal is Signal.SENSE_P for e in s.events):
        violations.append("sense_p must be derived, not scheduled")
    # Consecutive edges of one signal must alternate given its initial level.
    for sig in Signal:
        if sig is Signal.SENSE_P:
            continue
        level = INITIAL_LEVELS.get(sig, False)
        for e in s.events_for(sig):
            if (e.edge is Edge.RISE) == level:
                violations.append(
                    f"{sig.value} {e.edge.value} at {e.time_ns} ns repeats its level"
                )
                break
            level = e.edge is Edge.RISE
    for name, (a, b) in s.step_boundaries.items():
        if not 0 <= a <= b <= s.total_duration:
            violations.append(f"step {name} window [{a}, {b}] not contained")
    windows = s.on_windows(Signal.K1)
    if not windows or any(b <= a for a, b in windows):
        violations.append("K1 ON window (S_to_A duration) must be positive")
    return violations


def signal_level(s: SignalSchedule, sig: Signal, t: float) -> bool:
    """Level implied by the last edge at or before `t` (True = ON)."""
    if not 0 <= t <= s.total_duration:
        raise RangeError(f"t={t} ns outside [0, {s.total_duration}]")
    if sig is Signal.SENSE_P:
        return not signal_level(s, Signal.SENSE_N, t)
    level = INITIAL_LEVELS.get(sig, False)
    for e in s.events_for(sig):
        if e.time_ns > t:
            break
        level = e.edge is Edge.RISE
    return level

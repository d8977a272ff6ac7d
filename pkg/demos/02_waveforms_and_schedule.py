"""
Toggle schedule and sampled waveforms
=====================================

Prints the default 55 ns control schedule, then synthesizes the bitline,
cell, and lane waveforms for one conversion and summarizes them around a
few interesting instants (sense firing, charge window, final compare).
"""

import numpy as np

from agni.numformat import StochasticWord
from agni.pipeline import TileConfig, convert
from agni.schedule import Signal, default_schedule, signal_level

sched = default_schedule()
print("default schedule (time ns, signal, edge):")
print(sched.to_text())

print("signal levels at a few probe times:")
for t in (0.0, 10.0, 20.0, 40.0, 50.0):
    on = [s.value for s in Signal if signal_level(sched, s, t)]
    print(f"  t={t:5.1f} ns  ON: {', '.join(on)}")

cfg = TileConfig(n=4, trace_step_ns=0.5)
result = convert(cfg, StochasticWord.from_string("1101"), trace=True)
trace = result.trace

print()
print(f"trace: {len(trace.times)} samples x {len(trace.series)} series")
lane = trace.series["lane"]
k1 = trace.series["K1"]
charge = lane[k1 > 0.5]
print(f"lane during K1 window: {charge[0] * 1e3:.2f} -> {charge[-1] * 1e3:.2f} mV")
print(f"final lane voltage   : {result.lane_v_final * 1e3:.2f} mV")

# Bitline 0 holds a stored 1: it dips, sense-amplifies to VDD, then is
# re-precharged to its ladder tap for the final comparison.
bl0 = trace.series["bl_0"]
for label, t in (("after precharge", 6.0), ("after sensing", 15.0),
                 ("final compare", 54.0)):
    i = int(np.searchsorted(trace.times, t))
    print(f"bl_0 {label:16s} (t={t:4.1f} ns): {bl0[i]:.3f} V")

print()
print("annotated glitch instants:")
for t, label in trace.annotations:
    print(f"  {label} at t={t} ns")

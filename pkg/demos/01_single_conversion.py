"""
Walk one operand through the four conversion steps
==================================================

A 16-bit stochastic word is read out of its DRAM row, its ones are
integrated onto the LANE capacitor, the lane voltage is flash-compared
against the reference ladder, and the resulting thermometer code is
priority-encoded into binary.  Total wall time is always the schedule
duration (55 ns), no matter how many ones the operand carries.
"""

from agni.numformat import StochasticWord, popcount
from agni.pipeline import TileConfig, convert

cfg = TileConfig(n=16)

operand = StochasticWord.from_string("1011001010001101")
print(f"operand      : {operand.render()}")
print(f"ones count   : {popcount(operand)}")
print(f"encoded value: {operand.value}")

result = convert(cfg, operand)

print()
print(f"lane voltage : {result.lane_v_final * 1e3:.2f} mV")
print(f"unary word   : {result.unary.render()}")
print(f"binary out   : {result.binary.value} (width {result.binary.width})")
print(f"oracle       : {result.oracle.value}")
print(f"latency      : {result.latency_ns} ns")
print(f"bubble flag  : {result.bubble_flag}")

# The all-ones operand exceeds the encoder range and saturates.
full = StochasticWord.from_string("1" * 16)
sat = convert(cfg, full)
print()
print(f"all-ones in  : binary {sat.binary.value}, saturated={sat.saturated}")

# Latency is independent of the operand and of the group size.
for n in (4, 16, 64, 256):
    r = convert(TileConfig(n=n), StochasticWord.from_int(1, n))
    print(f"N={n:<3d} latency {r.latency_ns} ns")

"""
Hardware cost of three converter designs
========================================

The in-DRAM substrate adds a fixed 164F-high strip (492 F^2 per bitline
pitch) plus a charge pump, and always finishes in 55 ns.  The two
CMOS pop-counter baselines (parallel adder tree, bit-serial counter)
are modeled from calibrated two-point fits.  This demo tabulates
absolute costs and the advantage ratios of the in-DRAM design.
"""

from agni.costmodel import (
    LayoutModel,
    agni_cost,
    compare,
    full_adder_count,
)

layout = LayoutModel()
print(f"added strip height : {layout.added_height_f:.0f} F")
print(f"added area per col : {layout.added_area_f2_per_pitch:.0f} F^2")
print(f"feature size       : {layout.feature_f_nm:.0f} nm "
      f"({layout.um2_per_f2} um^2/F^2)")

sizes = (16, 32, 64, 128, 256)

print()
print("absolute per-converter costs:")
hdr = f"  {'design':<10} {'N':>4} {'area um^2':>10} {'lat ns':>8} {'energy J':>10}"
print(hdr)
for row in compare(sizes):
    for design, rep in row.reports.items():
        print(f"  {design:<10} {rep.n:>4} {rep.area_um2:>10.3g} "
              f"{rep.latency_ns:>8.3g} {rep.energy_j:>10.3g}")

print()
print("advantage of the in-DRAM design (baseline / in-DRAM):")
print(f"  {'baseline':<10} {'N':>4} {'area':>8} {'area*lat':>9} {'EDP':>8}")
for row in compare(sizes):
    for design, (area, al, edp) in row.ratios.items():
        print(f"  {design:<10} {row.n:>4} {area:>8.1f} {al:>9.1f} {edp:>8.1f}")

print()
print("adder-tree size of the parallel baseline:")
for n in sizes:
    print(f"  N={n:<4d} {full_adder_count(n)} full adders")

a = agni_cost(256)
print()
print(f"in-DRAM at N=256: {a.area_um2:.3f} um^2, {a.energy_j:.3e} J, "
      f"EDP {a.edp:.3e} J*ns")

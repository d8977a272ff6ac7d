"""
CNN stochastic-to-binary phase at system level
==============================================

Every output element of a convolution or linear layer needs one
stochastic-to-binary conversion.  Conversions are scheduled layer by
layer across the tiles of a processing-in-memory system; the in-DRAM
substrate converts L/N operands per tile per cycle, while each baseline
tile hosts a single converter.  Results are reported normalized plus as
geometric-mean advantages over the four shipped CNN workloads.
"""

from agni.sysmodel import (
    BUILTIN_MODELS,
    PimSystemConfig,
    builtin_model,
    report,
)

models = [builtin_model(m) for m in BUILTIN_MODELS]
print("workloads (conversions = total MAC-layer output elements):")
for m in models:
    print(f"  {m.name:<14} {len(m.layers):>4} layers "
          f"{m.total_elements:>10,} conversions")

variants = [PimSystemConfig(b) for b in ("AGNI", "ParallelPC", "SerialPC")]
sys0 = variants[0]
print()
print(f"system: {sys0.tiles} tiles, L={sys0.l} bitlines/tile, N={sys0.n}")
print(f"in-DRAM conversions per tile cycle: {sys0.conversions_per_tile_cycle}")

rep = report(models, variants)

print()
print("normalized phase latency (ParallelPC on Inception_V3 = 1.0):")
for b in rep.backends:
    vals = "  ".join(
        f"{rep.latency_normalized[(b, m)]:8.3f}" for m in rep.models
    )
    print(f"  {b:<10} {vals}")

print()
print("normalized phase EDP (AGNI on ShuffleNet_V2 = 1.0):")
for b in rep.backends:
    vals = "  ".join(
        f"{rep.edp_normalized[(b, m)]:10.3g}" for m in rep.models
    )
    print(f"  {b:<10} {vals}")

print()
print("geometric-mean advantage of the in-DRAM design:")
for b, v in rep.gmean_latency_advantage.items():
    print(f"  latency vs {b:<10}: {v:7.2f}x")
for b, v in rep.gmean_edp_advantage.items():
    print(f"  EDP     vs {b:<10}: {v:7.1f}x")

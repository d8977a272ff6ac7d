"""
Comparator noise and conversion error
=====================================

With noiseless comparators every operand converts exactly.  Adding a
Gaussian offset to the sensing thresholds produces off-by-one (and
occasionally worse) decisions; this demo sweeps the noise level, then
searches for the sigma that reproduces the reported mean percentage
error at N = 16 and prints the full error report at that point.
"""

from dataclasses import replace

from agni.analog import AnalogParams
from agni.metrics import REPORTED_ERRORS, fit_sigma, sweep
from agni.pipeline import TileConfig

cfg = TileConfig(n=16)

print("exhaustive sweep, N=16, noiseless:")
rep = sweep(cfg)
print(f"  {rep.samples} operands, {rep.mismatches} mismatches, "
      f"MAE {rep.mae:.3f}")

print()
print("error vs comparator noise (exhaustive, N=16):")
print(f"  {'sigma mV':>8}  {'MAE':>6}  {'MAPE %':>7}  {'RMSE':>6}")
for sigma in (0.05, 0.1, 0.2, 0.5, 1.0):
    noisy = replace(cfg, analog=AnalogParams(noise_sigma_mv=sigma))
    r = sweep(noisy, seed=0)
    print(f"  {sigma:8.2f}  {r.mae:6.3f}  {r.mape_pct:7.3f}  {r.rmse:6.3f}")

print()
target = REPORTED_ERRORS[16][1]
print(f"fitting sigma to the reported {target}% MAPE at N=16 ...")
fit = fit_sigma(cfg)
r = fit.report
print(f"  fitted sigma   : {fit.sigma_mv:.4f} mV ({fit.iterations} iterations)")
print(f"  achieved MAPE  : {r.mape_pct:.3f} %")
print(f"  MAE / RMSE     : {r.mae:.3f} / {r.rmse:.3f}")
print(f"  zero-actuals excluded from MAPE: {r.excluded_zero_actuals}")
print(f"  bubble flag rate: {r.bubble_flag_rate:.4f}")

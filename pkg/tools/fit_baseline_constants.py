#!/usr/bin/env python3
"""Regenerate src/agni/data/baseline_constants.json.

Solves the pop-counter baseline constants from the published
AGNI-advantage anchors at N=16 and N=256 (see agni.costmodel.ANCHORS)
and stores them with the fit residuals.  Run from the repo root:

    python3 tools/fit_baseline_constants.py
"""

import json
from pathlib import Path

from agni.costmodel import ANCHORS, fit_baseline_constants


def main():
    consts, residuals = fit_baseline_constants()
    out = Path(__file__).resolve().parents[1] / "src/agni/data/baseline_constants.json"
    payload = {
        "provenance": (
            "Two-point fit against the AGNI-advantage anchors at N=16 and "
            "N=256; regenerate with tools/fit_baseline_constants.py"
        ),
        "anchors": {d: {str(n): list(v) for n, v in rows.items()}
                    for d, rows in ANCHORS.items()},
        "constants": consts.to_dict(),
        "residuals": residuals,
        "max_abs_residual": max(abs(v) for v in residuals.values()),
    }
    out.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {out} (max |residual| = {payload['max_abs_residual']:.3g})")


if __name__ == "__main__":
    main()

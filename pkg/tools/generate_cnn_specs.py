#!/usr/bin/env python3
"""Regenerate the shipped CNN layer specs in src/agni/data/.

One StoB conversion is needed per point of each MAC layer's output
tensor, so a spec lists the output element count of every Conv2d/Linear
layer.  Counts are captured with forward hooks on torchvision model
definitions (weights are never downloaded; only shapes matter) and
cross-checked against an independent analytic shape inference for the
convolution layers.

    python3 tools/generate_cnn_specs.py
"""

import json
import math
from pathlib import Path

import torch
from torch import nn
import torchvision.models as tvm

MODELS = {
    "shufflenet_v2": ("ShuffleNet_V2", lambda: tvm.shufflenet_v2_x1_0(weights=None), 224),
    "mobilenet_v2": ("MobileNet_V2", lambda: tvm.mobilenet_v2(weights=None), 224),
    "densenet121": ("DenseNet121", lambda: tvm.densenet121(weights=None), 224),
    "inception_v3": (
        "Inception_V3",
        lambda: tvm.inception_v3(weights=None, aux_logits=True, init_weights=False),
        299,
    ),
}


def conv_out_hw(in_hw, mod: nn.Conv2d):
    out = []
    for i in range(2):
        eff_k = mod.dilation[i] * (mod.kernel_size[i] - 1) + 1
        out.append(
            math.floor((in_hw[i] + 2 * mod.padding[i] - eff_k) / mod.stride[i]) + 1
        )
    return tuple(out)


def capture(model: nn.Module, input_px: int):
    layers = []
    checks = []

    def hook(name):
        def fn(mod, inputs, output):
            layers.append({"name": name, "output_elements": int(output.numel())})
            if isinstance(mod, nn.Conv2d):
                h, w = conv_out_hw(inputs[0].shape[-2:], mod)
                expect = mod.out_channels * h * w * inputs[0].shape[0]
                checks.append((name, expect, int(output.numel())))
            elif isinstance(mod, nn.Linear):
                checks.append(
                    (name, mod.out_features * inputs[0].shape[0], int(output.numel()))
                )
        return fn

    handles = [
        m.register_forward_hook(hook(n))
        for n, m in model.named_modules()
        if isinstance(m, (nn.Conv2d, nn.Linear))
    ]
    model.eval()
    with torch.no_grad():
        model(torch.zeros(1, 3, input_px, input_px))
    for h in handles:
        h.remove()
    bad = [c for c in checks if c[1] != c[2]]
    if bad:
        raise SystemExit(f"shape-inference cross-check failed: {bad[:3]}")
    return layers


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src/agni/data"
    for fname, (display, ctor, px) in MODELS.items():
        layers = capture(ctor(), px)
        spec = {
            "name": display,
            "provenance": (
                f"Output element counts of all Conv2d/Linear layers of "
                f"torchvision {fname} at input 1x3x{px}x{px}; verified against "
                "analytic convolution shape inference. Regenerate with "
                "tools/generate_cnn_specs.py"
            ),
            "layers": layers,
        }
        path = out_dir / f"{fname}.json"
        path.write_text(json.dumps(spec, indent=2) + "\n")
        total = sum(l["output_elements"] for l in layers)
        print(f"{path.name}: {len(layers)} layers, {total:,} output elements")


if __name__ == "__main__":
    main()

import json
import math

import pytest

from agni.errors import ConfigError, FormatError
from agni.sysmodel import (
    BUILTIN_MODELS,
    CnnModelSpec,
    PimSystemConfig,
    builtin_model,
    load_model,
    load_models_dir,
    parse_model,
    report,
    stob_phase_edp,
    stob_phase_energy,
    stob_phase_latency,
)


def tiny_model(name="Tiny", sizes=(100, 50)):
    return CnnModelSpec(name, tuple((f"l{i}", s) for i, s in enumerate(sizes)))


def default_variants():
    return [PimSystemConfig(b) for b in ("AGNI", "ParallelPC", "SerialPC")]


def test_model_spec_validation():
    with pytest.raises(FormatError):
        CnnModelSpec("Empty", ())
    with pytest.raises(FormatError):
        CnnModelSpec("Bad", (("l0", 0),))
    assert tiny_model().total_elements == 150


def test_parse_model_errors():
    with pytest.raises(FormatError):
        parse_model("not json")
    with pytest.raises(FormatError):
        parse_model('{"name": "X"}')
    m = parse_model('{"name": "X", "layers": [{"name": "a", "output_elements": 7}]}')
    assert m.layers == (("a", 7),)


def test_builtin_models_load():
    totals = {}
    for name in BUILTIN_MODELS:
        m = builtin_model(name)
        assert m.total_elements > 0 and len(m.layers) > 10
        totals[m.name] = m.total_elements
    assert totals["ShuffleNet_V2"] < totals["Inception_V3"]
    with pytest.raises(ConfigError):
        builtin_model("lenet")


def test_load_model_files(tmp_path):
    doc = {"name": "X", "layers": [{"name": "a", "output_elements": 3}]}
    p = tmp_path / "x.json"
    p.write_text(json.dumps(doc))
    assert load_model(p).name == "X"
    assert [m.name for m in load_models_dir(tmp_path)] == ["X"]
    with pytest.raises(FormatError):
        load_models_dir(tmp_path / "empty")


def test_system_config_validation():
    with pytest.raises(ConfigError):
        PimSystemConfig("TPU")
    with pytest.raises(ConfigError):
        PimSystemConfig("AGNI", tiles=0)
    with pytest.raises(ConfigError):
        PimSystemConfig("AGNI", l=512, n=100)


def test_conversions_per_tile_cycle():
    assert PimSystemConfig("AGNI", l=512, n=256).conversions_per_tile_cycle == 2
    assert PimSystemConfig("AGNI", l=512, n=64).conversions_per_tile_cycle == 8
    assert PimSystemConfig("SerialPC").conversions_per_tile_cycle == 1
    assert PimSystemConfig(
        "SerialPC", converters_per_tile=4
    ).conversions_per_tile_cycle == 4


def test_phase_latency_hand_computed():
    sys = PimSystemConfig("AGNI", tiles=2, l=512, n=256)  # 4 conversions/cycle
    m = tiny_model(sizes=(10, 5))
    # ceil(10/4) + ceil(5/4) = 3 + 2 cycles at 55 ns each
    assert stob_phase_latency(m, sys) == pytest.approx(5 * 55.0)
    assert stob_phase_energy(m, sys) == pytest.approx(15 * sys.energy_per_conversion_j)
    assert stob_phase_edp(m, sys) == pytest.approx(
        stob_phase_latency(m, sys) * stob_phase_energy(m, sys)
    )


def test_latency_ceiling_per_layer():
    # layer boundaries force a fresh cycle: two 1-element layers cost two
    # cycles even though one cycle converts two elements
    sys = PimSystemConfig("AGNI", tiles=1, l=512, n=256)
    split = tiny_model(sizes=(1, 1))
    merged = tiny_model(sizes=(2,))
    assert stob_phase_latency(split, sys) == pytest.approx(2 * 55.0)
    assert stob_phase_latency(merged, sys) == pytest.approx(55.0)
    odd = tiny_model(sizes=(3, 3))
    assert stob_phase_latency(odd, sys) == pytest.approx(4 * 55.0)


def test_report_normalization_anchors():
    models = [builtin_model(n) for n in BUILTIN_MODELS]
    rep = report(models, default_variants())
    assert rep.latency_normalized[("ParallelPC", "Inception_V3")] == 1.0
    assert rep.edp_normalized[("AGNI", "ShuffleNet_V2")] == 1.0


def test_report_gmean_advantages():
    models = [builtin_model(n) for n in BUILTIN_MODELS]
    rep = report(models, default_variants())
    assert 2.0 <= rep.gmean_latency_advantage["SerialPC"] <= 8.0
    assert rep.gmean_latency_advantage["ParallelPC"] > 0
    assert rep.gmean_edp_advantage["ParallelPC"] > 100
    assert rep.gmean_edp_advantage["SerialPC"] > rep.gmean_edp_advantage["ParallelPC"]


def test_report_gmean_matches_manual():
    models = [tiny_model("A", (1000,)), tiny_model("B", (5000,))]
    variants = [PimSystemConfig("AGNI"), PimSystemConfig("SerialPC")]
    rep = report(models, variants)
    ratios = [
        rep.latency_ns[("SerialPC", m)] / rep.latency_ns[("AGNI", m)]
        for m in ("A", "B")
    ]
    assert rep.gmean_latency_advantage["SerialPC"] == pytest.approx(
        math.sqrt(ratios[0] * ratios[1])
    )


def test_report_rejects_duplicates_and_empties():
    with pytest.raises(ValueError):
        report([], default_variants())
    with pytest.raises(ConfigError):
        report([tiny_model()], [PimSystemConfig("AGNI"), PimSystemConfig("AGNI")])


def test_report_serializable():
    rep = report([tiny_model()], default_variants())
    d = rep.to_dict()
    assert "AGNI/Tiny" in d["latency_ns"]
    json.dumps(d)

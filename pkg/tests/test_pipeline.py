import itertools
import json

import numpy as np
import pytest

from agni.errors import ConfigError, TraceUnavailableError
from agni.numformat import StochasticWord, popcount, stob_oracle
from agni.pipeline import (
    TileConfig,
    convert,
    convert_batch,
    convert_tile,
    emit_trace,
    spawn_seeds,
)
from agni.analog import AnalogParams
from agni.schedule import default_schedule


def words(n, values):
    return [StochasticWord.from_int(v, n) for v in values]


def test_config_validation():
    with pytest.raises(ConfigError):
        TileConfig(n=5)
    with pytest.raises(ConfigError):
        TileConfig(n=16, l=100)
    cfg = TileConfig(n=16)
    assert cfg.groups_per_tile == 32
    assert cfg.charge_window_ns == 24.0


def test_operand_length_checked():
    with pytest.raises(ConfigError):
        convert(TileConfig(n=8), StochasticWord.from_int(3, 4))


def test_latency_is_schedule_duration_for_all_n():
    for n in (4, 8, 16, 32, 64, 128, 256):
        cfg = TileConfig(n=n)
        res = convert(cfg, StochasticWord.from_int(1, n))
        assert res.latency_ns == 55.0


def test_latency_scales_with_schedule():
    cfg = TileConfig(n=8, schedule=default_schedule().scaled(2.0))
    res = convert(cfg, StochasticWord.from_int(3, 8))
    assert res.latency_ns == 110.0


def test_exhaustive_matches_oracle_n4_n8():
    for n in (4, 8):
        cfg = TileConfig(n=n)
        for v in range(2**n):
            w = StochasticWord.from_int(v, n)
            res = convert(cfg, w)
            assert res.binary.value == res.oracle.value == stob_oracle(w).value
            assert not res.bubble_flag


def test_saturation_and_bubble_flags():
    cfg = TileConfig(n=4)
    res = convert(cfg, StochasticWord.from_string("1111"))
    assert res.saturated and res.binary.value == 3
    res = convert(cfg, StochasticWord.from_string("0000"))
    assert res.binary.value == 0 and not res.saturated


def test_unary_intermediate_is_thermometer():
    cfg = TileConfig(n=8)
    for v in (0, 1, 37, 255):
        res = convert(cfg, StochasticWord.from_int(v, 8))
        bits = res.unary.bits
        assert all(a >= b for a, b in zip(bits, bits[1:]))
        assert sum(bits) == res.binary.value or res.saturated


def test_noise_free_conversion_deterministic():
    cfg = TileConfig(n=32)
    w = StochasticWord.from_int(0xDEADBEEF, 32)
    a = convert(cfg, w)
    b = convert(cfg, w)
    assert a.binary.value == b.binary.value == popcount(w)


def test_explicit_noise_vectors_flip_decisions():
    cfg = TileConfig(n=4, analog=AnalogParams(noise_sigma_mv=1.0))
    w = StochasticWord.from_string("1100")
    # huge negative threshold noise in step 3 latches every comparator
    res = convert(cfg, w, noise_step1=[0.0] * 4, noise_step3=[-1.0] * 4)
    assert res.binary.value == 3
    res = convert(cfg, w, noise_step1=[0.0] * 4, noise_step3=[1.0] * 4)
    assert res.binary.value == 0


def test_seeded_noise_reproducible():
    cfg = TileConfig(n=16, analog=AnalogParams(noise_sigma_mv=5.0))
    w = StochasticWord.from_int(0xABCD, 16)
    a = convert(cfg, w, seed=11)
    b = convert(cfg, w, seed=11)
    c = convert(cfg, w, seed=12)
    assert a.binary.value == b.binary.value
    assert isinstance(c.binary.value, int)


def test_convert_tile_counts_and_equivalence():
    cfg = TileConfig(n=16, analog=AnalogParams(noise_sigma_mv=2.0))
    rng = np.random.default_rng(0)
    ops = words(16, rng.integers(0, 2**16, cfg.groups_per_tile))
    with pytest.raises(ConfigError):
        convert_tile(cfg, ops[:-1])
    results = convert_tile(cfg, ops, seed=99)
    assert len(results) == cfg.groups_per_tile
    # element-wise identical to independent calls on the spawned seeds
    seqs = spawn_seeds(99, len(ops))
    for op, sq, got in zip(ops, seqs, results):
        solo = convert(cfg, op, seed=np.random.default_rng(sq))
        assert solo.binary.value == got.binary.value


def test_batch_matches_scalar_path_with_shared_noise():
    cfg = TileConfig(n=32, analog=AnalogParams(noise_sigma_mv=3.0))
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, size=(200, 32)).astype(np.uint8)
    n1 = rng.normal(0, 3e-3, bits.shape)
    n3 = rng.normal(0, 3e-3, bits.shape)
    batch = convert_batch(cfg, bits, noise_step1=n1, noise_step3=n3)
    for i in range(bits.shape[0]):
        w = StochasticWord(tuple(int(b) for b in bits[i]))
        solo = convert(cfg, w, noise_step1=n1[i], noise_step3=n3[i])
        assert solo.binary.value == batch.binary[i]
        assert solo.oracle.value == batch.oracle[i]
        assert solo.bubble_flag == batch.bubble[i]
        assert solo.saturated == batch.saturated[i]


def test_batch_shape_guard():
    cfg = TileConfig(n=8)
    with pytest.raises(ConfigError):
        convert_batch(cfg, np.zeros((3, 4), dtype=np.uint8))


def test_batch_noise_free_exact_n64():
    cfg = TileConfig(n=64)
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, size=(5000, 64)).astype(np.uint8)
    out = convert_batch(cfg, bits)
    assert np.array_equal(out.binary, out.oracle)


def test_trace_availability():
    cfg = TileConfig(n=4)
    w = StochasticWord.from_string("1010")
    res = convert(cfg, w)
    with pytest.raises(TraceUnavailableError):
        emit_trace(res)
    traced = convert(cfg, w, trace=True)
    assert emit_trace(traced) is traced.trace


def test_trace_contents():
    cfg = TileConfig(n=4)
    w = StochasticWord.from_string("1010")
    trace = convert(cfg, w, trace=True).trace
    assert trace.times[0] == 0.0 and trace.times[-1] == 55.0
    names = set(trace.series)
    assert {"lane", "K1", "WL", "bl_0", "cell_3"} <= names
    # digital rails are 0/1 only
    for sig in ("K1", "WL", "EQ", "SEL"):
        assert set(np.unique(trace.series[sig])) <= {0.0, 1.0}
    # lane is monotone nondecreasing and ends at the final lane voltage
    lane = trace.series["lane"]
    assert np.all(np.diff(lane) >= -1e-12)
    labels = [lbl for _, lbl in trace.annotations]
    assert labels == ["glitch 1", "glitch 2", "glitch 3"]


def test_trace_serialization_roundtrip():
    cfg = TileConfig(n=4, trace_step_ns=1.0)
    trace = convert(cfg, StochasticWord.from_string("1100"), trace=True).trace
    doc = json.loads(trace.to_json())
    assert doc["sample_step_ns"] == 1.0
    assert len(doc["t_ns"]) == len(trace.times)
    csv_text = trace.to_csv()
    assert csv_text.startswith("t_ns,series,value\n")
    assert "annotation,glitch 1" in csv_text

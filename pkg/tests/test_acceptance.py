"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them
on success)."""

import csv
import dataclasses
import random
import subprocess
import sys
from contextlib import contextmanager

import pytest

from caproof.analysis import BoundClass, classify, max_feasible_batch, min_devices
from caproof.cli import run as cli_run
from caproof.config import resolve_config
from caproof.hardware import HardwareSpec, ridge_point
from caproof.metrics import OperatingPoint, cf_request, decode_metrics, oi_matmul
from caproof.model import (
    GQA,
    MHA,
    MLA,
    ModelSpec,
    Phase,
    kv_bytes_per_token,
    total_params,
    weight_bytes,
)
from caproof.workload import expand, total_tokens
from oracles import matmul_tally_oracle, random_model


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: {description} ... FAIL")
        raise
    print(f"ACCEPTANCE {number}: {description} ... PASS")


def reference_spec(attention=MHA()):
    return ModelSpec(name="ref48", num_layers=48, d_model=2048, num_heads=32,
                     head_dim=64, d_ff=8192, ffn_gated=True, attention=attention,
                     vocab_size=32000, weight_bits=16, kv_bits=16)


def test_criterion_1_oi_formula_oracle():
    with criterion(1, "oi_matmul matches brute-force tally on 1000 random triples"):
        rng = random.Random(2024)
        for _ in range(1000):
            m, d, length = (rng.randint(1, 4096) for _ in range(3))
            ops, transfers = matmul_tally_oracle(m, d, length)
            got = oi_matmul(m, d, length)
            expected = ops / transfers
            assert abs(got - expected) <= 1e-12 * expected
            assert got == oi_matmul(length, d, m)  # exact symmetry


def test_criterion_2_cf_formula():
    with criterion(2, "cf_request equals kv*L + weights/B exactly; single-matrix form symbolic"):
        import sympy

        m, d, length, batch = sympy.symbols("m d length batch", positive=True)
        elem = sympy.Integer(2)  # bytes per 16-bit element
        kv_per_token = 2 * d * elem  # K and V rows for one token
        weights = m * d * elem
        cf = kv_per_token * length + weights / batch
        footnote_form = elem * (2 * d * length + m * d / batch)
        assert sympy.simplify(cf - footnote_form) == 0

        rng = random.Random(99)
        for _ in range(200):
            spec = random_model(rng)
            point = OperatingPoint(rng.randint(1, 10**6), rng.randint(1, 512), Phase.DECODE)
            expected = kv_bytes_per_token(spec) * point.context_len + weight_bytes(spec) / point.batch_size
            assert cf_request(spec, point) == expected


def test_criterion_3_attention_variant_reproduction():
    with criterion(3, "CF ordering MLA < GQA(8) < MHA, KV ratio 4.0, MHA KV 393216 B/token"):
        mha = reference_spec()
        gqa = reference_spec(GQA(num_kv_heads=8))
        mla = reference_spec(MLA(d_latent=512, d_rope=64))

        # per-layer summation oracle for the MHA value
        per_layer = 2 * 32 * 64 * 2  # K+V elements * heads * head_dim * bytes
        assert kv_bytes_per_token(mha) == sum(per_layer for _ in range(48)) == 393216
        assert kv_bytes_per_token(mha) / kv_bytes_per_token(gqa) == 4.0

        # CF is affine in L; ordered slope and intercept give ordering for all L >= 1
        assert kv_bytes_per_token(mla) < kv_bytes_per_token(gqa) < kv_bytes_per_token(mha)
        assert weight_bytes(mla) < weight_bytes(gqa) < weight_bytes(mha)
        for length in (1, 2, 10, 1000, 300_000, 1_000_000):
            point = OperatingPoint(length, 1, Phase.DECODE)
            assert cf_request(mla, point) < cf_request(gqa, point) < cf_request(mha, point)


def test_criterion_4_agent_workload_anchors():
    with criterion(4, "coding agent: 300K context in 20-30 turns, decode OI < 5% ridge, CF > one device"):
        workload = resolve_config("coding-agent", "workload")
        assert 20 <= workload.turns <= 30
        trace = expand(workload)
        assert trace.final_context >= 300_000
        prefill_total, decode_total = total_tokens(trace)
        assert prefill_total + decode_total == trace.final_context

        model = resolve_config("dense-70b", "model")
        hw = resolve_config("b200-sxm", "hardware")
        point = OperatingPoint(trace.final_context, 1, Phase.DECODE)
        oi = decode_metrics(model, point).oi
        assert oi < 0.05 * ridge_point(hw, model.weight_bits)
        assert cf_request(model, point) > hw.mem_capacity * hw.num_devices


def test_criterion_5_moe_direction():
    with criterion(5, "MoE preset: lower decode OI than dense at (B=1, L=4096), exact CF split"):
        dense = resolve_config("dense-70b", "model")
        moe = resolve_config("moe-256e", "model")
        assert total_params(moe) >= total_params(dense)
        assert moe.moe.top_k / moe.moe.num_experts <= 0.25
        point = OperatingPoint(4096, 1, Phase.DECODE)
        assert decode_metrics(moe, point).oi < decode_metrics(dense, point).oi
        for spec in (dense, moe):
            for batch in (1, 16):
                batched = OperatingPoint(4096, batch, Phase.DECODE)
                floor = weight_bytes(spec) / batch
                kv = kv_bytes_per_token(spec) * 4096
                assert cf_request(spec, batched) == floor + kv


def _random_hw(rng, spec):
    bandwidth = 10 ** rng.uniform(9, 13)
    ridge = 10 ** rng.uniform(-1, 3)
    capacity = max(1.0, weight_bytes(spec)) * 10 ** rng.uniform(-1, 3)
    return HardwareSpec(name="hw", peak_flops={b: ridge * bandwidth for b in (2, 4, 8, 16, 32)},
                        mem_bandwidth=bandwidth, mem_capacity=int(capacity) + 1,
                        num_devices=rng.choice([1, 2, 4]))


def test_criterion_6_classification_soundness():
    with criterion(6, "500 random instances: class soundness, monotonicity, duality, invariance"):
        rng = random.Random(606)
        for _ in range(500):
            spec = random_model(rng)
            hw = _random_hw(rng, spec)
            point = OperatingPoint(rng.randint(1, 100_000), rng.randint(1, 256),
                                   rng.choice([Phase.PREFILL, Phase.DECODE]))
            result = classify(spec, hw, point)

            # exhaustive and exclusive
            assert result.bound_class in BoundClass

            # ComputeBound <=> oi >= ridge, given the request fits one device
            fits = (weight_bytes(spec) + kv_bytes_per_token(spec) * point.context_len
                    <= int(hw.mem_capacity))
            ridge = ridge_point(hw, spec.weight_bits)
            if not fits:
                assert result.bound_class is BoundClass.CAPACITY_EXCEEDED
            else:
                assert result.bound_class is not BoundClass.CAPACITY_EXCEEDED
                assert (result.bound_class is BoundClass.COMPUTE_BOUND) == (
                    result.metrics.oi >= ridge)

            # more capacity never degrades a healthy class
            grown_hw = dataclasses.replace(hw, mem_capacity=hw.mem_capacity * 8)
            grown = classify(spec, grown_hw, point).bound_class
            healthy = {BoundClass.COMPUTE_BOUND, BoundClass.BANDWIDTH_BOUND}
            if result.bound_class in healthy:
                assert grown in healthy

            # min_devices / max_feasible_batch duality
            k = min_devices(spec, hw, point)
            for devices in (max(1, k - 1), k, k + 1):
                sized = dataclasses.replace(hw, num_devices=devices)
                admits = max_feasible_batch(spec, sized, point.context_len) >= point.batch_size
                assert admits == (devices >= k)

            # per-device classification invariant in device count
            for devices in (2, 8):
                scaled = classify(spec, dataclasses.replace(hw, num_devices=devices), point)
                assert scaled.bound_class is result.bound_class
                assert scaled.metrics.oi == result.metrics.oi
                assert scaled.mfu_est == result.mfu_est
                assert scaled.mbu_est == result.mbu_est


def test_criterion_7_quantization_linearity():
    with criterion(7, "halving weight_bits/kv_bits halves the matching CF term exactly"):
        rng = random.Random(77)
        for _ in range(100):
            spec = random_model(rng)
            if spec.weight_bits < 4 or spec.kv_bits < 4:
                spec = dataclasses.replace(spec, weight_bits=16, kv_bits=16)
            point = OperatingPoint(rng.randint(1, 10**5), rng.randint(1, 64), Phase.DECODE)
            kv_term = kv_bytes_per_token(spec) * point.context_len
            weight_term = weight_bytes(spec) / point.batch_size

            half_w = dataclasses.replace(spec, weight_bits=spec.weight_bits // 2)
            assert weight_bytes(half_w) / point.batch_size == weight_term / 2
            assert cf_request(half_w, point) == kv_term + weight_term / 2

            half_kv = dataclasses.replace(spec, kv_bits=spec.kv_bits // 2)
            assert kv_bytes_per_token(half_kv) * point.context_len == kv_term / 2
            assert cf_request(half_kv, point) == kv_term / 2 + weight_term


def test_criterion_8_cli_determinism(tmp_path):
    with criterion(8, "two identical CLI invocations emit byte-identical CSV"):
        args = ["sweep", "--model", "mha-48x2048", "--hardware", "b200-sxm",
                "--grid", "B=1,8,L=1k..64k:log", "--format", "csv"]
        contents = []
        for sub in ("first", "second"):
            out = tmp_path / sub
            proc = subprocess.run(
                [sys.executable, "-m", "caproof.cli", *args, "--out", str(out)],
                capture_output=True)
            assert proc.returncode == 0, proc.stderr
            contents.append((out / "sweep.csv").read_bytes())
        assert contents[0] == contents[1]
        # and the in-process entry point agrees with the subprocess artifact
        out = tmp_path / "inproc"
        assert cli_run(args + ["--out", str(out)]) == 0
        assert (out / "sweep.csv").read_bytes() == contents[0]

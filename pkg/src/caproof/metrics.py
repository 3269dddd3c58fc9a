"""Operational intensity (OI) and capacity footprint (CF) per phase.

OI is FLOPs per byte moved from DRAM; CF is DRAM bytes held per request
(weights amortized over the batch, plus the request's KV cache).
Activations are treated as on-chip and excluded from both by default; the
generic-matmul helper oi_matmul keeps the output write-back in its
denominator, so both conventions are available.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ModelSpec,
    Phase,
    activated_params,
    embedding_params,
    flops_per_token,
    kv_bytes_per_token,
    weight_bytes,
)


@dataclass(frozen=True)
class OperatingPoint:
    context_len: int
    batch_size: int
    phase: Phase

    def __post_init__(self):
        if self.context_len < 1:
            raise ValueError(f"context_len must be >= 1, got {self.context_len}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class PhaseMetrics:
    oi: float  # FLOPs per DRAM byte
    cf: float  # DRAM bytes per request
    flops_per_token: float
    bytes_per_token: float


def oi_matmul(m: int, d: int, length: int) -> float:
    """Operations per element transferred for Y = W @ X with W (m x d) and
    X (d x length), counting loads of W and X and the write of Y:
    2*m*d*length / (m*d + d*length + m*length).

    Integer inputs stay exact until the final division, so the m <-> length
    symmetry of the formula holds bit-for-bit.
    """
    if m < 1 or d < 1 or length < 1:
        raise ValueError(f"matmul dims must be >= 1, got m={m} d={d} length={length}")
    return (2 * m * d * length) / (m * d + d * length + m * length)


def oi_matmul_bytes(m: int, d: int, length: int, element_bits: int) -> float:
    """oi_matmul scaled to operations per byte at the given element width."""
    return oi_matmul(m, d, length) / (element_bits / 8)


def cf_request(spec: ModelSpec, point: OperatingPoint) -> float:
    """Per-request DRAM bytes: KV cache for the full context plus the weight
    bytes amortized over the batch."""
    return kv_bytes_per_token(spec) * point.context_len + weight_bytes(spec) / point.batch_size


def _activation_bytes_per_token(spec: ModelSpec) -> float:
    # Sensitivity knob only: one read + one write of the hidden-state vector
    # per layer, at weight precision. Off by default (activations are assumed
    # to stay in on-chip SRAM).
    return 2 * spec.num_layers * spec.d_model * spec.weight_bits / 8


def decode_metrics(
    spec: ModelSpec, point: OperatingPoint, include_activations: bool = False
) -> PhaseMetrics:
    """Per-token metrics while generating at context length L.

    Bytes move the whole weight set (amortized over the batch), read the
    request's cached KV, and write the new token's KV entry. The KV write is
    negligible but included for exactness.
    """
    if point.phase is not Phase.DECODE:
        raise ValueError(f"decode_metrics requires a DECODE point, got {point.phase}")
    kv = kv_bytes_per_token(spec)
    bytes_per_tok = (
        weight_bytes(spec) / point.batch_size + kv * point.context_len + kv
    )
    if include_activations:
        bytes_per_tok += _activation_bytes_per_token(spec)
    flops = flops_per_token(spec, Phase.DECODE, point.context_len)
    return PhaseMetrics(
        oi=flops / bytes_per_tok,
        cf=cf_request(spec, point),
        flops_per_token=float(flops),
        bytes_per_token=bytes_per_tok,
    )


def prefill_metrics(
    spec: ModelSpec, point: OperatingPoint, include_activations: bool = False
) -> PhaseMetrics:
    """Per-token metrics while ingesting a prompt of length L.

    Weights amortize over every prompt token in the batch (B * L); each token
    writes its KV entry; the attention-score FLOPs integrate over positions
    1..L, giving 2 * layers * heads * head_dim * (L + 1) per token on average.
    """
    if point.phase is not Phase.PREFILL:
        raise ValueError(f"prefill_metrics requires a PREFILL point, got {point.phase}")
    length = point.context_len
    kv = kv_bytes_per_token(spec)
    bytes_per_tok = weight_bytes(spec) / (point.batch_size * length) + kv
    if include_activations:
        bytes_per_tok += _activation_bytes_per_token(spec)
    matmul_weights = activated_params(spec) - embedding_params(spec)
    flops = 2 * matmul_weights + 2 * spec.num_layers * spec.num_heads * spec.head_dim * (
        length + 1
    )
    return PhaseMetrics(
        oi=flops / bytes_per_tok,
        cf=cf_request(spec, point),
        flops_per_token=float(flops),
        bytes_per_token=bytes_per_tok,
    )


def phase_metrics(
    spec: ModelSpec, point: OperatingPoint, include_activations: bool = False
) -> PhaseMetrics:
    if point.phase is Phase.PREFILL:
        return prefill_metrics(spec, point, include_activations)
    return decode_metrics(spec, point, include_activations)

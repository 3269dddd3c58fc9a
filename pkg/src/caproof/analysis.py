"""Capacity-extended roofline classification and parameter sweeps.

Beyond the classic compute-bound/bandwidth-bound split, a workload can be
capacity-limited (it fits, but no feasible batch size raises its operational
intensity to the ridge point) or capacity-exceeded (a single request does not
fit). Classification and the MFU/MBU estimates are per-device verdicts and
therefore invariant to device count: adding cards buys capacity and
throughput, never per-device intensity. Aggregate capacity enters only
through the planning outputs max_feasible_batch and min_devices, which count
weights once across the aggregation by default (parallelism-agnostic lower
bound) or per device with replicate_weights=True (upper bound).

Capacity comparisons are carried out in integer bits so feasibility and
device-count duality are exact.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

from .hardware import HardwareSpec, ridge_point
from .metrics import OperatingPoint, PhaseMetrics, phase_metrics
from .model import ModelSpec, Phase, kv_bits_per_token, weight_bits_total
from .workload import WorkloadSpec, expand, total_tokens


class BoundClass(enum.Enum):
    COMPUTE_BOUND = "compute_bound"
    BANDWIDTH_BOUND = "bandwidth_bound"
    CAPACITY_LIMITED = "capacity_limited"
    CAPACITY_EXCEEDED = "capacity_exceeded"


@dataclass(frozen=True)
class PhaseAnalysis:
    metrics: PhaseMetrics
    bound_class: BoundClass
    attainable_tokens_per_s: float
    mfu_est: float
    mbu_est: float
    max_feasible_batch: int
    min_devices: int


def _device_capacity_bits(hw: HardwareSpec) -> int:
    return int(hw.mem_capacity) * 8


def _request_bits(spec: ModelSpec, batch_size: int, context_len: int) -> int:
    return weight_bits_total(spec) + batch_size * kv_bits_per_token(spec) * context_len


def max_feasible_batch(
    spec: ModelSpec,
    hw: HardwareSpec,
    context_len: int,
    replicate_weights: bool = False,
) -> int:
    """Largest batch whose weights + KV fit the aggregation; 0 if even the
    weights do not fit."""
    if context_len < 1:
        raise ValueError(f"context_len must be >= 1, got {context_len}")
    cap = _device_capacity_bits(hw)
    weights = weight_bits_total(spec)
    kv_bits = kv_bits_per_token(spec) * context_len
    if replicate_weights:
        per_device = max(0, (cap - weights) // kv_bits)
        return hw.num_devices * per_device
    total_cap = hw.num_devices * cap
    if weights > total_cap:
        return 0
    return (total_cap - weights) // kv_bits


def min_devices(
    spec: ModelSpec,
    hw: HardwareSpec,
    point: OperatingPoint,
    replicate_weights: bool = False,
) -> int:
    """Smallest device count that fits the point's batch; 0 flags a point no
    aggregation can fit (only possible with replicated weights)."""
    cap = _device_capacity_bits(hw)
    if replicate_weights:
        per_device = (cap - weight_bits_total(spec)) // (
            kv_bits_per_token(spec) * point.context_len
        )
        if per_device < 1:
            return 0
        return -(-point.batch_size // per_device)
    need = _request_bits(spec, point.batch_size, point.context_len)
    return -(-need // cap)


def classify(
    spec: ModelSpec,
    hw: HardwareSpec,
    point: OperatingPoint,
    include_activations: bool = False,
    replicate_weights: bool = False,
) -> PhaseAnalysis:
    """Place one operating point in the capacity-extended roofline.

    Rules, in order:
    - a single request (weights + its KV) exceeds one device -> CAPACITY_EXCEEDED;
    - OI at the point >= ridge -> COMPUTE_BOUND (mfu 1, mbu ridge/oi);
    - some per-device-feasible batch reaches the ridge -> BANDWIDTH_BOUND at
      this point (mfu oi/ridge, mbu 1);
    - otherwise CAPACITY_LIMITED: mfu is the best reachable, evaluated at the
      largest per-device-feasible batch.

    OI is monotone non-decreasing in batch size (weight amortization), so
    ridge reachability is decided at that largest feasible batch.
    """
    bits = spec.weight_bits
    ridge = ridge_point(hw, bits)
    metrics = phase_metrics(spec, point, include_activations)
    feasible = max_feasible_batch(spec, hw, point.context_len, replicate_weights)
    devices = min_devices(spec, hw, point, replicate_weights)

    cap_dev = _device_capacity_bits(hw)
    if _request_bits(spec, 1, point.context_len) > cap_dev:
        return PhaseAnalysis(
            metrics=metrics,
            bound_class=BoundClass.CAPACITY_EXCEEDED,
            attainable_tokens_per_s=0.0,
            mfu_est=0.0,
            mbu_est=0.0,
            max_feasible_batch=feasible,
            min_devices=devices,
        )

    peak = hw.peak_for(bits)
    if metrics.oi >= ridge:
        bound = BoundClass.COMPUTE_BOUND
        mfu, mbu = 1.0, ridge / metrics.oi
        flops_rate = peak
    else:
        per_device_batch = (cap_dev - weight_bits_total(spec)) // (
            kv_bits_per_token(spec) * point.context_len
        )
        best = phase_metrics(
            spec,
            OperatingPoint(point.context_len, per_device_batch, point.phase),
            include_activations,
        )
        if best.oi >= ridge:
            bound = BoundClass.BANDWIDTH_BOUND
            mfu, mbu = metrics.oi / ridge, 1.0
            flops_rate = metrics.oi * hw.mem_bandwidth
        else:
            bound = BoundClass.CAPACITY_LIMITED
            mfu, mbu = best.oi / ridge, 1.0
            flops_rate = best.oi * hw.mem_bandwidth
    return PhaseAnalysis(
        metrics=metrics,
        bound_class=bound,
        attainable_tokens_per_s=flops_rate / metrics.flops_per_token * hw.num_devices,
        mfu_est=mfu,
        mbu_est=mbu,
        max_feasible_batch=feasible,
        min_devices=devices,
    )


@dataclass(frozen=True)
class SweepRow:
    row_kind: str  # "point" or "workload_total"
    phase: Phase
    batch_size: int
    context_len: int
    analysis: PhaseAnalysis
    workload: str = ""
    turn_index: Optional[int] = None
    prefill_total_tokens: Optional[int] = None
    decode_total_tokens: Optional[int] = None


CSV_COLUMNS = (
    "row_kind",
    "workload",
    "turn_index",
    "phase",
    "batch_size",
    "context_len",
    "oi",
    "cf_bytes",
    "flops_per_token",
    "bytes_per_token",
    "bound_class",
    "attainable_tokens_per_s",
    "mfu_est",
    "mbu_est",
    "max_feasible_batch",
    "min_devices",
    "prefill_total_tokens",
    "decode_total_tokens",
)


@dataclass(frozen=True)
class SweepResult:
    model: str
    hardware: str
    rows: Tuple[SweepRow, ...]

    def to_csv(self, out: TextIO) -> None:
        """Stable column schema, full float precision, deterministic order."""
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            a = row.analysis
            writer.writerow(
                [
                    row.row_kind,
                    row.workload,
                    "" if row.turn_index is None else row.turn_index,
                    row.phase.value,
                    row.batch_size,
                    row.context_len,
                    repr(a.metrics.oi),
                    repr(a.metrics.cf),
                    repr(a.metrics.flops_per_token),
                    repr(a.metrics.bytes_per_token),
                    a.bound_class.value,
                    repr(a.attainable_tokens_per_s),
                    repr(a.mfu_est),
                    repr(a.mbu_est),
                    a.max_feasible_batch,
                    a.min_devices,
                    "" if row.prefill_total_tokens is None else row.prefill_total_tokens,
                    "" if row.decode_total_tokens is None else row.decode_total_tokens,
                ]
            )


def sweep_grid(
    spec: ModelSpec,
    hw: HardwareSpec,
    batch_sizes: Sequence[int],
    context_lens: Sequence[int],
    phases: Iterable[Phase] = (Phase.PREFILL, Phase.DECODE),
    include_activations: bool = False,
    replicate_weights: bool = False,
) -> SweepResult:
    """One PhaseAnalysis per (phase, batch, context) grid point."""
    if not batch_sizes or not context_lens:
        raise ValueError("sweep grid must be non-empty")
    wanted = set(phases)
    rows: List[SweepRow] = []
    for phase in (Phase.PREFILL, Phase.DECODE):
        if phase not in wanted:
            continue
        for batch in sorted(set(batch_sizes)):
            for length in sorted(set(context_lens)):
                point = OperatingPoint(length, batch, phase)
                rows.append(
                    SweepRow(
                        row_kind="point",
                        phase=phase,
                        batch_size=batch,
                        context_len=length,
                        analysis=classify(
                            spec, hw, point, include_activations, replicate_weights
                        ),
                    )
                )
    return SweepResult(model=spec.name, hardware=hw.name, rows=tuple(rows))


def sweep_workload(
    spec: ModelSpec,
    hw: HardwareSpec,
    workload: WorkloadSpec,
    include_activations: bool = False,
    replicate_weights: bool = False,
) -> SweepResult:
    """Per-turn prefill/decode points for an agent workload, plus one
    aggregate row per phase at the final context with the token totals."""
    trace = expand(workload)
    if trace.final_context < 1:
        raise ValueError(f"workload '{workload.name}' expands to zero tokens")
    batch = workload.batch_size
    rows: List[SweepRow] = []
    for record in trace.records:
        prefill_end = record.prefill_start_context + record.prefill_tokens
        if record.prefill_tokens > 0:
            point = OperatingPoint(prefill_end, batch, Phase.PREFILL)
            rows.append(
                SweepRow(
                    row_kind="point",
                    phase=Phase.PREFILL,
                    batch_size=batch,
                    context_len=prefill_end,
                    analysis=classify(
                        spec, hw, point, include_activations, replicate_weights
                    ),
                    workload=workload.name,
                    turn_index=record.turn_index,
                )
            )
        if len(record.decode_context_lengths) > 0:
            point = OperatingPoint(record.cumulative_context, batch, Phase.DECODE)
            rows.append(
                SweepRow(
                    row_kind="point",
                    phase=Phase.DECODE,
                    batch_size=batch,
                    context_len=record.cumulative_context,
                    analysis=classify(
                        spec, hw, point, include_activations, replicate_weights
                    ),
                    workload=workload.name,
                    turn_index=record.turn_index,
                )
            )
    prefill_total, decode_total = total_tokens(trace)
    final = trace.final_context
    for phase in (Phase.PREFILL, Phase.DECODE):
        point = OperatingPoint(final, batch, phase)
        rows.append(
            SweepRow(
                row_kind="workload_total",
                phase=phase,
                batch_size=batch,
                context_len=final,
                analysis=classify(spec, hw, point, include_activations, replicate_weights),
                workload=workload.name,
                prefill_total_tokens=prefill_total,
                decode_total_tokens=decode_total,
            )
        )
    return SweepResult(model=spec.name, hardware=hw.name, rows=tuple(rows))

"""Report builders: text tables, CSV, and self-contained SVG charts.

Four chart types: the capacity-extended roofline with classified workload
points, capacity-footprint-vs-context curves per attention variant,
dense-vs-MoE footprint bars with a weight floor, and the per-agent
token/footprint/intensity profile. Text and SVG render numbers with
6 significant digits; CSV keeps full precision.
"""

from __future__ import annotations

import csv
import io
from typing import Dict, List, Sequence

from .analysis import BoundClass, SweepResult, classify
from .hardware import HardwareSpec, attainable_flops, ridge_point
from .metrics import OperatingPoint, decode_metrics
from .model import ModelSpec, Phase, kv_bytes_per_token, weight_bytes
from .svg import Canvas, LogScale, draw_frame, fmt, si
from .workload import WorkloadSpec, expand, total_tokens

CLASS_COLORS = {
    BoundClass.COMPUTE_BOUND: "#3182ce",
    BoundClass.BANDWIDTH_BOUND: "#d69e2e",
    BoundClass.CAPACITY_LIMITED: "#dd6b20",
    BoundClass.CAPACITY_EXCEEDED: "#e53e3e",
}
SERIES_COLORS = ["#3182ce", "#d69e2e", "#38a169", "#805ad5", "#dd6b20", "#319795"]


def sweep_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    result.to_csv(buf)
    return buf.getvalue()


def sweep_text(result: SweepResult) -> str:
    lines = [f"model={result.model} hardware={result.hardware}"]
    header = (
        f"{'kind':<15}{'phase':<9}{'batch':>6}{'context':>9}{'oi':>12}"
        f"{'cf_bytes':>12}  {'class':<18}{'tok/s':>12}{'mfu':>8}{'mbu':>8}"
    )
    lines.append(header)
    for row in result.rows:
        a = row.analysis
        lines.append(
            f"{row.row_kind:<15}{row.phase.value:<9}{row.batch_size:>6}"
            f"{row.context_len:>9}{a.metrics.oi:>12.6g}{a.metrics.cf:>12.6g}"
            f"  {a.bound_class.value:<18}{a.attainable_tokens_per_s:>12.6g}"
            f"{a.mfu_est:>8.3g}{a.mbu_est:>8.3g}"
        )
    return "\n".join(lines) + "\n"


def has_capacity_exceeded(result: SweepResult) -> bool:
    return any(r.analysis.bound_class is BoundClass.CAPACITY_EXCEEDED for r in result.rows)


def roofline_svg(
    model: ModelSpec, hw: HardwareSpec, result: SweepResult, title: str
) -> str:
    """Both roofline arms, the ridge point, and the swept points colored by
    boundedness class. Per-device axes."""
    bits = model.weight_bits
    peak = hw.peak_for(bits)
    ridge = ridge_point(hw, bits)
    ois = [row.analysis.metrics.oi for row in result.rows]
    lo = min(ois + [ridge]) / 4
    hi = max(ois + [ridge]) * 4

    width, height = 640, 420
    x0, y0, x1, y1 = 70, 40, width - 170, height - 60
    canvas = Canvas(width, height)
    draw_frame(canvas, x0, y0, x1, y1, title=title, x_label="operational intensity (FLOPs/byte)", y_label="attainable FLOP/s per device")
    xs = LogScale(lo, hi, x0, x1)
    y_lo = min(lo * hw.mem_bandwidth, peak) / 4
    ys = LogScale(y_lo, peak * 4, y1, y0)

    for tick in xs.ticks():
        canvas.line(xs(tick), y1, xs(tick), y1 + 4)
        canvas.text(xs(tick), y1 + 16, si(tick), size=9, anchor="middle")
    for tick in ys.ticks():
        canvas.line(x0 - 4, ys(tick), x0, ys(tick))
        canvas.text(x0 - 6, ys(tick) + 3, si(tick), size=9, anchor="end")

    # Bandwidth arm up to the ridge, then the flat compute roof.
    canvas.polyline(
        [(xs(lo), ys(lo * hw.mem_bandwidth)), (xs(ridge), ys(peak)), (xs(hi), ys(peak))],
        stroke="#222",
        width=2,
    )
    canvas.circle(xs(ridge), ys(peak), 4, fill="#222")
    canvas.text(xs(ridge), ys(peak) - 8, f"ridge {fmt(ridge)}", size=10, anchor="middle")

    for row in result.rows:
        a = row.analysis
        oi = a.metrics.oi
        y_val = attainable_flops(hw, bits, oi)
        canvas.circle(xs(oi), ys(y_val), 4, fill=CLASS_COLORS[a.bound_class], stroke="#333")

    legend_x, legend_y = x1 + 12, y0 + 10
    for i, bound in enumerate(BoundClass):
        canvas.circle(legend_x + 5, legend_y + 18 * i, 4, fill=CLASS_COLORS[bound])
        canvas.text(legend_x + 14, legend_y + 18 * i + 4, bound.value, size=9)
    return canvas.to_svg()


def compare_attention_rows(
    models: Sequence[ModelSpec], context_lens: Sequence[int], batch_size: int
) -> List[Dict[str, float]]:
    rows = []
    for length in context_lens:
        row: Dict[str, float] = {"context_len": length}
        for spec in models:
            row[f"{spec.name}_kv_bytes"] = kv_bytes_per_token(spec) * length
            row[f"{spec.name}_cf_bytes"] = (
                kv_bytes_per_token(spec) * length + weight_bytes(spec) / batch_size
            )
        rows.append(row)
    return rows


def _csv_table(columns: Sequence[str], rows: List[Dict[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [repr(row[c]) if isinstance(row[c], float) else row[c] for c in columns]
        )
    return buf.getvalue()


def compare_attention_csv(models: Sequence[ModelSpec], rows: List[Dict[str, float]]) -> str:
    columns = ["context_len"]
    for spec in models:
        columns += [f"{spec.name}_kv_bytes", f"{spec.name}_cf_bytes"]
    return _csv_table(columns, rows)


def compare_attention_svg(
    models: Sequence[ModelSpec], rows: List[Dict[str, float]], batch_size: int
) -> str:
    width, height = 620, 420
    x0, y0, x1, y1 = 80, 40, width - 150, height - 60
    canvas = Canvas(width, height)
    draw_frame(
        canvas, x0, y0, x1, y1,
        title=f"capacity footprint vs context length (batch={batch_size})",
        x_label="context length (tokens)", y_label="bytes per request",
    )
    lengths = [row["context_len"] for row in rows]
    values = [row[f"{m.name}_cf_bytes"] for m in models for row in rows]
    xs = LogScale(min(lengths), max(lengths), x0, x1)
    ys = LogScale(min(values) / 2, max(values) * 2, y1, y0)
    for tick in xs.ticks():
        canvas.line(xs(tick), y1, xs(tick), y1 + 4)
        canvas.text(xs(tick), y1 + 16, si(tick), size=9, anchor="middle")
    for tick in ys.ticks():
        canvas.line(x0 - 4, ys(tick), x0, ys(tick))
        canvas.text(x0 - 6, ys(tick) + 3, si(tick), size=9, anchor="end")
    for i, spec in enumerate(models):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        points = [(xs(row["context_len"]), ys(row[f"{spec.name}_cf_bytes"])) for row in rows]
        canvas.polyline(points, stroke=color, width=2)
        canvas.circle(x1 + 14, y0 + 12 + 18 * i, 4, fill=color)
        canvas.text(x1 + 22, y0 + 16 + 18 * i, spec.name, size=9)
    return canvas.to_svg()


def compare_moe_rows(
    models: Sequence[ModelSpec], batch_sizes: Sequence[int], context_len: int
) -> List[Dict[str, object]]:
    rows: List[Dict[str, object]] = []
    for spec in models:
        for batch in batch_sizes:
            point = OperatingPoint(context_len, batch, Phase.DECODE)
            metrics = decode_metrics(spec, point)
            rows.append(
                {
                    "model": spec.name,
                    "batch_size": batch,
                    "context_len": context_len,
                    "weight_floor_bytes": weight_bytes(spec) / batch,
                    "kv_bytes": kv_bytes_per_token(spec) * context_len,
                    "cf_bytes": metrics.cf,
                    "decode_oi": metrics.oi,
                }
            )
    return rows


def compare_moe_csv(rows: List[Dict[str, object]]) -> str:
    return _csv_table(
        ["model", "batch_size", "context_len",
         "weight_floor_bytes", "kv_bytes", "cf_bytes", "decode_oi"],
        rows,
    )


def compare_moe_svg(rows: List[Dict[str, object]], context_len: int) -> str:
    """Footprint bars with the amortized-weight floor shaded, plus decode-OI
    bars. Both panels use log axes; footprints span orders of magnitude."""
    width, height = 760, 420
    canvas = Canvas(width, height)
    mid = width // 2
    x0, y0, x1, y1 = 70, 40, mid - 30, height - 90
    cf_values = [row["weight_floor_bytes"] + row["kv_bytes"] for row in rows]
    floor_values = [row["weight_floor_bytes"] for row in rows]
    ys = LogScale(min(floor_values) / 2, max(cf_values) * 2, y1, y0)
    draw_frame(canvas, x0, y0, x1, y1, title=f"footprint per request at context {si(context_len)}", y_label="bytes per request")
    for tick in ys.ticks():
        canvas.line(x0 - 4, ys(tick), x0, ys(tick))
        canvas.text(x0 - 6, ys(tick) + 3, si(tick), size=9, anchor="end")
    slot = (x1 - x0) / len(rows)
    for i, row in enumerate(rows):
        bar_x = x0 + slot * i + slot * 0.2
        bar_w = slot * 0.6
        # full bar up to CF in the KV color, weight floor shaded over it
        cf_top = ys(row["weight_floor_bytes"] + row["kv_bytes"])
        canvas.rect(bar_x, cf_top, bar_w, y1 - cf_top, fill="#3182ce")
        floor_top = ys(row["weight_floor_bytes"])
        canvas.rect(bar_x, floor_top, bar_w, y1 - floor_top, fill="#a0aec0", opacity=0.9)
        canvas.text(bar_x + bar_w / 2, y1 + 14, f"{row['model']}", size=8, anchor="middle", rotate=20)
        canvas.text(bar_x + bar_w / 2, y1 + 26, f"B={row['batch_size']}", size=8, anchor="middle")
    canvas.rect(x0, height - 34, 10, 10, fill="#a0aec0", opacity=0.9)
    canvas.text(x0 + 14, height - 25, "model weights (amortized)", size=9)
    canvas.rect(x0 + 180, height - 34, 10, 10, fill="#3182ce")
    canvas.text(x0 + 194, height - 25, "KV cache above the floor", size=9)

    x0b, x1b = mid + 50, width - 40
    oi_values = [row["decode_oi"] for row in rows]
    ysb = LogScale(min(oi_values) / 2, max(oi_values) * 2, y1, y0)
    draw_frame(canvas, x0b, y0, x1b, y1, title="decode operational intensity", y_label="FLOPs/byte")
    for tick in ysb.ticks():
        canvas.line(x0b - 4, ysb(tick), x0b, ysb(tick))
        canvas.text(x0b - 6, ysb(tick) + 3, si(tick), size=9, anchor="end")
    slot_b = (x1b - x0b) / len(rows)
    for i, row in enumerate(rows):
        bar_x = x0b + slot_b * i + slot_b * 0.2
        top = ysb(row["decode_oi"])
        canvas.rect(bar_x, top, slot_b * 0.6, y1 - top, fill="#d69e2e")
        canvas.text(bar_x + slot_b * 0.3, y1 + 14, f"{row['model']}", size=8, anchor="middle", rotate=20)
        canvas.text(bar_x + slot_b * 0.3, y1 + 26, f"B={row['batch_size']}", size=8, anchor="middle")
    return canvas.to_svg()


def agent_profile_rows(
    model: ModelSpec, hw: HardwareSpec, workloads: Sequence[WorkloadSpec]
) -> List[Dict[str, object]]:
    rows: List[Dict[str, object]] = []
    for workload in workloads:
        trace = expand(workload)
        if trace.final_context < 1:
            raise ValueError(f"workload '{workload.name}' expands to zero tokens")
        prefill_total, decode_total = total_tokens(trace)
        final = trace.final_context
        batch = workload.batch_size
        prefill = classify(model, hw, OperatingPoint(final, batch, Phase.PREFILL))
        decode = classify(model, hw, OperatingPoint(final, batch, Phase.DECODE))
        rows.append(
            {
                "workload": workload.name,
                "turns": workload.turns,
                "batch_size": batch,
                "prefill_total_tokens": prefill_total,
                "decode_total_tokens": decode_total,
                "final_context": final,
                "cf_bytes": decode.metrics.cf,
                "prefill_oi": prefill.metrics.oi,
                "decode_oi": decode.metrics.oi,
                "prefill_class": prefill.bound_class.value,
                "decode_class": decode.bound_class.value,
                "min_devices_decode": decode.min_devices,
            }
        )
    return rows


def agent_profile_csv(rows: List[Dict[str, object]]) -> str:
    return _csv_table(
        ["workload", "turns", "batch_size", "prefill_total_tokens", "decode_total_tokens",
         "final_context", "cf_bytes", "prefill_oi", "decode_oi",
         "prefill_class", "decode_class", "min_devices_decode"],
        rows,
    )


def _bar_panel_log(canvas, x0, y0, x1, y1, labels, series, colors, title, y_label):
    """Grouped bars on a log y-axis. series: list of (name, values)."""
    all_values = [v for _, values in series for v in values if v > 0]
    ys = LogScale(min(all_values) / 2, max(all_values) * 2, y1, y0)
    draw_frame(canvas, x0, y0, x1, y1, title=title, y_label=y_label)
    for tick in ys.ticks():
        canvas.line(x0 - 4, ys(tick), x0, ys(tick))
        canvas.text(x0 - 6, ys(tick) + 3, si(tick), size=9, anchor="end")
    slot = (x1 - x0) / len(labels)
    group_w = slot * 0.7
    bar_w = group_w / len(series)
    for i, label in enumerate(labels):
        base_x = x0 + slot * i + slot * 0.15
        for j, (_, values) in enumerate(series):
            if values[i] <= 0:
                continue
            top = ys(values[i])
            canvas.rect(base_x + j * bar_w, top, bar_w * 0.9, y1 - top, fill=colors[j])
        canvas.text(base_x + group_w / 2, y1 + 14, label, size=8, anchor="middle", rotate=20)
    return ys


def agent_profile_svg(rows: List[Dict[str, object]], hw: HardwareSpec) -> str:
    """Token totals, footprint vs one-device capacity, and phase OI per agent."""
    width, height = 980, 430
    canvas = Canvas(width, height)
    labels = [str(row["workload"]) for row in rows]
    y0, y1 = 40, height - 90
    panels = [(60, 330), (390, 650), (710, 950)]

    _bar_panel_log(
        canvas, panels[0][0], y0, panels[0][1], y1, labels,
        [
            ("prefill", [float(r["prefill_total_tokens"]) for r in rows]),
            ("decode", [float(r["decode_total_tokens"]) for r in rows]),
        ],
        ["#3182ce", "#d69e2e"],
        "tokens per task", "tokens",
    )
    canvas.rect(panels[0][0], height - 34, 10, 10, fill="#3182ce")
    canvas.text(panels[0][0] + 14, height - 25, "prefill", size=9)
    canvas.rect(panels[0][0] + 70, height - 34, 10, 10, fill="#d69e2e")
    canvas.text(panels[0][0] + 84, height - 25, "decode", size=9)

    cf_scale = _bar_panel_log(
        canvas, panels[1][0], y0, panels[1][1], y1, labels,
        [("cf", [float(r["cf_bytes"]) for r in rows])],
        ["#805ad5"],
        "footprint per request (B=1 weights + KV)", "bytes",
    )
    cap_y = cf_scale(hw.mem_capacity) if cf_scale.lo <= hw.mem_capacity <= cf_scale.hi else None
    if cap_y is not None:
        canvas.line(panels[1][0], cap_y, panels[1][1], cap_y, stroke="#666", width=1.5, dash="5,3")
        canvas.text(panels[1][1] - 4, cap_y - 4, "one-device capacity", size=8, anchor="end", color="#666")

    _bar_panel_log(
        canvas, panels[2][0], y0, panels[2][1], y1, labels,
        [
            ("prefill", [float(r["prefill_oi"]) for r in rows]),
            ("decode", [float(r["decode_oi"]) for r in rows]),
        ],
        ["#3182ce", "#d69e2e"],
        "operational intensity at final context", "FLOPs/byte",
    )
    return canvas.to_svg()

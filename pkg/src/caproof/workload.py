"""Agent usage profiles and their expansion into per-turn context traces.

A workload is a deterministic multi-turn loop: each turn ingests
prefill_tokens_per_turn (system prompt, tool definitions, observations) and
generates decode_tokens_per_turn. With carry_context the context snowballs:
generated tokens stay cached and the next turn's input lands on top of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple


@dataclass(frozen=True)
class WorkloadSpec:
    name: str
    turns: int
    prefill_tokens_per_turn: int
    decode_tokens_per_turn: int
    carry_context: bool = True
    batch_size: int = 1

    def __post_init__(self):
        if self.turns < 1:
            raise ValueError(f"turns must be >= 1, got {self.turns}")
        if self.prefill_tokens_per_turn < 0:
            raise ValueError(
                f"prefill_tokens_per_turn must be >= 0, got {self.prefill_tokens_per_turn}"
            )
        if self.decode_tokens_per_turn < 0:
            raise ValueError(
                f"decode_tokens_per_turn must be >= 0, got {self.decode_tokens_per_turn}"
            )
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class TurnRecord:
    """One environment-agent exchange.

    decode_context_lengths holds the context length at which each generated
    token attends: consecutive integers starting just past the prefill.
    """

    turn_index: int
    prefill_start_context: int
    prefill_tokens: int
    decode_context_lengths: range
    cumulative_context: int


@dataclass(frozen=True)
class TurnTrace:
    workload: WorkloadSpec
    records: Tuple[TurnRecord, ...]

    @property
    def final_context(self) -> int:
        return self.records[-1].cumulative_context


def expand(spec: WorkloadSpec) -> TurnTrace:
    """Expand a workload into its deterministic per-turn trace."""
    records: List[TurnRecord] = []
    cumulative = 0
    for turn in range(spec.turns):
        start = cumulative if spec.carry_context else 0
        after_prefill = start + spec.prefill_tokens_per_turn
        decode_contexts = range(
            after_prefill + 1, after_prefill + spec.decode_tokens_per_turn + 1
        )
        cumulative = after_prefill + spec.decode_tokens_per_turn
        records.append(
            TurnRecord(
                turn_index=turn,
                prefill_start_context=start,
                prefill_tokens=spec.prefill_tokens_per_turn,
                decode_context_lengths=decode_contexts,
                cumulative_context=cumulative,
            )
        )
    return TurnTrace(workload=spec, records=tuple(records))


def total_tokens(trace: TurnTrace) -> Tuple[int, int]:
    """(prefill_total, decode_total) summed over all turns."""
    prefill = sum(r.prefill_tokens for r in trace.records)
    decode = sum(len(r.decode_context_lengths) for r in trace.records)
    return prefill, decode

"""Sublinear estimate of the optimal cover size.

Samples 100 * delta * freq set ids with replacement, asks the integral
set-probe about each, and scales the hit count back to the full family.
The sampling draws live on their own tape label so they never collide with
probe-internal randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .access import AlgoParams, ProbeContext
from .instance import SetCoverInstance
from .integral import integral_probe_set
from .randomness import Label, RandomTape, Tag

__all__ = ["EstimateReport", "estimate_opt", "sample_set_ids"]


@dataclass(frozen=True)
class EstimateReport:
    samples: int
    hits: int
    estimate: float
    queries: int


def sample_set_ids(tape: RandomTape, num_sets: int, count: int) -> list[int]:
    """The estimator's id draws: uniform with replacement, dedicated label."""
    stream = tape.stream(Label(Tag.ESTIMATOR_DRAW))
    return [int(x) for x in stream.draw_block(num_sets, count)]


def estimate_opt(inst: SetCoverInstance, params: AlgoParams, seed: int,
                 shared_cache: bool = True) -> EstimateReport:
    """Run the integral probe on 100 * delta * freq sampled sets.

    Shared-cache mode treats the whole estimate as one algorithm and lets
    probes reuse each other's oracle verdicts; strict mode gives every
    probe a fresh context so per-probe query counts stay honest.
    """
    tape = RandomTape(seed)
    count = 100 * inst.delta * inst.freq
    ids = sample_set_ids(tape, inst.num_sets, count)
    hits = 0
    queries = 0
    ctx = ProbeContext(inst, tape, params) if shared_cache else None
    for s in ids:
        probe_ctx = ctx if ctx is not None else ProbeContext(inst, tape, params)
        before = probe_ctx.query_count()
        if integral_probe_set(probe_ctx, s):
            hits += 1
        queries += probe_ctx.query_count() - before
    estimate = inst.num_sets * hits / count
    return EstimateReport(samples=count, hits=hits, estimate=estimate, queries=queries)

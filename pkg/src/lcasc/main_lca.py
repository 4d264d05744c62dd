"""Main LCA oracles with retroactive re-estimation.

The degree and weight oracles here are the boosted counterparts of the
warmup pair: every estimate is made on behalf of a later iteration
(i_star, j_star), and the gap between target and boost frame scales the
sample sizes, driving failure probabilities down exponentially in the gap.
Sampling labels include the boost frame, so re-executions on behalf of a
later iteration draw fresh randomness while earlier-phase decisions keep
theirs fixed; a smaller boost reads a prefix of the same stream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .access import ELEM, SET, ProbeContext
from .randomness import Label, Tag

__all__ = [
    "BoostFrame",
    "DegreeOutcome",
    "degree_estimate",
    "weight_estimate",
    "main_probe_weight",
    "frame_call_report",
]


@dataclass(frozen=True)
class BoostFrame:
    """Target iteration (i, j) estimated on behalf of boost iteration
    (i_star, j_star) >= (i, j) in row-major order. ``b`` counts how many
    iterations of the boost phase separate them."""

    i: int
    j: int
    i_star: int
    j_star: int

    def __post_init__(self):
        if (self.i, self.j) > (self.i_star, self.j_star):
            raise ValueError(f"target {(self.i, self.j)} beyond boost frame "
                             f"{(self.i_star, self.j_star)}")

    @property
    def b(self) -> int:
        if self.i == self.i_star:
            return self.j_star - self.j + 1
        return self.j_star

    def retarget(self, i: int, j: int) -> "BoostFrame":
        return BoostFrame(i, j, self.i_star, self.j_star)


@dataclass(frozen=True)
class DegreeOutcome:
    """Either a nonnegative degree estimate or a failure marker."""

    value: float | None

    @staticmethod
    def estimate(value: float) -> "DegreeOutcome":
        return DegreeOutcome(value)

    @staticmethod
    def fail() -> "DegreeOutcome":
        return DegreeOutcome(None)

    @property
    def failed(self) -> bool:
        return self.value is None


def _boost(frame: BoostFrame, b_override: int | None) -> int:
    return frame.b if b_override is None else b_override


def degree_estimate(ctx: ProbeContext, frame: BoostFrame, s: int,
                    b_override: int | None = None) -> DegreeOutcome:
    """Boosted effective-degree estimate for set s at iteration (i, j).

    Phase 0 returns the set size exactly. A failure at (i, j-1) propagates.
    Otherwise a multiset sample of the set is filtered through boosted
    weight estimates, first phase by phase (overflowing survivors fail the
    estimate), then iteration by iteration within the phase, and the
    surviving multiset is rescaled to the set size.
    """
    p = ctx.params
    i, j = frame.i, frame.j
    if i == 0:
        return DegreeOutcome.estimate(float(ctx.list_size((SET, s))))
    if j == 0:
        return degree_estimate(ctx, frame.retarget(i - 1, p.log_f), s, b_override)
    b = _boost(frame, b_override)
    key = ("deg", i, j, frame.i_star, frame.j_star, b, s)
    ctx.count_call(("degree_estimate", i, j, b))
    got = ctx.memo.get(key)
    if got is not None:
        return got
    out = _degree_estimate_fresh(ctx, frame, s, b)
    ctx.memo[key] = out
    return out


def _degree_estimate_fresh(ctx: ProbeContext, frame: BoostFrame, s: int,
                           b: int) -> DegreeOutcome:
    p = ctx.params
    i, j = frame.i, frame.j
    delta, K, boost = ctx.inst.delta, p.K, p.delta_boost
    prev = degree_estimate(ctx, frame.retarget(i, j - 1), s)
    if prev.failed:
        return DegreeOutcome.fail()
    t = (2 ** (i + boost * b)) * K * p.sample_scale
    ids = np.asarray(ctx.sample_neighbors(
        (SET, s), Label(Tag.MAIN_SET_SAMPLE, i=i, j=j, i_star=frame.i_star,
                        j_star=frame.j_star, vertex=s),
        t=t, m=delta), dtype=np.int64)
    for i_prime in range(1, i):
        drop = set()
        for e in _distinct(ids):
            est = weight_estimate(ctx, frame.retarget(i_prime, p.log_f), e,
                                  b_override=j)
            if est >= 0.5:
                drop.add(e)
        ids = _remove_all(ids, drop)
        if ids.size > (2 ** (i - i_prime + boost * b + boost)) * K * p.sample_scale:
            return DegreeOutcome.fail()
    for j_prime in range(1, j):
        drop = set()
        for e in _distinct(ids):
            est = weight_estimate(ctx, frame.retarget(i, j_prime), e,
                                  b_override=j - j_prime)
            if est >= 0.5:
                drop.add(e)
        ids = _remove_all(ids, drop)
    size = ctx.list_size((SET, s))
    value = ids.size * size / ((2 ** (boost * b)) * K * p.sample_scale)
    return DegreeOutcome.estimate(float(value))


def _distinct(ids: np.ndarray) -> list[int]:
    if ids.size == 0:
        return []
    _, first = np.unique(ids, return_index=True)
    return [int(ids[k]) for k in np.sort(first)]


def _remove_all(ids: np.ndarray, drop: set[int]) -> np.ndarray:
    if not drop or not ids.size:
        return ids
    return ids[~np.isin(ids, list(drop))]


def weight_estimate(ctx: ProbeContext, frame: BoostFrame, e: int,
                    b_override: int | None = None) -> float:
    """Boosted one-bit weight estimate for element e at the end of (i, j):
    returns 1/2 when enough sampled containing sets stay dense, else 0.

    Iteration 0 delegates to the end of the previous phase and grounds at
    (1, 0) -> 0. A 1/2 at (i, j-1) propagates. Otherwise the containing-set
    sample is filtered through degree estimates at (i, 1..j); clearing the
    survivor threshold at any stage answers 1/2.
    """
    p = ctx.params
    i, j = frame.i, frame.j
    if j == 0:
        if i <= 1:
            return 0.0
        return weight_estimate(ctx, frame.retarget(i - 1, p.log_f), e, b_override)
    b = _boost(frame, b_override)
    key = ("wt", i, j, frame.i_star, frame.j_star, b, e)
    ctx.count_call(("weight_estimate", i, j, b))
    got = ctx.memo.get(key)
    if got is not None:
        return got
    out = _weight_estimate_fresh(ctx, frame, e, b)
    ctx.memo[key] = out
    return out


def _weight_estimate_fresh(ctx: ProbeContext, frame: BoostFrame, e: int,
                           b: int) -> float:
    p = ctx.params
    i, j = frame.i, frame.j
    delta, K, boost = ctx.inst.delta, p.K, p.delta_boost
    if weight_estimate(ctx, frame.retarget(i, j - 1), e, b_override=None) >= 0.5:
        return 0.5
    t = (2 ** (j + boost * b)) * K * p.sample_scale
    ids = np.asarray(ctx.sample_neighbors(
        (ELEM, e), Label(Tag.MAIN_ELE_SAMPLE, i=i, j=j, i_star=frame.i_star,
                         j_star=frame.j_star, vertex=e),
        t=t, m=ctx.inst.freq), dtype=np.int64)
    for j_prime in range(1, j + 1):
        drop = set()
        for s in _distinct(ids):
            out = degree_estimate(ctx, frame.retarget(i, j_prime), s)
            if out.failed or out.value < delta / (2 ** i):
                drop.add(s)
        ids = _remove_all(ids, drop)
        if ids.size >= (2 ** (j - j_prime + boost * b + boost)) * K * p.sample_scale:
            return 0.5
    return 0.0


def sweep_weight(ctx: ProbeContext, s: int) -> float:
    """Pre-naive weight of set s from its own retroactive double sweep.

    Every tick (i, j) re-estimates all earlier iterations on behalf of
    (i, j); stored estimates rise to the running minimum of fresh ones, and
    each first crossing of the phase threshold grants that iteration's
    weight. Capped at 1 and scaled by four unless disabled.
    """
    key = ("sweep", s)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    p = ctx.params
    delta, f = ctx.inst.delta, ctx.inst.freq
    wt = 0.0
    stored: dict[tuple[int, int], float] = {}
    triggered: set[tuple[int, int]] = set()
    ticks = list(itertools.product(range(1, p.log_delta + 1), range(1, p.log_f + 1)))
    for (i, j) in ticks:
        running_min: float | None = None
        for (ti, tj) in ticks:
            if (ti, tj) > (i, j):
                break
            out = degree_estimate(ctx, BoostFrame(ti, tj, i, j), s)
            if not out.failed:
                running_min = out.value if running_min is None else min(running_min, out.value)
            cand = stored.get((ti, tj), 0.0)
            if running_min is not None:
                cand = max(cand, running_min)
            stored[(ti, tj)] = cand
            if (ti, tj) not in triggered and cand >= delta / (2 ** ti):
                triggered.add((ti, tj))
                wt += 2 ** tj / f
            if wt >= 1.0:
                wt = 1.0
                break
        if wt >= 1.0:
            break
    if p.scale_by_four:
        wt = min(wt, 1.0) * 4.0
    ctx.memo[key] = wt
    return wt


def main_probe_weight(ctx: ProbeContext, s: int) -> float:
    """Final per-set weight: the swept weight, or 1 when the naive covering
    rule fires because s is the least-id set of a member whose siblings'
    swept weights sum below 1."""
    wt = sweep_weight(ctx, s)
    for e in ctx.neighborhood((SET, s)):
        owners = ctx.neighborhood((ELEM, e))
        if s != min(owners):
            continue
        wt_e = sum(sweep_weight(ctx, s2) for s2 in owners)
        if wt_e < 1.0:
            wt = 1.0
    return wt


def frame_call_report(ctx: ProbeContext) -> list[tuple[str, int, int, int, int]]:
    """Recursive-call counters per (oracle, i, j, b), for recurrence fitting."""
    out = []
    for key, calls in sorted(ctx.call_counts.items()):
        if key[0] in ("degree_estimate", "weight_estimate"):
            _, i, j, b = key
            out.append((key[0], i, j, b, calls))
    return out

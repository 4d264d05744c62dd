"""Warmup LCA for fractional set cover.

Two mutually recursive sampled oracles answer "was set S dense at the start
of iteration (i, j)?" and "was element e covered by the end of iteration
(i, j)?". A per-set driver replays the double loop against the density
oracle, and the covering driver patches any element left uncovered through
its least-id set. All sampling flows through the probe context's tape, so
verdicts are a pure function of (instance, seed, params).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .access import ELEM, SET, ProbeContext
from .randomness import Label, Tag

__all__ = ["DensityVerdict", "is_set_dense", "is_ele_cov", "get_weight", "lca_weight"]


class DensityVerdict(Enum):
    DENSE = "dense"
    LIGHT = "light"
    BAD = "bad"


class _Multiset:
    """Sampled id multiset preserving draw order; removals drop every
    occurrence of an id."""

    def __init__(self, ids: list[int]):
        self.ids = np.asarray(ids, dtype=np.int64)

    def distinct(self) -> list[int]:
        if self.ids.size == 0:
            return []
        _, first = np.unique(self.ids, return_index=True)
        return [int(self.ids[k]) for k in np.sort(first)]

    def remove_all(self, drop: set[int]) -> None:
        if drop and self.ids.size:
            self.ids = self.ids[~np.isin(self.ids, list(drop))]

    def size(self) -> int:
        return int(self.ids.size)

    def distinct_count(self) -> int:
        return int(np.unique(self.ids).size)


def is_set_dense(ctx: ProbeContext, i: int, j: int, s: int) -> DensityVerdict:
    """Tri-state density test for set s at the beginning of iteration (i, j).

    Light immediately for sets below the phase size floor. Otherwise a
    fixed per-(i, j, s) sample of elements is filtered phase by phase
    through the coverage oracle; too many survivors of an early phase trip
    the overflow guard (Bad), and the final multiset size decides
    Dense/Light.
    """
    p = ctx.params
    key = ("dense", i, j, s)
    ctx.count_call(("is_set_dense", i, j))
    got = ctx.memo.get(key)
    if got is not None:
        return got
    verdict: DensityVerdict
    if ctx.list_size((SET, s)) < ctx.inst.delta / (2 ** i):
        verdict = DensityVerdict.LIGHT
    else:
        sample = _Multiset(ctx.sample_neighbors(
            (SET, s), Label(Tag.WARMUP_SET_SAMPLE, i=i, j=j, vertex=s),
            t=(2 ** i) * p.sample_scale, m=ctx.inst.delta))
        verdict = _filtered_density(ctx, i, j, sample)
    ctx.memo[key] = verdict
    return verdict


def _filtered_density(ctx: ProbeContext, i: int, j: int, sample: _Multiset) -> DensityVerdict:
    p = ctx.params
    for i_prime in range(1, i):
        drop = {e for e in sample.distinct() if is_ele_cov(ctx, i_prime, p.log_f, e)}
        sample.remove_all(drop)
        if sample.distinct_count() > (2 ** (i - i_prime + 2)) * p.sample_scale:
            return DensityVerdict.BAD
    drop = {e for e in sample.distinct() if is_ele_cov(ctx, i, j - 1, e)}
    sample.remove_all(drop)
    if sample.size() >= p.sample_scale / 2:
        return DensityVerdict.DENSE
    return DensityVerdict.LIGHT


def is_ele_cov(ctx: ProbeContext, i: int, j: int, e: int) -> bool:
    """Sampled test of whether element e is covered by the end of (i, j).

    Iteration 0 means the start of the phase and delegates to the end of
    the previous one; (1, 0) grounds the recursion at False. A sampled set
    contributes geometrically decaying weight for each iteration it stays
    dense; accumulating one full unit (or meeting a Bad verdict) answers
    True.
    """
    p = ctx.params
    if j == 0:
        if i == 1:
            return False
        return is_ele_cov(ctx, i - 1, p.log_f, e)
    key = ("cov", i, j, e)
    ctx.count_call(("is_ele_cov", i, j))
    got = ctx.memo.get(key)
    if got is not None:
        return got
    result = _accumulated_coverage(ctx, i, j, e)
    ctx.memo[key] = result
    return result


def _accumulated_coverage(ctx: ProbeContext, i: int, j: int, e: int) -> bool:
    p = ctx.params
    if is_ele_cov(ctx, i, j - 1, e):
        return True
    sampled = ctx.sample_neighbors(
        (ELEM, e), Label(Tag.WARMUP_ELE_SAMPLE, i=i, j=j, vertex=e),
        t=(2 ** j) * p.sample_scale, m=ctx.inst.freq)
    wt = 0.0
    for s in sampled:  # multiplicity intentional: repeats contribute again
        k = 1
        while k <= j:
            verdict = is_set_dense(ctx, i, k, s)
            if verdict is DensityVerdict.DENSE:
                wt += 2.0 ** (k - j) / p.sample_scale
                if wt >= 1.0:
                    return True
                k += 1
            elif verdict is DensityVerdict.BAD:
                return True
            else:
                break
    return False


def get_weight(ctx: ProbeContext, s: int) -> float:
    """Weight of set s under the sampled double-loop replay, in [0, 1].

    Dense verdicts add 2^j/f (capped at 1), a Bad verdict saturates the
    weight, and the first Light verdict in a phase skips to the next phase.
    """
    key = ("getw", s)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    p = ctx.params
    f = ctx.inst.freq
    wt = 0.0
    for i in range(1, p.log_delta + 1):
        for j in range(1, p.log_f + 1):
            verdict = is_set_dense(ctx, i, j, s)
            if verdict is DensityVerdict.DENSE:
                wt = min(1.0, wt + 2 ** j / f)
            elif verdict is DensityVerdict.BAD:
                wt = 1.0
            else:
                break
    ctx.memo[key] = wt
    return wt


def lca_weight(ctx: ProbeContext, s: int) -> float:
    """Covering weight of set s: the replayed weight, raised to 1 when s is
    the least-id set of some element whose total replayed weight falls
    short of 1."""
    wt = get_weight(ctx, s)
    for e in ctx.neighborhood((SET, s)):
        owners = ctx.neighborhood((ELEM, e))
        wt_e = sum(get_weight(ctx, s2) for s2 in owners)
        if wt_e < 1.0 and s == min(owners):
            wt = 1.0
    return wt

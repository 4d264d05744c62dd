"""Integral cover probes.

Weight additions of the fractional pipelines become membership coins: each
time an iteration would add 2^j/f to a set, a pre-sampled bit with that
success probability decides whether the set joins the cover instead. The
covered-element oracle is one-sided: it answers 1 only after verifying a
concrete witness set that the set-probe side also reports as chosen, which
makes set and element probes mutually consistent and every full probe
sweep a feasible cover.
"""

from __future__ import annotations

import itertools

from .access import ELEM, SET, ProbeContext
from .main_lca import BoostFrame, degree_estimate
from .randomness import Label, Tag
from .warmup_lca import DensityVerdict
from .warmup_lca import _Multiset  # shared multiset helper

__all__ = [
    "covered_estimate",
    "integral_probe_set",
    "integral_probe_element",
    "warmup_integral_probe",
    "final_frame",
]


def final_frame(ctx: ProbeContext) -> BoostFrame:
    p = ctx.params
    return BoostFrame(p.log_delta, p.log_f, p.log_delta, p.log_f)


# ---------------------------------------------------------------------------
# Main-pipeline integral probes
# ---------------------------------------------------------------------------

def trigger_in_cover(ctx: ProbeContext, s: int) -> bool:
    """Trigger part of the set probe: replay the retroactive double sweep
    and consult the membership coin at every first-time threshold crossing.
    True as soon as one consulted coin is heads."""
    key = ("itrig", s)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    p = ctx.params
    delta, f = ctx.inst.delta, ctx.inst.freq
    result = False
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
                if ctx.rounding.bit(s, ti, tj):
                    result = True
                    break
            if wt >= 1.0:
                break
        if result or wt >= 1.0:
            break
    ctx.memo[key] = result
    return result


def covered_estimate(ctx: ProbeContext, frame: BoostFrame, e: int) -> int:
    """One-sided covered test for element e at the end of iteration (i, j).

    Candidate sets are the containing sets whose membership coin for (i, j)
    is heads (truncated at random if too many); a candidate whose boosted
    degree estimate clears the phase threshold is verified against the
    set-probe side before answering 1. Growing past the per-stage survivor
    bound aborts with 0.
    """
    bit, _ = _covered_with_witness(ctx, frame, e)
    return bit


def covered_witness(ctx: ProbeContext, frame: BoostFrame, e: int) -> int | None:
    """The verified witness set behind a positive covered estimate."""
    bit, witness = _covered_with_witness(ctx, frame, e)
    return witness if bit else None


def _covered_with_witness(ctx: ProbeContext, frame: BoostFrame,
                          e: int) -> tuple[int, int | None]:
    p = ctx.params
    i, j = frame.i, frame.j
    if i == 0:
        return (0, None)
    b = frame.b
    key = ("covest", i, j, frame.i_star, frame.j_star, b, e)
    ctx.count_call(("covered_estimate", i, j, b))
    got = ctx.memo.get(key)
    if got is not None:
        return got
    if j == 1:
        prev = _covered_with_witness(ctx, frame.retarget(i - 1, p.log_f), e)
    else:
        prev = _covered_with_witness(ctx, frame.retarget(i, j - 1), e)
    if prev[0] == 1:
        ctx.memo[key] = prev
        return prev
    result = _covered_fresh(ctx, frame, e, b)
    ctx.memo[key] = result
    return result


def _covered_fresh(ctx: ProbeContext, frame: BoostFrame, e: int,
                   b: int) -> tuple[int, int | None]:
    p = ctx.params
    i, j = frame.i, frame.j
    delta, K, boost = ctx.inst.delta, p.K, p.delta_boost
    owners = ctx.neighborhood((ELEM, e))
    candidates = [s for s in owners if ctx.rounding.bit(s, i, j)]
    cap = (2 ** j) * K * p.sample_scale * (2 ** (boost * b))
    if len(candidates) > cap:
        candidates = _truncate(ctx, frame, e, candidates, cap)
    for j_prime in range(1, j + 1):
        for s in candidates:
            out = degree_estimate(ctx, frame.retarget(i, j_prime), s)
            if not out.failed and out.value >= delta / (2 ** i):
                if trigger_in_cover(ctx, s):
                    return (1, s)
        if len(candidates) > (2 ** (j - j_prime + boost + boost * b)) * K * p.sample_scale:
            return (0, None)
    return (0, None)


def _truncate(ctx: ProbeContext, frame: BoostFrame, e: int,
              candidates: list[int], cap: int) -> list[int]:
    """Uniform tape-driven selection of cap candidates, order-preserving."""
    stream = ctx.tape.stream(Label(Tag.COVERED_TRUNCATE, i=frame.i, j=frame.j,
                                   i_star=frame.i_star, j_star=frame.j_star,
                                   vertex=e))
    pool = list(range(len(candidates)))
    picked: list[int] = []
    for k in range(cap):
        idx = stream.draw(len(pool))
        picked.append(pool.pop(idx))
    return [candidates[k] for k in sorted(picked)]


def integral_probe_set(ctx: ProbeContext, s: int) -> bool:
    """Is set s in the integral cover? True when its own sweep got a heads
    coin on a fired trigger, or when it is the least-id set of a member the
    covered oracle reports uncovered at the final iteration."""
    if trigger_in_cover(ctx, s):
        return True
    fin = final_frame(ctx)
    for e in ctx.neighborhood((SET, s)):
        owners = ctx.neighborhood((ELEM, e))
        if s != min(owners):
            continue
        if covered_estimate(ctx, fin, e) == 0:
            return True
    return False


def integral_probe_element(ctx: ProbeContext, e: int) -> int:
    """A chosen set containing e: the covered oracle's verified witness when
    there is one, else the least-id containing set (which the naive rule
    then places in the cover)."""
    fin = final_frame(ctx)
    witness = covered_witness(ctx, fin, e)
    if witness is not None:
        return witness
    return min(ctx.neighborhood((ELEM, e)))


# ---------------------------------------------------------------------------
# Integral variant of the warmup LCA
# ---------------------------------------------------------------------------

def _dense_int(ctx: ProbeContext, i: int, j: int, s: int) -> DensityVerdict:
    """Density verdict for the integral warmup; same filtering structure as
    the fractional test but against witnessed coverage, on its own tape
    namespace."""
    p = ctx.params
    key = ("idense", i, j, s)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    if ctx.list_size((SET, s)) < ctx.inst.delta / (2 ** i):
        verdict = DensityVerdict.LIGHT
    else:
        sample = _Multiset(ctx.sample_neighbors(
            (SET, s), Label(Tag.WARMUP_INT_SET_SAMPLE, i=i, j=j, vertex=s),
            t=(2 ** i) * p.sample_scale, m=ctx.inst.delta))
        verdict = None
        for i_prime in range(1, i):
            drop = {e for e in sample.distinct() if _ele_covered_int(ctx, i_prime, p.log_f, e)}
            sample.remove_all(drop)
            if sample.distinct_count() > (2 ** (i - i_prime + 2)) * p.sample_scale:
                verdict = DensityVerdict.BAD
                break
        if verdict is None:
            drop = {e for e in sample.distinct() if _ele_covered_int(ctx, i, j - 1, e)}
            sample.remove_all(drop)
            verdict = (DensityVerdict.DENSE if sample.size() >= p.sample_scale / 2
                       else DensityVerdict.LIGHT)
    ctx.memo[key] = verdict
    return verdict


def _ele_covered_int(ctx: ProbeContext, i: int, j: int, e: int) -> bool:
    """Witnessed coverage for the integral warmup: True only when a sampled
    containing set is dense through some iteration whose coin is heads (or
    saturates with a Bad verdict)."""
    p = ctx.params
    if j == 0:
        if i == 1:
            return False
        return _ele_covered_int(ctx, i - 1, p.log_f, e)
    key = ("icov", i, j, e)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    result = _ele_covered_int_fresh(ctx, i, j, e)
    ctx.memo[key] = result
    return result


def _ele_covered_int_fresh(ctx: ProbeContext, i: int, j: int, e: int) -> bool:
    p = ctx.params
    if _ele_covered_int(ctx, i, j - 1, e):
        return True
    sampled = ctx.sample_neighbors(
        (ELEM, e), Label(Tag.WARMUP_INT_ELE_SAMPLE, i=i, j=j, vertex=e),
        t=(2 ** j) * p.sample_scale, m=ctx.inst.freq)
    seen: set[int] = set()
    for s in sampled:
        if s in seen:
            continue
        seen.add(s)
        # pre-sampled pruning: only coin-heads sets get density tests
        if not ctx.rounding.bit(s, i, j):
            continue
        k = 1
        while k <= j:
            verdict = _dense_int(ctx, i, k, s)
            if verdict is DensityVerdict.BAD:
                return True
            if verdict is not DensityVerdict.DENSE:
                break
            if ctx.rounding.bit(s, i, k):
                return True
            k += 1
    return False


def warmup_integral_probe(ctx: ProbeContext, s: int) -> bool:
    """Integral warmup set probe: dense iterations attempt membership via
    their coins, a Bad verdict includes the set outright, and the least-id
    naive rule covers elements the witnessed-coverage oracle misses."""
    p = ctx.params
    for i in range(1, p.log_delta + 1):
        for j in range(1, p.log_f + 1):
            verdict = _dense_int(ctx, i, j, s)
            if verdict is DensityVerdict.BAD:
                return True
            if verdict is not DensityVerdict.DENSE:
                break
            if ctx.rounding.bit(s, i, j):
                return True
    for e in ctx.neighborhood((SET, s)):
        owners = ctx.neighborhood((ELEM, e))
        if s == min(owners) and not _ele_covered_int(ctx, p.log_delta, p.log_f, e):
            return True
    return False

"""Global (non-local) executions used as ground truth.

Contains the greedy and exact baselines, the deterministic double-loop
fractional covering algorithm, its slacked variant, the retroactive-update
variant driven by a pluggable degree estimator, and the globally simulated
randomized-rounding run. All of them return a :class:`RunTrace` capturing
per-iteration state for the property checks in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .access import AlgoParams
from .instance import FractionalCover, IntegralCover, SetCoverInstance
from .randomness import Label, RandomTape, RoundingTape, Tag

__all__ = [
    "InstanceTooLarge",
    "SlackPolicy",
    "RunTrace",
    "DegreeEstimator",
    "ExactDegreeEstimator",
    "AlwaysFailEstimator",
    "SampledDegreeEstimator",
    "greedy_cover",
    "exact_cover",
    "run_alg1",
    "run_alg2",
    "run_alg6",
    "run_integral_rounding",
    "first_cover_phase_weights",
]

EXACT_SOLVER_SET_LIMIT = 24


class InstanceTooLarge(ValueError):
    """The exhaustive solver only accepts instances with few sets."""


@dataclass
class RunTrace:
    """Per-iteration snapshots of a global run.

    ``iterations`` lists the (phase, iteration) ticks in execution order.
    ``degrees[t][s]`` is the effective degree of set s at the start of tick
    t, ``covered[t][e]`` whether element e counts as covered at that point,
    and ``weight_deltas[t][s]`` the weight added to s during the tick.
    ``first_cover[e]`` is the tick index at which e first became covered
    (-1 if never) and ``chosen_incident[e]`` the number of chosen sets
    containing e at that moment (integral runs only).

    ``additions`` records every weight addition as
    (tick_index, target_phase, target_iteration, set_id, amount); for the
    plain algorithms target equals the tick itself, while the retroactive
    variant may credit weight to an earlier target.
    """

    iterations: list[tuple[int, int]] = field(default_factory=list)
    degrees: list[np.ndarray] = field(default_factory=list)
    covered: list[np.ndarray] = field(default_factory=list)
    weight_deltas: list[np.ndarray] = field(default_factory=list)
    first_cover: np.ndarray | None = None
    chosen_incident: np.ndarray | None = None
    additions: list[tuple[int, int, int, int, float]] = field(default_factory=list)

    def to_csv(self, fh) -> None:
        fh.write("iteration,kind,id,metric,value\n")
        for t, (i, j) in enumerate(self.iterations):
            tag = f"{i}.{j}"
            for s, d in enumerate(self.degrees[t]):
                fh.write(f"{tag},set,{s},degree,{int(d)}\n")
            for s, w in enumerate(self.weight_deltas[t]):
                if w:
                    fh.write(f"{tag},set,{s},weight_delta,{w!r}\n")
            for e, c in enumerate(self.covered[t]):
                if c:
                    fh.write(f"{tag},elem,{e},covered,1\n")
        if self.first_cover is not None:
            for e, t in enumerate(self.first_cover):
                fh.write(f"final,elem,{e},first_cover,{int(t)}\n")
        if self.chosen_incident is not None:
            for e, x in enumerate(self.chosen_incident):
                fh.write(f"final,elem,{e},chosen_incident,{int(x)}\n")


def _membership_arrays(inst: SetCoverInstance) -> list[np.ndarray]:
    return [np.asarray(m, dtype=np.int64) for m in inst.set_members]


def _element_arrays(inst: SetCoverInstance) -> list[np.ndarray]:
    return [np.asarray(o, dtype=np.int64) for o in inst.element_sets]


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def greedy_cover(inst: SetCoverInstance) -> IntegralCover:
    """Classic maximum-uncovered-gain greedy; ties broken by least set id."""
    covered = np.zeros(inst.num_elements, dtype=bool)
    members = _membership_arrays(inst)
    chosen: set[int] = set()
    while not covered.all():
        best, best_gain = -1, 0
        for s in range(inst.num_sets):
            if s in chosen:
                continue
            gain = int(np.count_nonzero(~covered[members[s]]))
            if gain > best_gain:
                best, best_gain = s, gain
        if best < 0:
            break  # unreachable on valid instances: every element has a set
        chosen.add(best)
        covered[members[best]] = True
    return IntegralCover(frozenset(chosen))


def exact_cover(inst: SetCoverInstance) -> IntegralCover:
    """Minimum-cardinality cover by branch and bound over set bitmasks."""
    if inst.num_sets > EXACT_SOLVER_SET_LIMIT:
        raise InstanceTooLarge(
            f"exhaustive solver limited to {EXACT_SOLVER_SET_LIMIT} sets, "
            f"got {inst.num_sets}")
    masks = []
    for ms in inst.set_members:
        acc = 0
        for e in ms:
            acc |= 1 << e
        masks.append(acc)
    universe = (1 << inst.num_elements) - 1
    best_cover = greedy_cover(inst)
    best = [len(best_cover.chosen), set(best_cover.chosen)]
    covers_elem = [tuple(inst.element_sets[e]) for e in range(inst.num_elements)]

    def lowest_uncovered(mask: int) -> int:
        return (mask & -mask).bit_length() - 1

    def recurse(covered_mask: int, chosen: set[int]) -> None:
        if covered_mask == universe:
            if len(chosen) < best[0]:
                best[0], best[1] = len(chosen), set(chosen)
            return
        if len(chosen) + 1 >= best[0]:
            # even one more set cannot beat the incumbent
            remaining = universe & ~covered_mask
            for s in range(inst.num_sets):
                if s not in chosen and (masks[s] & remaining) == remaining:
                    if len(chosen) + 1 < best[0]:
                        best[0], best[1] = len(chosen) + 1, chosen | {s}
                    return
            return
        e = lowest_uncovered(universe & ~covered_mask)
        for s in covers_elem[e]:
            if s in chosen:
                continue
            chosen.add(s)
            recurse(covered_mask | masks[s], chosen)
            chosen.remove(s)

    recurse(0, set())
    return IntegralCover(frozenset(best[1]))


# ---------------------------------------------------------------------------
# Fractional double-loop algorithm and its slacked variant
# ---------------------------------------------------------------------------

def run_alg1(inst: SetCoverInstance, tape: RandomTape | None = None,
             params: AlgoParams | None = None) -> tuple[FractionalCover, RunTrace]:
    """Deterministic baseline: in iteration (i, j) every set whose effective
    degree is at least delta/2^i gains 2^j/f, then elements of weight >= 1
    become covered. The tape argument exists for signature parity and is
    unused: this run draws no randomness."""
    del tape
    p = params or AlgoParams.from_instance(inst)
    members = _membership_arrays(inst)
    elem_sets = _element_arrays(inst)
    n, m, f = inst.num_elements, inst.num_sets, inst.freq
    wt = np.zeros(m)
    covered = np.zeros(n, dtype=bool)
    trace = RunTrace()
    tick = 0
    for i in range(1, p.log_delta + 1):
        thr = inst.delta / (2 ** i)
        for j in range(1, p.log_f + 1):
            d = np.asarray([int(np.count_nonzero(~covered[members[s]])) for s in range(m)])
            trace.iterations.append((i, j))
            trace.degrees.append(d)
            trace.covered.append(covered.copy())
            delta_w = np.zeros(m)
            for s in range(m):
                if d[s] >= thr:
                    new = min(1.0, wt[s] + 2 ** j / f)
                    delta_w[s] = new - wt[s]
                    wt[s] = new
                    trace.additions.append((tick, i, j, s, 2 ** j / f))
            trace.weight_deltas.append(delta_w)
            wt_e = np.asarray([float(wt[elem_sets[e]].sum()) for e in range(n)])
            newly = (wt_e >= 1.0) & ~covered
            covered = wt_e >= 1.0
            if trace.first_cover is None:
                trace.first_cover = np.full(n, -1, dtype=np.int64)
            trace.first_cover[newly & (trace.first_cover < 0)] = tick
            tick += 1
    return FractionalCover(list(wt)), trace


@dataclass
class SlackPolicy:
    """Threshold slack for the relaxed variant.

    ``tau(e, i, j)`` is the covering threshold for element e during
    iteration (i, j), anywhere in [ell, r]; ``jcut(s, i)`` the cut-off
    iteration of set s in phase i, in [1, log_f + 1]. Moderate sets (degree
    in [delta/2^(i+2), delta/2^i)) gain weight only while j < jcut.
    """

    ell: float = 1.0
    r: float = 1.0
    tau: Callable[[int, int, int], float] = lambda e, i, j: 1.0
    jcut: Callable[[int, int], int] = lambda s, i: 1

    def __post_init__(self):
        if not (0 < self.ell <= 1.0 <= self.r):
            raise ValueError("need 0 < ell <= 1 <= r")

    @staticmethod
    def identity() -> "SlackPolicy":
        return SlackPolicy()

    @staticmethod
    def from_tape(tape: RandomTape, ell: float, r: float, log_f: int) -> "SlackPolicy":
        """Arbitrary-but-deterministic thresholds drawn from the tape."""

        def tau(e: int, i: int, j: int) -> float:
            u = tape.stream(Label(Tag.GENERIC, i=i, j=j, vertex=e, counter=2)).draw(2 ** 20)
            return ell + (r - ell) * u / (2 ** 20 - 1)

        def jcut(s: int, i: int) -> int:
            return 1 + tape.stream(Label(Tag.GENERIC, i=i, vertex=s, counter=3)).draw(log_f + 1)

        return SlackPolicy(ell=ell, r=r, tau=tau, jcut=jcut)


def run_alg2(inst: SetCoverInstance, policy: SlackPolicy,
             params: AlgoParams | None = None) -> tuple[FractionalCover, RunTrace]:
    """Slacked variant: dense sets always gain, moderate sets gain while
    j < jcut, elements become covered at their tau threshold, and the final
    weights are rescaled by 1/ell. With ell = r = 1 and jcut == 1 this is
    operation-for-operation the baseline run."""
    p = params or AlgoParams.from_instance(inst)
    members = _membership_arrays(inst)
    elem_sets = _element_arrays(inst)
    n, m, f = inst.num_elements, inst.num_sets, inst.freq
    wt = np.zeros(m)
    covered = np.zeros(n, dtype=bool)
    trace = RunTrace()
    trace.first_cover = np.full(n, -1, dtype=np.int64)
    tick = 0
    for i in range(1, p.log_delta + 1):
        thr = inst.delta / (2 ** i)
        thr_low = inst.delta / (2 ** (i + 2))
        cut = [policy.jcut(s, i) for s in range(m)]
        for j in range(1, p.log_f + 1):
            d = np.asarray([int(np.count_nonzero(~covered[members[s]])) for s in range(m)])
            trace.iterations.append((i, j))
            trace.degrees.append(d)
            trace.covered.append(covered.copy())
            delta_w = np.zeros(m)
            for s in range(m):
                gains = d[s] >= thr or (thr_low <= d[s] < thr and j < cut[s])
                if gains:
                    new = min(1.0, wt[s] + 2 ** j / f)
                    delta_w[s] = new - wt[s]
                    wt[s] = new
                    trace.additions.append((tick, i, j, s, 2 ** j / f))
            trace.weight_deltas.append(delta_w)
            for e in range(n):
                if not covered[e]:
                    if float(wt[elem_sets[e]].sum()) >= policy.tau(e, i, j):
                        covered[e] = True
                        trace.first_cover[e] = tick
            tick += 1
    return FractionalCover([w / policy.ell for w in wt]), trace


# ---------------------------------------------------------------------------
# Retroactive-update variant with pluggable degree estimation
# ---------------------------------------------------------------------------

class DegreeEstimator:
    """Estimates the effective degree of a set at a past iteration.

    ``__call__(i_t, j_t, i_b, j_b, s)`` estimates d(i_t, j_t, S) on behalf
    of iteration (i_b, j_b), returning a float or None for failure.
    Estimators needing the live run state receive it through ``bind``.
    """

    def bind(self, run: "_Alg6Run") -> "DegreeEstimator":
        return self

    def __call__(self, i_t: int, j_t: int, i_b: int, j_b: int, s: int) -> float | None:
        raise NotImplementedError


class ExactDegreeEstimator(DegreeEstimator):
    """Replays the true degrees of the deterministic baseline run."""

    def __init__(self, inst: SetCoverInstance, params: AlgoParams | None = None):
        _, trace = run_alg1(inst, params=params)
        self._by_tick = {it: deg for it, deg in zip(trace.iterations, trace.degrees)}

    def __call__(self, i_t, j_t, i_b, j_b, s):
        return float(self._by_tick[(i_t, j_t)][s])


class AlwaysFailEstimator(DegreeEstimator):
    def __call__(self, i_t, j_t, i_b, j_b, s):
        return None


class SampledDegreeEstimator(DegreeEstimator):
    """Unbiased sampling estimator against the run's own coverage history.

    Draws 2^i_t * K positions uniformly over [1, delta]; a draw lands on a
    member of S with probability 1/delta, and landed draws are checked
    against the coverage state at the start of the target iteration. Fresh
    tape labels per (target, boost, set) keep re-executions independent.
    """

    def __init__(self, tape: RandomTape, K: int = 8):
        self.tape = tape
        self.K = K
        self._run: _Alg6Run | None = None

    def bind(self, run: "_Alg6Run") -> "SampledDegreeEstimator":
        self._run = run
        return self

    def __call__(self, i_t, j_t, i_b, j_b, s):
        run = self._run
        assert run is not None, "estimator must be bound to a run"
        members = run.members[s]
        if len(members) == 0:
            return 0.0
        t = (2 ** i_t) * self.K
        label = Label(Tag.REFERENCE_ESTIMATE, i=i_t, j=j_t, i_star=i_b, j_star=j_b,
                      vertex=s)
        pos = self.tape.stream(label).draw_block(run.inst.delta, t)
        landed = pos[pos < len(members)]
        if landed.size == 0:
            return 0.0
        uncovered = ~run.covered_at_start[(i_t, j_t)][members[landed]]
        hits = int(np.count_nonzero(uncovered))
        return hits * run.inst.delta / t


class _Alg6Run:
    """Mutable state shared with bound estimators during a retroactive run."""

    def __init__(self, inst: SetCoverInstance):
        self.inst = inst
        self.members = _membership_arrays(inst)
        self.covered_at_start: dict[tuple[int, int], np.ndarray] = {}


def run_alg6(inst: SetCoverInstance, est: DegreeEstimator, tape: RandomTape,
             params: AlgoParams | None = None) -> tuple[FractionalCover, RunTrace]:
    """Retroactive-update variant.

    Every tick (i, j), each unfinished set re-estimates its degree at all
    iterations (i', j') <= (i, j). Stored estimates are raised to the
    running minimum of the fresh ones (fresh evidence of effective degree
    never increases within a sweep), and the first time a stored estimate
    reaches delta/2^i' the set gains the weight that iteration should have
    granted. Weights are capped at 1, scaled by four at the end (unless
    disabled), and remaining uncovered elements are covered by their least
    id set.
    """
    p = params or AlgoParams.from_instance(inst)
    run = _Alg6Run(inst)
    fn = est.bind(run)
    elem_sets = _element_arrays(inst)
    n, m, f = inst.num_elements, inst.num_sets, inst.freq
    wt = np.zeros(m)
    done = np.zeros(m, dtype=bool)
    stored: dict[tuple[int, int, int], float] = {}
    triggered: set[tuple[int, int, int]] = set()
    trace = RunTrace()
    trace.first_cover = np.full(n, -1, dtype=np.int64)
    ticks = list(itertools.product(range(1, p.log_delta + 1), range(1, p.log_f + 1)))
    tick = 0
    wt_e = np.zeros(n)
    for (i, j) in ticks:
        covered = wt_e >= 1.0
        run.covered_at_start[(i, j)] = covered
        d = np.asarray([int(np.count_nonzero(~covered[run.members[s]])) for s in range(m)])
        trace.iterations.append((i, j))
        trace.degrees.append(d)
        trace.covered.append(covered.copy())
        delta_w = np.zeros(m)
        for s in range(m):
            if done[s]:
                continue
            running_min: float | None = None
            for (ti, tj) in ticks:
                if (ti, tj) > (i, j):
                    break
                fresh = fn(ti, tj, i, j, s)
                if fresh is not None:
                    running_min = fresh if running_min is None else min(running_min, fresh)
                key = (s, ti, tj)
                cand = stored.get(key, 0.0)
                if running_min is not None:
                    cand = max(cand, running_min)
                stored[key] = cand
                if key not in triggered and cand >= inst.delta / (2 ** ti):
                    triggered.add(key)
                    add = 2 ** tj / f
                    delta_w[s] += add
                    wt[s] += add
                    trace.additions.append((tick, ti, tj, s, add))
                if wt[s] >= 1.0:
                    wt[s] = 1.0
                    done[s] = True
                    break
        trace.weight_deltas.append(delta_w)
        wt_e = np.asarray([float(wt[elem_sets[e]].sum()) for e in range(n)])
        newly = (wt_e >= 1.0) & (trace.first_cover < 0)
        trace.first_cover[newly] = tick
        tick += 1
    if p.scale_by_four:
        wt = np.minimum(wt, 1.0) * 4.0
    wt_e = np.asarray([float(wt[elem_sets[e]].sum()) for e in range(n)])
    for e in range(n):
        if wt_e[e] < 1.0:
            wt[inst.least_id_set(e)] = 1.0
    return FractionalCover(list(wt)), trace


# ---------------------------------------------------------------------------
# Globally simulated randomized rounding
# ---------------------------------------------------------------------------

def run_integral_rounding(inst: SetCoverInstance, tape: RandomTape,
                          params: AlgoParams | None = None
                          ) -> tuple[IntegralCover, RunTrace]:
    """Integral analog of the baseline: each time a set would gain weight
    2^j/f it instead joins the cover when its pre-sampled coin for (i, j)
    came up heads. Elements count as covered once a containing set is in
    the cover. Ends with the least-id naive pass."""
    p = params or AlgoParams.from_instance(inst)
    members = _membership_arrays(inst)
    n, m = inst.num_elements, inst.num_sets
    coins = RoundingTape(tape, inst.freq)
    chosen: set[int] = set()
    covered = np.zeros(n, dtype=bool)
    trace = RunTrace()
    trace.first_cover = np.full(n, -1, dtype=np.int64)
    trace.chosen_incident = np.zeros(n, dtype=np.int64)
    tick = 0
    for i in range(1, p.log_delta + 1):
        thr = inst.delta / (2 ** i)
        for j in range(1, p.log_f + 1):
            d = np.asarray([int(np.count_nonzero(~covered[members[s]])) for s in range(m)])
            trace.iterations.append((i, j))
            trace.degrees.append(d)
            trace.covered.append(covered.copy())
            delta_w = np.zeros(m)
            for s in range(m):
                if s not in chosen and d[s] >= thr:
                    trace.additions.append((tick, i, j, s, 2 ** j / inst.freq))
                    if coins.bit(s, i, j):
                        chosen.add(s)
                        delta_w[s] = 1.0
            trace.weight_deltas.append(delta_w)
            newly_covered = np.zeros(n, dtype=bool)
            for s in chosen:
                newly_covered[members[s]] = True
            for e in range(n):
                if newly_covered[e] and trace.first_cover[e] < 0:
                    trace.first_cover[e] = tick
                    trace.chosen_incident[e] = sum(
                        1 for s2 in inst.element_sets[e] if s2 in chosen)
            covered = newly_covered
            tick += 1
    for e in range(n):
        if not covered[e]:
            s = inst.least_id_set(e)
            chosen.add(s)
            covered[members[s]] = True
            if trace.first_cover[e] < 0:
                trace.first_cover[e] = tick
                trace.chosen_incident[e] = 1
    return IntegralCover(frozenset(chosen)), trace


def first_cover_phase_weights(inst: SetCoverInstance, trace: RunTrace,
                              params: AlgoParams | None = None) -> list[float]:
    """For every element first covered at tick (i0, j0), the weight credited
    to iterations (i0, 1..j0) of sets containing the element that were not
    light (true degree >= delta/2^(i0+1)) at the credited iteration,
    including retroactive credits applied later in the run."""
    p = params or AlgoParams.from_instance(inst)
    del p
    if trace.first_cover is None:
        return []
    tick_of = {it: t for t, it in enumerate(trace.iterations)}
    containing = [set(o) for o in inst.element_sets]
    out = []
    for e in range(inst.num_elements):
        t0 = int(trace.first_cover[e])
        if t0 < 0:
            continue
        i0, j0 = trace.iterations[t0]
        total = 0.0
        for (_, ti, tj, s, amt) in trace.additions:
            if ti != i0 or tj > j0 or s not in containing[e]:
                continue
            d_at_target = trace.degrees[tick_of[(ti, tj)]][s]
            if d_at_target >= inst.delta / (2 ** (i0 + 1)):
                total += amt
        out.append(total)
    return out

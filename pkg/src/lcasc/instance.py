"""Set cover instances: representation, text I/O, synthetic generators, validation.

An instance is a bipartite incidence structure between sets and elements.
Both sides carry dense integer ids starting at 0 and sorted adjacency
lists, so positional neighbor lookups are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .randomness import RandomTape, Label, Tag

__all__ = [
    "SetCoverInstance",
    "IntegralCover",
    "FractionalCover",
    "ParseError",
    "ConsistencyError",
    "InfeasibleParameters",
    "Star",
    "BlockPlanted",
    "UniformRandom",
    "load_instance",
    "loads_instance",
    "save_instance",
    "dumps_instance",
    "generate_instance",
    "validate_cover",
]


class ParseError(ValueError):
    """Raised when an instance file is syntactically malformed."""


class ConsistencyError(ValueError):
    """Raised when instance data violates a structural invariant."""


class InfeasibleParameters(ValueError):
    """Raised when a generator family is asked for impossible parameters."""


@dataclass(frozen=True)
class SetCoverInstance:
    """Immutable set cover instance.

    ``set_members[s]`` lists the elements of set ``s`` in ascending order and
    ``element_sets[e]`` lists the sets containing element ``e`` in ascending
    order; the two views are mutually consistent. ``delta`` is the maximum
    set size and ``freq`` the maximum element frequency, both recomputed
    from the adjacency data rather than trusted from any header.
    """

    num_sets: int
    num_elements: int
    set_members: tuple[tuple[int, ...], ...]
    element_sets: tuple[tuple[int, ...], ...]
    delta: int
    freq: int
    # Cover planted by a generator, if any. Not part of the instance
    # identity and never serialized.
    planted_cover: frozenset[int] | None = field(default=None, compare=False)

    @staticmethod
    def from_sets(num_elements: int, sets: Sequence[Sequence[int]],
                  planted_cover: frozenset[int] | None = None) -> "SetCoverInstance":
        """Build and fully validate an instance from per-set element lists."""
        num_sets = len(sets)
        members: list[tuple[int, ...]] = []
        elem_sets: list[list[int]] = [[] for _ in range(num_elements)]
        for s, raw in enumerate(sets):
            elems = sorted(raw)
            for a, b in zip(elems, elems[1:]):
                if a == b:
                    raise ConsistencyError(f"set {s} lists element {a} twice")
            for e in elems:
                if not 0 <= e < num_elements:
                    raise ConsistencyError(f"set {s} lists out-of-range element {e}")
                elem_sets[e].append(s)
            members.append(tuple(elems))
        for e, owners in enumerate(elem_sets):
            if not owners:
                raise ConsistencyError(f"element {e} is not contained in any set")
        delta = max((len(m) for m in members), default=0)
        freq = max((len(o) for o in elem_sets), default=0)
        if delta < 1 or freq < 1:
            raise ConsistencyError("instance must have at least one nonempty set")
        return SetCoverInstance(
            num_sets=num_sets,
            num_elements=num_elements,
            set_members=tuple(members),
            element_sets=tuple(tuple(o) for o in elem_sets),
            delta=delta,
            freq=freq,
            planted_cover=planted_cover,
        )

    def least_id_set(self, e: int) -> int:
        """Smallest id among the sets containing ``e`` (naive-cover rule)."""
        return self.element_sets[e][0]


@dataclass(frozen=True)
class IntegralCover:
    """A selection of sets. Feasibility is checkable, never assumed."""

    chosen: frozenset[int]

    def __contains__(self, set_id: int) -> bool:
        return set_id in self.chosen

    def __len__(self) -> int:
        return len(self.chosen)


@dataclass
class FractionalCover:
    """Nonnegative weight per set; ``element_weight`` sums over containing sets."""

    weight: list[float]

    def total(self) -> float:
        return float(sum(self.weight))

    def element_weight(self, inst: SetCoverInstance, e: int) -> float:
        return float(sum(self.weight[s] for s in inst.element_sets[e]))

    def is_feasible(self, inst: SetCoverInstance) -> bool:
        return all(self.element_weight(inst, e) >= 1.0 - 1e-12
                   for e in range(inst.num_elements))


# ---------------------------------------------------------------------------
# Text format
#
#   setcover <num_sets> <num_elements>
#   set <set_id> <elem_id> <elem_id> ...
#
# Lines starting with '#' are comments. The canonical serialization emits
# sets in ascending id order with ascending members and a trailing newline,
# which makes save(load(save(x))) byte-identical.
# ---------------------------------------------------------------------------

def loads_instance(text: str) -> SetCoverInstance:
    header: tuple[int, int] | None = None
    rows: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "setcover" or len(fields) != 3:
                raise ParseError(f"line {lineno}: expected 'setcover <num_sets> <num_elements>'")
            try:
                header = (int(fields[1]), int(fields[2]))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: non-integer header field") from exc
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"line {lineno}: negative count in header")
            continue
        if fields[0] != "set" or len(fields) < 2:
            raise ParseError(f"line {lineno}: expected 'set <set_id> <elem_id>...'")
        try:
            sid = int(fields[1])
            elems = [int(x) for x in fields[2:]]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-integer id") from exc
        if sid in rows:
            raise ConsistencyError(f"line {lineno}: set {sid} defined twice")
        rows[sid] = elems
    if header is None:
        raise ParseError("missing 'setcover' header")
    num_sets, num_elements = header
    if set(rows) != set(range(num_sets)):
        raise ConsistencyError(
            f"header declares {num_sets} sets but ids {sorted(rows)} were defined")
    sets = [rows[s] for s in range(num_sets)]
    return SetCoverInstance.from_sets(num_elements, sets)


def load_instance(path: str) -> SetCoverInstance:
    with open(path, "r", encoding="ascii") as fh:
        return loads_instance(fh.read())


def dumps_instance(inst: SetCoverInstance) -> str:
    lines = [f"setcover {inst.num_sets} {inst.num_elements}"]
    for s in range(inst.num_sets):
        parts = " ".join(str(e) for e in inst.set_members[s])
        lines.append(f"set {s} {parts}".rstrip())
    return "\n".join(lines) + "\n"


def save_instance(inst: SetCoverInstance, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_instance(inst))


# ---------------------------------------------------------------------------
# Generator families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Star:
    """One hub set of size ``delta`` plus ``delta`` singleton sets (freq 2)."""

    delta: int


@dataclass(frozen=True)
class BlockPlanted:
    """``opt_size`` disjoint blocks of size ``delta``, replicated ``freq``
    times under independent shuffles. The block partition is an optimal
    cover of known size, recorded as ``planted_cover``."""

    opt_size: int
    delta: int
    freq: int


@dataclass(frozen=True)
class UniformRandom:
    """``n`` elements, ``m`` sets; each element joins ``f_target`` distinct
    sets chosen uniformly at random."""

    n: int
    m: int
    f_target: int


GeneratorSpec = Star | BlockPlanted | UniformRandom


def _shuffled(tape: RandomTape, label: Label, items: list[int]) -> list[int]:
    """Fisher-Yates shuffle driven entirely by the tape."""
    out = list(items)
    stream = tape.stream(label)
    for k in range(len(out) - 1, 0, -1):
        idx = stream.draw(k + 1)
        out[k], out[idx] = out[idx], out[k]
    return out


def generate_instance(family: GeneratorSpec, seed: int) -> SetCoverInstance:
    """Deterministically generate an instance from (family, seed)."""
    tape = RandomTape(seed)
    if isinstance(family, Star):
        if family.delta < 1:
            raise InfeasibleParameters("star requires delta >= 1")
        hub = list(range(family.delta))
        sets: list[list[int]] = [hub] + [[e] for e in hub]
        return SetCoverInstance.from_sets(family.delta, sets,
                                          planted_cover=frozenset({0}))
    if isinstance(family, BlockPlanted):
        if family.opt_size < 1 or family.delta < 1 or family.freq < 1:
            raise InfeasibleParameters("block-planted parameters must be positive")
        n = family.opt_size * family.delta
        sets = []
        for r in range(family.freq):
            if r == 0:
                order = list(range(n))
            else:
                order = _shuffled(tape, Label(Tag.GENERATOR, i=r, counter=1), list(range(n)))
            for k in range(family.opt_size):
                sets.append(order[k * family.delta:(k + 1) * family.delta])
        planted = frozenset(range(family.opt_size))
        return SetCoverInstance.from_sets(n, sets, planted_cover=planted)
    if isinstance(family, UniformRandom):
        if family.n < 1 or family.m < 1 or family.f_target < 1:
            raise InfeasibleParameters("uniform-random parameters must be positive")
        if family.f_target > family.m:
            raise InfeasibleParameters(
                f"f_target={family.f_target} exceeds available sets m={family.m}")
        sets = [[] for _ in range(family.m)]  # type: list[list[int]]
        for e in range(family.n):
            stream = tape.stream(Label(Tag.GENERATOR, vertex=e))
            picked: set[int] = set()
            while len(picked) < family.f_target:
                picked.add(stream.draw(family.m))
            for s in picked:
                sets[s].append(e)
        # An unused set would be empty; give it one element so delta/freq
        # metadata stay well defined without changing coverability.
        for s, members in enumerate(sets):
            if not members:
                stream = tape.stream(Label(Tag.GENERATOR, vertex=family.n + s))
                members.append(stream.draw(family.n))
        return SetCoverInstance.from_sets(family.n, sets)
    raise TypeError(f"unknown generator family: {family!r}")


def validate_cover(inst: SetCoverInstance, cover: IntegralCover) -> int | None:
    """Return None when every element has a chosen containing set, else the
    minimum uncovered element id."""
    for s in cover.chosen:
        if not 0 <= s < inst.num_sets:
            raise ConsistencyError(f"cover references unknown set {s}")
    covered = [False] * inst.num_elements
    for s in cover.chosen:
        for e in inst.set_members[s]:
            covered[e] = True
    for e, ok in enumerate(covered):
        if not ok:
            return e
    return None

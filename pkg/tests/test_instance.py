import math

import pytest
from hypothesis import given, settings, strategies as st

from lcasc.instance import (BlockPlanted, ConsistencyError, IntegralCover,
                            InfeasibleParameters, ParseError, Star,
                            UniformRandom, dumps_instance, generate_instance,
                            loads_instance, validate_cover)
from lcasc.reference import greedy_cover


def test_single_set_file():
    inst = loads_instance("setcover 1 2\nset 0 0 1\n")
    assert inst.num_sets == 1
    assert inst.set_members[0] == (0, 1)
    assert inst.delta == 2
    assert inst.freq == 1


def test_uncoverable_element_rejected():
    # element 5 declared but never listed
    with pytest.raises(ConsistencyError):
        loads_instance("setcover 1 6\nset 0 0 1 2 3 4\n")


def test_malformed_lines():
    with pytest.raises(ParseError):
        loads_instance("cover 1 2\nset 0 0 1\n")
    with pytest.raises(ParseError):
        loads_instance("setcover 1 2\nset zero 0 1\n")
    with pytest.raises(ParseError):
        loads_instance("")


def test_out_of_range_and_duplicates():
    with pytest.raises(ConsistencyError):
        loads_instance("setcover 1 2\nset 0 0 7\n")
    with pytest.raises(ConsistencyError):
        loads_instance("setcover 1 2\nset 0 0 0 1\n")
    with pytest.raises(ConsistencyError):
        loads_instance("setcover 2 2\nset 0 0 1\nset 0 1\n")


def test_comments_ignored():
    inst = loads_instance("# a comment\nsetcover 1 1\n# another\nset 0 0\n")
    assert inst.num_sets == 1


def test_round_trip_random_instance():
    inst = generate_instance(UniformRandom(n=25, m=10, f_target=3), seed=99)
    text = dumps_instance(inst)
    again = loads_instance(text)
    assert again == inst
    assert dumps_instance(again) == text


def test_star_structure():
    inst = generate_instance(Star(delta=8), seed=123)
    assert inst.num_sets == 9
    assert inst.num_elements == 8
    assert inst.set_members[0] == tuple(range(8))
    assert all(inst.set_members[s] == (s - 1,) for s in range(1, 9))
    assert inst.freq == 2
    assert inst.delta == 8


def test_block_planted_cover_is_valid():
    inst = generate_instance(BlockPlanted(opt_size=5, delta=8, freq=4), seed=7)
    assert inst.planted_cover is not None
    assert len(inst.planted_cover) == 5
    assert validate_cover(inst, IntegralCover(inst.planted_cover)) is None
    assert inst.delta == 8
    assert inst.freq == 4


def test_generator_determinism():
    a = generate_instance(UniformRandom(n=100, m=40, f_target=4), seed=5)
    b = generate_instance(UniformRandom(n=100, m=40, f_target=4), seed=5)
    assert dumps_instance(a) == dumps_instance(b)
    c = generate_instance(UniformRandom(n=100, m=40, f_target=4), seed=6)
    assert dumps_instance(a) != dumps_instance(c)


def test_infeasible_parameters():
    with pytest.raises(InfeasibleParameters):
        generate_instance(UniformRandom(n=10, m=3, f_target=4), seed=0)
    with pytest.raises(InfeasibleParameters):
        generate_instance(Star(delta=0), seed=0)


def test_validate_cover_verdicts():
    inst = generate_instance(BlockPlanted(opt_size=2, delta=3, freq=2), seed=1)
    assert validate_cover(inst, IntegralCover(frozenset(range(inst.num_sets)))) is None
    assert validate_cover(inst, IntegralCover(frozenset())) == 0
    with pytest.raises(ConsistencyError):
        validate_cover(inst, IntegralCover(frozenset({inst.num_sets})))


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=1, max_value=40),
    st.integers(min_value=1, max_value=12),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2 ** 32),
)
def test_generated_instances_satisfy_invariants(n, m, f_target, seed):
    if f_target > m:
        f_target = m
    inst = generate_instance(UniformRandom(n=n, m=m, f_target=f_target), seed=seed)
    # metadata recomputed from data
    assert inst.delta == max(len(ms) for ms in inst.set_members)
    assert inst.freq == max(len(o) for o in inst.element_sets)
    # mutual consistency of the two adjacency views
    for s, members in enumerate(inst.set_members):
        for e in members:
            assert s in inst.element_sets[e]
    for e, owners in enumerate(inst.element_sets):
        assert owners, f"element {e} uncoverable"
        for s in owners:
            assert e in inst.set_members[s]
    # handshake identity
    assert sum(map(len, inst.set_members)) == sum(map(len, inst.element_sets))
    # greedy always finds a feasible cover
    assert validate_cover(inst, greedy_cover(inst)) is None


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=8),
       st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=999))
def test_block_planted_greedy_bound(opt, delta, freq, seed):
    inst = generate_instance(BlockPlanted(opt_size=opt, delta=delta, freq=freq), seed=seed)
    greedy = greedy_cover(inst)
    assert len(greedy) <= opt * (1 + math.log(max(2, inst.delta)))

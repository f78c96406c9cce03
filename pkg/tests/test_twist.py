import itertools

import pytest

from twistlab import heyting, order, tba, twist
from twistlab.twist import full_twist, nabla_of, delta_of, tw, twist_apply


def all_twists(algebra):
    "Every (filter containing the dense elements, ideal) twist."
    for nabla in heyting.filters(algebra, require_dense=True):
        for delta in heyting.ideals(algebra):
            yield tw(algebra, nabla, delta)


def all_modal_twists(algebra):
    for nabla in tba.open_filters(algebra):
        for delta in tba.closed_ideals(algebra):
            yield tw(algebra, nabla, delta)


def test_full_twist_sizes(three, bool2):
    assert full_twist(bool2).size == 4
    assert full_twist(three).size == 9


def test_full_twist_invariants(three):
    structure = full_twist(three)
    assert nabla_of(structure) == frozenset(range(3))
    assert delta_of(structure) == frozenset(range(3))


def test_kleene_twist_pairs(kleene_twist):
    assert kleene_twist.pairs == [
        (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)]
    assert kleene_twist.size == 7


def test_tw_full_equals_full(three):
    everything = frozenset(range(three.n))
    assert tw(three, everything, everything) == full_twist(three)


def test_tw_boolean_complements(bool2):
    structure = tw(bool2, frozenset({bool2.top}), frozenset({bool2.bot}))
    assert set(structure.pairs) == {(0, 1), (1, 0)}


def test_tw_precondition_errors(three, bool4):
    with pytest.raises(ValueError, match="dense"):
        tw(three, frozenset({2}), frozenset({0}))  # misses dense mid
    with pytest.raises(ValueError, match="filter"):
        tw(three, frozenset({1}), frozenset({0}))
    with pytest.raises(ValueError, match="ideal"):
        tw(three, frozenset({1, 2}), frozenset({1}))
    algebra = tba.powerset_tba(
        order.FinitePoset.from_pairs(2, [(0, 0), (1, 1), (0, 1)]))
    with pytest.raises(ValueError, match="open filter"):
        tw(algebra, frozenset({1, 3}), frozenset({0}))  # 1 is not open
    with pytest.raises(ValueError, match="closed ideal"):
        tw(algebra, frozenset({3}), frozenset({0, 2}))  # dia(2)=3 missing


def test_twist_apply_tables(kleene_twist):
    assert twist_apply(kleene_twist, "snot", (1, 2)) == (2, 1)
    assert twist_apply(kleene_twist, "imp", (1, 2), (0, 1)) == (0, 1)
    assert twist_apply(kleene_twist, "and", (1, 2), (2, 0)) == (1, 2)
    assert twist_apply(kleene_twist, "or", (1, 0), (0, 2)) == (1, 0)
    assert twist_apply(kleene_twist, "bot") == (0, 2)
    with pytest.raises(ValueError, match="TBA"):
        twist_apply(kleene_twist, "box", (1, 2))
    with pytest.raises(ValueError, match="carrier"):
        twist_apply(kleene_twist, "snot", (2, 2))


def test_twist_apply_modal(chain2):
    algebra = tba.powerset_tba(chain2)
    structure = full_twist(algebra)
    for a, b in structure.pairs:
        assert twist_apply(structure, "box", (a, b)) == (
            int(algebra.box[a]), int(algebra.dia_table[b]))
        assert twist_apply(structure, "dia", (a, b)) == (
            int(algebra.dia_table[a]), int(algebra.box[b]))


def test_invariant_extraction(kleene_twist):
    assert nabla_of(kleene_twist) == frozenset({1, 2})
    assert delta_of(kleene_twist) == frozenset({0, 1})


def test_reconstruction_and_closure_small():
    """Closure under operations, first-projection surjectivity, invariant
    extraction and reconstruction for every twist over every small base."""
    for poset in order.enumerate_posets(3):
        algebra = order.heyting_from_poset(poset)
        if algebra.n > 6:
            continue
        for structure in all_twists(algebra):
            assert nabla_of(structure) == structure.nabla
            assert delta_of(structure) == structure.delta
            rebuilt = tw(algebra, nabla_of(structure), delta_of(structure))
            assert rebuilt.pairs == structure.pairs
            pairs = structure.pairs
            for x, y in itertools.product(pairs, repeat=2):
                for op in ("and", "or", "imp"):
                    assert twist_apply(structure, op, x, y) in structure
            for x in pairs:
                assert twist_apply(structure, "snot", x) in structure


def test_modal_closure_small():
    for poset in order.enumerate_posets(2):
        algebra = tba.powerset_tba(poset)
        for structure in all_modal_twists(algebra):
            for x in structure.pairs:
                assert twist_apply(structure, "box", x) in structure
                assert twist_apply(structure, "dia", x) in structure
            rebuilt = tw(algebra, nabla_of(structure), delta_of(structure))
            assert rebuilt.pairs == structure.pairs


def test_invariants_are_constrained(three):
    "Extracted sets are a dense-containing filter and an ideal."
    for structure in all_twists(three):
        assert three.is_filter(nabla_of(structure))
        assert heyting.dense_filter(three) <= nabla_of(structure)
        assert three.is_ideal(delta_of(structure))


def test_first_projection_surjective(kleene_twist):
    assert set(kleene_twist.firsts.tolist()) == {0, 1, 2}


def test_membership_and_index(kleene_twist):
    assert (0, 1) in kleene_twist
    assert (0, 0) not in kleene_twist
    assert kleene_twist.index((0, 1)) == 0
    assert kleene_twist.index((2, 1)) == 6
    with pytest.raises(ValueError):
        kleene_twist.index((2, 2))

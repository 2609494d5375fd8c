"""Determinization variants and their agreement."""

import pytest

from tadet import solver
from tadet.core import Atom, StructuralError, level_clock
from tadet.corpus import NAMED_MODELS, coffee_machine, random_automaton
from tadet.determinize import (
    check_deterministic,
    determinize_guard_oriented,
    determinize_standard,
    pipeline_on_the_fly,
    rebase_guard,
)
from tadet.equivalence import language_equal
from tadet.silent import remove_all_silent
from tadet.unfold import rename_clocks, unfold

X1, X2 = level_clock(1), level_clock(2)


def removed(name, k):
    return remove_all_silent(rename_clocks(unfold(NAMED_MODELS[name](), k)))


def test_rebase_unary_atoms_become_diagonals():
    g = rebase_guard(Atom(X1, "<", 3), X2)
    assert g == Atom(X1, "<", 3, X2)
    diag = Atom(X1, "<", 1, level_clock(0))
    assert rebase_guard(diag, X2) == diag
    with pytest.raises(StructuralError):
        rebase_guard(Atom(X2, "<", 1), X2)


def test_coffee_machine_merges_beeps():
    d = determinize_guard_oriented(removed("coffee-machine", 4))
    beeps = [t for t in d.transitions if t.action == "beep"]
    assert len(beeps) == 1
    from tadet.core import conj, disj

    golden = disj(
        conj(Atom(X1, ">", 0), Atom(X1, "<", 3), Atom(X1, "<", 2)),
        Atom(X1, "=", 2),
        conj(Atom(X1, ">", 0), Atom(X1, "<", 3)),
    )
    assert solver.equivalent(beeps[0].guard, golden)
    assert check_deterministic(d)


def test_nondeterministic_input_detected():
    t = removed("coffee-machine", 4)
    assert not check_deterministic(t)  # two beep guards overlap at 1.5


@pytest.mark.parametrize("k,locations", [(2, 7), (5, 63)])
def test_guard_oriented_counts_observable_loop_model(k, locations):
    assert determinize_guard_oriented(removed("nondet-silent-a", k)).location_count() == locations


@pytest.mark.parametrize("k,locations", [(2, 4), (5, 8), (10, 16)])
def test_guard_oriented_counts_plain_model(k, locations):
    assert determinize_guard_oriented(removed("nondet-plain-c", k)).location_count() == locations


@pytest.mark.parametrize("name,k", [("nondet-plain-c", 4), ("nondet-silent-d", 4)])
def test_guard_oriented_not_larger_than_standard(name, k):
    t = removed(name, k)
    assert (
        determinize_guard_oriented(t).location_count()
        <= determinize_standard(t).location_count()
    )


@pytest.mark.parametrize("name", sorted(NAMED_MODELS))
def test_variants_agree_on_named_models(name):
    t = removed(name, 3)
    new = determinize_guard_oriented(t)
    std = determinize_standard(t)
    otf = pipeline_on_the_fly(NAMED_MODELS[name](), 3)
    assert check_deterministic(new)
    assert check_deterministic(std)
    assert check_deterministic(otf)
    assert language_equal(new, std).equal
    assert language_equal(new, otf).equal


@pytest.mark.parametrize("seed", range(8))
def test_variants_agree_on_random_models(seed):
    a = random_automaton(seed)
    t = remove_all_silent(rename_clocks(unfold(a, 3)))
    new = determinize_guard_oriented(t)
    std = determinize_standard(t)
    assert check_deterministic(new) and check_deterministic(std)
    assert language_equal(new, std).equal


def test_deterministic_input_stays_put():
    t = removed("sync-chain", 2)  # single chain, nothing to merge
    d = determinize_guard_oriented(t)
    assert d.location_count() == t.location_count()
    assert d.transition_count() == t.transition_count()


def test_silent_edge_rejected():
    t = rename_clocks(unfold(coffee_machine(), 3))
    with pytest.raises(StructuralError):
        determinize_guard_oriented(t)

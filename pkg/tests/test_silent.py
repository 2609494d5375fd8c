"""Silent-transition removal: bypass, taken guard, future updates."""

import pytest
from fractions import Fraction

from tadet import solver
from tadet.core import (
    Atom,
    StructuralError,
    conj,
    level_clock,
    silent_clock,
    timed_trace,
)
from tadet.corpus import NAMED_MODELS, coffee_machine, sync_chain
from tadet.equivalence import language_equal, trace_in_language
from tadet.silent import build_context, enabling_guard, remove_all_silent, taken_guard
from tadet.unfold import rename_clocks, unfold

X1, X2 = level_clock(1), level_clock(2)


def removed_coffee(k=4):
    return remove_all_silent(rename_clocks(unfold(coffee_machine(), k)))


def test_removal_leaves_no_silent_edges():
    for make in NAMED_MODELS.values():
        t = remove_all_silent(rename_clocks(unfold(make(), 3)))
        assert t.silent_count() == 0


def test_removal_requires_renamed_tree():
    with pytest.raises(StructuralError):
        remove_all_silent(unfold(coffee_machine(), 2))


def test_bypass_guard_on_coffee_machine():
    # the silent step with guard 1<x<2 after a beep at 0<x1<3 can fire
    # some delay later iff the beep happened before 2
    t = removed_coffee()
    bypass = [
        tr for tr in t.transitions
        if tr.action == "beep" and solver.equivalent(
            tr.guard, conj(Atom(X1, ">", 0), Atom(X1, "<", 3), Atom(X1, "<", 2))
        )
    ]
    assert len(bypass) == 1


def test_enabling_guard_drops_silent_clock_terms():
    tree = rename_clocks(unfold(coffee_machine(), 4))
    silent = next(tr for tr in tree.transitions if tr.is_silent)
    ctx = build_context(tree, silent)
    eg = enabling_guard(ctx)
    assert solver.equivalent(eg, Atom(X1, "<", 2), nonneg=[X1])


def test_taken_guard_names_the_silent_clock():
    tree = rename_clocks(unfold(coffee_machine(), 4))
    silent = next(tr for tr in tree.transitions if tr.is_silent)
    ctx = build_context(tree, silent)
    tg = taken_guard(ctx)
    assert solver.equivalent(tg, Atom(silent_clock(2, 0), ">=", 0))


def test_updated_coffee_guard_is_exact():
    t = removed_coffee()
    (coffee,) = [tr.guard for tr in t.transitions if tr.action == "coffee"]
    exact = conj(Atom(X1, ">", 2), Atom(X1, "<", 3), Atom(X2, ">=", 1))
    assert solver.equivalent(coffee, exact)
    # dropping the x2 bound admits a trace the original machine rejects:
    # beep at 1.9 then coffee at 2.5 forces the brew step before the beep
    loose = conj(Atom(X1, ">", 2), Atom(X1, "<", 3), Atom(X1, ">", 1))
    assert not solver.equivalent(coffee, loose)
    original = rename_clocks(unfold(coffee_machine(), 4))
    bad = timed_trace(
        (Fraction(0), "coin"), (Fraction(19, 10), "beep"), (Fraction(5, 2), "coffee")
    )
    assert not trace_in_language(original, bad)
    assert trace_in_language(t, bad) is False


def test_sync_chain_couples_both_future_guards():
    t = remove_all_silent(rename_clocks(unfold(sync_chain(), 2)))
    by_level = sorted(
        (tr for tr in t.transitions if tr.action == "alpha"),
        key=lambda tr: t.nodes[tr.source].obs_level,
    )
    first, second = by_level
    x0 = level_clock(0)
    assert solver.equivalent(
        first.guard, conj(Atom(x0, ">", 3), Atom(x0, "<", 4))
    )
    assert solver.equivalent(
        second.guard,
        conj(Atom(x0, ">", 5), Atom(x0, "<", 6), Atom(level_clock(1), "=", 2)),
    )


@pytest.mark.parametrize("name", sorted(NAMED_MODELS))
def test_removal_preserves_bounded_language(name):
    tree = rename_clocks(unfold(NAMED_MODELS[name](), 3))
    assert language_equal(tree, remove_all_silent(tree)).equal


def test_leading_silent_reattaches_children_to_root():
    t = remove_all_silent(rename_clocks(unfold(sync_chain(), 2)))
    assert t.silent_count() == 0
    assert all(tr.source != t.root or not tr.is_silent for tr in t.transitions)
    assert any(tr.source == t.root and tr.action == "alpha" for tr in t.transitions)

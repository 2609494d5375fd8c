"""Guards, runs and structural checks."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tadet.core import (
    FALSE,
    TRUE,
    Atom,
    Clock,
    FalseGuard,
    StructuralError,
    TrueGuard,
    canonical_guard,
    check_run,
    check_strong_responsiveness,
    conj,
    disj,
    eval_guard,
    guard_atoms,
    guard_clocks,
    level_clock,
    make_automaton,
    observable_out_degree_stats,
    run_of,
    silent_clock,
    simplify_conjunction,
    substitute_clock,
    timed_trace,
    Transition,
)
from tadet.corpus import coffee_machine

X = Clock("x")
Y = Clock("y")

clocks_st = st.sampled_from([X, Y])
rel_st = st.sampled_from(["<", "<=", "=", ">=", ">"])


@st.composite
def atoms(draw):
    left = draw(clocks_st)
    right = draw(st.one_of(st.none(), clocks_st))
    if right == left:
        right = None
    return Atom(left, draw(rel_st), draw(st.integers(0, 4)), right)


def guards(depth=2):
    if depth == 0:
        return atoms()
    sub = guards(depth - 1)
    return st.one_of(
        atoms(),
        st.lists(sub, min_size=1, max_size=3).map(lambda ps: conj(*ps)),
        st.lists(sub, min_size=1, max_size=3).map(lambda ps: disj(*ps)),
    )


valuations = st.fixed_dictionaries({
    X: st.integers(0, 16).map(lambda n: Fraction(n, 4)),
    Y: st.integers(0, 16).map(lambda n: Fraction(n, 4)),
})


def test_conj_flattens_and_short_circuits():
    a = Atom(X, "<", 2)
    assert conj() is TRUE
    assert conj(a, TRUE) == a
    assert isinstance(conj(a, FALSE), FalseGuard)
    assert disj() is FALSE
    assert disj(a, TRUE) is TRUE


def test_guard_clocks_and_atoms():
    g = conj(Atom(X, "<", 2), disj(Atom(Y, ">", 1), Atom(X, "=", 3, Y)))
    assert guard_clocks(g) == frozenset((X, Y))
    assert len(guard_atoms(g)) == 3


def test_substitute_clock():
    z = Clock("z")
    g = conj(Atom(X, "<", 2), Atom(X, ">", 0, Y))
    h = substitute_clock(g, X, z)
    assert guard_clocks(h) == frozenset((z, Y))
    # a diagonal collapsing onto itself becomes a constant verdict
    assert isinstance(substitute_clock(Atom(X, ">", 0, Y), X, Y), FalseGuard)


@given(guards(), valuations)
def test_canonical_guard_preserves_semantics(g, v):
    assert eval_guard(canonical_guard(g), v) == eval_guard(g, v)


@given(st.lists(atoms(), min_size=1, max_size=4), valuations)
def test_simplify_conjunction_preserves_semantics(parts, v):
    g = conj(*parts)
    assert eval_guard(simplify_conjunction(g), v) == eval_guard(g, v)


def test_simplify_conjunction_detects_contradiction():
    g = conj(Atom(X, "<", 1), Atom(X, ">", 2))
    assert isinstance(simplify_conjunction(g), FalseGuard)


def test_level_and_silent_clock_names():
    assert level_clock(2).name == "x2"
    assert silent_clock(1, 0).name == "x1.0"
    assert level_clock(2).is_renamed


def test_accepted_run_on_coffee_machine():
    a = coffee_machine()
    ts = {(t.source, t.target, t.action): t for t in a.transitions}
    r = run_of(
        (1, ts[("q0", "q1", "coin")]),
        (2, ts[("q1", "q4", "beep")]),
        (1, ts[("q4", "q0", "refund")]),
    )
    assert check_run(a, r)
    assert r.observable_trace() == timed_trace((1, "coin"), (3, "beep"), (4, "refund"))


def test_run_violating_guard_is_rejected():
    a = coffee_machine()
    ts = {(t.source, t.target, t.action): t for t in a.transitions}
    r = run_of((1, ts[("q0", "q1", "coin")]), (5, ts[("q1", "q4", "beep")]))
    assert not check_run(a, r)


def test_run_ending_silently_is_not_well_behaving():
    a = coffee_machine()
    ts = {(t.source, t.target, t.action): t for t in a.transitions}
    r = run_of(
        (1, ts[("q0", "q1", "coin")]),
        (1, ts[("q1", "q2", "beep")]),
        (Fraction(1, 2), ts[("q2", "q3", None)]),
    )
    with pytest.raises(StructuralError):
        check_run(a, r)
    assert check_run(a, r, require_well_behaving=False)


def test_strong_responsiveness():
    assert check_strong_responsiveness(coffee_machine())
    looped = make_automaton(
        ["q0", "q1"], "q0", ["q0"], [X],
        [
            Transition("q0", "q1", None, TRUE, frozenset((X,))),
            Transition("q1", "q0", None, TRUE, frozenset((X,))),
        ],
    )
    assert not check_strong_responsiveness(looped)


def test_out_degree_stats():
    s = observable_out_degree_stats(coffee_machine())
    assert (s.locations, s.transitions, s.silent) == (5, 6, 1)
    assert s.max_out_degree == 2
    assert s.avg_out_degree == pytest.approx(6 / 5)

"""Difference-system solver: complements, DNF, satisfiability, witnesses."""

from fractions import Fraction
from itertools import product

from hypothesis import given, settings, strategies as st

from tadet import solver
from tadet.core import (
    Atom,
    Clock,
    conj,
    disj,
    eval_guard,
    guard_clocks,
)
from tadet.solver import (
    DifferenceSystem,
    ZERO_VAR,
    complement_atom,
    complement_guard,
    difference_witness,
    dnf,
    feasible_systems,
    implies,
    is_satisfiable,
    satisfying_assignment,
    to_smtlib,
)

X = Clock("x")
Y = Clock("y")
Z = Clock("z")

clocks_st = st.sampled_from([X, Y, Z])


@st.composite
def atoms(draw):
    left = draw(clocks_st)
    right = draw(st.one_of(st.none(), clocks_st))
    if right == left:
        right = None
    rel = draw(st.sampled_from(["<", "<=", "=", ">=", ">"]))
    return Atom(left, rel, draw(st.integers(0, 4)), right)


def guards(depth=2):
    if depth == 0:
        return atoms()
    sub = guards(depth - 1)
    return st.one_of(
        atoms(),
        st.lists(sub, min_size=1, max_size=3).map(lambda ps: conj(*ps)),
        st.lists(sub, min_size=1, max_size=3).map(lambda ps: disj(*ps)),
    )


def grid_points(denominator=4, horizon=5):
    steps = [Fraction(i, denominator) for i in range(horizon * denominator + 1)]
    for vx, vy, vz in product(steps, repeat=3):
        yield {X: vx, Y: vy, Z: vz}


def grid_satisfiable(g) -> bool:
    return any(eval_guard(g, v) for v in grid_points())


@given(atoms(), st.dictionaries(clocks_st, st.integers(0, 16).map(lambda n: Fraction(n, 4)), min_size=3))
def test_complement_atom_is_semantic_negation(a, v):
    assert eval_guard(complement_atom(a), v) == (not eval_guard(a, v))


@given(guards(), st.dictionaries(clocks_st, st.integers(0, 16).map(lambda n: Fraction(n, 4)), min_size=3))
def test_complement_guard_is_semantic_negation(g, v):
    assert eval_guard(complement_guard(g), v) == (not eval_guard(g, v))


@given(guards(), st.dictionaries(clocks_st, st.integers(0, 16).map(lambda n: Fraction(n, 4)), min_size=3))
def test_dnf_preserves_semantics(g, v):
    expanded = disj(*(conj(*c) for c in dnf(g)))
    assert eval_guard(expanded, v) == eval_guard(g, v)


@settings(max_examples=200)
@given(guards())
def test_satisfiability_agrees_with_grid(g):
    # integer bounds <= 4: the quarter grid up to 5 is exhaustive enough
    # to witness every satisfiable combination over three clocks
    sym = is_satisfiable(g)
    if grid_satisfiable(g):
        assert sym
    if not sym:
        assert not grid_satisfiable(g)


@settings(max_examples=200)
@given(guards())
def test_satisfying_assignment_satisfies(g):
    w = satisfying_assignment(g)
    if w is None:
        assert not is_satisfiable(g)
    else:
        full = {c: w.get(c, Fraction(0)) for c in (X, Y, Z)}
        assert eval_guard(g, full)
        assert all(v >= 0 for v in full.values())


@settings(max_examples=100)
@given(guards(), guards())
def test_difference_witness_separates(g1, g2):
    w = difference_witness(g1, g2)
    if w is None:
        assert not is_satisfiable(conj(g1, complement_guard(g2)))
    else:
        full = {c: w.get(c, Fraction(0)) for c in guard_clocks(g1) | guard_clocks(g2)}
        assert eval_guard(g1, full) and not eval_guard(g2, full)


@settings(max_examples=100)
@given(guards())
def test_feasible_systems_cover_guard(g):
    branches = list(feasible_systems(g))
    assert bool(branches) == is_satisfiable(g)
    for s in branches:
        w = s.witness()
        full = {c: w.get(c, Fraction(0)) for c in guard_clocks(g)}
        assert eval_guard(g, full)


def test_implies_and_equivalent():
    g = conj(Atom(X, ">", 1), Atom(X, "<", 2))
    assert implies(g, Atom(X, ">", 0))
    assert not implies(Atom(X, ">", 0), g)
    assert solver.equivalent(
        disj(Atom(X, "<", 1), Atom(X, ">=", 1)), Atom(X, ">=", 0)
    )


def test_negative_cycle_detected():
    s = DifferenceSystem([X, Y])
    s.add_atom(Atom(X, "<", 1, Y))
    s.add_atom(Atom(Y, "<", -1, X))
    assert not s.is_satisfiable()


def test_close_is_idempotent():
    s = DifferenceSystem([X, Y])
    s.add_atom(Atom(X, "<=", 3))
    s.add_atom(Atom(Y, ">=", 1, X))
    s.close()
    before = [row[:] for row in s.m]
    s.close()
    assert s.m == before


def test_project_out_preserves_satisfiability():
    s = DifferenceSystem([X, Y, Z])
    s.add_nonneg([X, Y, Z])
    s.add_atom(Atom(X, "<", 2))
    s.add_atom(Atom(Y, "<", 1, X))
    s.add_atom(Atom(Z, "<=", 1, Y))
    assert s.is_satisfiable()
    p = s.project_out(Y)
    assert p.is_satisfiable()
    assert Y not in p.vars
    # z - x < 2 via the eliminated middle variable
    assert p.bound(Z, X) == (Fraction(2), True)


def test_reduced_atoms_round_trip():
    s = DifferenceSystem([X, Y])
    s.add_nonneg([X, Y])
    s.add_atom(Atom(X, ">", 1))
    s.add_atom(Atom(X, "<=", 3))
    s.add_atom(Atom(Y, "=", 2, X))
    s.close()
    rebuilt = DifferenceSystem([X, Y])
    rebuilt.add_nonneg([X, Y])
    for a in s.reduced_atoms():
        rebuilt.add_atom(a)
    rebuilt.close()
    for u in s.vars:
        for v in s.vars:
            assert s.bound(u, v) == rebuilt.bound(u, v)


def test_smtlib_output_shape():
    g = conj(Atom(X, ">", 1), Atom(X, "<", 3, Y))
    text = to_smtlib(g)
    assert text.startswith("(set-logic QF_LRA)")
    assert "(declare-const c_x Real)" in text
    assert "(check-sat)" in text
    assert "(- c_x c_y)" in text

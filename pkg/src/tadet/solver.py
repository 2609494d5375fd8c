"""Satisfiability of clock guards via strictness-aware difference systems.

Guards are conjunctions/disjunctions of unary and diagonal atoms with
integer bounds: pure difference logic.  Satisfiability goes through DNF
expansion and shortest-path closure of a bound matrix over the clocks plus
a zero reference; a negative cycle means UNSAT.  SMT-LIB export is kept for
differential testing against an external solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

from .core import (
    FALSE,
    TRUE,
    And,
    Atom,
    Clock,
    FalseGuard,
    Guard,
    Or,
    ResourceLimitError,
    TrueGuard,
    conj,
    disj,
    guard_clocks,
    map_atoms,
)

_REL_COMPLEMENT = {"<": ">=", "<=": ">", ">=": "<", ">": "<="}

DEFAULT_DNF_LIMIT = 10**6


# ---------------------------------------------------------------------------
# complement


def complement_atom(a: Atom) -> Guard:
    """Negation-free complement: flip the relation; equality splits."""
    if a.rel == "=":
        return disj(Atom(a.left, "<", a.bound, a.right), Atom(a.left, ">", a.bound, a.right))
    return Atom(a.left, _REL_COMPLEMENT[a.rel], a.bound, a.right)


def complement_guard(g: Guard) -> Guard:
    """De Morgan over the formula tree with complement_atom at the leaves."""
    if isinstance(g, TrueGuard):
        return FALSE
    if isinstance(g, FalseGuard):
        return TRUE
    if isinstance(g, Atom):
        return complement_atom(g)
    if isinstance(g, And):
        return disj(*(complement_guard(p) for p in g.parts))
    if isinstance(g, Or):
        return conj(*(complement_guard(p) for p in g.parts))
    raise TypeError(f"not a guard: {g!r}")


# ---------------------------------------------------------------------------
# bounds: (value, strict) with None meaning +infinity


Bound = Optional[tuple[Fraction, bool]]  # None = unbounded


def bound_add(b1: Bound, b2: Bound) -> Bound:
    if b1 is None or b2 is None:
        return None
    return (b1[0] + b2[0], b1[1] or b2[1])


def bound_lt(b1: Bound, b2: Bound) -> bool:
    """Strictly tighter-than for upper bounds on a difference."""
    if b2 is None:
        return b1 is not None
    if b1 is None:
        return False
    return b1[0] < b2[0] or (b1[0] == b2[0] and b1[1] and not b2[1])


ZERO_VAR = Clock("__zero__")


class DifferenceSystem:
    """Bound matrix on pairwise differences of clocks (plus a zero var).

    ``bound(u, v)`` is the tightest known upper bound on u - v.  After
    :meth:`close`, the matrix satisfies the triangle inequality under
    strictness-aware addition; an entry ``d(u, u) < 0`` (or strict 0)
    witnesses a negative cycle, i.e. unsatisfiability.
    """

    def __init__(self, variables: Iterable[Clock]):
        self.vars: list[Clock] = [ZERO_VAR] + sorted(set(variables) - {ZERO_VAR})
        self._index = {v: i for i, v in enumerate(self.vars)}
        n = len(self.vars)
        self.m: list[list[Bound]] = [[None] * n for _ in range(n)]
        for i in range(n):
            self.m[i][i] = (Fraction(0), False)
        self._closed = False

    def copy(self) -> "DifferenceSystem":
        out = DifferenceSystem([])
        out.vars = list(self.vars)
        out._index = dict(self._index)
        out.m = [row[:] for row in self.m]
        out._closed = self._closed
        return out

    def add_difference(self, u: Clock, v: Clock, value, strict: bool) -> None:
        """Constrain u - v <= value (strict: <)."""
        i, j = self._index[u], self._index[v]
        nb: Bound = (Fraction(value), strict)
        if bound_lt(nb, self.m[i][j]):
            self.m[i][j] = nb
            self._closed = False

    def add_atom(self, a: Atom) -> None:
        left, right = a.left, a.right if a.right is not None else ZERO_VAR
        if a.rel in ("<", "<="):
            self.add_difference(left, right, a.bound, a.rel == "<")
        elif a.rel in (">", ">="):
            self.add_difference(right, left, -a.bound, a.rel == ">")
        else:  # '='
            self.add_difference(left, right, a.bound, False)
            self.add_difference(right, left, -a.bound, False)

    def add_nonneg(self, clocks: Iterable[Clock]) -> None:
        for c in clocks:
            if c in self._index and c != ZERO_VAR:
                self.add_difference(ZERO_VAR, c, 0, False)

    def close(self) -> None:
        n = len(self.vars)
        m = self.m
        for k in range(n):
            rowk = m[k]
            for i in range(n):
                dik = m[i][k]
                if dik is None:
                    continue
                rowi = m[i]
                for j in range(n):
                    via = bound_add(dik, rowk[j])
                    if bound_lt(via, rowi[j]):
                        rowi[j] = via
        self._closed = True

    def is_satisfiable(self) -> bool:
        if not self._closed:
            self.close()
        for i in range(len(self.vars)):
            d = self.m[i][i]
            if d is not None and (d[0] < 0 or (d[0] == 0 and d[1])):
                return False
        return True

    def bound(self, u: Clock, v: Clock) -> Bound:
        return self.m[self._index[u]][self._index[v]]

    def project_out(self, var: Clock) -> "DifferenceSystem":
        """Existentially eliminate ``var``; exact for difference systems."""
        if not self._closed:
            self.close()
        keep = [v for v in self.vars if v != var]
        out = DifferenceSystem(keep)
        for u in keep:
            for v in keep:
                b = self.bound(u, v)
                if b is not None:
                    out.add_difference(u, v, b[0], b[1])
        out.close()
        return out

    def reduced_atoms(self, skip_nonneg: bool = True) -> list[Atom]:
        """A small atom set whose closure equals this (satisfiable) system.

        Zero-cycle classes (variables at fixed offsets from each other) are
        collapsed onto one representative and chained with equalities; among
        representatives an entry is dropped when it is the exact sum of two
        others (minimal-form argument for closed matrices without zero
        cycles).  With ``skip_nonneg`` the plain x >= 0 entries are omitted
        and must be supplied as ambient constraints by the caller.
        """
        if not self._closed:
            self.close()
        if not self.is_satisfiable():
            raise ValueError("system is unsatisfiable")

        def fixed(u: Clock, v: Clock) -> Optional[Fraction]:
            duv, dvu = self.bound(u, v), self.bound(v, u)
            if duv is not None and dvu is not None and not duv[1] and not dvu[1] \
                    and duv[0] == -dvu[0]:
                return duv[0]
            return None

        rep: dict[Clock, Clock] = {}
        for v in self.vars:
            for r in rep.values():
                if r is not v and fixed(v, r) is not None:
                    rep[v] = r
                    break
            else:
                rep[v] = v

        atoms: list[Atom] = []
        for v, r in rep.items():
            if v is r:
                continue
            off = fixed(v, r)
            if r == ZERO_VAR:
                atoms.append(Atom(v, "=", off))
            elif v == ZERO_VAR:
                atoms.append(Atom(r, "=", -off))
            else:
                atoms.append(Atom(v, "=", off, r))

        reps = [v for v in self.vars if rep[v] is v]
        for u in reps:
            for v in reps:
                if u is v:
                    continue
                d = self.bound(u, v)
                if d is None:
                    continue
                if skip_nonneg and v == ZERO_VAR and d == (Fraction(0), False):
                    continue
                redundant = any(
                    w is not u and w is not v
                    and bound_add(self.bound(u, w), self.bound(w, v)) == d
                    for w in reps
                )
                if redundant:
                    continue
                rel = "<" if d[1] else "<="
                if v == ZERO_VAR:
                    atoms.append(Atom(u, rel, d[0]))
                elif u == ZERO_VAR:
                    atoms.append(Atom(v, ">" if d[1] else ">=", -d[0]))
                else:
                    atoms.append(Atom(u, rel, d[0], v))
        return atoms

    def witness(self) -> dict[Clock, Fraction]:
        """One satisfying assignment (zero var pinned to 0).

        Assigns variables sequentially; the closed matrix guarantees each
        interval is non-empty.  Requires satisfiability.
        """
        if not self.is_satisfiable():
            raise ValueError("system is unsatisfiable")
        assign: dict[Clock, Fraction] = {ZERO_VAR: Fraction(0)}
        for v in self.vars[1:]:
            lo: Bound = None  # lower bound as (value, strict)
            hi: Bound = None
            for u, val in assign.items():
                # v - u <= d(v,u)  =>  v <= val + d
                d = self.bound(v, u)
                cand = None if d is None else (val + d[0], d[1])
                if hi is None or (cand is not None and (cand[0] < hi[0] or (cand[0] == hi[0] and cand[1]))):
                    hi = cand
                # u - v <= d(u,v)  =>  v >= val - d
                d2 = self.bound(u, v)
                cand2 = None if d2 is None else (val - d2[0], d2[1])
                if lo is None or (cand2 is not None and (cand2[0] > lo[0] or (cand2[0] == lo[0] and cand2[1]))):
                    lo = cand2
            assign[v] = _pick(lo, hi)
        del assign[ZERO_VAR]
        return assign


def _pick(lo: Bound, hi: Bound) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi[0] - 1 if hi[1] else hi[0]
    if hi is None:
        return lo[0] + 1 if lo[1] else lo[0]
    if not lo[1] and lo[0] <= hi[0]:
        if not (lo[0] == hi[0] and hi[1]):
            return lo[0]
    if not hi[1] and lo[0] <= hi[0]:
        return hi[0]
    return (lo[0] + hi[0]) / 2


# ---------------------------------------------------------------------------
# DNF


def dnf(g: Guard, limit: int = DEFAULT_DNF_LIMIT) -> list[tuple[Atom, ...]]:
    """Disjunctive normal form as a list of atom conjunctions.

    An empty list is False; a list containing an empty tuple covers True.
    Raises :class:`ResourceLimitError` when the expansion would exceed
    ``limit`` conjuncts.
    """
    if isinstance(g, TrueGuard):
        return [()]
    if isinstance(g, FalseGuard):
        return []
    if isinstance(g, Atom):
        return [(g,)]
    if isinstance(g, Or):
        out: list[tuple[Atom, ...]] = []
        for p in g.parts:
            out.extend(dnf(p, limit))
            if len(out) > limit:
                raise ResourceLimitError(f"DNF exceeds {limit} conjuncts")
        return out
    if isinstance(g, And):
        acc: list[tuple[Atom, ...]] = [()]
        for p in g.parts:
            branch = dnf(p, limit)
            if len(acc) * max(len(branch), 1) > limit:
                raise ResourceLimitError(f"DNF exceeds {limit} conjuncts")
            acc = [c1 + c2 for c1 in acc for c2 in branch]
            if not acc:
                return []
        return acc
    raise TypeError(f"not a guard: {g!r}")


# ---------------------------------------------------------------------------
# satisfiability, implication


def _split_parts(parts: Sequence[Guard]) -> Optional[tuple[list[Atom], list[Or]]]:
    """Flatten a conjunction into atoms and disjunctions; None if False."""
    atoms: list[Atom] = []
    ors: list[Or] = []
    stack = list(parts)
    while stack:
        p = stack.pop()
        if isinstance(p, TrueGuard):
            continue
        if isinstance(p, FalseGuard):
            return None
        if isinstance(p, Atom):
            atoms.append(p)
        elif isinstance(p, And):
            stack.extend(p.parts)
        elif isinstance(p, Or):
            ors.append(p)
        else:
            raise TypeError(f"not a guard: {p!r}")
    return atoms, ors


def feasible_systems(
    g: Guard,
    nonneg: Optional[Iterable[Clock]] = None,
    variables: Optional[Iterable[Clock]] = None,
    limit: int = DEFAULT_DNF_LIMIT,
):
    """Satisfiable difference systems covering g, one per feasible branch.

    Disjunctions are branched one at a time with the accumulated system
    checked before descending, so an infeasible prefix cuts off all DNF
    conjuncts below it.  The union of the yielded systems equals
    g & (nonneg constraints); ``nonneg`` defaults to the guard's clocks.
    """
    nn = frozenset(guard_clocks(g) if nonneg is None else nonneg)
    vs = set(nn) | guard_clocks(g) | set(variables if variables is not None else ())
    base = DifferenceSystem(vs)
    base.add_nonneg(nn)
    visited = [0]

    def compatible(sys: DifferenceSystem, d: Guard) -> bool:
        # necessary check only: nested disjunctions of d are ignored
        split = _split_parts([d])
        if split is None:
            return False
        probe = sys.copy()
        for a in split[0]:
            probe.add_atom(a)
        return probe.is_satisfiable()

    def expand(sys: DifferenceSystem, parts: list[Guard]):
        split = _split_parts(parts)
        if split is None:
            return
        atoms, ors = split
        for a in atoms:
            sys.add_atom(a)
        visited[0] += 1
        if visited[0] > limit:
            raise ResourceLimitError(f"guard search exceeds {limit} branches")
        if not sys.is_satisfiable():
            return
        # propagate: drop infeasible disjuncts, commit forced ones
        pending = [list(o.parts) for o in ors]
        while True:
            committed = False
            filtered: list[list[Guard]] = []
            for disjuncts in pending:
                feasible = [d for d in disjuncts if compatible(sys, d)]
                if not feasible:
                    return
                if len(feasible) == 1:
                    sub = _split_parts(feasible)
                    for a in sub[0]:
                        sys.add_atom(a)
                    filtered.extend(list(o.parts) for o in sub[1])
                    committed = True
                else:
                    filtered.append(feasible)
            pending = filtered
            if not committed:
                break
            if not sys.is_satisfiable():
                return
        if not pending:
            yield sys
            return
        pending.sort(key=len)
        first, *rest = pending
        tail = [disj(*lst) for lst in rest]
        for d in first:
            yield from expand(sys.copy(), [d, *tail])

    yield from expand(base, [g])


def is_satisfiable(
    g: Guard,
    nonneg: Optional[Iterable[Clock]] = None,
    dnf_limit: int = DEFAULT_DNF_LIMIT,
) -> bool:
    """True iff some assignment (non-negative on ``nonneg``) satisfies g.

    ``nonneg`` defaults to every clock appearing in the guard.
    """
    return next(feasible_systems(g, nonneg, limit=dnf_limit), None) is not None


def satisfying_assignment(
    g: Guard, nonneg: Optional[Iterable[Clock]] = None
) -> Optional[dict[Clock, Fraction]]:
    sys = next(feasible_systems(g, nonneg), None)
    return None if sys is None else sys.witness()


def _complement_branches(a: Atom) -> list[Atom]:
    if a.rel == "=":
        return [Atom(a.left, "<", a.bound, a.right), Atom(a.left, ">", a.bound, a.right)]
    return [Atom(a.left, _REL_COMPLEMENT[a.rel], a.bound, a.right)]


def difference_witness(
    g1: Guard,
    g2: Guard,
    nonneg: Optional[Iterable[Clock]] = None,
    dnf_limit: int = DEFAULT_DNF_LIMIT,
) -> Optional[dict[Clock, Fraction]]:
    """A point satisfying g1 but not g2, or None if g1 implies g2.

    The complement of g2 is never materialized: each of its DNF conjuncts
    is excluded by branching over the complements of its atoms with
    unsatisfiable branches pruned early, which stays small where the naive
    DNF of g1 & ~g2 explodes.
    """
    nn = frozenset(guard_clocks(g1) | guard_clocks(g2) if nonneg is None else nonneg)
    variables = set(nn) | guard_clocks(g1) | guard_clocks(g2)
    negated = list(dict.fromkeys(
        tuple(s.reduced_atoms(skip_nonneg=False))
        for s in feasible_systems(g2, nonneg=nn, limit=dnf_limit)
    ))

    def exclude(sys: DifferenceSystem, i: int) -> Optional[dict[Clock, Fraction]]:
        if not sys.is_satisfiable():
            return None
        while i < len(negated):
            overlap = sys.copy()
            for a in negated[i]:
                overlap.add_atom(a)
            if overlap.is_satisfiable():
                break
            i += 1  # already disjoint from this conjunct
        if i == len(negated):
            return sys.witness()
        for a in negated[i]:
            for branch in _complement_branches(a):
                probe = sys.copy()
                probe.add_atom(branch)
                w = exclude(probe, i + 1)
                if w is not None:
                    return w
        return None

    for sys in feasible_systems(g1, nonneg=nn, variables=variables, limit=dnf_limit):
        w = exclude(sys, 0)
        if w is not None:
            return w
    return None


def implies(g1: Guard, g2: Guard, nonneg: Optional[Iterable[Clock]] = None) -> bool:
    """g1 => g2, i.e. g1 & ~g2 is unsatisfiable."""
    nn = guard_clocks(g1) | guard_clocks(g2) if nonneg is None else frozenset(nonneg)
    return not is_satisfiable(conj(g1, complement_guard(g2)), nonneg=nn)


def equivalent(g1: Guard, g2: Guard, nonneg: Optional[Iterable[Clock]] = None) -> bool:
    return implies(g1, g2, nonneg) and implies(g2, g1, nonneg)


# ---------------------------------------------------------------------------
# SMT-LIB export


_SMT_REL = {"<": "<", "<=": "<=", "=": "=", ">=": ">=", ">": ">"}


def _smt_symbol(c: Clock) -> str:
    return "c_" + c.name.replace(".", "_")


def _smt_guard(g: Guard) -> str:
    if isinstance(g, TrueGuard):
        return "true"
    if isinstance(g, FalseGuard):
        return "false"
    if isinstance(g, Atom):
        lhs = _smt_symbol(g.left)
        if g.right is not None:
            lhs = f"(- {lhs} {_smt_symbol(g.right)})"
        bound = str(g.bound) if g.bound >= 0 else f"(- {-g.bound})"
        return f"({_SMT_REL[g.rel]} {lhs} {bound})"
    op = "and" if isinstance(g, And) else "or"
    return "(" + op + " " + " ".join(_smt_guard(p) for p in g.parts) + ")"


def to_smtlib(g: Guard, clocks: Optional[Iterable[Clock]] = None) -> str:
    """Self-contained QF_LRA script asserting ``g`` over non-negative reals."""
    cs = sorted(set(clocks) if clocks is not None else guard_clocks(g))
    lines = ["(set-logic QF_LRA)"]
    for c in cs:
        lines.append(f"(declare-const {_smt_symbol(c)} Real)")
    for c in cs:
        lines.append(f"(assert (>= {_smt_symbol(c)} 0))")
    lines.append(f"(assert {_smt_guard(g)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"

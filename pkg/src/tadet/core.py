"""Core types for timed automata with silent transitions.

Clocks, guards, transitions and automata are immutable values; the trace
semantics (delay/jump) is implemented with exact rational arithmetic so
that guard evaluation at integer bounds is never subject to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

Rational = Union[int, Fraction]
LocId = Hashable

RELS = ("<", "<=", "=", ">=", ">")

# complement of each relation; '=' needs a disjunction and is handled separately
_REL_COMPLEMENT = {"<": ">=", "<=": ">", ">=": "<", ">": "<="}
_REL_SWAP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


class StructuralError(ValueError):
    """A run or automaton violates a structural precondition."""


class UnsupportedInputError(ValueError):
    """Input uses a feature outside the supported fragment."""


class ResourceLimitError(RuntimeError):
    """A configurable expansion limit was exceeded."""


# ---------------------------------------------------------------------------
# clocks


@dataclass(frozen=True, order=True)
class Clock:
    """A clock variable.

    ``level``/``silent`` identify clocks introduced by renaming: ``x_i`` is
    reset on the i-th observable transition of a path, ``x_{i,j}`` on the
    j-th consecutive silent transition after observable level i.  Original
    model clocks carry ``level == -1``.
    """

    name: str
    level: int = -1
    silent: int = -1

    @property
    def is_renamed(self) -> bool:
        return self.level >= 0

    def __str__(self) -> str:
        return self.name


def level_clock(i: int) -> Clock:
    if i < 0:
        raise ValueError("observable level must be non-negative")
    return Clock(f"x{i}", level=i)


def silent_clock(i: int, j: int) -> Clock:
    if i < 0 or j < 0:
        raise ValueError("silent-level indices must be non-negative")
    return Clock(f"x{i}.{j}", level=i, silent=j)


X0 = level_clock(0)


# ---------------------------------------------------------------------------
# guards


class Guard:
    """Base class for the negation-free guard formula tree."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueGuard(Guard):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseGuard(Guard):
    def __str__(self) -> str:
        return "false"


TRUE = TrueGuard()
FALSE = FalseGuard()


@dataclass(frozen=True)
class Atom(Guard):
    """``left rel bound`` or, with ``right`` present, ``left - right rel bound``."""

    left: Clock
    rel: str
    bound: Rational
    right: Optional[Clock] = None

    def __post_init__(self) -> None:
        if self.rel not in RELS:
            raise ValueError(f"bad relation {self.rel!r}")
        if self.right is not None and self.right == self.left:
            raise ValueError("diagonal atom needs two distinct clocks")

    @property
    def is_diagonal(self) -> bool:
        return self.right is not None

    def __str__(self) -> str:
        lhs = self.left.name if self.right is None else f"{self.left.name}-{self.right.name}"
        return f"{lhs}{self.rel}{self.bound}"


@dataclass(frozen=True)
class And(Guard):
    parts: tuple[Guard, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Or(Guard):
    parts: tuple[Guard, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(str(p) for p in self.parts) + ")"


def conj(*parts: Guard) -> Guard:
    """Conjunction with flattening; True units and False short-circuit."""
    flat: list[Guard] = []
    for p in parts:
        if isinstance(p, FalseGuard):
            return FALSE
        if isinstance(p, TrueGuard):
            continue
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts: Guard) -> Guard:
    flat: list[Guard] = []
    for p in parts:
        if isinstance(p, TrueGuard):
            return TRUE
        if isinstance(p, FalseGuard):
            continue
        if isinstance(p, Or):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def atom(left: Clock, rel: str, bound: Rational, right: Optional[Clock] = None) -> Atom:
    return Atom(left, rel, bound, right)


def guard_clocks(g: Guard) -> frozenset[Clock]:
    if isinstance(g, Atom):
        return frozenset((g.left,) if g.right is None else (g.left, g.right))
    if isinstance(g, (And, Or)):
        out: frozenset[Clock] = frozenset()
        for p in g.parts:
            out |= guard_clocks(p)
        return out
    return frozenset()


def guard_atoms(g: Guard) -> list[Atom]:
    """All atoms of the formula tree, in left-to-right order."""
    if isinstance(g, Atom):
        return [g]
    if isinstance(g, (And, Or)):
        out: list[Atom] = []
        for p in g.parts:
            out.extend(guard_atoms(p))
        return out
    return []


def map_atoms(g: Guard, fn) -> Guard:
    """Rebuild the formula with ``fn`` applied to each atom (fn returns a Guard)."""
    if isinstance(g, Atom):
        return fn(g)
    if isinstance(g, And):
        return conj(*(map_atoms(p, fn) for p in g.parts))
    if isinstance(g, Or):
        return disj(*(map_atoms(p, fn) for p in g.parts))
    return g


def substitute_clock(g: Guard, old: Clock, new: Clock) -> Guard:
    def sub(a: Atom) -> Guard:
        left = new if a.left == old else a.left
        right = new if a.right == old else a.right
        if right is not None and left == right:
            # x - x rel n collapses to 0 rel n
            sat = _compare(0, a.rel, a.bound)
            return TRUE if sat else FALSE
        return Atom(left, a.rel, a.bound, right)

    return map_atoms(g, sub)


def rename_guard(g: Guard, mapping: Mapping[Clock, Clock]) -> Guard:
    def sub(a: Atom) -> Guard:
        left = mapping.get(a.left, a.left)
        right = mapping.get(a.right, a.right) if a.right is not None else None
        if right is not None and left == right:
            return TRUE if _compare(0, a.rel, a.bound) else FALSE
        return Atom(left, a.rel, a.bound, right)

    return map_atoms(g, sub)


def _compare(value: Rational, rel: str, bound: Rational) -> bool:
    if rel == "<":
        return value < bound
    if rel == "<=":
        return value <= bound
    if rel == "=":
        return value == bound
    if rel == ">=":
        return value >= bound
    return value > bound


def eval_guard(g: Guard, valuation: Mapping[Clock, Rational]) -> bool:
    if isinstance(g, TrueGuard):
        return True
    if isinstance(g, FalseGuard):
        return False
    if isinstance(g, Atom):
        v = valuation[g.left]
        if g.right is not None:
            v = v - valuation[g.right]
        return _compare(v, g.rel, g.bound)
    if isinstance(g, And):
        return all(eval_guard(p, valuation) for p in g.parts)
    if isinstance(g, Or):
        return any(eval_guard(p, valuation) for p in g.parts)
    raise TypeError(f"not a guard: {g!r}")


def _atom_key(a: Atom):
    return (a.left.name, a.right.name if a.right else "", a.rel, a.bound)


def canonical_guard(g: Guard) -> Guard:
    """Sorted, deduplicated form usable as a dictionary key.

    Purely syntactic; two semantically equal guards need not canonicalize
    to the same value.
    """
    if isinstance(g, Atom) or isinstance(g, (TrueGuard, FalseGuard)):
        return g
    parts = tuple(canonical_guard(p) for p in g.parts)
    seen = []
    for p in sorted(set(parts), key=repr):
        seen.append(p)
    if isinstance(g, And):
        return conj(*seen)
    return disj(*seen)


def simplify_conjunction(g: Guard) -> Guard:
    """Keep only the tightest lower/upper bound per clock (or clock pair).

    Only applies when ``g`` is a conjunction of atoms; anything containing a
    disjunction is returned unchanged.  Semantics-preserving.
    """
    if isinstance(g, (TrueGuard, FalseGuard, Atom)):
        atoms = guard_atoms(g)
    elif isinstance(g, And) and all(isinstance(p, Atom) for p in g.parts):
        atoms = list(g.parts)
    else:
        return g

    # key -> (value, strict) tightest bound on (left - right)
    uppers: dict[tuple[Clock, Optional[Clock]], tuple[Rational, bool]] = {}
    lowers: dict[tuple[Clock, Optional[Clock]], tuple[Rational, bool]] = {}

    def put(table, key, value, strict, tighter):
        cur = table.get(key)
        if cur is None or tighter((value, strict), cur):
            table[key] = (value, strict)

    def tighter_upper(a, b):  # smaller value, or same value but strict
        return a[0] < b[0] or (a[0] == b[0] and a[1] and not b[1])

    def tighter_lower(a, b):
        return a[0] > b[0] or (a[0] == b[0] and a[1] and not b[1])

    for a in atoms:
        key = (a.left, a.right)
        if a.rel in ("<", "<="):
            put(uppers, key, a.bound, a.rel == "<", tighter_upper)
        elif a.rel in (">", ">="):
            put(lowers, key, a.bound, a.rel == ">", tighter_lower)
        else:  # '='
            put(uppers, key, a.bound, False, tighter_upper)
            put(lowers, key, a.bound, False, tighter_lower)

    out: list[Guard] = []
    for key in sorted(set(uppers) | set(lowers), key=lambda k: (k[0].name, k[1].name if k[1] else "")):
        left, right = key
        up = uppers.get(key)
        lo = lowers.get(key)
        if up is not None and lo is not None:
            if lo[0] > up[0] or (lo[0] == up[0] and (lo[1] or up[1])):
                return FALSE
            if lo[0] == up[0]:
                out.append(Atom(left, "=", up[0], right))
                continue
        if lo is not None:
            out.append(Atom(left, ">" if lo[1] else ">=", lo[0], right))
        if up is not None:
            out.append(Atom(left, "<" if up[1] else "<=", up[0], right))
    return conj(*out)


# ---------------------------------------------------------------------------
# automata


SILENT = None  # action value of a silent transition


@dataclass(frozen=True)
class Transition:
    source: LocId
    target: LocId
    action: Optional[str]  # None for silent
    guard: Guard = TRUE
    resets: frozenset[Clock] = frozenset()

    @property
    def is_silent(self) -> bool:
        return self.action is None

    def __str__(self) -> str:
        label = "eps" if self.is_silent else self.action
        rst = "{" + ",".join(sorted(c.name for c in self.resets)) + "}"
        return f"{self.source} --{label},{self.guard},{rst}--> {self.target}"


@dataclass(frozen=True)
class TimedAutomaton:
    """A timed automaton, possibly with silent transitions.

    The same type represents input eNTA models and the tree-shaped
    intermediate forms of the pipeline; tree instances carry node metadata
    in :class:`tadet.unfold.Tree`.
    """

    locations: frozenset[LocId]
    initial: LocId
    accepting: frozenset[LocId]
    clocks: frozenset[Clock]
    transitions: tuple[Transition, ...]
    invariants: Mapping[LocId, Guard] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.initial not in self.locations:
            raise StructuralError("initial location not declared")
        for q in self.accepting:
            if q not in self.locations:
                raise StructuralError(f"accepting location {q!r} not declared")
        for i, t in enumerate(self.transitions):
            if t.source not in self.locations or t.target not in self.locations:
                raise StructuralError(f"transition {i} endpoint not declared")
            for c in guard_clocks(t.guard) | t.resets:
                if c not in self.clocks:
                    raise StructuralError(f"transition {i} references undeclared clock {c.name}")

    def out_transitions(self, q: LocId) -> list[Transition]:
        return [t for t in self.transitions if t.source == q]

    def invariant(self, q: LocId) -> Guard:
        return self.invariants.get(q, TRUE)

    def has_trivial_invariants(self) -> bool:
        return all(isinstance(self.invariant(q), TrueGuard) for q in self.locations)

    def silent_transitions(self) -> list[Transition]:
        return [t for t in self.transitions if t.is_silent]


def make_automaton(
    locations: Iterable[LocId],
    initial: LocId,
    accepting: Iterable[LocId],
    clocks: Iterable[Clock],
    transitions: Iterable[Transition],
    invariants: Optional[Mapping[LocId, Guard]] = None,
) -> TimedAutomaton:
    return TimedAutomaton(
        locations=frozenset(locations),
        initial=initial,
        accepting=frozenset(accepting),
        clocks=frozenset(clocks),
        transitions=tuple(transitions),
        invariants=dict(invariants or {}),
    )


# ---------------------------------------------------------------------------
# runs and traces


@dataclass(frozen=True)
class TimedTrace:
    """Observable timed trace: non-decreasing absolute timestamps."""

    events: tuple[tuple[Fraction, str], ...]

    def __post_init__(self) -> None:
        last = Fraction(0)
        for ts, _ in self.events:
            if ts < last:
                raise StructuralError("timestamps must be non-decreasing")
            last = ts

    @property
    def word(self) -> tuple[str, ...]:
        return tuple(a for _, a in self.events)

    def __len__(self) -> int:
        return len(self.events)


def timed_trace(*events: tuple[Rational, str]) -> TimedTrace:
    return TimedTrace(tuple((Fraction(ts), a) for ts, a in events))


@dataclass(frozen=True)
class Run:
    """Alternating delays and transitions; well-behaving runs end observably."""

    steps: tuple[tuple[Fraction, Transition], ...]

    def observable_trace(self) -> TimedTrace:
        now = Fraction(0)
        events = []
        for d, t in self.steps:
            now += d
            if not t.is_silent:
                events.append((now, t.action))
        return TimedTrace(tuple(events))


def run_of(*steps: tuple[Rational, Transition]) -> Run:
    return Run(tuple((Fraction(d), t) for d, t in steps))


def check_run(a: TimedAutomaton, r: Run, require_well_behaving: bool = True) -> bool:
    """Replay ``r`` on ``a``: true iff every delay/jump is admissible.

    Raises :class:`StructuralError` for runs that are not paths of ``a``
    rooted at the initial location; an infeasible (guard-violating) run
    returns False.  Acceptance is not part of the verdict: inspect the final
    location separately.
    """
    if not r.steps:
        return True
    if require_well_behaving and r.steps[-1][1].is_silent:
        raise StructuralError("well-behaving runs end with an observable action")
    loc = a.initial
    val: dict[Clock, Fraction] = {c: Fraction(0) for c in a.clocks}
    known = set(a.transitions)
    for d, t in r.steps:
        if d < 0:
            raise StructuralError("negative delay")
        if t not in known:
            raise StructuralError(f"transition not part of the automaton: {t}")
        if t.source != loc:
            raise StructuralError(f"transition {t} does not start at current location {loc!r}")
        val = {c: v + d for c, v in val.items()}
        # invariants are upper-bound conjunctions, so checking at the end of
        # the delay covers the whole delay interval
        if not eval_guard(a.invariant(loc), val):
            return False
        if not eval_guard(t.guard, val):
            return False
        for c in t.resets:
            val[c] = Fraction(0)
        if not eval_guard(a.invariant(t.target), val):
            return False
        loc = t.target
    return True


def final_location(a: TimedAutomaton, r: Run) -> LocId:
    loc = a.initial
    for _, t in r.steps:
        loc = t.target
    return loc


# ---------------------------------------------------------------------------
# structural checks and stats


def check_strong_responsiveness(a: TimedAutomaton) -> bool:
    """True iff the silent-transition subgraph is acyclic (no silent loops)."""
    adj: dict[LocId, list[LocId]] = {}
    for t in a.silent_transitions():
        adj.setdefault(t.source, []).append(t.target)
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[LocId, int] = {}

    def dfs(u: LocId) -> bool:
        color[u] = GREY
        for v in adj.get(u, ()):
            c = color.get(v, WHITE)
            if c == GREY:
                return False
            if c == WHITE and not dfs(v):
                return False
        color[u] = BLACK
        return True

    return all(dfs(u) for u in list(adj) if color.get(u, WHITE) == WHITE)


@dataclass(frozen=True)
class AutomatonStats:
    locations: int
    transitions: int
    silent: int
    max_out_degree: int
    avg_out_degree: float


def observable_out_degree_stats(a: TimedAutomaton) -> AutomatonStats:
    degree: dict[LocId, int] = {q: 0 for q in a.locations}
    silent = 0
    for t in a.transitions:
        degree[t.source] += 1
        if t.is_silent:
            silent += 1
    n = len(a.locations)
    m = len(a.transitions)
    return AutomatonStats(
        locations=n,
        transitions=m,
        silent=silent,
        max_out_degree=max(degree.values(), default=0),
        avg_out_degree=(m / n) if n else 0.0,
    )

"""k-bounded unfolding into a finite tree and one-reset-per-transition
clock renaming.

The tree is the normal form every later transformation requires: each path
carries at most k observable transitions, the i-th observable transition of
a path resets x_i and the j-th consecutive silent transition after
observable level i resets x_{i,j}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional

from .core import (
    TRUE,
    Clock,
    Guard,
    LocId,
    StructuralError,
    TimedAutomaton,
    Transition,
    TrueGuard,
    UnsupportedInputError,
    X0,
    check_strong_responsiveness,
    guard_clocks,
    level_clock,
    make_automaton,
    rename_guard,
    silent_clock,
)


@dataclass
class TreeNode:
    nid: int
    origin: Hashable  # location of the source automaton (or a merge label)
    obs_level: int
    silent_index: Optional[int] = None  # position in its silent chain, if silent-reached
    accepting: bool = False
    invariant: Guard = TRUE


@dataclass
class Tree:
    """Tree-shaped (or, after determinization, DAG-shaped) timed automaton."""

    root: int
    depth: int  # bound k
    nodes: dict[int, TreeNode] = field(default_factory=dict)
    transitions: list[Transition] = field(default_factory=list)
    renamed: bool = False

    # -- structure ---------------------------------------------------------

    def out_edges(self, nid: int) -> list[Transition]:
        return [t for t in self.transitions if t.source == nid]

    def build_children_index(self) -> dict[int, list[Transition]]:
        idx: dict[int, list[Transition]] = {n: [] for n in self.nodes}
        for t in self.transitions:
            idx[t.source].append(t)
        return idx

    def clocks(self) -> frozenset[Clock]:
        cs: set[Clock] = {X0} if self.renamed else set()
        for t in self.transitions:
            cs |= guard_clocks(t.guard)
            cs |= set(t.resets)
        return frozenset(cs)

    @property
    def accepting(self) -> frozenset[int]:
        return frozenset(n for n, info in self.nodes.items() if info.accepting)

    def location_count(self) -> int:
        return len(self.nodes)

    def transition_count(self) -> int:
        return len(self.transitions)

    def silent_count(self) -> int:
        return sum(1 for t in self.transitions if t.is_silent)

    def is_tree(self) -> bool:
        seen: set[int] = set()
        for t in self.transitions:
            if t.target in seen or t.target == self.root:
                return False
            seen.add(t.target)
        return True

    def to_automaton(self) -> TimedAutomaton:
        return make_automaton(
            locations=self.nodes.keys(),
            initial=self.root,
            accepting=self.accepting,
            clocks=self.clocks(),
            transitions=self.transitions,
            invariants={n: info.invariant for n, info in self.nodes.items()
                        if not isinstance(info.invariant, TrueGuard)},
        )

    def copy(self) -> "Tree":
        return Tree(
            root=self.root,
            depth=self.depth,
            nodes={n: TreeNode(i.nid, i.origin, i.obs_level, i.silent_index, i.accepting, i.invariant)
                   for n, i in self.nodes.items()},
            transitions=list(self.transitions),
            renamed=self.renamed,
        )


# ---------------------------------------------------------------------------
# unfolding


def unfold(a: TimedAutomaton, k: int, prune_nonaccepting_leaves: bool = False) -> Tree:
    """Unfold ``a`` into the tree of all runs with at most k observable steps.

    Cutting convention: silent transitions are expanded only from nodes at
    observable level < k, so no trailing silent steps are ever created
    (well-behaving runs end with an observable action).  A node reached by
    a silent transition is never accepting, even if it copies an accepting
    location.
    """
    if k < 1:
        raise ValueError("unfolding depth k must be >= 1")
    if not check_strong_responsiveness(a):
        raise StructuralError("automaton contains a silent loop (not strongly responsive)")

    tree = Tree(root=0, depth=k)
    tree.nodes[0] = TreeNode(
        nid=0,
        origin=a.initial,
        obs_level=0,
        accepting=a.initial in a.accepting,
        invariant=a.invariant(a.initial),
    )
    next_id = 1
    # depth-first in transition-list order for deterministic ids
    stack: list[int] = [0]
    while stack:
        nid = stack.pop()
        info = tree.nodes[nid]
        if info.obs_level >= k:
            continue
        children: list[int] = []
        for t in a.out_transitions(info.origin):
            if t.is_silent:
                cid = next_id
                next_id += 1
                prev = info.silent_index
                tree.nodes[cid] = TreeNode(
                    nid=cid,
                    origin=t.target,
                    obs_level=info.obs_level,
                    silent_index=0 if prev is None else prev + 1,
                    accepting=False,
                    invariant=a.invariant(t.target),
                )
            else:
                cid = next_id
                next_id += 1
                tree.nodes[cid] = TreeNode(
                    nid=cid,
                    origin=t.target,
                    obs_level=info.obs_level + 1,
                    accepting=t.target in a.accepting,
                    invariant=a.invariant(t.target),
                )
            tree.transitions.append(
                Transition(nid, cid, t.action, t.guard, t.resets)
            )
            children.append(cid)
        stack.extend(reversed(children))

    if prune_nonaccepting_leaves:
        _prune_nonaccepting(tree)
    return tree


def _prune_nonaccepting(tree: Tree) -> None:
    children = tree.build_children_index()
    keep: set[int] = set()

    def visit(nid: int) -> bool:
        useful = tree.nodes[nid].accepting
        for t in children[nid]:
            if visit(t.target):
                useful = True
        if useful:
            keep.add(nid)
        return useful

    visit(tree.root)
    keep.add(tree.root)
    tree.nodes = {n: i for n, i in tree.nodes.items() if n in keep}
    tree.transitions = [t for t in tree.transitions if t.source in keep and t.target in keep]


# ---------------------------------------------------------------------------
# clock renaming


def rename_clocks(t: Tree) -> Tree:
    """Rewrite to the normal form with exactly one fresh clock per transition.

    The i-th observable transition on a root path resets x_i; the j-th
    consecutive silent transition after observable level i resets x_{i,j}.
    Guard atoms are substituted by the clock of their most recent reset
    (x_0 when never reset).  Language-preserving.
    """
    if not t.is_tree():
        raise StructuralError("clock renaming requires a tree")

    out = Tree(root=t.root, depth=t.depth, renamed=True)
    for nid, info in t.nodes.items():
        out.nodes[nid] = TreeNode(nid, info.origin, info.obs_level, info.silent_index,
                                  info.accepting, info.invariant)

    children = t.build_children_index()
    order: dict[int, int] = {id(tr): i for i, tr in enumerate(t.transitions)}
    new_edges: list[tuple[int, Transition]] = []

    def walk(nid: int, subst: dict[Clock, Clock]) -> None:
        info = t.nodes[nid]
        for tr in children[nid]:
            if tr.is_silent:
                j = t.nodes[tr.target].silent_index
                fresh = silent_clock(info.obs_level, j if j is not None else 0)
            else:
                fresh = level_clock(t.nodes[tr.target].obs_level)
            guard = rename_guard(tr.guard, subst)
            sub2 = dict(subst)
            for c in tr.resets:
                sub2[c] = fresh
            new_edges.append(
                (order[id(tr)], Transition(tr.source, tr.target, tr.action, guard, frozenset((fresh,))))
            )
            walk(tr.target, sub2)

    root_subst = {c: X0 for tr in t.transitions for c in guard_clocks(tr.guard) | set(tr.resets)}
    walk(t.root, root_subst)
    new_edges.sort(key=lambda e: e[0])
    out.transitions = [tr for _, tr in new_edges]
    return out

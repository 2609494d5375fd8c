"""Determinization of silent-free tree automata.

Two constructions are provided.  The guard-oriented one merges all
same-action edges of a location into at most two target locations (one
accepting, one not), pushing each edge's guard onto the subtree below it
as a diagonal constraint relative to the merge reset; the accepting and
non-accepting targets share their subtrees, so the result is a DAG.  The
standard one is a subset construction over guard regions and always
yields a tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    TRUE,
    Atom,
    Clock,
    FalseGuard,
    Guard,
    StructuralError,
    Transition,
    canonical_guard,
    conj,
    disj,
    guard_atoms,
    level_clock,
    map_atoms,
)
from .unfold import Tree, TreeNode
from . import solver


@dataclass
class DeterminizeConfig:
    prune_unsat_edges: bool = True
    dnf_limit: int = 10**6


def rebase_guard(g: Guard, anchor: Clock) -> Guard:
    """Express ``g`` relative to a later reset of ``anchor``.

    A unary atom x~n, true when ``anchor`` was reset, holds at any later
    moment as x - anchor ~ n (no clock of a renamed tree is reset twice).
    Diagonal atoms are time-invariant and stay as they are.
    """

    def rebased(a: Atom) -> Guard:
        if a.right is not None:
            return a
        if a.left == anchor:
            raise StructuralError(f"guard mentions its own reset clock {anchor}")
        return Atom(a.left, a.rel, a.bound, anchor)

    return map_atoms(g, rebased)


# an edge of a pending (merged) location: action, guard, original tree node
# whose subtree hangs below it
_Edge = tuple[Optional[str], Guard, int]


def _group_by_action(edges: list[_Edge]) -> list[tuple[str, list[_Edge]]]:
    order: list[str] = []
    groups: dict[str, list[_Edge]] = {}
    for e in edges:
        a = e[0]
        if a is None:
            raise StructuralError("determinization requires a silent-free tree")
        if a not in groups:
            order.append(a)
            groups[a] = []
        groups[a].append(e)
    return [(a, groups[a]) for a in order]


def determinize_guard_oriented(tree: Tree, config: Optional[DeterminizeConfig] = None) -> Tree:
    """Merge same-action edges per location into accepting/non-accepting pairs.

    The two merged locations have identical outgoing behaviour, so they
    share one jointly constructed subtree; the output is a DAG over fresh
    location ids.
    """
    cfg = config or DeterminizeConfig()
    if not tree.renamed:
        raise StructuralError("determinization requires a renamed tree")
    children = tree.build_children_index()
    out = Tree(root=0, depth=tree.depth, renamed=True)
    out.nodes[0] = TreeNode(0, tree.nodes[tree.root].origin, 0,
                            accepting=tree.nodes[tree.root].accepting)
    counter = [1]

    def fresh(origin, level: int, accepting: bool) -> int:
        nid = counter[0]
        counter[0] += 1
        out.nodes[nid] = TreeNode(nid, origin, level, accepting=accepting)
        return nid

    def sat(g: Guard) -> bool:
        if not cfg.prune_unsat_edges:
            return not isinstance(g, FalseGuard)
        return solver.is_satisfiable(g, dnf_limit=cfg.dnf_limit)

    def expand(edges: list[_Edge], level: int) -> list[tuple[str, Guard, int]]:
        """Build the subtree for a merged location; returns its out-edges."""
        result: list[tuple[str, Guard, int]] = []
        for action, group in _group_by_action(edges):
            if len(group) == 1:
                _, g, t = group[0]
                if not sat(g):
                    continue
                child_edges: list[_Edge] = [
                    (c.action, c.guard, c.target) for c in children[t]
                ]
                nid = fresh(tree.nodes[t].origin, level + 1, tree.nodes[t].accepting)
                for (ca, cg, ct) in expand(child_edges, level + 1):
                    out.transitions.append(
                        Transition(nid, ct, ca, cg, frozenset((level_clock(level + 2),)))
                    )
                result.append((action, g, nid))
                continue

            anchor = level_clock(level + 1)
            acc_guards: list[Guard] = []
            nacc_guards: list[Guard] = []
            merged_child: list[_Edge] = []
            for _, g, t in group:
                if not sat(g):
                    continue
                if tree.nodes[t].accepting:
                    acc_guards.append(g)
                else:
                    nacc_guards.append(g)
                push = rebase_guard(g, anchor)
                for c in children[t]:
                    cg = conj(c.guard, push)
                    if sat(cg):
                        merged_child.append((c.action, cg, c.target))

            sub = expand(merged_child, level + 1)
            origins = tuple(sorted(str(tree.nodes[t].origin) for _, _, t in group))

            def attach(nid: int) -> None:
                for (ca, cg, ct) in sub:
                    out.transitions.append(
                        Transition(nid, ct, ca, cg, frozenset((level_clock(level + 2),)))
                    )

            g_acc = disj(*acc_guards)
            if acc_guards and sat(g_acc):
                nid_acc = fresh(origins, level + 1, True)
                attach(nid_acc)
                result.append((action, g_acc, nid_acc))
            if nacc_guards:
                g_nacc = disj(*nacc_guards)
                if acc_guards:
                    g_nacc = conj(g_nacc, solver.complement_guard(g_acc))
                if sat(g_nacc):
                    nid_nacc = fresh(origins, level + 1, False)
                    attach(nid_nacc)
                    result.append((action, g_nacc, nid_nacc))
        return result

    root_edges: list[_Edge] = [
        (c.action, c.guard, c.target) for c in children[tree.root]
    ]
    for (ca, cg, ct) in expand(root_edges, 0):
        out.transitions.append(Transition(0, ct, ca, cg, frozenset((level_clock(1),))))
    return out


def determinize_standard(tree: Tree, config: Optional[DeterminizeConfig] = None) -> Tree:
    """Subset construction over guard regions.

    For each location and action with edges guarded g_1..g_m, every
    non-empty subset S yields one outgoing edge guarded by the g_i of S
    conjoined with the complements of the rest; its target merges the
    member targets.  The output is a tree.
    """
    cfg = config or DeterminizeConfig()
    if not tree.renamed:
        raise StructuralError("determinization requires a renamed tree")
    children = tree.build_children_index()
    out = Tree(root=0, depth=tree.depth, renamed=True)
    out.nodes[0] = TreeNode(0, tree.nodes[tree.root].origin, 0,
                            accepting=tree.nodes[tree.root].accepting)
    counter = [1]

    def sat(g: Guard) -> bool:
        if not cfg.prune_unsat_edges:
            return not isinstance(g, FalseGuard)
        return solver.is_satisfiable(g, dnf_limit=cfg.dnf_limit)

    def build(members: frozenset[int], nid: int, level: int) -> None:
        edges: list[_Edge] = []
        for t in sorted(members):
            edges.extend((c.action, c.guard, c.target) for c in children[t])
        for action, group in _group_by_action(edges):
            m = len(group)
            for mask in range(1, 1 << m):
                sel = [group[i] for i in range(m) if mask >> i & 1]
                rest = [group[i] for i in range(m) if not mask >> i & 1]
                guard = conj(
                    *(g for _, g, _ in sel),
                    *(solver.complement_guard(g) for _, g, _ in rest),
                )
                if not sat(guard):
                    continue
                targets = frozenset(t for _, _, t in sel)
                accepting = any(tree.nodes[t].accepting for t in targets)
                cid = counter[0]
                counter[0] += 1
                origin = tuple(sorted(str(tree.nodes[t].origin) for t in targets))
                out.nodes[cid] = TreeNode(cid, origin, level + 1, accepting=accepting)
                out.transitions.append(
                    Transition(nid, cid, action, guard, frozenset((level_clock(level + 1),)))
                )
                build(targets, cid, level + 1)

    build(frozenset((tree.root,)), 0, 0)
    return out


def pipeline_on_the_fly(a, k: int, config: Optional[DeterminizeConfig] = None) -> Tree:
    """Unfold, rename, remove silent steps and determinize in one pass.

    Same merge rule as :func:`determinize_guard_oriented`, but merged
    locations are memoized on their structural content (level, acceptance,
    pending out-edges up to subtree identity), so a location reached along
    different traces with the same clock resets is processed once and the
    output DAG stays small where the staged construction copies subtrees.
    """
    from .silent import remove_all_silent
    from .unfold import rename_clocks, unfold

    cfg = config or DeterminizeConfig()
    tree = remove_all_silent(rename_clocks(unfold(a, k)))
    children = tree.build_children_index()

    # structural signature of an input subtree, interned to small ints
    sig_ids: dict = {}
    sig: dict[int, int] = {}

    def signature(nid: int) -> int:
        if nid in sig:
            return sig[nid]
        node = tree.nodes[nid]
        entry = (
            node.accepting,
            tuple(sorted(
                ((t.action, canonical_guard(t.guard),
                  tuple(sorted(c.name for c in t.resets)), signature(t.target))
                 for t in children[nid]),
                key=repr,
            )),
        )
        sid = sig_ids.setdefault(entry, len(sig_ids))
        sig[nid] = sid
        return sid

    out = Tree(root=0, depth=tree.depth, renamed=True)
    out.nodes[0] = TreeNode(0, tree.nodes[tree.root].origin, 0,
                            accepting=tree.nodes[tree.root].accepting)
    counter = [1]
    node_memo: dict = {}
    edge_memo: dict = {}

    def sat(g: Guard) -> bool:
        if not cfg.prune_unsat_edges:
            return not isinstance(g, FalseGuard)
        return solver.is_satisfiable(g, dnf_limit=cfg.dnf_limit)

    def edge_key(e: _Edge):
        action, g, t = e
        return (action, canonical_guard(g), signature(t))

    def node_for(edges: list[_Edge], level: int, accepting: bool, origin) -> int:
        key = (level, accepting, tuple(sorted(map(edge_key, edges), key=repr)))
        if key in node_memo:
            return node_memo[key]
        nid = counter[0]
        counter[0] += 1
        out.nodes[nid] = TreeNode(nid, origin, level, accepting=accepting)
        node_memo[key] = nid
        for (ca, cg, ct) in expand(edges, level):
            out.transitions.append(
                Transition(nid, ct, ca, cg, frozenset((level_clock(level + 1),)))
            )
        return nid

    def expand(edges: list[_Edge], level: int) -> list[tuple[str, Guard, int]]:
        """Out-edges of the (merged) location at ``level`` with ``edges`` pending."""
        key = (level, tuple(sorted(map(edge_key, edges), key=repr)))
        if key in edge_memo:
            return edge_memo[key]
        result: list[tuple[str, Guard, int]] = []
        for action, group in _group_by_action(edges):
            if len(group) == 1:
                _, g, t = group[0]
                if not sat(g):
                    continue
                child_edges: list[_Edge] = [
                    (c.action, c.guard, c.target) for c in children[t]
                ]
                nid = node_for(child_edges, level + 1,
                               tree.nodes[t].accepting, tree.nodes[t].origin)
                result.append((action, g, nid))
                continue

            anchor = level_clock(level + 1)
            acc_guards: list[Guard] = []
            nacc_guards: list[Guard] = []
            merged_child: list[_Edge] = []
            for _, g, t in group:
                if not sat(g):
                    continue
                if tree.nodes[t].accepting:
                    acc_guards.append(g)
                else:
                    nacc_guards.append(g)
                push = rebase_guard(g, anchor)
                for c in children[t]:
                    cg = conj(c.guard, push)
                    if sat(cg):
                        merged_child.append((c.action, cg, c.target))

            origins = tuple(sorted(str(tree.nodes[t].origin) for _, _, t in group))
            g_acc = disj(*acc_guards)
            if acc_guards and sat(g_acc):
                result.append(
                    (action, g_acc, node_for(merged_child, level + 1, True, origins))
                )
            if nacc_guards:
                g_nacc = disj(*nacc_guards)
                if acc_guards:
                    g_nacc = conj(g_nacc, solver.complement_guard(g_acc))
                if sat(g_nacc):
                    result.append(
                        (action, g_nacc, node_for(merged_child, level + 1, False, origins))
                    )
        edge_memo[key] = result
        return result

    root_edges: list[_Edge] = [
        (c.action, c.guard, c.target) for c in children[tree.root]
    ]
    for (ca, cg, ct) in expand(root_edges, 0):
        out.transitions.append(Transition(0, ct, ca, cg, frozenset((level_clock(1),))))
    return out


def check_deterministic(tree: Tree) -> bool:
    """True iff no two same-action edges of a location can fire together."""
    children = tree.build_children_index()
    for nid in tree.nodes:
        per_action: dict[str, list[Guard]] = {}
        for t in children[nid]:
            if t.is_silent:
                return False
            per_action.setdefault(t.action, []).append(t.guard)
        for guards in per_action.values():
            for i in range(len(guards)):
                for j in range(i + 1, len(guards)):
                    if solver.is_satisfiable(conj(guards[i], guards[j])):
                        return False
    return True

"""Weighted quartet and projection inputs built from sources, and both objective evaluators."""

from __future__ import annotations

from dataclasses import dataclass, field

from supertree.errors import InputError
from supertree.topology import (
    _separates,
    clusters,
    quartets_of,
    sorted_taxa,
    subtrees_of,
    tree_key,
)


@dataclass
class WeightedQuartetSet:
    entries: dict = field(default_factory=dict)  # Quartet -> int

    @property
    def total_weight(self):
        return sum(self.entries.values())

    @property
    def taxa(self):
        out = set()
        for q in self.entries:
            out |= q.taxa
        return out

    def add(self, q, weight):
        self.entries[q] = self.entries.get(q, 0) + weight

    def scaled(self, c):
        return WeightedQuartetSet({q: w * c for q, w in self.entries.items()})

    def __len__(self):
        return len(self.entries)


def build_quartet_input(sources):
    """Multiset union of the sources' displayed quartets, each counted with its source weight."""
    q = WeightedQuartetSet()
    for src in sources:
        for quartet in sorted(quartets_of(src.tree)):
            q.add(quartet, src.weight)
    return q


def quartet_score(candidate, q):
    """Total weight of the quartets in ``q`` displayed by ``candidate``."""
    missing = q.taxa - candidate.taxa
    if missing:
        raise InputError(f"quartet taxa missing from candidate: {sorted_taxa(missing)}")
    cl = [c for c in clusters(candidate)[1:] if len(c) >= 2]
    return sum(w for quartet, w in q.entries.items() if _separates(cl, *quartet))


@dataclass
class ProjectionEntry:
    tree: object  # representative Tree, first-seen orientation
    weight: int
    atom_count: int

    @property
    def child_keys(self):
        return [c.label if c.is_leaf else tree_key(c) for c in self.tree.children]


@dataclass
class ProjectionInput:
    """Compound source subtrees keyed by ``tree_key``; closed under taking child subtrees."""

    entries: dict = field(default_factory=dict)  # tree_key -> ProjectionEntry

    @property
    def taxa(self):
        out = set()
        for e in self.entries.values():
            out |= e.tree.taxa
        return out

    def add(self, tree, weight):
        key = tree_key(tree)
        if key in self.entries:
            self.entries[key].weight += weight
        else:
            self.entries[key] = ProjectionEntry(tree, weight, len(tree.taxa))

    def scaled(self, c):
        return ProjectionInput(
            {k: ProjectionEntry(e.tree, e.weight * c, e.atom_count) for k, e in self.entries.items()}
        )

    def by_size(self):
        """Entries ordered so that every entry follows its child entries."""
        return sorted(self.entries.items(), key=lambda kv: kv[1].atom_count)

    def __len__(self):
        return len(self.entries)


def build_projection_input(sources):
    p = ProjectionInput()
    for src in sources:
        for sub in subtrees_of(src.tree):
            p.add(sub, src.weight)
    return p


@dataclass
class Assignment:
    """Where each compound entry landed in a candidate.

    Positions are node paths (tuples of child indices from the root); ``None`` marks an
    unassigned entry.
    """

    positions: dict
    separated: set

    @property
    def unassigned(self):
        return {k for k, v in self.positions.items() if v is None}


def _node_paths(tree):
    leaf_paths = {}

    def walk(t, path):
        if t.is_leaf:
            leaf_paths[t.label] = path
            return
        for i, c in enumerate(t.children):
            walk(c, path + (i,))

    walk(tree, ())
    return leaf_paths


def _common_prefix(paths):
    first = paths[0]
    n = min(len(p) for p in paths)
    for i in range(n):
        if any(p[i] != first[i] for p in paths):
            return first[:i]
    return first[:n]


def assign_projections(candidate, p):
    """Place each compound entry at the least common ancestor of its parts, if allowed.

    An entry is assigned at X when every child part is assigned and the parts sit strictly
    below X in pairwise distinct child branches of X. It is separated when assigned but
    some part is not an immediate child of X.
    """
    missing = p.taxa - candidate.taxa
    if missing:
        raise InputError(f"projection taxa missing from candidate: {sorted_taxa(missing)}")
    pos = dict(_node_paths(candidate))
    positions = {}
    separated = set()
    for key, entry in p.by_size():
        parts = [pos.get(k) for k in entry.child_keys]
        if any(x is None for x in parts):
            pos[key] = positions[key] = None
            continue
        x = _common_prefix(parts)
        depth = len(x)
        branches = [q[depth] if len(q) > depth else None for q in parts]
        if None in branches or len(set(branches)) != len(branches):
            pos[key] = positions[key] = None
            continue
        pos[key] = positions[key] = x
        if any(len(q) > depth + 1 for q in parts):
            separated.add(key)
    return Assignment(positions, separated)


def projection_penalty(candidate, p):
    """Sum of atom_count*weight over unassigned entries plus weight over separated ones."""
    a = assign_projections(candidate, p)
    total = 0
    for key, entry in p.entries.items():
        if a.positions[key] is None:
            total += entry.atom_count * entry.weight
        elif key in a.separated:
            total += entry.weight
    return total

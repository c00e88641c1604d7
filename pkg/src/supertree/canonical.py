"""Node-numbered canonical layouts of unordered rooted trees and their enumeration.

Leaves are numbered 1..N in alphabetical taxon order, inner nodes N+1..2N-1. Edges
always descend in node number, used inner nodes take the lowest inner numbers, the
root takes the highest used number, and inner siblings are numbered depth-first in
descending order of their smallest leaf. Every unordered topology has exactly one
such layout.
"""

from __future__ import annotations

from dataclasses import dataclass

from supertree.errors import InputError
from supertree.newick import DEFAULT_OUTGROUP, Tree, taxon_key


@dataclass(frozen=True)
class CanonicalLayout:
    taxa: tuple  # leaf number i+1 carries taxa[i]
    parent: tuple  # parent[v-1] for node v in 1..2N-1, 0 for none

    @property
    def n(self):
        return len(self.taxa)

    @property
    def used(self):
        """Number of inner nodes in use."""
        return len({p for p in self.parent if p})

    def edges(self):
        return [(p, v) for v, p in enumerate(self.parent, start=1) if p]

    def children(self):
        kids = {}
        for p, v in self.edges():
            kids.setdefault(p, []).append(v)
        return kids

    def root(self):
        if self.n == 1:
            return 1
        return self.n + self.used


def _sorted_taxa_tuple(taxa):
    taxa = tuple(sorted(taxa, key=taxon_key))
    if len({t.casefold() for t in taxa}) != len(taxa):
        raise InputError("duplicate taxa")
    return taxa


def to_canonical(tree, taxa=None):
    """Canonical layout of ``tree``; ``taxa`` defaults to the tree's own taxa."""
    taxa = _sorted_taxa_tuple(tree.taxa if taxa is None else taxa)
    if set(taxa) != set(tree.taxa):
        raise InputError("layout taxa differ from tree taxa")
    n = len(taxa)
    number = {t: i + 1 for i, t in enumerate(taxa)}
    parent = [0] * (2 * n - 1)
    counter = n + len(tree.inner_nodes())
    minleaf = {}

    def low(t):
        key = id(t)
        if key not in minleaf:
            minleaf[key] = number[t.label] if t.is_leaf else min(low(c) for c in t.children)
        return minleaf[key]

    def assign(t):
        nonlocal counter
        me = counter
        counter -= 1
        for child in sorted(t.children, key=low, reverse=True):
            if child.is_leaf:
                parent[number[child.label] - 1] = me
            else:
                parent[assign(child) - 1] = me
        return me

    if not tree.is_leaf:
        assign(tree)
    return CanonicalLayout(taxa, tuple(parent))


def from_canonical(layout):
    """Tree for ``layout`` with children ordered by their smallest leaf."""
    kids = layout.children()
    lows = {}

    def build(v):
        if v <= layout.n:
            lows[v] = v
            return Tree(label=layout.taxa[v - 1])
        sub = sorted(((build(c), c) for c in kids[v]), key=lambda p: lows[p[1]])
        lows[v] = lows[sub[0][1]]
        return Tree(children=tuple(t for t, _ in sub))

    return build(layout.root())


def is_canonical(layout, outgroup=None):
    """Check every layout invariant; ``outgroup`` enables the outgroup-at-root rule."""
    n = layout.n
    parent = layout.parent
    if n < 1 or len(parent) != 2 * n - 1:
        return False
    if list(layout.taxa) != sorted(layout.taxa, key=taxon_key):
        return False
    if n == 1:
        return parent == (0,)
    kids = {}
    for v, p in enumerate(parent, start=1):
        if p:
            if p <= n or p > 2 * n - 1 or p <= v:
                return False
            kids.setdefault(p, []).append(v)
    used = sorted(kids)
    if used != list(range(n + 1, n + 1 + len(used))):
        return False
    if any(len(kids[v]) < 2 for v in used):
        return False
    if any(parent[v - 1] for v in range(n + 1, 2 * n) if v not in kids):
        return False
    roots = [v for v in used if not parent[v - 1]]
    if len(roots) != 1 or any(not parent[v - 1] for v in range(1, n + 1)):
        return False
    root = roots[0]

    leaves_below, inner_below = {}, {}

    def walk(v):
        if v <= n:
            leaves_below[v], inner_below[v] = [v], []
            return
        lv, iv = [], [v]
        for c in kids[v]:
            walk(c)
            lv += leaves_below[c]
            iv += inner_below[c]
        leaves_below[v], inner_below[v] = lv, iv

    walk(root)
    if len(leaves_below[root]) != n:
        return False
    for x in used:
        inner_kids = sorted((c for c in kids[x] if c > n), reverse=True)
        for y, z in zip(inner_kids, inner_kids[1:]):
            if min(inner_below[y]) <= z:
                return False
            if min(leaves_below[z]) >= min(leaves_below[y]):
                return False
    if outgroup is not None:
        if outgroup not in layout.taxa:
            return False
        if parent[layout.taxa.index(outgroup)] != root:
            return False
    return True


class PartialTree:
    """Mutable tree grown by inserting taxa 0, 1, 2, ... in order, with exact undo.

    Leaf node ids are taxon indices; inner node ids are n, n+1, ... in creation order.
    ``mask[v]`` is the bitmask of taxa below node ``v``. Growing by every legal move
    at every step reaches each unordered topology exactly once.
    """

    def __init__(self, n, binary_only=False, outgroup_index=None):
        self.n = n
        self.binary_only = binary_only
        self.og = outgroup_index
        size = max(2 * n - 1, 1)
        self.parent = [-1] * size
        self.children = [[] for _ in range(size)]
        self.mask = [0] * size
        self.next_inner = n
        self.root = 0
        self.count = 1
        self.mask[0] = 1

    @property
    def placed(self):
        return (1 << self.count) - 1

    def inner_ids(self):
        return range(self.n, self.next_inner)

    def moves(self):
        """Legal insertions for taxon ``self.count``: ("attach", v) and ("split", u)."""
        t = self.count
        og = self.og
        out = []
        inner = list(self.inner_ids())
        nodes = list(range(t)) + inner
        if og is not None and t > og and t >= 2:
            # outgroup already placed and sits under the root
            if not self.binary_only:
                out += [("attach", v) for v in inner]
            out += [("split", u) for u in nodes if u != self.root and u != og]
            return out
        if og is not None and t == og:
            if not self.binary_only and self.root >= self.n:
                out.append(("attach", self.root))
            out.append(("split", self.root))
            return out
        if not self.binary_only:
            out += [("attach", v) for v in inner]
        out += [("split", u) for u in nodes]
        return out

    def apply(self, move):
        t = self.count
        bit = 1 << t
        kind, u = move
        self.mask[t] = bit
        if kind == "attach":
            self.children[u].append(t)
            self.parent[t] = u
            v = u
        else:
            w = self.next_inner
            self.next_inner += 1
            p = self.parent[u]
            self.parent[w] = p
            if p >= 0:
                sib = self.children[p]
                sib[sib.index(u)] = w
            else:
                self.root = w
            self.children[w] = [u, t]
            self.parent[u] = w
            self.parent[t] = w
            self.mask[w] = self.mask[u]
            v = w
        while v >= 0:
            self.mask[v] |= bit
            v = self.parent[v]
        self.count += 1

    def undo(self, move):
        self.count -= 1
        t = self.count
        bit = 1 << t
        kind, u = move
        v = self.parent[t]
        while v >= 0:
            self.mask[v] &= ~bit
            v = self.parent[v]
        if kind == "attach":
            self.children[u].pop()
        else:
            self.next_inner -= 1
            w = self.next_inner
            p = self.parent[w]
            self.parent[u] = p
            if p >= 0:
                sib = self.children[p]
                sib[sib.index(w)] = u
            else:
                self.root = u
            self.children[w] = []
            self.parent[w] = -1
            self.mask[w] = 0
        self.parent[t] = -1
        self.mask[t] = 0

    def inner_masks(self):
        return [self.mask[v] for v in self.inner_ids()]

    def to_tree(self, names):
        def build(v):
            if v < self.n:
                return Tree(label=names[v])
            return Tree(children=tuple(build(c) for c in self.children[v]))

        return build(self.root)


def walk_insertions(n, binary_only=False, outgroup_index=None, visit=None):
    """Depth-first walk of the insertion tree; ``visit(pt)`` returning False prunes.

    Yields the PartialTree (mutated in place) each time all ``n`` taxa are placed.
    """
    pt = PartialTree(n, binary_only, outgroup_index)
    if n == 0:
        return

    def rec():
        if visit is not None and visit(pt) is False:
            return
        if pt.count == n:
            yield pt
            return
        for move in pt.moves():
            pt.apply(move)
            yield from rec()
            pt.undo(move)

    yield from rec()


def enumerate_canonical(taxa, outgroup_mode=False, binary_only=False, outgroup=DEFAULT_OUTGROUP):
    """Yield the canonical layout of every unordered rooted topology over ``taxa`` once.

    With ``outgroup_mode`` only topologies with ``outgroup`` as a child of the root are
    produced; with ``binary_only`` only fully resolved ones.
    """
    taxa = _sorted_taxa_tuple(taxa)
    if len(taxa) < 2:
        raise InputError("need at least two taxa")
    og = None
    if outgroup_mode:
        if outgroup not in taxa:
            raise InputError(f"outgroup {outgroup!r} not among taxa")
        og = taxa.index(outgroup)
    for pt in walk_insertions(len(taxa), binary_only, og):
        yield to_canonical(pt.to_tree(taxa), taxa)

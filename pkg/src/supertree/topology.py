"""Tree algebra: taxa, resolution, quartets, projections, subtrees and the display relation."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple

from supertree.errors import InputError
from supertree.newick import Tree, serialize_newick, taxon_key


def taxa_of(tree):
    return set(tree.taxa)


def taxa_of_all(trees):
    out = set()
    for t in trees:
        out |= t.taxa
    return out


def sorted_taxa(taxa):
    return sorted(taxa, key=taxon_key)


def resolution(tree):
    """Fraction of inner nodes that have exactly two children."""
    inner = tree.inner_nodes()
    if not inner:
        raise InputError("resolution is undefined for a single-leaf tree")
    return Fraction(sum(len(n.children) == 2 for n in inner), len(inner))


class Quartet(NamedTuple):
    """Unrooted quartet ((i,j),(k,l)) in canonical form: i<j, i<k, k<l."""

    i: str
    j: str
    k: str
    l: str

    @classmethod
    def of(cls, a, b, c, d):
        """Canonical quartet for the split ab|cd."""
        p = sorted((a, b), key=taxon_key)
        q = sorted((c, d), key=taxon_key)
        if taxon_key(q[0]) < taxon_key(p[0]):
            p, q = q, p
        return cls(p[0], p[1], q[0], q[1])

    @property
    def taxa(self):
        return frozenset(self)

    def __str__(self):
        return f"(({self.i},{self.j}),({self.k},{self.l}))"


def clusters(tree):
    """Leaf sets of every inner node (pre-order), the root's included."""
    return [n.taxa for n in tree.inner_nodes()]


def _separates(cluster_sets, a, b, c, d):
    for cl in cluster_sets:
        if a in cl and b in cl and c not in cl and d not in cl:
            return True
        if c in cl and d in cl and a not in cl and b not in cl:
            return True
    return False


def displays_quartet(tree, q):
    missing = q.taxa - tree.taxa
    if missing:
        raise InputError(f"quartet taxa missing from tree: {sorted_taxa(missing)}")
    return _separates(clusters(tree), q.i, q.j, q.k, q.l)


def quartets_of(tree):
    """All quartets displayed by ``tree``; unresolved 4-taxon substructures display none."""
    out = set()
    everything = tree.taxa
    for node in tree.inner_nodes()[1:]:
        inside = sorted_taxa(node.taxa)
        outside = sorted_taxa(everything - node.taxa)
        if len(inside) < 2 or len(outside) < 2:
            continue
        for a, b in itertools.combinations(inside, 2):
            for c, d in itertools.combinations(outside, 2):
                out.add(Quartet.of(a, b, c, d))
    return out


def project(tree, taxa):
    """Restrict ``tree`` to ``taxa``: drop other leaves, empty subtrees and unary nodes."""
    keep = frozenset(taxa) & tree.taxa
    if not keep:
        raise InputError("projection onto a taxon set disjoint from the tree")
    return _project(tree, keep)


def _project(tree, keep):
    if tree.is_leaf:
        return tree
    kids = [_project(c, keep) for c in tree.children if c.taxa & keep]
    if len(kids) == 1:
        return kids[0]
    if len(kids) == len(tree.children) and all(a is b for a, b in zip(kids, tree.children)):
        return tree
    return Tree(children=tuple(kids))


def subtrees_of(tree):
    """Subtrees rooted at inner nodes, pre-order, starting with ``tree`` itself."""
    return tree.inner_nodes()


def min_taxon(tree):
    return min(tree.taxa, key=taxon_key)


def canonical_form(tree):
    """Same topology with children sorted by their smallest taxon."""
    if tree.is_leaf:
        return tree
    kids = sorted((canonical_form(c) for c in tree.children), key=lambda c: taxon_key(min_taxon(c)))
    return Tree(children=tuple(kids))


def tree_key(tree):
    """Orientation-insensitive fingerprint: Newick string of the canonical form."""
    return serialize_newick(canonical_form(tree))


def displays_tree(tree, other):
    if not other.taxa <= tree.taxa:
        return False
    return tree_key(project(tree, other.taxa)) == tree_key(other)


def reverse_orientation(tree):
    """Mirror image: child order reversed at every node."""
    if tree.is_leaf:
        return tree
    return Tree(children=tuple(reverse_orientation(c) for c in reversed(tree.children)))


def cluster_set(tree):
    """Non-trivial clusters (>= 2 taxa) as frozensets, root included."""
    return {frozenset(n.taxa) for n in tree.inner_nodes()}


def tree_from_clusters(taxa, cluster_family):
    """Build the tree whose clusters are exactly ``cluster_family`` (pairwise compatible) plus the root."""
    taxa = frozenset(taxa)
    fam = {frozenset(c) for c in cluster_family if 1 < len(c) < len(taxa)}
    fam = sorted(fam, key=len)
    for a, b in itertools.combinations(fam, 2):
        if a & b and not (a <= b or b <= a):
            raise InputError("incompatible clusters")

    def build(members):
        # maximal proper clusters inside ``members``
        inner = [c for c in fam if c < members]
        tops = [c for c in inner if not any(c < d for d in inner)]
        covered = set().union(*tops) if tops else set()
        kids = [build(c) for c in tops] + [Tree(label=t) for t in members - covered]
        kids.sort(key=lambda c: taxon_key(min_taxon(c)))
        return Tree(children=tuple(kids))

    if len(taxa) == 1:
        return Tree(label=next(iter(taxa)))
    return build(taxa)

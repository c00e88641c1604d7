"""Independent reference implementations used only by the tests."""

import itertools

from supertree.newick import Tree
from supertree.topology import project, tree_key


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def all_trees(taxa, binary_only=False):
    """Every rooted leaf-labelled tree on ``taxa`` (inner arity >= 2), by block splitting."""
    taxa = list(taxa)
    if len(taxa) == 1:
        yield Tree(label=taxa[0])
        return
    for blocks in set_partitions(taxa):
        if len(blocks) < 2 or (binary_only and len(blocks) != 2):
            continue
        for kids in itertools.product(*(list(all_trees(b, binary_only)) for b in blocks)):
            yield Tree(children=tuple(kids))


def topology_keys(taxa, binary_only=False):
    return [tree_key(t) for t in all_trees(taxa, binary_only)]


def double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def displays_quartet_by_projection(tree, a, b, c, d):
    """ab|cd is displayed iff the 4-taxon projection has a cherry {a,b} or {c,d}."""
    sub = project(tree, {a, b, c, d})
    pairs = {frozenset(n.taxa) for n in sub.inner_nodes() if len(n.taxa) == 2}
    return frozenset((a, b)) in pairs or frozenset((c, d)) in pairs


def rule_assignment(candidate, p):
    """Literal bottom-up evaluation of the default/denied assignment rules.

    Returns (assigned: key -> set of node ids, separated: set of keys).
    """
    nodes = []  # post-order (id, children ids, leaf label)

    def walk(t):
        kids = [walk(c) for c in t.children]
        nodes.append((len(nodes), kids, t.label))
        return len(nodes) - 1

    walk(candidate)
    leaf_of = {label: i for i, kids, label in nodes if label is not None}
    reach = {}  # (node, term) -> bool
    asgn = {}
    for i, kids, label in nodes:
        for atom in leaf_of:
            reach[i, atom] = label == atom or any(reach[k, atom] for k in kids)
    assigned, separated = {}, set()
    for key, entry in sorted(p.entries.items(), key=lambda kv: kv[1].atom_count):
        parts = entry.child_keys
        assigned[key] = set()
        for i, kids, label in nodes:
            if label is not None:
                reach[i, key] = False
                continue
            denied = any(reach[k, key] for k in kids)
            denied |= any(sum(reach[k, part] for part in parts) >= 2 for k in kids)
            denied |= any(not any(reach[k, part] for k in kids) for part in parts)
            if not denied:
                assigned[key].add(i)
                asgn[i, key] = True
            reach[i, key] = (not denied) or any(reach[k, key] for k in kids)
        for x in assigned[key]:
            kids = nodes[x][1]
            for part in parts:
                nxt = any(
                    (nodes[k][2] == part) if part in leaf_of else asgn.get((k, part), False) for k in kids
                )
                if not nxt:
                    separated.add(key)
    return assigned, separated


def rule_penalty(candidate, p):
    assigned, separated = rule_assignment(candidate, p)
    total = 0
    for key, entry in p.entries.items():
        if not assigned[key]:
            total += entry.atom_count * entry.weight
        elif key in separated:
            total += entry.weight
    return total


def random_tree(taxa, rng, collapse=0.0):
    """Random rooted tree; each merge absorbs an inner child with probability ``collapse``."""
    nodes = [Tree(label=t) for t in taxa]
    while len(nodes) > 1:
        a, b = sorted(rng.sample(range(len(nodes)), 2), reverse=True)
        x, y = nodes.pop(a), nodes.pop(b)
        kids = []
        for z in (x, y):
            if not z.is_leaf and rng.random() < collapse:
                kids.extend(z.children)
            else:
                kids.append(z)
        nodes.append(Tree(children=tuple(kids)))
    return nodes[0]


def random_outgroup_tree(ingroup, rng, collapse=0.0):
    return Tree(children=(Tree(label="outgroup"), random_tree(ingroup, rng, collapse)))

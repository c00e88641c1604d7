import pytest
from hypothesis import given

from conftest import trees
from oracles import all_trees, double_factorial, topology_keys
from supertree.canonical import (
    CanonicalLayout,
    PartialTree,
    enumerate_canonical,
    from_canonical,
    is_canonical,
    to_canonical,
)
from supertree.errors import InputError
from supertree.newick import parse_newick
from supertree.topology import tree_key

ALL_ARITY_COUNTS = {2: 1, 3: 4, 4: 26, 5: 236, 6: 2752}


def names(n):
    return [chr(ord("a") + i) for i in range(n)]


@pytest.mark.parametrize("n", sorted(ALL_ARITY_COUNTS))
def test_brute_force_counts(n):
    assert len(topology_keys(names(n))) == ALL_ARITY_COUNTS[n]
    assert len(topology_keys(names(n), binary_only=True)) == double_factorial(2 * n - 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("binary", [False, True])
def test_enumeration_sound_and_complete(n, binary):
    layouts = list(enumerate_canonical(names(n), binary_only=binary))
    assert all(is_canonical(lay) for lay in layouts)
    keys = [tree_key(from_canonical(lay)) for lay in layouts]
    assert len(keys) == len(set(keys))
    assert sorted(keys) == sorted(topology_keys(names(n), binary))


def test_seven_taxa_count():
    assert sum(1 for _ in enumerate_canonical(names(7))) == 39208


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("binary", [False, True])
def test_outgroup_mode(n, binary):
    taxa = names(n - 1) + ["outgroup"]
    layouts = list(enumerate_canonical(taxa, outgroup_mode=True, binary_only=binary))
    assert all(is_canonical(lay, outgroup="outgroup") for lay in layouts)
    got = sorted(tree_key(from_canonical(lay)) for lay in layouts)
    want = sorted(
        tree_key(t)
        for t in all_trees(taxa, binary)
        if any(c.is_leaf and c.label == "outgroup" for c in t.children)
    )
    assert got == want


def test_outgroup_three_taxa():
    layouts = list(enumerate_canonical(["x", "y", "outgroup"], outgroup_mode=True))
    assert sorted(str(from_canonical(lay)) for lay in layouts) == ["(outgroup,(x,y));", "(outgroup,x,y);"]


def test_enumeration_errors():
    with pytest.raises(InputError):
        list(enumerate_canonical(["a"]))
    with pytest.raises(InputError):
        list(enumerate_canonical(["a", "b"], outgroup_mode=True))
    with pytest.raises(InputError):
        list(enumerate_canonical(["a", "A"]))


@given(trees(min_taxa=1, max_taxa=9))
def test_normal_form(t):
    lay = to_canonical(t)
    assert is_canonical(lay)
    assert tree_key(from_canonical(lay)) == tree_key(t)
    assert len(lay.edges()) <= 2 * lay.n - 2
    assert lay.root() == lay.n + lay.used or lay.n == 1
    assert all(p > v for p, v in lay.edges())


@given(trees(min_taxa=2, max_taxa=8))
def test_layout_independent_of_orientation(t):
    from supertree.topology import reverse_orientation

    assert to_canonical(reverse_orientation(t)) == to_canonical(t)


def test_known_layouts():
    assert to_canonical(parse_newick("((a,b),(c,d));")).parent == (5, 5, 6, 6, 7, 7, 0)
    assert to_canonical(parse_newick("((c,d),(b,a));")).parent == (5, 5, 6, 6, 7, 7, 0)
    assert to_canonical(parse_newick("(a,b,c);")).parent == (4, 4, 4, 0, 0)


@pytest.mark.parametrize(
    "taxa,parent",
    [
        (("a", "b", "c", "d"), (6, 6, 5, 5, 7, 7, 0)),  # inner siblings in the wrong order
        (("a", "b", "c"), (4, 4, 4, 5, 0)),  # unary root
        (("a", "b", "c"), (5, 5, 5, 0, 0)),  # used inner node is not the lowest
        (("a", "b", "c"), (4, 4, 0, 0, 0)),  # disconnected leaf
        (("a", "b", "c"), (5, 5, 4, 0, 4)),  # ascending edge
        (("b", "a", "c"), (4, 4, 5, 5, 0)),  # taxa out of order
        (("a", "b", "c"), (4, 4, 5)),  # wrong length
    ],
)
def test_is_canonical_negatives(taxa, parent):
    assert not is_canonical(CanonicalLayout(taxa, parent))


def test_is_canonical_outgroup_rule():
    lay = to_canonical(parse_newick("((outgroup,a),b);"))
    assert is_canonical(lay)
    assert not is_canonical(lay, outgroup="outgroup")
    assert is_canonical(to_canonical(parse_newick("(outgroup,(a,b));")), outgroup="outgroup")


def test_partial_tree_undo_restores_state():
    pt = PartialTree(5)
    snapshots = []

    def snap():
        return (list(pt.parent), [list(c) for c in pt.children], list(pt.mask), pt.next_inner, pt.root, pt.count)

    for _ in range(4):
        move = pt.moves()[-1]
        snapshots.append((snap(), move))
        pt.apply(move)
    for state, move in reversed(snapshots):
        pt.undo(move)
        assert snap() == state

import random

import pytest
from hypothesis import strategies as st

from supertree.newick import Tree, parse_newick

GENUS_LEFT_NWK = "(outgroup,(Felis,(Lynx,(Panthera,Puma))));"
# Right-hand genus tree: the topology implied by the displayed quartet, the 3-taxon
# projection and the single displayed subtree known for it.
GENUS_RIGHT_NWK = "(outgroup,((Felis,Puma),(Lynx,Panthera)));"


@pytest.fixture
def left():
    return parse_newick(GENUS_LEFT_NWK)


@pytest.fixture
def right():
    return parse_newick(GENUS_RIGHT_NWK)


@pytest.fixture
def rng():
    return random.Random(20240601)


TAXON_POOL = [f"T{i}" for i in range(10)]


@st.composite
def trees(draw, min_taxa=1, max_taxa=8, binary=False):
    """Random rooted trees over a prefix-free pool of taxa."""
    n = draw(st.integers(min_taxa, max_taxa))
    names = draw(st.permutations(TAXON_POOL))[:n]
    nodes = [Tree(label=t) for t in names]
    while len(nodes) > 1:
        i = draw(st.integers(0, len(nodes) - 1))
        x = nodes.pop(i)
        j = draw(st.integers(0, len(nodes) - 1))
        y = nodes.pop(j)
        kids = []
        for z in (x, y):
            if not binary and not z.is_leaf and draw(st.booleans()):
                kids.extend(z.children)
            else:
                kids.append(z)
        nodes.append(Tree(children=tuple(kids)))
    return nodes[0]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest
from hypothesis import given

from conftest import GENUS_LEFT_NWK, trees
from supertree.errors import InputError, NewickError
from supertree.newick import SourceEntry, SourceKind, Tree, load_manifest, parse_newick, serialize_newick


def test_genus_pair_left_parses_with_textual_child_order(left):
    assert left.children[0] == Tree(label="outgroup")
    assert left.leaves() == ["outgroup", "Felis", "Lynx", "Panthera", "Puma"]
    assert serialize_newick(left) == GENUS_LEFT_NWK


def test_single_leaf():
    t = parse_newick("A;")
    assert t.is_leaf and t.label == "A"
    assert serialize_newick(t) == "A;"


def test_multifurcation_preserved():
    t = parse_newick("((A,B),(C,D),E);")
    assert len(t.children) == 3
    assert serialize_newick(t) == "((A,B),(C,D),E);"


def test_branch_lengths_and_inner_labels_dropped():
    t = parse_newick("((A:0.1,B:2)ab:1e-3, C:.5)root;")
    assert serialize_newick(t) == "((A,B),C);"


def test_whitespace_tolerated():
    assert serialize_newick(parse_newick(" ( A , ( B,C ) ) ;\n")) == "(A,(B,C));"


@pytest.mark.parametrize(
    "text, offset",
    [
        ("((A,B);", 0),  # unbalanced: never closed
        ("(A,B));", 5),  # unbalanced: extra ')'
        ("(A,B,A);", 0),  # duplicate label
        ("(A,b,a);", 0),  # duplicate, case-insensitive
        ("(A,,B);", 3),  # empty label
        ("((A),B);", 1),  # unary inner node
        ("(A,B);x", 6),  # trailing garbage
        ("(A,B)", 5),  # missing ';'
        ("(A,B:x);", 5),  # bad branch length
    ],
)
def test_errors_carry_byte_offset(text, offset):
    with pytest.raises(NewickError) as err:
        parse_newick(text)
    assert err.value.offset == offset


def test_unary_never_constructed():
    with pytest.raises(InputError):
        Tree(children=(Tree(label="A"),))


@given(trees())
def test_round_trip(t):
    text = serialize_newick(t)
    assert parse_newick(text) == t
    assert serialize_newick(parse_newick(text)) == text


def test_source_default_weights():
    t = parse_newick("(A,B);")
    assert SourceEntry(t, "molecular").weight == 4
    assert SourceEntry(t, SourceKind.OTHER).weight == 1
    assert SourceEntry(t, "other", 7).weight == 7
    with pytest.raises(InputError):
        SourceEntry(t, "other", 0)


@pytest.fixture
def corpus(tmp_path):
    (tmp_path / "t1.nwk").write_text("(outgroup,(A,B));\n")
    (tmp_path / "t2.nwk").write_text("(outgroup,(A,C));\n")
    (tmp_path / "t3.nwk").write_text("(outgroup,(B,C));\n")
    return tmp_path


def test_manifest_weights(corpus):
    m = corpus / "m.tsv"
    m.write_text("# sources\nt1.nwk\tmolecular\nt2.nwk\tother\nt3.nwk\tother\t7\n")
    entries = load_manifest(m, outgroup="outgroup")
    assert [e.weight for e in entries] == [4, 1, 7]
    assert [e.kind for e in entries] == [SourceKind.MOLECULAR, SourceKind.OTHER, SourceKind.OTHER]
    assert serialize_newick(entries[0].tree) == "(outgroup,(A,B));"


@pytest.mark.parametrize(
    "body",
    ["t1.nwk\tfossil\n", "t1.nwk\tother\t0\n", "t1.nwk\tother\t-2\n", "missing.nwk\tother\n"],
)
def test_manifest_errors(corpus, body):
    m = corpus / "m.tsv"
    m.write_text(body)
    with pytest.raises(InputError):
        load_manifest(m)


def test_manifest_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_manifest(tmp_path / "nope.tsv")


def test_manifest_requires_outgroup(corpus):
    (corpus / "x.nwk").write_text("(A,(B,C));")
    m = corpus / "m.tsv"
    m.write_text("x.nwk\tother\n")
    with pytest.raises(InputError):
        load_manifest(m, outgroup="outgroup")
    assert len(load_manifest(m)) == 1

from pathlib import Path

import pytest
from hypothesis import given, settings

from conftest import trees
from supertree import aspgen
from supertree.errors import InputError
from supertree.newick import SourceEntry, SourceKind, parse_newick
from supertree.objectives import ProjectionInput, build_projection_input, build_quartet_input
from supertree.topology import tree_key

GOLDEN = Path(__file__).parent / "golden"
TAXA = {"outgroup", "Felis", "Lynx", "Panthera", "Puma"}


def sources(left, right):
    return [SourceEntry(left, SourceKind.MOLECULAR), SourceEntry(right, SourceKind.OTHER)]


@pytest.mark.parametrize("name", ["tree", "canonical", "quartet", "projection"])
def test_rule_files_match_golden(name):
    assert aspgen.rules(name).encode() == (GOLDEN / f"{name}.lp").read_bytes()


def test_emitted_sections_byte_identical(left, right):
    for inp, obj in ((build_quartet_input(sources(left, right)), "quartet"),
                     (build_projection_input(sources(left, right)), "projection")):
        secs = aspgen.sections(aspgen.build_bundle(TAXA, inp, "outgroup").text)
        for name in ("tree", "canonical", obj):
            assert secs[("rules", name)].encode() == (GOLDEN / f"{name}.lp").read_bytes()


def test_tree_facts(left):
    text = aspgen.emit_tree_program(TAXA, "outgroup")
    facts = aspgen.sections(text)[("facts", "tree")].splitlines()
    assert facts == [
        "atomcnt(5).",
        "fstatom(felis).",
        "nxtatom(felis,lynx).",
        "nxtatom(lynx,outgroup).",
        "nxtatom(outgroup,panthera).",
        "nxtatom(panthera,puma).",
    ]
    support = aspgen.sections(text)[("support", "tree")]
    assert "asgn(Y,outgroup)" in support


def test_no_outgroup_support_rule():
    support = aspgen.sections(aspgen.emit_tree_program({"a", "b", "c"}))[("support", "tree")]
    assert "outgroup(X) :- root(X)." in support


def test_quartet_weight_nine_in_facts():
    srcs = [
        SourceEntry(parse_newick("((A,B),(C,D));"), SourceKind.MOLECULAR),
        SourceEntry(parse_newick("((A,B),(C,D));"), SourceKind.MOLECULAR),
        SourceEntry(parse_newick("((A,B),(C,D));"), SourceKind.OTHER),
    ]
    text = aspgen.emit_quartet_program(build_quartet_input(srcs))
    assert "quartetwt(a,b,c,d,9)." in text.splitlines()


def test_projection_terms(left):
    p = build_projection_input([SourceEntry(left, SourceKind.OTHER)])
    facts = aspgen.sections(aspgen.emit_projection_program(p))[("facts", "projection")].splitlines()
    assert "proj(t(outgroup,t(felis,t(lynx,t(panthera,puma)))))." in facts
    assert "acnt(t(panthera,puma),2)." in facts
    assert "projwt(t(felis,t(lynx,t(panthera,puma))),1)." in facts


def test_multifurcation_uses_lists():
    p = build_projection_input([SourceEntry(parse_newick("((a,b),c,d);"), SourceKind.OTHER)])
    facts = aspgen.emit_projection_program(p)
    assert "proj(l(t(a,b),l(c,l(d,nil))))." in facts.splitlines()


def test_round_trip_genus_pair(left, right):
    for inp in (build_quartet_input(sources(left, right)), build_projection_input(sources(left, right))):
        back = aspgen.parse_facts(aspgen.build_bundle(TAXA, inp, "outgroup").text)
        assert type(back) is type(inp)
        if isinstance(inp, ProjectionInput):
            assert {k: (e.weight, e.atom_count) for k, e in back.entries.items()} == {
                k: (e.weight, e.atom_count) for k, e in inp.entries.items()
            }
        else:
            assert back.entries == inp.entries


@settings(max_examples=60)
@given(trees(min_taxa=4, max_taxa=8))
def test_round_trip_property(t):
    src = [SourceEntry(t, SourceKind.MOLECULAR)]
    q, p = build_quartet_input(src), build_projection_input(src)
    if len(q):
        assert aspgen.parse_facts(aspgen.build_bundle(t.taxa, q).text).entries == q.entries
    back = aspgen.parse_facts(aspgen.build_bundle(t.taxa, p).text)
    assert {k: (e.weight, e.atom_count) for k, e in back.entries.items()} == {
        k: (e.weight, e.atom_count) for k, e in p.entries.items()
    }
    assert all(tree_key(e.tree) == k for k, e in back.entries.items())


def test_mangling():
    m = aspgen.Mangler(["Felis-catus", "felis_catus", "not", "Nil", "X.y"])
    consts = set(m.to_name)
    assert len(consts) == 5
    assert all(c[0].islower() and c not in aspgen.RESERVED for c in consts)
    back = aspgen.Mangler.from_comments(m.comments())
    assert back.to_const == m.to_const
    with pytest.raises(InputError):
        aspgen.Mangler(["_hidden"])


def test_errors(left):
    q = build_quartet_input([SourceEntry(left, SourceKind.OTHER)])
    with pytest.raises(InputError):
        aspgen.build_bundle({"Felis", "Lynx"}, q)
    with pytest.raises(InputError):
        aspgen.emit_tree_program({"a"})
    with pytest.raises(InputError):
        aspgen.emit_tree_program({"a", "b"}, outgroup="outgroup")
    with pytest.raises(InputError):
        aspgen.emit_projection_program(ProjectionInput())
    with pytest.raises(InputError):
        aspgen.parse_facts("% nothing here\n")


def test_write_program_lf(tmp_path, left):
    text = aspgen.emit_tree_program(TAXA)
    path = tmp_path / "prog.lp"
    aspgen.write_program(path, text)
    assert b"\r\n" not in path.read_bytes()
    assert path.read_text() == text

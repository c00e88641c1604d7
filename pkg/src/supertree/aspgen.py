"""Export logic-program encodings (gringo 3 input language) plus instance facts.

A program is a sequence of sections, each opened by a ``% === <kind>: <name> ===`` line:
verbatim rule files from ``encodings/``, a small ``support`` section defining the helper
predicates those rules assume (used/unused/root/outgroup/atom), and the instance facts.
Taxa are mangled into lowercase constants; the mapping is recorded as
``% taxon <constant> <name>`` comment lines so facts can be read back.

Compound trees of arity two use the constructor ``t(T1,T2)``; higher arities use cons
cells ``l(T1,l(T2,...l(Tk,nil)))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from supertree.errors import InputError
from supertree.newick import Tree, taxon_key
from supertree.objectives import ProjectionInput, WeightedQuartetSet
from supertree.topology import Quartet, sorted_taxa, tree_key

RESERVED = {"not", "nil"}
RULE_FILES = {
    "tree": "tree.lp",
    "canonical": "canonical.lp",
    "quartet": "quartet.lp",
    "projection": "projection.lp",
}
_SECTION_RE = re.compile(r"^% === (\w+): (\w+) ===$", re.M)


def rules(name):
    return resources.files("supertree").joinpath("encodings").joinpath(RULE_FILES[name]).read_text(encoding="utf-8")


class Mangler:
    """Reversible map from taxon names to grounder constants."""

    def __init__(self, taxa):
        self.to_const = {}
        self.to_name = {}
        for name in sorted_taxa(set(taxa)):
            base = re.sub(r"[^a-z0-9_]", "_", name.lower())
            if not re.match(r"[a-z]", base):
                raise InputError(f"taxon {name!r} cannot be mangled into a constant")
            const, i = base, 2
            while const in self.to_name or const in RESERVED:
                const = f"{base}_{i}"
                i += 1
            self.to_const[name] = const
            self.to_name[const] = name

    def __getitem__(self, name):
        return self.to_const[name]

    def comments(self):
        return "".join(f"% taxon {c} {n}\n" for n, c in self.to_const.items())

    @classmethod
    def from_comments(cls, text):
        m = cls([])
        for const, name in re.findall(r"^% taxon (\S+) (\S+)$", text, re.M):
            m.to_const[name] = const
            m.to_name[const] = name
        return m


def _section(kind, name, body):
    return f"% === {kind}: {name} ===\n{body}"


def _support(outgroup_const):
    lines = [
        "used(X) :- edge(X,Y), pair(X,Y).",
        "unused(X) :- inner(X), not used(X).",
        "root(X) :- used(X), not edge(Y,X): pair(Y,X).",
    ]
    if outgroup_const is None:
        lines.append("outgroup(X) :- root(X).")
    else:
        lines.append(f"outgroup(X) :- edge(X,Y), pair(X,Y), asgn(Y,{outgroup_const}).")
    return "\n".join(lines) + "\n"


@dataclass
class ProgramBundle:
    tree_rules: str
    objective_rules: str
    facts: str

    @property
    def text(self):
        return self.tree_rules + self.objective_rules + self.facts


def _tree_parts(taxa, outgroup, mangler):
    taxa = sorted_taxa(set(taxa))
    if len(taxa) < 2:
        raise InputError("need at least two taxa")
    if outgroup is not None and outgroup not in taxa:
        raise InputError(f"outgroup {outgroup!r} not among taxa")
    consts = [mangler[t] for t in taxa]
    rule_text = (
        _section("rules", "tree", rules("tree"))
        + _section("rules", "canonical", rules("canonical"))
        + _section("support", "tree", _support(None if outgroup is None else mangler[outgroup]))
    )
    facts = [f"atomcnt({len(consts)}).", f"fstatom({consts[0]})."]
    facts += [f"nxtatom({a},{b})." for a, b in zip(consts, consts[1:])]
    return rule_text, _section("facts", "tree", "\n".join(facts) + "\n")


def _header(mangler):
    return "% generated by supertree.aspgen\n" + mangler.comments()


def emit_tree_program(taxa, outgroup=None, mangler=None):
    """Tree-space and canonical-ordering rules plus the alphabetical atom chain."""
    mangler = mangler or Mangler(taxa)
    rule_text, facts = _tree_parts(taxa, outgroup, mangler)
    return _header(mangler) + rule_text + facts


def _quartet_facts(q, mangler):
    if not q.entries:
        raise InputError("empty quartet input")
    lines = []
    for quartet in sorted(q.entries, key=lambda x: tuple(taxon_key(t) for t in x)):
        args = ",".join(mangler[t] for t in quartet)
        lines.append(f"quartet({args}).")
        lines.append(f"quartetwt({args},{q.entries[quartet]}).")
    return _section("facts", "quartet", "\n".join(lines) + "\n")


def emit_quartet_program(q, mangler=None):
    mangler = mangler or Mangler(q.taxa)
    facts = _quartet_facts(q, mangler)
    support = _section("support", "quartet", "atom(A) :- fstatom(A).\natom(B) :- nxtatom(A,B).\n")
    return _header(mangler) + _section("rules", "quartet", rules("quartet")) + support + facts


def _term(tree, p, mangler):
    if tree.is_leaf:
        return mangler[tree.label]
    parts = []
    for c in tree.children:
        rep = c if c.is_leaf else p.entries[tree_key(c)].tree
        parts.append(_term(rep, p, mangler))
    if len(parts) == 2:
        return f"t({parts[0]},{parts[1]})"
    out = "nil"
    for x in reversed(parts):
        out = f"l({x},{out})"
    return out


def _projection_facts(p, mangler):
    if not p.entries:
        raise InputError("projection input has no compound trees")
    lines = []
    for _, e in sorted(p.entries.items(), key=lambda kv: (-kv[1].atom_count, kv[0])):
        term = _term(e.tree, p, mangler)
        lines += [f"proj({term}).", f"projwt({term},{e.weight}).", f"acnt({term},{e.atom_count})."]
    return _section("facts", "projection", "\n".join(lines) + "\n")


def emit_projection_program(p, mangler=None):
    mangler = mangler or Mangler(p.taxa)
    return _header(mangler) + _section("rules", "projection", rules("projection")) + _projection_facts(p, mangler)


def build_bundle(taxa, objective_input, outgroup=None):
    """Complete program: tree rules, the objective's rules and all facts, one mangling."""
    missing = objective_input.taxa - set(taxa)
    if missing:
        raise InputError(f"input taxa outside the taxon set: {sorted_taxa(missing)}")
    mangler = Mangler(taxa)
    tree_rules, tree_facts = _tree_parts(taxa, outgroup, mangler)
    if isinstance(objective_input, WeightedQuartetSet):
        obj = _section("rules", "quartet", rules("quartet")) + _section(
            "support", "quartet", "atom(A) :- fstatom(A).\natom(B) :- nxtatom(A,B).\n"
        )
        facts = tree_facts + _quartet_facts(objective_input, mangler)
    else:
        obj = _section("rules", "projection", rules("projection"))
        facts = tree_facts + _projection_facts(objective_input, mangler)
    return ProgramBundle(_header(mangler) + tree_rules, obj, facts)


def write_program(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- reading programs back -----------------------------------------------------------------


def sections(text):
    """Map ``(kind, name)`` to section body."""
    out = {}
    marks = list(_SECTION_RE.finditer(text))
    for i, m in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(text)
        out[(m.group(1), m.group(2))] = text[m.end() + 1 : end]
    return out


def _parse_term(s, pos, mangler):
    if s.startswith("t(", pos) or s.startswith("l(", pos):
        cons = s[pos] == "l"
        pos += 2
        first, pos = _parse_term(s, pos, mangler)
        if s[pos] != ",":
            raise InputError(f"malformed term at {pos}")
        second, pos = _parse_term(s, pos + 1, mangler)
        if s[pos] != ")":
            raise InputError(f"malformed term at {pos}")
        pos += 1
        if not cons:
            return Tree(children=(_as_tree(first), _as_tree(second))), pos
        if second != "nil" and not isinstance(second, list):
            raise InputError(f"malformed list term at {pos}")
        return [_as_tree(first), *([] if second == "nil" else second)], pos
    m = re.compile(r"[a-z][A-Za-z0-9_]*").match(s, pos)
    if not m:
        raise InputError(f"malformed term at {pos}")
    if m.group() == "nil":
        return "nil", m.end()
    return Tree(label=mangler.to_name[m.group()]), m.end()


def _as_tree(value):
    if isinstance(value, list):
        return Tree(children=tuple(value))
    if value == "nil":
        raise InputError("unexpected nil")
    return value


def parse_term(text, mangler):
    value, pos = _parse_term(text, 0, mangler)
    if pos != len(text):
        raise InputError("trailing characters in term")
    return _as_tree(value)


def parse_facts(text):
    """Rebuild the WeightedQuartetSet or ProjectionInput whose facts appear in ``text``."""
    mangler = Mangler.from_comments(text)
    text = "".join(body for (kind, _), body in sections(text).items() if kind == "facts")
    wq = re.findall(r"^quartetwt\(([^,]+),([^,]+),([^,]+),([^,]+),(\d+)\)\.$", text, re.M)
    if wq:
        q = WeightedQuartetSet()
        for a, b, c, d, w in wq:
            q.entries[Quartet(*(mangler.to_name[x] for x in (a, b, c, d)))] = int(w)
        return q
    weights = dict(re.findall(r"^projwt\((.*),(\d+)\)\.$", text, re.M))
    counts = dict(re.findall(r"^acnt\((.*),(\d+)\)\.$", text, re.M))
    p = ProjectionInput()
    for term in re.findall(r"^proj\((.*)\)\.$", text, re.M):
        tree = parse_term(term, mangler)
        p.add(tree, int(weights[term]))
        if p.entries[tree_key(tree)].atom_count != int(counts[term]):
            raise InputError(f"atom count mismatch for {term}")
    if not p.entries:
        raise InputError("no facts found")
    return p

"""Preprocessing of source collections and score reports."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from supertree.errors import InputError
from supertree.newick import DEFAULT_OUTGROUP, SourceEntry, Tree
from supertree.objectives import build_quartet_input, quartet_score
from supertree.topology import project, resolution, sorted_taxa, taxa_of_all


def genus_abstraction(tree, genus_map, outgroup=DEFAULT_OUTGROUP):
    """Replace each genus's species by one genus leaf.

    The genus leaf hangs from the deepest node whose subtree holds every species of that
    genus present in ``tree`` (a lone species is simply relabelled). Species leaves are
    then dropped and unary nodes collapsed. The outgroup is left untouched.
    """
    species = tree.taxa - {outgroup}
    unmapped = [s for s in species if s not in genus_map]
    if unmapped:
        raise InputError(f"species missing from the genus map: {', '.join(sorted_taxa(unmapped))}")
    members = {}
    for s in species:
        members.setdefault(genus_map[s], set()).add(s)
    for g, ms in members.items():
        if g in tree.taxa and g not in ms:
            raise InputError(f"genus name {g!r} collides with taxon in tree")

    def deepest(t, ms):
        for c in t.children:
            if ms <= c.taxa:
                return deepest(c, ms)
        return t

    anchors = {}
    for g, ms in members.items():
        anchors.setdefault(id(deepest(tree, ms)), []).append(g)

    def rebuild(t):
        here = anchors.get(id(t), [])
        if t.is_leaf:
            if here:
                return [Tree(label=here[0])]
            return [t] if t.label == outgroup else []
        kids = []
        for c in t.children:
            kids.extend(rebuild(c))
        kids.extend(Tree(label=g) for g in sorted_taxa(here))
        if not kids:
            return []
        if len(kids) == 1:
            return kids
        return [Tree(children=tuple(kids))]

    out = rebuild(tree)
    if not out:
        raise InputError("abstraction left an empty tree")
    return out[0]


def find_rogue_taxa(sources, outgroup=DEFAULT_OUTGROUP):
    """Taxa other than the outgroup that occur in exactly one source tree."""
    counts = Counter()
    for s in sources:
        counts.update(s.tree.taxa)
    return {t for t, c in counts.items() if c == 1 and t != outgroup}


def prune_taxa(tree, remove):
    keep = tree.taxa - set(remove)
    if len(keep) < 2:
        raise InputError("pruning would leave fewer than two taxa")
    return project(tree, keep)


def prune_sources(sources, remove, min_taxa=2):
    """Prune ``remove`` from every source; drop sources left with fewer than ``min_taxa``."""
    out = []
    for s in sources:
        keep = s.tree.taxa - set(remove)
        if len(keep) >= max(min_taxa, 2):
            out.append(s.with_tree(project(s.tree, keep)))
    return out


def abstract_sources(sources, genus_map, outgroup=DEFAULT_OUTGROUP, min_genera=4):
    """Genus-level sources; trees with fewer than ``min_genera`` genera are dropped."""
    out = []
    for s in sources:
        t = genus_abstraction(s.tree, genus_map, outgroup)
        if len(t.taxa - {outgroup}) >= min_genera:
            out.append(s.with_tree(t))
    return out


def genus_projections(sources, genus_map, outgroup=DEFAULT_OUTGROUP, min_species=5):
    """Sources projected onto each genus's species plus the outgroup.

    Genera with fewer than ``min_species`` species overall are skipped, as are projections
    keeping fewer than three taxa (they constrain neither objective).
    """
    members = {}
    for sp, g in genus_map.items():
        members.setdefault(g, set()).add(sp)
    out = {}
    for g in sorted_taxa(members):
        if len(members[g]) < min_species:
            continue
        keep = members[g] | {outgroup}
        projected = [s.with_tree(project(s.tree, keep)) for s in sources if len(s.tree.taxa & keep) >= 3]
        if projected:
            out[g] = projected
    return out


def apply_scheme(sources, scheme):
    """``weighted``: keep manifest weights (molecular 4, other 1); ``unweighted``: all 1."""
    if scheme == "weighted":
        return list(sources)
    if scheme == "unweighted":
        return [SourceEntry(s.tree, s.kind, 1, s.name) for s in sources]
    raise InputError(f"unknown weighting scheme {scheme!r}")


@dataclass
class ScoreReport:
    resolution: Fraction
    qs: int
    total_weight: int
    optima_count: int = 1
    scheme: str = "weighted"

    @property
    def qs_pct(self):
        return Fraction(self.qs, self.total_weight) if self.total_weight else Fraction(0)

    def items(self):
        return [
            ("scheme", self.scheme),
            ("resolution", f"{float(self.resolution):.4f}"),
            ("qs", str(self.qs)),
            ("qs_total", str(self.total_weight)),
            ("qs_pct", f"{float(self.qs_pct):.4f}"),
            ("optima_count", str(self.optima_count)),
        ]


def score_report(candidate, sources, scheme="weighted", optima_count=1):
    q = build_quartet_input(sources)
    return ScoreReport(
        resolution=resolution(candidate),
        qs=quartet_score(candidate, q),
        total_weight=q.total_weight,
        optima_count=optima_count,
        scheme=scheme,
    )


def format_kv(items):
    """Flat ``key<TAB>value`` document."""
    return "".join(f"{k}\t{v}\n" for k, v in items)


def format_table(items, title=None):
    width = max(len(k) for k, _ in items)
    lines = [title] if title else []
    lines += [f"  {k.ljust(width)}  {v}" for k, v in items]
    return "\n".join(lines) + "\n"


def _read_pairs(path, what):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{what} not found: {path}")
    pairs = []
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected two tab-separated fields")
            pairs.append((row[0].strip(), row[1].strip(), lineno))
    return pairs


def load_genus_map(path):
    """TSV ``species<TAB>genus``."""
    out = {}
    for sp, g, lineno in _read_pairs(path, "genus map"):
        if sp in out and out[sp] != g:
            raise InputError(f"{path}:{lineno}: species {sp!r} mapped twice")
        out[sp] = g
    return out


def load_partition(path):
    """TSV ``taxon<TAB>group``; a taxon listed under two groups is an error."""
    out = {}
    for taxon, g, lineno in _read_pairs(path, "partition file"):
        if taxon in out and out[taxon] != g:
            raise InputError(f"{path}:{lineno}: taxon {taxon!r} in overlapping groups")
        out[taxon] = g
    return out


def solver_taxa(sources):
    return set(taxa_of_all(s.tree for s in sources))

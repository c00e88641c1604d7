"""Rooted leaf-labelled trees, Newick I/O and source-collection manifests."""

from __future__ import annotations

import csv
import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from supertree.errors import InputError, NewickError

TAXON_RE = re.compile(r"[A-Za-z0-9_.-]+")
_NUMBER_RE = re.compile(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")

DEFAULT_OUTGROUP = "outgroup"


def taxon_key(name):
    """Global taxon ordering: alphabetical, case-insensitive, ties broken by exact spelling."""
    return (name.casefold(), name)


@dataclass(frozen=True, eq=True)
class Tree:
    """Immutable rooted tree. Leaves carry a label, inner nodes carry >= 2 ordered children.

    Equality is structural and order-sensitive; use ``topology.tree_key`` to compare
    trees disregarding orientation.
    """

    label: str | None = None
    children: tuple[Tree, ...] = ()
    _taxa: frozenset = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.children:
            if not self.label or not TAXON_RE.fullmatch(self.label):
                raise InputError(f"invalid taxon name {self.label!r}")
            object.__setattr__(self, "_taxa", frozenset([self.label]))
            return
        if self.label is not None:
            raise InputError("inner nodes are unlabelled")
        if len(self.children) < 2:
            raise InputError("unary inner node")
        seen = set()
        taxa = set()
        for child in self.children:
            folded = {t.casefold() for t in child._taxa}
            dup = seen & folded
            if dup:
                raise InputError(f"duplicate leaf label {sorted(dup)[0]!r}")
            seen |= folded
            taxa |= child._taxa
        object.__setattr__(self, "_taxa", frozenset(taxa))

    @property
    def is_leaf(self):
        return not self.children

    @property
    def taxa(self):
        return self._taxa

    def leaves(self):
        """Leaf labels in left-to-right order."""
        if self.is_leaf:
            return [self.label]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def inner_nodes(self):
        """Inner nodes in pre-order."""
        if self.is_leaf:
            return []
        out = [self]
        for child in self.children:
            out.extend(child.inner_nodes())
        return out

    def __str__(self):
        return serialize_newick(self)


def leaf(name):
    return Tree(label=name)


def node(*children):
    return Tree(children=tuple(leaf(c) if isinstance(c, str) else c for c in children))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        pos = self.pos if pos is None else pos
        return NewickError(message, len(self.text[:pos].encode("utf-8")))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self):
        self.skip_ws()
        m = TAXON_RE.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group()

    def branch_length(self):
        if self.peek() != ":":
            return
        self.pos += 1
        self.skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise self.error("malformed branch length")
        self.pos = m.end()

    def subtree(self):
        start = self.pos
        if self.peek() == "(":
            open_pos = self.pos
            self.pos += 1
            children = [self.subtree()]
            while self.peek() == ",":
                self.pos += 1
                children.append(self.subtree())
            if self.peek() != ")":
                if self.pos >= len(self.text) or self.text[self.pos] == ";":
                    raise self.error("unbalanced parentheses", open_pos)
                raise self.error(f"unexpected character {self.text[self.pos]!r}")
            self.pos += 1
            if len(children) < 2:
                raise self.error("unary inner node", open_pos)
            self.label()  # inner labels are dropped
            self.branch_length()
            try:
                return Tree(children=tuple(children))
            except InputError as exc:
                raise self.error(str(exc), start) from None
        self.skip_ws()
        start = self.pos
        name = self.label()
        if name is None:
            raise self.error("empty label")
        self.branch_length()
        return Tree(label=name)

    def tree(self):
        if not self.text.strip():
            raise self.error("empty input")
        t = self.subtree()
        if self.peek() == ")":
            raise self.error("unbalanced parentheses")
        if self.peek() != ";":
            raise self.error("expected ';'" if self.pos >= len(self.text) else "trailing garbage")
        self.pos += 1
        if self.peek():
            raise self.error("trailing garbage")
        return t


def parse_newick(text):
    """Parse one semicolon-terminated Newick tree; branch lengths and inner labels are discarded."""
    return _Parser(text).tree()


def _emit(tree):
    if tree.is_leaf:
        return tree.label
    return "(" + ",".join(_emit(c) for c in tree.children) + ")"


def serialize_newick(tree):
    return _emit(tree) + ";"


def read_trees(path):
    """Read every tree from a file holding one or more ';'-terminated Newick trees."""
    text = Path(path).read_text(encoding="utf-8")
    chunks = [c.strip() for c in text.split(";")]
    return [parse_newick(c + ";") for c in chunks if c]


def write_trees(path, trees):
    Path(path).write_text("".join(serialize_newick(t) + "\n" for t in trees), encoding="utf-8")


class SourceKind(str, enum.Enum):
    MOLECULAR = "molecular"
    OTHER = "other"

    @property
    def default_weight(self):
        return 4 if self is SourceKind.MOLECULAR else 1


@dataclass(frozen=True)
class SourceEntry:
    tree: Tree
    kind: SourceKind = SourceKind.OTHER
    weight: int | None = None
    name: str = ""

    def __post_init__(self):
        kind = SourceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.weight is None:
            object.__setattr__(self, "weight", kind.default_weight)
        if int(self.weight) != self.weight or self.weight < 1:
            raise InputError(f"source weight must be a positive integer, got {self.weight!r}")

    def with_tree(self, tree):
        return SourceEntry(tree, self.kind, self.weight, self.name)


def load_manifest(path, outgroup=None):
    """Load a TSV manifest: ``tree-file<TAB>kind[<TAB>weight]`` per row, ``#`` comments.

    Tree paths are resolved relative to the manifest's directory. When ``outgroup`` is
    given every source tree must contain it.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"manifest not found: {path}")
    entries = []
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            row = [c.strip() for c in row]
            if len(row) < 2 or len(row) > 3:
                raise InputError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
            try:
                kind = SourceKind(row[1].lower())
            except ValueError:
                raise InputError(f"{path}:{lineno}: unknown kind {row[1]!r}") from None
            weight = None
            if len(row) == 3 and row[2]:
                try:
                    weight = int(row[2])
                except ValueError:
                    raise InputError(f"{path}:{lineno}: weight must be an integer") from None
                if weight <= 0:
                    raise InputError(f"{path}:{lineno}: weight must be positive")
            tree_path = path.parent / row[0]
            if not tree_path.is_file():
                raise InputError(f"{path}:{lineno}: tree file not found: {tree_path}")
            try:
                trees = read_trees(tree_path)
            except NewickError as exc:
                raise InputError(f"{tree_path}: {exc}") from None
            if len(trees) != 1:
                raise InputError(f"{tree_path}: expected exactly one tree, found {len(trees)}")
            tree = trees[0]
            if outgroup is not None and outgroup not in tree.taxa:
                raise InputError(f"{tree_path}: outgroup {outgroup!r} missing")
            entries.append(SourceEntry(tree, kind, weight, name=row[0]))
    return entries


def write_manifest(path, entries, tree_dir=None):
    """Write entries as a manifest plus one ``.nwk`` file per tree next to it."""
    path = Path(path)
    tree_dir = Path(tree_dir) if tree_dir else path.parent
    tree_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    used = set()
    for i, e in enumerate(entries):
        fname = Path(e.name).name if e.name else f"source{i:03d}.nwk"
        if fname in used:
            fname = f"{i:03d}_{fname}"
        used.add(fname)
        write_trees(tree_dir / fname, [e.tree])
        rel = Path(tree_dir / fname).resolve().relative_to(path.parent.resolve())
        lines.append(f"{rel}\t{e.kind.value}\t{e.weight}\n")
    path.write_text("".join(lines), encoding="utf-8")

"""Exact and anytime optimisation of both supertree objectives over canonical tree space."""

from __future__ import annotations

import itertools
import logging
import random
import time
from collections import Counter
from dataclasses import dataclass, replace

from supertree.canonical import PartialTree, enumerate_canonical, from_canonical, to_canonical
from supertree.errors import InputError, LimitExceeded
from supertree.newick import Tree, taxon_key
from supertree.objectives import (
    WeightedQuartetSet,
    build_projection_input,
    build_quartet_input,
    projection_penalty,
    quartet_score,
)
from supertree.topology import (
    cluster_set,
    project,
    sorted_taxa,
    taxa_of_all,
    tree_from_clusters,
    tree_key,
)

log = logging.getLogger(__name__)

QUARTET_MAX = "quartet_max"
PROJECTION_MIN = "projection_min"


@dataclass
class SolverOptions:
    outgroup: str | None = None
    binary_only: bool = False
    all_optima: bool = False
    limit: int = 12
    anytime: float | None = None  # seconds of local search allowed above ``limit``
    seed: int = 0
    max_steps: int | None = None  # local-search step budget


@dataclass
class OptimumResult:
    objective: str
    best_value: int
    optima: list
    explored: int = 0
    elapsed: float = 0.0
    exact: bool = True

    @property
    def keys(self):
        return [tree_key(t) for t in self.optima]


def representative(tree):
    """Canonical representative of a topology (layout round trip)."""
    return from_canonical(to_canonical(tree))


# -- compiled problems -------------------------------------------------------------------
#
# Both evaluators work on any structure exposing ``mask``, ``parent``, ``inner_ids()``,
# ``root``, ``n`` and ``count`` (taxa 0..count-1 placed), i.e. PartialTree or _Arrays.


class _Arrays:
    """Array view of a complete Tree, indexed like PartialTree."""

    def __init__(self, tree, index):
        n = len(index)
        self.n = n
        self.count = n
        size = max(2 * n - 1, 1)
        self.parent = [-1] * size
        self.mask = [0] * size
        self.children = [[] for _ in range(size)]
        nxt = n

        def walk(t):
            nonlocal nxt
            if t.is_leaf:
                v = index[t.label]
                self.mask[v] = 1 << v
                return v
            v = nxt
            nxt += 1
            m = 0
            for c in t.children:
                cv = walk(c)
                self.parent[cv] = v
                self.children[v].append(cv)
                m |= self.mask[cv]
            self.mask[v] = m
            return v

        self.root = walk(tree)
        self._inner = range(n, nxt)

    def inner_ids(self):
        return self._inner


class QuartetProblem:
    def __init__(self, taxa, q):
        self.taxa = tuple(sorted_taxa(taxa))
        self.index = {t: i for i, t in enumerate(self.taxa)}
        missing = q.taxa - set(self.taxa)
        if missing:
            raise InputError(f"quartet taxa outside the taxon set: {sorted_taxa(missing)}")
        n = len(self.taxa)
        self.by_last = [[] for _ in range(n)]
        for quartet, w in q.entries.items():
            idx = [self.index[t] for t in quartet]
            ab = (1 << idx[0]) | (1 << idx[1])
            cd = (1 << idx[2]) | (1 << idx[3])
            self.by_last[max(idx)].append((ab, cd, w))
        # undecided[k]: weight of quartets not yet decided when taxa 0..k-1 are placed;
        # best_undecided[k] counts only the heaviest of the rival topologies on each
        # 4-set, since a tree displays at most one of them
        heaviest = {}
        for ab, cd, w in (x for group in self.by_last for x in group):
            key = ab | cd
            heaviest[key] = max(heaviest.get(key, 0), w)
        self.undecided = [0] * (n + 1)
        self.best_undecided = [0] * (n + 1)
        for k in range(n - 1, -1, -1):
            self.undecided[k] = self.undecided[k + 1] + sum(w for _, _, w in self.by_last[k])
            self.best_undecided[k] = self.best_undecided[k + 1] + sum(
                w for key, w in heaviest.items() if key.bit_length() - 1 == k
            )
        self.total_weight = self.undecided[0]

    def satisfied(self, masks, k):
        """Weight of the quartets decided by placing taxon ``k`` that ``masks`` display."""
        s = 0
        for ab, cd, w in self.by_last[k]:
            both = ab | cd
            for m in masks:
                hit = m & both
                if hit == ab or hit == cd:
                    s += w
                    break
        return s

    def value(self, st):
        masks = [st.mask[v] for v in st.inner_ids()]
        return sum(self.satisfied(masks, k) for k in range(st.count))


def quartet_bound(st, problem, satisfied_so_far=None, tight=False):
    """Admissible upper bound: satisfied-so-far plus every quartet not yet decidable.

    With ``tight`` only the heaviest topology of each undecided 4-set is added.
    """
    if satisfied_so_far is None:
        satisfied_so_far = problem.value(st)
    rest = problem.best_undecided if tight else problem.undecided
    return satisfied_so_far + rest[st.count]


class _Entry:
    __slots__ = ("mask", "parts", "restricted", "cost", "weight")


class ProjectionProblem:
    def __init__(self, taxa, p):
        self.taxa = tuple(sorted_taxa(taxa))
        self.index = {t: i for i, t in enumerate(self.taxa)}
        missing = p.taxa - set(self.taxa)
        if missing:
            raise InputError(f"projection taxa outside the taxon set: {sorted_taxa(missing)}")
        n = len(self.taxa)
        self.entries = []
        for e in p.entries.values():
            ent = _Entry()
            ent.mask = self._mask(e.tree.taxa)
            ent.parts = [self._mask(c.taxa) for c in e.tree.children]
            inner = [self._mask(s.taxa) for s in e.tree.inner_nodes()]
            ent.restricted = []
            for k in range(n + 1):
                placed = (1 << k) - 1
                if (ent.mask & placed).bit_count() < 3:
                    ent.restricted.append(None)
                else:
                    ent.restricted.append(
                        frozenset(c & placed for c in inner if (c & placed).bit_count() >= 2)
                    )
            ent.cost = e.atom_count * e.weight
            ent.weight = e.weight
            self.entries.append(ent)

    def _mask(self, taxa):
        m = 0
        for t in taxa:
            m |= 1 << self.index[t]
        return m

    def value(self, st):
        """Penalty already committed by the placed taxa; exact once all are placed."""
        placed = (1 << st.count) - 1
        inner = [st.mask[v] for v in st.inner_ids()]
        parent = st.parent
        total = 0
        for ent in self.entries:
            want = ent.restricted[st.count]
            if want is not None:
                have = set()
                for c in inner:
                    r = c & placed & ent.mask
                    if r.bit_count() >= 2:
                        have.add(r)
                if have != want:
                    total += ent.cost
                    continue
            if ent.mask & placed != ent.mask:
                continue
            x = _lca(st, ent.mask)
            for part in ent.parts:
                if parent[_lca(st, part)] != x:
                    total += ent.weight
                    break
        return total


def _lca(st, m):
    v = (m & -m).bit_length() - 1
    mask, parent = st.mask, st.parent
    while mask[v] & m != m:
        v = parent[v]
    return v


def projection_bound(st, problem):
    """Admissible lower bound: penalty that no completion can undo."""
    return problem.value(st)


# -- exact search --------------------------------------------------------------------------


def _taxa_and_outgroup(taxa, opts):
    taxa = tuple(sorted_taxa(set(taxa)))
    if len(taxa) < 2:
        raise InputError("need at least two taxa")
    og = None
    if opts.outgroup is not None:
        if opts.outgroup not in taxa:
            raise InputError(f"outgroup {opts.outgroup!r} not among taxa")
        og = taxa.index(opts.outgroup)
    return taxa, og


class _Incumbent:
    """Best value and trees so far.

    ``floor`` is a value known to be attainable (from local search). Until a tree is
    found it prunes only strictly worse subtrees, so the search returns the same optima
    in the same order as without it.
    """

    def __init__(self, maximize, all_optima, floor=None):
        self.maximize = maximize
        self.all_optima = all_optima
        self.floor = floor
        self.best = None
        self.trees = []

    def pruned(self, bound):
        if self.best is None:
            if self.floor is None:
                return False
            return bound < self.floor if self.maximize else bound > self.floor
        if self.maximize:
            return bound < self.best or (bound == self.best and not self.all_optima)
        return bound > self.best or (bound == self.best and not self.all_optima)

    def offer(self, value, make_tree):
        better = self.best is None or (value > self.best if self.maximize else value < self.best)
        if better:
            self.best = value
            self.trees = [make_tree()]
        elif value == self.best and self.all_optima:
            self.trees.append(make_tree())


def _branch_and_bound(taxa, og, opts, maximize, step, floor=None):
    """Depth-first search over insertion moves with bound pruning.

    ``step(pt, carried)`` returns ``(bound, carried')`` after a move; at full placement
    the bound is the exact objective value.
    """
    n = len(taxa)
    pt = PartialTree(n, opts.binary_only, og)
    inc = _Incumbent(maximize, opts.all_optima, floor)
    explored = 0

    def rec(carried):
        nonlocal explored
        explored += 1
        bound, carried = step(pt, carried)
        if inc.pruned(bound):
            return
        if pt.count == n:
            inc.offer(bound, lambda: representative(pt.to_tree(taxa)))
            return
        for move in pt.moves():
            pt.apply(move)
            rec(carried)
            pt.undo(move)

    rec(0)
    return inc, explored


def _check_limit(taxa, opts):
    if len(taxa) > opts.limit and opts.anytime is None:
        raise LimitExceeded(
            f"{len(taxa)} taxa exceed the exact-search limit of {opts.limit}; "
            "use anytime search or partitioning"
        )
    return len(taxa) > opts.limit


FLOOR_MIN_TAXA = 8  # below this the exact search is quicker than a warm start


def _floor(taxa, objective_input, opts):
    """Value of a short local search, used to prune before the first complete tree."""
    if len(taxa) < FLOOR_MIN_TAXA:
        return None
    quick = replace(opts, max_steps=20, anytime=None)
    return local_search(taxa, objective_input, quick).best_value


def optimize_quartets(taxa, q, opts=None):
    """Maximum quartet consistency: tree(s) over ``taxa`` displaying the most quartet weight."""
    opts = opts or SolverOptions()
    taxa, og = _taxa_and_outgroup(taxa, opts)
    problem = QuartetProblem(taxa, q)
    if _check_limit(taxa, opts):
        return local_search(taxa, q, opts)
    t0 = time.perf_counter()

    def step(pt, score):
        k = pt.count - 1
        if k >= 0 and problem.by_last[k]:
            score += problem.satisfied([pt.mask[v] for v in pt.inner_ids()], k)
        return quartet_bound(pt, problem, score, tight=True), score

    inc, explored = _branch_and_bound(taxa, og, opts, True, step, _floor(taxa, q, opts))
    return OptimumResult(QUARTET_MAX, inc.best, inc.trees, explored, time.perf_counter() - t0)


def optimize_projections(taxa, p, opts=None):
    """Maximum projection consistency: tree(s) over ``taxa`` with least projection penalty."""
    opts = opts or SolverOptions()
    taxa, og = _taxa_and_outgroup(taxa, opts)
    problem = ProjectionProblem(taxa, p)
    if _check_limit(taxa, opts):
        return local_search(taxa, p, opts)
    t0 = time.perf_counter()

    def step(pt, _):
        return projection_bound(pt, problem), 0

    inc, explored = _branch_and_bound(taxa, og, opts, False, step, _floor(taxa, p, opts))
    return OptimumResult(PROJECTION_MIN, inc.best, inc.trees, explored, time.perf_counter() - t0)


def optimize(taxa, objective_input, opts=None):
    if isinstance(objective_input, WeightedQuartetSet):
        return optimize_quartets(taxa, objective_input, opts)
    return optimize_projections(taxa, objective_input, opts)


def exhaustive_optimize(taxa, objective_input, opts=None):
    """Plain scan of every canonical layout, scored with the tree-level evaluators."""
    opts = opts or SolverOptions()
    taxa, og = _taxa_and_outgroup(taxa, opts)
    quartets = isinstance(objective_input, WeightedQuartetSet)
    score = quartet_score if quartets else projection_penalty
    inc = _Incumbent(quartets, True)
    t0 = time.perf_counter()
    count = 0
    for layout in enumerate_canonical(taxa, og is not None, opts.binary_only, opts.outgroup or ""):
        count += 1
        tree = from_canonical(layout)
        inc.offer(score(tree, objective_input), lambda: tree)
    return OptimumResult(
        QUARTET_MAX if quartets else PROJECTION_MIN, inc.best, inc.trees, count, time.perf_counter() - t0
    )


# -- anytime local search ------------------------------------------------------------------


def _remove_leafless(tree, victim):
    """Tree with the subtree ``victim`` (by identity) pruned and unary nodes spliced."""
    if tree is victim:
        return None
    if tree.is_leaf:
        return tree
    kids = [k for k in (_remove_leafless(c, victim) for c in tree.children) if k is not None]
    if len(kids) == 1:
        return kids[0]
    return Tree(children=tuple(kids))


def _regrafts(tree, sub, binary_only):
    """Every tree obtained by placing ``sub`` on an edge of ``tree`` or under an inner node."""
    out = []

    def walk(t, rebuild):
        out.append(rebuild(Tree(children=(t, sub))))
        if not t.is_leaf:
            if not binary_only:
                out.append(rebuild(Tree(children=t.children + (sub,))))
            for i, c in enumerate(t.children):
                walk(
                    c,
                    lambda x, i=i, t=t: rebuild(Tree(children=t.children[:i] + (x,) + t.children[i + 1 :])),
                )

    walk(tree, lambda x: x)
    return out


def nni_neighbors(tree):
    """Swap a child of an inner non-root node with a sibling of that node."""
    out = []

    def walk(t, rebuild):
        if t.is_leaf:
            return
        for i, c in enumerate(t.children):
            if c.is_leaf:
                continue
            for j, s in enumerate(t.children):
                if j == i:
                    continue
                for a, grand in enumerate(c.children):
                    new_c = Tree(children=c.children[:a] + (s,) + c.children[a + 1 :])
                    kids = list(t.children)
                    kids[i] = new_c
                    kids[j] = grand
                    out.append(rebuild(Tree(children=tuple(kids))))
        for i, c in enumerate(t.children):
            walk(c, lambda x, i=i, t=t: rebuild(Tree(children=t.children[:i] + (x,) + t.children[i + 1 :])))

    walk(tree, lambda x: x)
    return out


def spr_neighbors(tree, binary_only=False):
    """Prune any proper subtree and regraft it anywhere in the remainder."""
    out = []
    stack = [tree]
    subs = []
    while stack:
        t = stack.pop()
        for c in t.children:
            subs.append(c)
            stack.append(c)
    for sub in subs:
        rest = _remove_leafless(tree, sub)
        out.extend(_regrafts(rest, sub, binary_only))
    return out


def _admissible(tree, og, binary_only):
    if binary_only and any(len(n.children) != 2 for n in tree.inner_nodes()):
        return False
    if og is not None and not any(c.is_leaf and c.label == og for c in tree.children):
        return False
    return True


def local_search(taxa, objective_input, opts=None):
    """Greedy stepwise insertion followed by best-improvement NNI/SPR hill climbing.

    Not provably optimal. Budgets: ``opts.max_steps`` improvement steps and
    ``opts.anytime`` seconds; a budget of 0 returns the greedy start.
    """
    opts = opts or SolverOptions()
    taxa, og = _taxa_and_outgroup(taxa, opts)
    quartets = isinstance(objective_input, WeightedQuartetSet)
    problem = QuartetProblem(taxa, objective_input) if quartets else ProjectionProblem(taxa, objective_input)
    sign = 1 if quartets else -1
    rng = random.Random(opts.seed)
    t0 = time.perf_counter()
    deadline = None if opts.anytime is None else t0 + opts.anytime
    index = {t: i for i, t in enumerate(taxa)}

    def value(tree):
        return problem.value(_Arrays(tree, index))

    # greedy start
    pt = PartialTree(len(taxa), opts.binary_only, og)
    explored = 0
    while pt.count < len(taxa):
        best, best_moves = None, []
        for move in pt.moves():
            pt.apply(move)
            v = sign * problem.value(pt)
            pt.undo(move)
            explored += 1
            if best is None or v > best:
                best, best_moves = v, [move]
            elif v == best:
                best_moves.append(move)
        pt.apply(rng.choice(best_moves))
    current = pt.to_tree(taxa)
    current_val = sign * value(current)

    steps = 0
    og_name = taxa[og] if og is not None else None
    while opts.max_steps is None or steps < opts.max_steps:
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if opts.max_steps is None and deadline is None and steps >= 10_000:
            break
        seen = {tree_key(current)}
        best, best_trees = current_val, []
        timed_out = False
        for cand in itertools.chain(nni_neighbors(current), spr_neighbors(current, opts.binary_only)):
            if deadline is not None and time.perf_counter() >= deadline:
                timed_out = True
                break
            key = tree_key(cand)
            if key in seen or not _admissible(cand, og_name, opts.binary_only):
                continue
            seen.add(key)
            explored += 1
            v = sign * value(cand)
            if v > best:
                best, best_trees = v, [cand]
            elif v == best and best_trees:
                best_trees.append(cand)
        if not best_trees:
            break
        current = rng.choice(best_trees)
        current_val = best
        steps += 1
        if timed_out:
            break
    return OptimumResult(
        QUARTET_MAX if quartets else PROJECTION_MIN,
        sign * current_val,
        [representative(current)],
        explored,
        time.perf_counter() - t0,
        exact=False,
    )


# -- consensus and partitioning ------------------------------------------------------------


def majority_consensus(trees, threshold=0.5):
    """Tree of the clusters found in more than ``threshold`` of ``trees``.

    Clusters present in every input are always kept, so ``threshold=1`` gives the
    strict consensus.
    """
    trees = list(trees)
    if not trees:
        raise InputError("no trees")
    if not 0.5 <= threshold <= 1:
        raise InputError("threshold must lie in [0.5, 1]")
    taxa = trees[0].taxa
    if any(t.taxa != taxa for t in trees):
        raise InputError("consensus needs trees over one taxon set")
    counts = Counter()
    for t in trees:
        counts.update(cluster_set(t))
    m = len(trees)
    keep = [c for c, k in counts.items() if k > threshold * m or k == m]
    return tree_from_clusters(taxa, keep)


def _group_sets(partition):
    groups = {}
    items = list(partition.items())
    if items and all(isinstance(v, str) for _, v in items):
        for taxon, g in items:
            groups.setdefault(g, set()).add(taxon)
        return groups
    seen = {}
    for g, members in items:
        for t in members:
            if t in seen and seen[t] != g:
                raise InputError(f"taxon {t!r} in overlapping groups {seen[t]!r} and {g!r}")
            seen[t] = g
        groups[g] = set(members)
    return groups


def _strip_outgroup(tree, og):
    rest = [c for c in tree.children if not (c.is_leaf and c.label == og)]
    return rest[0] if len(rest) == 1 else Tree(children=tuple(rest))


def solve_partitioned(sources, partition, objective="projection", opts=None):
    """Solve each taxon group separately with the outgroup, then join the group optima.

    ``partition`` maps taxon -> group name (or group name -> taxa). Sources are projected
    to each group plus the outgroup; group optima hang from a fresh root beside the
    outgroup.
    """
    opts = opts or SolverOptions()
    og = opts.outgroup
    if og is None:
        raise InputError("partitioned solving needs an outgroup")
    groups = _group_sets(partition)
    if any(og in g for g in groups.values()):
        raise InputError("the outgroup cannot belong to a group")
    all_taxa = taxa_of_all(s.tree for s in sources)
    uncovered = all_taxa - {og} - set().union(*groups.values())
    if uncovered:
        raise InputError(f"taxa missing from the partition: {sorted_taxa(uncovered)}")
    parts = []
    for name in sorted(groups, key=taxon_key):
        members = groups[name]
        keep = members | {og}
        projected = [s.with_tree(project(s.tree, keep)) for s in sources if len(s.tree.taxa & keep) >= 2]
        seen = taxa_of_all(s.tree for s in projected)
        absent = members - seen
        if absent:
            raise InputError(f"group {name!r}: taxa absent from every source: {sorted_taxa(absent)}")
        if len(members) == 1:
            parts.append(Tree(label=next(iter(members))))
            continue
        if objective == "quartet":
            res = optimize_quartets(keep, build_quartet_input(projected), opts)
        else:
            res = optimize_projections(keep, build_projection_input(projected), opts)
        log.info("group %s: value %s, %d optima", name, res.best_value, len(res.optima))
        if len(groups) == 1:
            return res.optima[0]
        parts.append(_strip_outgroup(res.optima[0], og))
    return representative(Tree(children=(Tree(label=og), *parts)))

"""Exact-search effort against taxon count on random conflicting source sets.

Prints one row per (n, objective): median search nodes and seconds over the trials.

    python scripts/scaling.py --min-taxa 5 --max-taxa 9 --trials 5
"""

import argparse
import random
import statistics

from supertree.newick import SourceEntry, SourceKind, Tree
from supertree.objectives import build_projection_input, build_quartet_input
from supertree.solver import SolverOptions, optimize


def random_tree(taxa, rng):
    nodes = [Tree(label=t) for t in taxa]
    while len(nodes) > 1:
        a, b = sorted(rng.sample(range(len(nodes)), 2), reverse=True)
        x, y = nodes.pop(a), nodes.pop(b)
        nodes.append(Tree(children=(x, y)))
    return nodes[0]


def instance(n, n_sources, rng):
    ingroup = [f"t{i}" for i in range(n - 1)]
    out = []
    for _ in range(n_sources):
        sub = rng.sample(ingroup, rng.randint(3, len(ingroup)))
        tree = Tree(children=(Tree(label="outgroup"), random_tree(sub, rng)))
        out.append(SourceEntry(tree, rng.choice(list(SourceKind))))
    return ingroup + ["outgroup"], out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-taxa", type=int, default=5)
    ap.add_argument("--max-taxa", type=int, default=9)
    ap.add_argument("--sources", type=int, default=4)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--binary-only", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    opts = SolverOptions(outgroup="outgroup", binary_only=args.binary_only)
    print(f"{'n':>3} {'objective':<11} {'nodes':>10} {'seconds':>9}")
    for n in range(args.min_taxa, args.max_taxa + 1):
        runs = {"quartet": [], "projection": []}
        for _ in range(args.trials):
            taxa, sources = instance(n, args.sources, rng)
            for name, inp in (("quartet", build_quartet_input(sources)), ("projection", build_projection_input(sources))):
                res = optimize(taxa, inp, opts)
                runs[name].append((res.explored, res.elapsed))
        for name, rs in runs.items():
            nodes = statistics.median(r[0] for r in rs)
            secs = statistics.median(r[1] for r in rs)
            print(f"{n:>3} {name:<11} {nodes:>10.0f} {secs:>9.3f}")


if __name__ == "__main__":
    main()

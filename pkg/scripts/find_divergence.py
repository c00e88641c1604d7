"""Search random conflicting source sets for instances where the quartet-optimal and
projection-optimal supertrees differ. Prints the first hits as Newick source lists.

    python scripts/find_divergence.py --taxa 6 --sources 3 --hits 3 --seed 0
"""

import argparse
import random

from supertree.newick import SourceEntry, Tree, serialize_newick
from supertree.objectives import build_projection_input, build_quartet_input
from supertree.solver import SolverOptions, optimize_projections, optimize_quartets


def random_binary(taxa, rng):
    nodes = [Tree(label=t) for t in taxa]
    while len(nodes) > 1:
        a, b = sorted(rng.sample(range(len(nodes)), 2), reverse=True)
        x, y = nodes.pop(a), nodes.pop(b)
        nodes.append(Tree(children=(x, y)))
    return nodes[0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--taxa", type=int, default=6)
    ap.add_argument("--sources", type=int, default=3)
    ap.add_argument("--hits", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tries", type=int, default=2000)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    ingroup = [chr(ord("a") + i) for i in range(args.taxa - 1)]
    taxa = ingroup + ["outgroup"]
    opts = SolverOptions(outgroup="outgroup", all_optima=True)
    hits = 0
    for _ in range(args.tries):
        sources = []
        for _ in range(args.sources):
            sub = rng.sample(ingroup, rng.randint(3, len(ingroup)))
            tree = Tree(children=(Tree(label="outgroup"), random_binary(sub, rng)))
            sources.append(SourceEntry(tree, rng.choice(["molecular", "other"])))
        if set().union(*(s.tree.taxa for s in sources)) != set(taxa):
            continue
        rq = optimize_quartets(taxa, build_quartet_input(sources), opts)
        rp = optimize_projections(taxa, build_projection_input(sources), opts)
        if not set(rq.keys) & set(rp.keys):
            hits += 1
            print("sources:")
            for s in sources:
                print(f"  {s.kind.value}\t{serialize_newick(s.tree)}")
            print(f"quartet optima    {rq.keys}  value {rq.best_value}")
            print(f"projection optima {rp.keys}  penalty {rp.best_value}")
            if hits >= args.hits:
                break


if __name__ == "__main__":
    main()

"""Score the two Felidae genus trees against each other and solve their combination.

    python scripts/felidae_demo.py
"""

from pathlib import Path

from supertree.newick import SourceEntry, SourceKind, load_manifest, read_trees
from supertree.objectives import build_projection_input, build_quartet_input, projection_penalty, quartet_score
from supertree.pipeline import format_table, score_report
from supertree.solver import SolverOptions, majority_consensus, optimize

DATA = Path(__file__).resolve().parent.parent / "data" / "felidae"


def main():
    left = read_trees(DATA / "left.nwk")[0]
    right = read_trees(DATA / "right.nwk")[0]
    for name, cand, src in (("right vs left", right, left), ("left vs right", left, right)):
        one = [SourceEntry(src, SourceKind.OTHER)]
        print(
            f"{name}: quartets {quartet_score(cand, build_quartet_input(one))}"
            f"/{build_quartet_input(one).total_weight}, "
            f"projection penalty {projection_penalty(cand, build_projection_input(one))}"
        )

    sources = load_manifest(DATA / "manifest.tsv", "outgroup")
    taxa = set().union(*(s.tree.taxa for s in sources))
    opts = SolverOptions(outgroup="outgroup", all_optima=True)
    for label, inp in (("quartet", build_quartet_input(sources)), ("projection", build_projection_input(sources))):
        res = optimize(taxa, inp, opts)
        print(f"\n{label}: best {res.best_value}, {len(res.optima)} optima, {res.explored} nodes")
        for t in res.optima:
            print("  ", t)
        cons = majority_consensus(res.optima)
        print(format_table(score_report(cons, sources, optima_count=len(res.optima)).items(), "consensus " + str(cons)))


if __name__ == "__main__":
    main()

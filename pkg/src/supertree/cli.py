"""Command-line interface: ``supertree <command> ...``.

Exit codes: 0 success, 2 input error, 3 exact-search limit exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from supertree import aspgen
from supertree.errors import InputError, LimitExceeded
from supertree.newick import DEFAULT_OUTGROUP, load_manifest, read_trees, serialize_newick, write_manifest
from supertree.objectives import build_projection_input, build_quartet_input, projection_penalty
from supertree.pipeline import (
    abstract_sources,
    apply_scheme,
    find_rogue_taxa,
    format_kv,
    format_table,
    load_genus_map,
    load_partition,
    prune_sources,
    score_report,
    solver_taxa,
)
from supertree.solver import SolverOptions, majority_consensus, optimize, solve_partitioned

log = logging.getLogger("supertree")


def _outgroup(args):
    return None if args.no_outgroup else args.outgroup


def _sources(args):
    return apply_scheme(load_manifest(args.manifest, _outgroup(args)), getattr(args, "scheme", "weighted"))


def _emit_report(args, items, title):
    sys.stdout.write(format_table(items, title))
    if args.report:
        Path(args.report).write_text(format_kv(items), encoding="utf-8")


def cmd_solve(args):
    sources = _sources(args)
    og = _outgroup(args)
    opts = SolverOptions(
        outgroup=og,
        binary_only=args.binary_only,
        all_optima=args.all_optima,
        limit=args.limit,
        anytime=args.anytime,
        seed=args.seed,
    )
    taxa = solver_taxa(sources)
    if args.partition:
        tree = solve_partitioned(sources, load_partition(args.partition), args.objective, opts)
        optima, value, exact = [tree], None, True
        explored = elapsed = None
    else:
        inp = build_quartet_input(sources) if args.objective == "quartet" else build_projection_input(sources)
        res = optimize(taxa, inp, opts)
        optima, value, exact = res.optima, res.best_value, res.exact
        explored, elapsed = res.explored, res.elapsed
    text = "".join(serialize_newick(t) + "\n" for t in optima)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    rep = score_report(optima[0], sources, args.scheme, len(optima))
    items = [("objective", args.objective), ("taxa", str(len(taxa))), ("exact", str(exact).lower())]
    if value is None:
        value = (
            projection_penalty(optima[0], build_projection_input(sources))
            if args.objective == "projection"
            else rep.qs
        )
    items.append(("best_value", str(value)))
    items += rep.items()
    if explored is not None:
        items += [("explored", str(explored)), ("elapsed_s", f"{elapsed:.3f}")]
    _emit_report(args, items, "solve")
    return 0


def cmd_score(args):
    sources = _sources(args)
    trees = read_trees(args.tree)
    if not trees:
        raise InputError(f"no tree in {args.tree}")
    rep = score_report(trees[0], sources, args.scheme)
    items = rep.items()
    items.append(("projection_penalty", str(projection_penalty(trees[0], build_projection_input(sources)))))
    _emit_report(args, items, "score")
    return 0


def cmd_abstract(args):
    sources = load_manifest(args.manifest, _outgroup(args))
    genus_map = load_genus_map(args.genus_map)
    out = abstract_sources(sources, genus_map, _outgroup(args) or DEFAULT_OUTGROUP, args.min_genera)
    write_manifest(Path(args.out_dir) / "manifest.tsv", out, Path(args.out_dir))
    print(f"{len(out)} of {len(sources)} sources kept; written to {args.out_dir}")
    return 0


def cmd_rogues(args):
    sources = load_manifest(args.manifest, _outgroup(args))
    rogues = find_rogue_taxa(sources, _outgroup(args) or DEFAULT_OUTGROUP)
    for t in sorted(rogues, key=str.casefold):
        print(t)
    if args.prune:
        if not args.out_dir:
            raise InputError("--prune needs --out-dir")
        kept = prune_sources(sources, rogues, min_taxa=args.min_taxa)
        write_manifest(Path(args.out_dir) / "manifest.tsv", kept, Path(args.out_dir))
    return 0


def cmd_consensus(args):
    trees = []
    for path in args.trees:
        trees.extend(read_trees(path))
    print(serialize_newick(majority_consensus(trees, args.threshold)))
    return 0


def cmd_export_asp(args):
    sources = _sources(args)
    taxa = solver_taxa(sources)
    inp = build_quartet_input(sources) if args.objective == "quartet" else build_projection_input(sources)
    text = aspgen.build_bundle(taxa, inp, _outgroup(args)).text
    if args.output:
        aspgen.write_program(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="supertree", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        p.add_argument("manifest", help="TSV manifest: tree-file, kind, optional weight")
        p.add_argument("--outgroup", default=DEFAULT_OUTGROUP)
        p.add_argument("--no-outgroup", action="store_true", help="do not root at an outgroup")
        if scheme:
            p.add_argument("--scheme", choices=["weighted", "unweighted"], default="weighted")

    p = sub.add_parser("solve", help="compute an optimal supertree")
    common(p)
    p.add_argument("--objective", choices=["quartet", "projection"], default="projection")
    p.add_argument("--partition", help="TSV taxon<TAB>group; solve groups separately")
    p.add_argument("--all-optima", action="store_true")
    p.add_argument("--anytime", type=float, metavar="SECONDS", help="local search above the exact limit")
    p.add_argument("--binary-only", action="store_true")
    p.add_argument("--limit", type=int, default=12, help="largest taxon count solved exactly")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="write optimal trees here (Newick, one per line)")
    p.add_argument("--report", help="write key<TAB>value report here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("score", help="score a candidate tree against sources")
    p.add_argument("tree")
    common(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("abstract", help="abstract species-level sources to genera")
    common(p, scheme=False)
    p.add_argument("--genus-map", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--min-genera", type=int, default=4)
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("rogues", help="list taxa found in a single source")
    common(p, scheme=False)
    p.add_argument("--prune", action="store_true")
    p.add_argument("--out-dir")
    p.add_argument("--min-taxa", type=int, default=4)
    p.set_defaults(func=cmd_rogues)

    p = sub.add_parser("consensus", help="majority-rule consensus of trees")
    p.add_argument("trees", nargs="+")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("export-asp", help="write a logic program for an external grounder/solver")
    common(p)
    p.add_argument("--objective", choices=["quartet", "projection"], default="projection")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_asp)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

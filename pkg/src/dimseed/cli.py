"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import analysis
from .community import build_community_graph, detect_communities, pagerank
from .diffusion import estimate_spread, sample_worlds
from .experiment import ExperimentConfig, derive_seed, run_experiment, self_check, write_results
from .graph import Gender, GraphFormatError, InvariantViolation, load_graph, normalize_weights, write_graph
from .potential import DEFAULT_ALPHA, gci_table, gpi_all
from .seeding import SwapConfig, seed_agnostic, seed_celf, seed_diversity, swap_refine
from .synthgen import SbmSpec, generate_sbm

log = logging.getLogger("dimseed")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected 'lo,hi'")
    return vals


def _gender(text: str) -> Gender:
    try:
        return Gender.parse(text)
    except GraphFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _graph(args):
    nodes = args.nodes or (args.graph and Path(args.graph) / "nodes.csv")
    edges = args.edges or (args.graph and Path(args.graph) / "edges.csv")
    if not nodes or not edges:
        raise ValueError("give --graph DIR or both --nodes and --edges")
    return normalize_weights(load_graph(nodes, edges, type_filter=args.type_filter))


def _communities(args, g):
    return detect_communities(g, args.resolution, derive_seed(args.rng_seed, "community"))


def _out(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- subcommands -----------------------------------------------------------

def cmd_gen(args):
    spec = SbmSpec(sizes=args.sizes, ratios=args.ratios, ratio_gender=args.ratio_gender,
                   intra=args.intra, inter=args.inter, rng_seed=args.rng_seed)
    sample = generate_sbm(spec)
    out = _out(args)
    write_graph(sample.graph, out / "nodes.csv", out / "edges.csv", comment=f"sbm rng_seed={spec.rng_seed}")
    _write_csv(out / "truth.csv", ["node", "community"],
               [(int(v), int(c)) for v, c in zip(sample.graph.ids, sample.truth)])
    _write_json(out / "meta.json", sample.meta(spec))
    print(f"wrote {sample.graph.n_nodes} nodes, {sample.graph.n_edges} edges to {out}")


def cmd_communities(args):
    g = _graph(args)
    a = _communities(args, g)
    out = _out(args)
    _write_csv(out / "membership.csv", ["node", "community"],
               [(int(v), int(c)) for v, c in zip(g.ids, a.membership)])
    _write_csv(out / "communities.csv", ["community", "males", "females", "type"],
               [(c, int(a.males[c]), int(a.females[c]), a.community_type(c).value) for c in range(a.n_communities)])
    print(f"{a.n_communities} communities")


def cmd_analyze(args):
    g = _graph(args)
    a = _communities(args, g)
    out = _out(args)
    mix = analysis.interaction_mix(g, a)
    cols = [analysis.INTRA] + [t.value for t in analysis.TYPES]
    _write_csv(out / "interaction_mix.csv", ["type"] + cols,
               [[t.value] + [f"{row[c]:.6f}" for c in cols] for t, row in mix.items()])
    rows = []
    for pct in args.pct:
        for t, share in analysis.top_ranked_gender_share(g, a, pct).items():
            rows.append((t.value, f"{pct:g}", f"{share:.6f}"))
    _write_csv(out / "top_gender.csv", ["type", "pct", "female_share"], rows)
    scores = pagerank(build_community_graph(g, a), args.damping, args.tolerance)
    grouping = dict(enumerate(a.types()))
    ccdf = analysis.pagerank_ccdf(scores, grouping)
    _write_csv(out / "pagerank_ccdf.csv", ["type", "score", "ccdf"],
               [(t.value, f"{x:.10g}", f"{y:.6f}") for t, pts in ccdf.items() for x, y in pts])
    print(f"wrote analysis for {a.n_communities} communities to {out}")


def cmd_seed(args):
    g = _graph(args)
    ws = sample_worlds(g, args.worlds, derive_seed(args.rng_seed, "worlds"))
    if args.algo == "an":
        seeds = seed_agnostic(g, args.k)
    elif args.algo == "celf":
        seeds = seed_celf(ws, args.k)
    else:
        seeds = seed_diversity(g, ws, args.k, args.zeta, args.target_gender)
    est = estimate_spread(ws, seeds, args.target_gender)
    result = {"algo": args.algo, "k": args.k, "seeds": seeds, "ratio": est.ratio, "spread": est.spread,
              "rng_seed": args.rng_seed, "worlds": args.worlds}
    _write_json(_out(args) / "seeds.json", result)
    print(json.dumps(result))


def cmd_refine(args):
    g = _graph(args)
    cfg = SwapConfig(k=args.k, zeta=args.zeta, margin=args.margin, target_gender=args.target_gender, n=args.n,
                     i_max=args.imax, alpha=args.alpha, worlds=args.worlds, rng_seed=args.rng_seed,
                     a_threshold=args.a_threshold)
    ws = sample_worlds(g, cfg.worlds, derive_seed(args.rng_seed, "worlds"))
    a = _communities(args, g)
    S0 = seed_agnostic(g, cfg.k) if args.base == "an" else seed_celf(ws, cfg.k)
    res = swap_refine(g, a, ws, S0, cfg)
    result = {"base": args.base, "initial_seeds": S0, "config": cfg.to_json(), **res.to_json()}
    _write_json(_out(args) / "swap_result.json", result)
    print(json.dumps(result))


def cmd_simulate(args):
    g = _graph(args)
    ws = sample_worlds(g, args.worlds, args.rng_seed)
    est = estimate_spread(ws, _ints(args.seeds), args.target_gender)
    result = {**est.to_json(), "worlds": args.worlds, "rng_seed": args.rng_seed}
    _write_json(_out(args) / "estimate.json", result)
    print(json.dumps(result))


def cmd_gpi(args):
    g = _graph(args)
    a = _communities(args, g)
    tables = {gen: gci_table(g, a, gen, args.alpha) for gen in Gender}
    pots = {gen: gpi_all(g, tables[gen].value, gen) for gen in Gender}
    rows = []
    for i, v in enumerate(g.ids):
        row = [int(v), "F" if g.is_female[i] else "M", int(a.membership[i]),
               str(bool(tables[Gender.MALE].is_core[i])).lower()]
        row += [f"{tables[gen].value[i]:.10g}" for gen in Gender]
        row += [f"{pots[gen][i]:.10g}" for gen in Gender]
        rows.append(row)
    _write_csv(_out(args) / "gpi.csv", ["node", "gender", "community", "core", "gci_M", "gci_F", "gpi_M", "gpi_F"], rows)
    print(f"wrote GCI/GPI for {g.n_nodes} nodes")


def cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    if args.rng_seed_given:
        cfg.master_seed = args.rng_seed
    if args.type_filter is not None:
        cfg.type_filter = args.type_filter
    rows = run_experiment(cfg, base_dir=Path(args.config).parent)
    path = write_results(rows, cfg, args.output_dir)
    for r in rows:
        print(f"{r['algo']:>10} zeta={r['zeta']:<4g} ratio={r['ratio']:.3f} spread={r['spread']:.2f} "
              f"iters={r['iters']} converged={r['converged']}")
    print(f"wrote {path}")


def cmd_self_check(args):
    report = self_check(args.rng_seed, corrupt=args.inject_corruption)
    failed = False
    for name, ok, detail in report:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)
        failed |= not ok
    if failed:
        raise InvariantViolation("self-check failed")


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def add_globals(p, suppress):
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p.add_argument("--rng-seed", type=int, default=default(0), help="master random seed")
        p.add_argument("--output-dir", default=default("."), help="directory for output files")
        p.add_argument("--type-filter", default=default(None), help="keep only edges of this interaction type")
        p.add_argument("-v", "--verbose", action="store_true", default=default(False))

    parser = argparse.ArgumentParser(prog="dimseed", description=__doc__.splitlines()[0])
    add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_, graph=True):
        p = sub.add_parser(name, help=help_)
        add_globals(p, suppress=True)
        if graph:
            p.add_argument("--graph", help="directory holding nodes.csv and edges.csv")
            p.add_argument("--nodes", help="nodes CSV (id,gender)")
            p.add_argument("--edges", help="edges CSV (src,dst,count[,type])")
            p.add_argument("--resolution", type=float, default=1.0, help="modularity resolution")
        p.set_defaults(func=fn)
        return p

    p = command("gen", cmd_gen, "generate a gendered SBM graph", graph=False)
    d = SbmSpec()
    p.add_argument("--sizes", type=_ints, default=d.sizes)
    p.add_argument("--ratios", type=_floats, default=d.ratios, help="per-community share of --ratio-gender")
    p.add_argument("--ratio-gender", type=_gender, default=d.ratio_gender)
    p.add_argument("--intra", type=_pair, default=d.intra)
    p.add_argument("--inter", type=_pair, default=d.inter)

    command("communities", cmd_communities, "detect and classify communities")

    p = command("analyze", cmd_analyze, "interaction mix, top-user gender and PageRank CCDF reports")
    p.add_argument("--pct", type=_floats, default=(0.05, 0.10))
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tolerance", type=float, default=1e-10)

    def search_flags(p):
        p.add_argument("--k", type=int, default=10)
        p.add_argument("--zeta", type=float, default=0.5)
        p.add_argument("--target-gender", type=_gender, default=Gender.FEMALE)
        p.add_argument("--worlds", type=int, default=10_000)

    p = command("seed", cmd_seed, "base seed selection")
    p.add_argument("--algo", choices=("an", "celf", "dv"), default="celf")
    search_flags(p)

    p = command("refine", cmd_refine, "swap refinement of a base seed set")
    p.add_argument("--base", choices=("an", "celf"), default="celf")
    search_flags(p)
    p.add_argument("--margin", type=float, default=0.01)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--imax", type=int, default=20)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--a-threshold", type=float, default=0.5)

    p = command("simulate", cmd_simulate, "estimate IC spread of a seed set")
    p.add_argument("--seeds", required=True, help="comma-separated node ids")
    p.add_argument("--worlds", type=int, default=10_000)
    p.add_argument("--target-gender", type=_gender, default=Gender.FEMALE)

    p = command("gpi", cmd_gpi, "dump per-node GCI/GPI tables")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)

    p = command("experiment", cmd_experiment, "run an algorithm x zeta grid from a JSON config", graph=False)
    p.add_argument("--config", required=True)

    p = command("self-check", cmd_self_check, "run the brute-force oracle suites", graph=False)
    p.add_argument("--inject-corruption", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.rng_seed_given = any(a == "--rng-seed" or a.startswith("--rng-seed=") for a in argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

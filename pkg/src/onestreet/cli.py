"""Command-line entry point: ``onestreet <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence failure.
Every command that writes a file also writes ``<file>.manifest.json``
describing how it was produced.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    build_dataset,
    build_examples,
    export_examples_csv,
    export_records_csv,
    load_dataset,
    save_dataset,
    split,
)
from .deals import make_joint, p1_polar_deal, p2_polar_deal, uniform_deal
from .equilibrium import DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS, METHODS, solve
from .errors import ConvergenceFailure, InvalidDistribution, OneStreetError
from .game import DEFAULT_CONFIG, check_deal, format_strategy, load_config
from .learners import (
    DEFAULT_MIN_LEAF,
    EvalReport,
    depth_sweep,
    evaluate,
    knn_fit,
    load_model,
    save_model,
    tree_fit,
)
from .plots import line_chart
from .representations import ALL_REPS, Representation
from .rules import compliance_report, extract_rules, render_rules, rules_to_json

log = logging.getLogger("onestreet")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_vector(text):
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None


def _parse_depths(text):
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError(f"no depths in {text!r}")
    return out


def _cfg(args):
    return load_config(args.config) if getattr(args, "config", None) else DEFAULT_CONFIG


def write_manifest(out_path, args, cfg, inputs=(), outputs=(), started=None, extra=None):
    """Write ``<out_path>.manifest.json`` and return its path."""
    manifest = {
        "command": args.command,
        "argv": sys.argv[1:],
        "flags": {k: v for k, v in vars(args).items() if k != "func"},
        "config": cfg.to_dict(),
        "seed": getattr(args, "seed", None),
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "tool_version": __version__,
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "wall_clock_seconds": None if started is None else round(time.time() - started, 3),
    }
    if extra:
        manifest.update(extra)
    path = Path(f"{out_path}.manifest.json")
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return path


def _manifest_name(out):
    return Path(f"{out}.manifest.json").name


# ------------------------------------------------------------------ commands

PRESETS = {"uniform": uniform_deal, "p1-polar": p1_polar_deal, "p2-polar": p2_polar_deal}


def cmd_solve(args):
    started = time.time()
    cfg = _cfg(args)
    d = cfg.deck_size
    if args.deal_file:
        values = _parse_vector(Path(args.deal_file).read_text())
        if values.size != d * d:
            raise UsageError(f"deal file needs {d * d} values, found {values.size}")
        deal = check_deal(values.reshape(d, d), cfg)
    elif args.p1 is not None and args.p2 is not None:
        x1, x2 = _parse_vector(args.p1), _parse_vector(args.p2)
        if x1.size != d or x2.size != d:
            raise UsageError(f"--p1 and --p2 need {d} values each")
        if (x1 < 0).any() or (x2 < 0).any() or x1.sum() <= 0 or x2.sum() <= 0:
            raise InvalidDistribution("--p1 and --p2 must be non-negative weights with a positive sum")
        deal = make_joint(x1 / x1.sum(), x2 / x2.sum())
    elif args.preset:
        deal = PRESETS[args.preset](cfg)
    else:
        raise UsageError("give --deal-file, both --p1 and --p2, or --preset")
    res = solve(deal, cfg, args.epsilon, args.max_iterations, args.method)
    print(format_strategy(res.s1, cfg, reachable=deal.sum(axis=1) > 0))
    print(f"Value: {res.value:.6f}")
    print(f"NashConv: {res.nash_conv:.3e} (epsilon {args.epsilon:g}, {res.method}, {res.iterations} iterations)")
    if args.out:
        Path(args.out).write_text(json.dumps({
            "deal": deal.ravel().tolist(), "strategy": res.s1.ravel().tolist(),
            "p2_strategy": res.s2.ravel().tolist(), "value": res.value, "nash_conv": res.nash_conv,
            "iterations": res.iterations, "method": res.method, "run_manifest": _manifest_name(args.out),
        }, indent=1) + "\n")
        write_manifest(args.out, args, cfg, outputs=[args.out], started=started)


def cmd_gen(args):
    started = time.time()
    cfg = _cfg(args)
    ds = build_dataset(args.count, args.seed, args.epsilon, cfg, args.method, args.max_iterations, args.jobs)
    save_dataset(ds, args.out, {"run_manifest": _manifest_name(args.out)})
    outputs = [args.out]
    if args.csv:
        export_records_csv(ds.records, args.csv, cfg)
        outputs.append(args.csv)
    write_manifest(args.out, args, cfg, outputs=outputs, started=started,
                   extra={"discarded_degenerate": ds.manifest["discarded_degenerate"]})
    print(f"wrote {len(ds)} games to {args.out} "
          f"(max NashConv {max(r.nash_conv for r in ds.records):.2e})")


def _split_records(ds, args):
    return split(ds.records, args.train_frac, args.seed)


def cmd_train(args):
    started = time.time()
    ds = load_dataset(args.input)
    rep = Representation.parse(args.rep)
    train, _ = _split_records(ds, args)
    examples = build_examples(train, rep, ds.master_seed, ds.cfg)
    if args.model == "tree":
        model = tree_fit(examples, rep, args.depth, args.min_leaf, ds.cfg)
        detail = f"depth {model.depth}, {model.node_count} nodes"
    else:
        model = knn_fit(examples, rep, args.k, ds.cfg)
        detail = f"k={args.k}, {len(examples)} stored examples"
    save_model(model, args.out, {"dataset": str(args.input), "split_seed": args.seed,
                                 "train_frac": args.train_frac, "run_manifest": _manifest_name(args.out)})
    write_manifest(args.out, args, ds.cfg, inputs=[args.input], outputs=[args.out], started=started)
    print(f"trained {args.model} on {rep.describe()} ({detail}) -> {args.out}")


def cmd_eval(args):
    started = time.time()
    ds = load_dataset(args.input)
    model = load_model(args.model_file)
    train, test = _split_records(ds, args)
    report = EvalReport()
    tr = build_examples(train, model.rep, ds.master_seed, ds.cfg)
    te = build_examples(test, model.rep, ds.master_seed, ds.cfg)
    kind = getattr(model, "kind", "tree")
    param = model.max_depth if kind == "tree" else model.k
    nodes = model.node_count if kind == "tree" else None
    report.add(model.rep, kind, param, evaluate(model, tr), evaluate(model, te), nodes)
    report.write_csv(args.out)
    write_manifest(args.out, args, ds.cfg, inputs=[args.input, args.model_file], outputs=[args.out],
                   started=started)
    row = report.rows[0]
    print(f"{row['rep']} {kind}: train error {row['train_error']:.4f}, test error {row['test_error']:.4f}")


def _sweep_one(task):
    records, rep, master_seed, cfg, train_frac, seed, depths, min_leaf = task
    train, test = split(records, train_frac, seed)
    return depth_sweep(build_examples(train, rep, master_seed, cfg), build_examples(test, rep, master_seed, cfg),
                       rep, depths, min_leaf, cfg).rows


def cmd_sweep(args):
    started = time.time()
    ds = load_dataset(args.input)
    reps = [Representation.parse(r) for r in args.reps.split(",")] if args.reps else list(ALL_REPS)
    depths = _parse_depths(args.depths)
    tasks = [(ds.records, rep, ds.master_seed, ds.cfg, args.train_frac, args.seed, depths, args.min_leaf)
             for rep in reps]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(min(args.jobs, len(tasks))) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]
    report = EvalReport([row for rows in results for row in rows])

    out = Path(args.out)
    csv_path = out.with_suffix(".csv")
    series_path = out.with_name(out.stem + "_series.csv")
    depth_svg = out.with_name(out.stem + "_depth.svg")
    nodes_svg = out.with_name(out.stem + "_nodes.svg")
    report.write_csv(csv_path)
    with open(series_path, "w") as fh:
        fh.write("rep,error_kind,depth,node_count,log_node_count,error\n")
        for kind in ("train", "test"):
            for row in report.rows:
                fh.write(f"{row['rep']},{kind},{row['param']},{row['node_count']},"
                         f"{math.log(row['node_count'])!r},{row[kind + '_error']!r}\n")
    by_depth, by_nodes = {}, {}
    for rep in reps:
        rows = report.where(rep=rep.name)
        for kind in ("test", "train"):
            by_depth[f"{rep.name} ({kind})"] = ([r["param"] for r in rows], [r[kind + "_error"] for r in rows])
        by_nodes[rep.name] = ([math.log(r["node_count"]) for r in rows], [r["test_error"] for r in rows])
    depth_svg.write_text(line_chart(by_depth, "Tree depth vs error", "depth", "error"))
    nodes_svg.write_text(line_chart(by_nodes, "Tree size vs test error", "log(number of nodes)", "error"))
    outputs = [csv_path, series_path, depth_svg, nodes_svg]
    write_manifest(csv_path, args, ds.cfg, inputs=[args.input], outputs=outputs, started=started,
                   extra={"representations": [r.describe() for r in reps]})
    for rep in reps:
        print(rep.describe())
    print(f"wrote {len(report.rows)} rows to {csv_path}")


def cmd_rules(args):
    model = load_model(args.model_file)
    if getattr(model, "kind", None) != "tree":
        raise UsageError("rules can only be extracted from a tree model")
    rules = extract_rules(model)
    text = render_rules(rules, model.rep, model.cfg)
    if args.json:
        text = json.dumps(rules_to_json(rules, model.rep, model.cfg), indent=1)
    if args.out:
        started = time.time()
        Path(args.out).write_text(text + "\n")
        write_manifest(args.out, args, model.cfg, inputs=[args.model_file], outputs=[args.out], started=started)
    print(text)
    if not args.json:
        for i, r in enumerate(rules, 1):
            print(f"  rule {i}: support {r.support}, training error {r.error:.4f}")


def cmd_check(args):
    started = time.time()
    ds = load_dataset(args.probes)
    model = load_model(args.model_file) if args.model_file else None
    who = args.model_file or "stored equilibrium strategies"
    lines = ["rule,basis,compliance,probes"]
    for r in compliance_report(model, ds.records, ds.cfg):
        value = "" if r.compliance is None else repr(r.compliance)
        lines.append(f"{r.rule},{r.basis},{value},{r.probes}")
        shown = "no probes" if r.compliance is None else f"{r.compliance:.3f}"
        print(f"{who}: {r.rule} rule ({r.basis}): {shown} over {r.probes} probes")
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        inputs = [args.probes] + ([args.model_file] if args.model_file else [])
        write_manifest(args.out, args, ds.cfg, inputs=inputs, outputs=[args.out], started=started)


def cmd_export(args):
    started = time.time()
    ds = load_dataset(args.input)
    if args.rep:
        rep = Representation.parse(args.rep)
        export_examples_csv(build_examples(ds.records, rep, ds.master_seed, ds.cfg), args.out)
    else:
        export_records_csv(ds.records, args.out, ds.cfg)
    write_manifest(args.out, args, ds.cfg, inputs=[args.input], outputs=[args.out], started=started)


# -------------------------------------------------------------------- parser

def build_parser():
    p = _Parser(prog="onestreet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="key=value file overriding the game settings")

    def split_flags(sp):
        sp.add_argument("--train-frac", type=float, default=0.8, help="share of games used for training")
        sp.add_argument("--seed", type=int, default=0, help="split seed")

    s = sub.add_parser("solve", help="solve one game and print player 1's strategy")
    s.add_argument("--deal-file", help="file with deck*deck joint probabilities (row = P1 card)")
    s.add_argument("--p1", help="player 1 card probabilities, comma separated")
    s.add_argument("--p2", help="player 2 card probabilities, comma separated")
    s.add_argument("--preset", choices=sorted(PRESETS), help="a built-in test game")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    s.add_argument("--method", choices=METHODS, default="cfr+")
    s.add_argument("--out", help="also write the solution as JSON")
    common(s)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("gen", help="generate a database of solved random games")
    s.add_argument("--count", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    s.add_argument("--method", choices=METHODS, default="cfr+")
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--csv", help="also export the records as CSV")
    s.add_argument("--out", required=True)
    common(s)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("train", help="fit a k-NN or tree model on the training split")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--rep", required=True, help="r1..r10")
    s.add_argument("--model", choices=("knn", "tree"), default="tree")
    s.add_argument("--depth", type=int, default=8)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--min-leaf", type=int, default=DEFAULT_MIN_LEAF)
    split_flags(s)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="evaluate a model on the test split")
    s.add_argument("--model-file", required=True)
    s.add_argument("--in", dest="input", required=True)
    split_flags(s)
    s.add_argument("--out", required=True, help="report CSV")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="tree depth sweep: CSV and SVG curves")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--reps", default="", help="comma separated, default all ten")
    s.add_argument("--depths", default="3-20")
    s.add_argument("--min-leaf", type=int, default=DEFAULT_MIN_LEAF)
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    split_flags(s)
    s.add_argument("--out", required=True, help="output prefix")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("rules", help="print a tree as a readable rule list")
    s.add_argument("--model-file", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_rules)

    s = sub.add_parser("check", help="measure compliance with the 80-20 and all-in rules")
    s.add_argument("--probes", required=True, help="dataset of probe games")
    s.add_argument("--model-file", help="model to check (default: the stored equilibria)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("export", help="export records, or one representation's examples, as CSV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--rep", help="export examples of this representation instead of records")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"onestreet {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceFailure as exc:
        print(f"onestreet {args.command}: ConvergenceFailure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (OneStreetError, OSError, ValueError, KeyError) as exc:
        print(f"onestreet {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

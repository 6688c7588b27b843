"""Command-line entry point: ``cliquescale {generate,census,witness,bounds,experiment}``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bounds import BoundQuery, Formula, evaluate, figure_rows, sweep
from .errors import BudgetExceeded, CliqueScaleError
from .graph import build_graph, read_edge_list, write_edge_list
from .harness import Experiment, ExperimentSpec, emit_csv, run_experiment, run_localization
from .mce import enumerate_maximal_cliques
from .models import Family, ModelParams, WeightMode, WeightWindow, sample_edges, sample_graph, sample_window_points, sample_window_subgraph
from .witness import build_box_layout, build_circle_layout, superdense_witness, verify_box_comatching, verify_circle_comatching

FAMILY_CHOICES = {"gnp": "GNP", "superdense": "GNP_SUPERDENSE", "irg": "IRG", "girg": None}


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=sorted(FAMILY_CHOICES), default="gnp")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--temp", type=float, default=0.0)
    p.add_argument("--dim", type=int)
    p.add_argument("--geometry", choices=["torus", "square"], default="torus")
    p.add_argument("--weights", choices=["random", "det"], default="random")
    p.add_argument("--seed", type=int, default=0)


def _params(args, seed: int | None = None) -> ModelParams:
    fam = FAMILY_CHOICES[args.family]
    if fam is None:
        fam = "GIRG_TORUS" if args.geometry == "torus" else "GIRG_SQUARE"
    return ModelParams(
        Family(fam),
        args.n,
        p=args.p,
        c=args.c,
        tau=args.tau,
        mu=args.mu,
        T=args.temp,
        d=args.dim,
        weight_mode=WeightMode.DETERMINISTIC if args.weights == "det" else WeightMode.RANDOM,
        seed=args.seed if seed is None else seed,
    )


def _window(text: str) -> WeightWindow:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("window must look like LO:HI")
    return WeightWindow(float(lo), float(hi))


def cmd_generate(args) -> int:
    params = _params(args)
    if args.window is not None:
        g, pts = sample_window_subgraph(params, args.window)
    else:
        g, pts = sample_graph(params)
    if args.out is None:
        print(f"{g.n} {g.m}")
        for u, v in g.edges.tolist():
            print(u, v)
        return 0
    write_edge_list(g, args.out)
    if pts is not None:
        with open(f"{args.out}.weights", "w") as fh:
            for v in range(len(pts)):
                coords = "" if pts.positions is None else " " + " ".join(repr(float(x)) for x in pts.positions[v])
                fh.write(f"{v} {float(pts.weights[v])!r}{coords}\n")
    return 0


def cmd_census(args) -> int:
    g = read_edge_list(args.input)
    emit_fh = open(args.emit, "w") if args.emit else None
    sink = (lambda c: emit_fh.write(" ".join(map(str, c)) + "\n")) if emit_fh else None
    status = 0
    try:
        census = enumerate_maximal_cliques(
            g,
            sink,
            count_only=args.count_only and sink is None,
            budget_cliques=args.budget_cliques,
            budget_seconds=args.budget_seconds,
        )
    except BudgetExceeded as exc:
        census = exc.census
        print(f"# budget exhausted: partial counts ({exc})", file=sys.stderr)
        status = 3
    finally:
        if emit_fh:
            emit_fh.close()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "count"])
    if args.by_size:
        for k in sorted(census.by_size):
            w.writerow([k, census.by_size[k]])
    w.writerow(["total", census.total])
    return status


def cmd_witness(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["seed", "num_regions", "occupied", "verified", "witness_size"])
    for s in range(args.seeds):
        seed = args.seed + s
        if args.construction == "superdense":
            params = ModelParams(Family.GNP_SUPERDENSE, args.n, c=args.c, seed=seed)
            g, _ = sample_graph(params)
            rep = superdense_witness(g, args.c, args.M)
            w.writerow([seed, 0, 0, rep.verified, rep.witness_size])
            continue
        params = _params(args, seed)
        if args.construction == "torus-box":
            layout = build_box_layout(args.n, params.d, params.tau, params.mu, args.eps, args.s, params.T)
            verify = verify_box_comatching
        else:
            layout = build_circle_layout(args.n, params.tau, params.mu, args.eps, a=args.a, c=args.layout_c, T=params.T)
            verify = verify_circle_comatching
        pts = sample_window_points(params, layout.window)
        graph = None
        if params.T > 0:
            graph = build_graph(len(pts), sample_edges(pts, params))
        rep = verify(pts, layout, params, graph)
        w.writerow([seed, rep.num_regions, rep.occupied, rep.verified, rep.witness_size])
    return 0


def _kv(text: str) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, _, value = item.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value.strip()
    return out


def _range(text: str):
    name, _, spec = text.partition("=")
    lo, hi, step = (float(x) for x in spec.split(":"))
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return name.strip(), [round(lo + i * step, 12) for i in range(count)]


def cmd_bounds(args) -> int:
    params = _kv(args.params or "")
    if args.figure:
        _, values = _range(args.sweep or "tau=2.01:2.99:0.01")
        rows = figure_rows(args.figure, values, eps=params.get("eps", 0.0))
        out = open(args.csv, "w") if args.csv else sys.stdout
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        if args.csv:
            out.close()
        return 0
    if not args.formula:
        raise CliqueScaleError("bounds needs --formula or --figure")
    query = BoundQuery(Formula(args.formula), params)
    if args.sweep:
        name, values = _range(args.sweep)
        out = open(args.csv, "w") if args.csv else sys.stdout
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["param", "value"])
        for x, v in sweep(query, name, values):
            w.writerow([repr(x), repr(v)])
        if args.csv:
            out.close()
        return 0
    print(repr(evaluate(query)))
    return 0


def cmd_experiment(args) -> int:
    if args.spec:
        spec = ExperimentSpec.from_text(Path(args.spec).read_text())
    else:
        if not args.experiment:
            raise CliqueScaleError("experiment needs --spec or --experiment")
        kw = {"experiment": args.experiment}
        for key in ("n", "p", "c", "tau", "T", "families", "windows", "samples", "seed_base", "out", "k", "eps", "budget_seconds"):
            val = getattr(args, key)
            if val is not None:
                kw[key] = val
        spec = ExperimentSpec(**kw)
    out = args.out or spec.out
    if spec.experiment is Experiment.LOCALIZATION:
        rows, fit = run_localization(spec, jobs=args.jobs)
        print(json.dumps({"n": fit.n, "fraction": fit.fraction, "mean_count": fit.mean_count, "slope": fit.slope, "expected_slope": fit.expected_slope}))
    else:
        rows = run_experiment(spec, jobs=args.jobs)
    if out:
        emit_csv(rows, out, seed_base=spec.seed_base, experiment=spec.experiment.value)
    else:
        for r in rows:
            print(f"{r.family} n={r.n} param={r.param} T={r.T} window={r.window} n'={r.n_prime:.1f} mean={r.mean:.6g} se={r.stderr:.3g} status={r.status}")
    return 0


def _floats(text):
    return [float(x) for x in text.split(",") if x]


def _ints(text):
    return [int(float(x)) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cliquescale", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a graph and write it as an edge list")
    _add_model_flags(p)
    p.add_argument("--window", type=_window)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("census", help="count maximal cliques of an edge-list graph")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--by-size", action="store_true")
    p.add_argument("--emit")
    p.add_argument("--budget-cliques", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("witness", help="build and verify co-matching witnesses over seeds")
    p.add_argument("--construction", choices=["torus-box", "circle", "superdense"], required=True)
    _add_model_flags(p)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--M", type=int, default=3)
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--layout-c", type=float, default=0.02)
    p.add_argument("--seeds", type=int, default=1)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("bounds", help="evaluate closed-form bounds or sweep them")
    p.add_argument("--formula", choices=[f.value for f in Formula])
    p.add_argument("--params")
    p.add_argument("--sweep", help="NAME=LO:HI:STEP")
    p.add_argument("--figure", choices=["bounds", "localization"])
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run an experiment grid and write CSV")
    p.add_argument("--spec")
    p.add_argument("--experiment", choices=[e.value for e in Experiment])
    p.add_argument("--n", type=_ints)
    p.add_argument("--p", type=_floats)
    p.add_argument("--c", type=_floats)
    p.add_argument("--tau", type=_floats)
    p.add_argument("--T", type=_floats)
    p.add_argument("--families", type=lambda s: s.split(","))
    p.add_argument("--windows", type=lambda s: s.split(","))
    p.add_argument("--samples", type=int)
    p.add_argument("--seed-base", dest="seed_base", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliqueScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

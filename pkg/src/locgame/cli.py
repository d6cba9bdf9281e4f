"""Command line interface: ``locgame <subcommand> [options]``.

Exit codes: 0 success, 2 solver budget exceeded, 3 invalid configuration.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import asymptotics as asy
from .errors import BudgetExceeded, InvalidConfig, LocGameError
from .experiments import (
    EXPANSION_HEADER, SYMMDIFF_HEADER, ExperimentConfig, build_manifest, capture_tables,
    default_threads, diameter_check, dump_json, expansion_check, mc_capture, mc_survival,
    mix_seed, sample_connected_gnp, solve_small, symmdiff_check, write_results,
)
from .game import play
from .graph import (
    GnpParams, Graph, complete_graph, cycle_graph, format_edge_list, generate_gnp, path_graph,
    read_edge_list, star_graph,
)
from .solver import SolverBudget
from .strategies import COP_NAMES, ROBBER_NAMES, make_cop, make_robber

EXIT_BUDGET = 2
EXIT_CONFIG = 3

FAMILIES = {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph, "star": star_graph}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors: exit 3, keeping 2 for budget overruns."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_graph_params(ap: argparse.ArgumentParser, required: bool = True) -> None:
    ap.add_argument("--n", type=int, required=required)
    grp = ap.add_mutually_exclusive_group()
    grp.add_argument("--p", type=float)
    grp.add_argument("--d", type=float, help="expected average degree; p = d / n")


def _add_output(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--out", help="directory for manifest.json and CSV tables")
    ap.add_argument("--stamp", action="store_true", help="record wall-clock timestamps in the manifest")


def _add_budget(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--budget-n-max", type=int, default=12)
    ap.add_argument("--budget-k-max", type=int)
    ap.add_argument("--budget-max-states", type=int, default=250_000)
    ap.add_argument("--budget-max-probes", type=int, default=5_000)


def _budget(args) -> SolverBudget:
    try:
        return SolverBudget(args.budget_n_max, args.budget_k_max, args.budget_max_states, args.budget_max_probes)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None


def _edge_prob(args) -> float:
    if (args.p is None) == (args.d is None):
        raise InvalidConfig("give exactly one of --p and --d")
    return args.p if args.p is not None else args.d / args.n


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="locgame", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample G(n, p) and print it as an edge list")
    _add_graph_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connected", action="store_true", help="resample until connected")
    p.add_argument("--out", help="file to write (default stdout)")

    p = sub.add_parser("play", help="play one class-mode game and print its transcript")
    p.add_argument("--graph", help="edge-list file (otherwise sample G(n, p))")
    _add_graph_params(p, required=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cop", choices=COP_NAMES, default="random-cop")
    p.add_argument("--probes", help="fixed-cop sequence, e.g. '0,1;2,3'")
    p.add_argument("--robber", choices=ROBBER_NAMES, default="greedy-robber")
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="file for the transcript JSON (default stdout)")

    p = sub.add_parser("solve-small", help="exact localization number and metric dimension")
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--size", type=int, help="family size (number of leaves for star)")
    _add_graph_params(p, required=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-oracle", action="store_true")
    _add_budget(p)
    _add_output(p)

    for name, helptext in (("mc-capture", "random cop against a configurable robber"),
                           ("mc-survival", "random cop against the diametric robber")):
        p = sub.add_parser(name, help=helptext)
        _add_graph_params(p)
        grp = p.add_mutually_exclusive_group(required=True)
        grp.add_argument("--k", type=int)
        grp.add_argument("--k-rule", choices=sorted(asy.K_RULES))
        p.add_argument("--trials", type=int, default=10)
        rounds = p.add_mutually_exclusive_group()
        rounds.add_argument("--max-rounds", type=int)
        rounds.add_argument("--tf-multiplier", type=float, help="max rounds = ceil(multiplier * t_F)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int)
        p.add_argument("--i-override", type=int)
        p.add_argument("--A", type=float)
        p.add_argument("--B", type=float)
        if name == "mc-capture":
            p.add_argument("--robber", choices=ROBBER_NAMES, default="greedy-robber")
        _add_output(p)

    p = sub.add_parser("expansion-check", help="sphere sizes against d^j |V'|")
    _add_graph_params(p)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("symmdiff-check", help="|S(x,i) \\ S(y,i)| against n(1-e^-c)e^-c")
    _add_graph_params(p)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--pairs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("diameter-check", help="histogram of G(n, p) diameters")
    _add_graph_params(p)
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    _add_output(p)

    p = sub.add_parser("bounds", help="table of every bound formula")
    _add_graph_params(p)
    p.add_argument("--i-override", type=int)
    p.add_argument("--i-rule", choices=asy.I_RULES, default="sparse")
    p.add_argument("--case", choices=[c.value for c in asy.CaseTag])
    p.add_argument("--A", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_output(p)
    return ap


def _emit(args, config: dict[str, Any], summary: dict[str, Any], tables=None, seeds=(), started=None) -> None:
    tables = tables or {}
    if getattr(args, "out", None):
        manifest = build_manifest(config, summary, seeds, tables.keys(), args.stamp, started)
        write_results(args.out, manifest, tables)
    sys.stdout.write(dump_json(summary))


def _load_graph(args) -> Graph:
    if getattr(args, "graph", None):
        with open(args.graph) as fh:
            return read_edge_list(fh)
    if getattr(args, "family", None):
        if args.size is None:
            raise InvalidConfig("--family needs --size")
        return FAMILIES[args.family](args.size)
    if args.n is None:
        raise InvalidConfig("give --graph, --family or --n with --p/--d")
    g, _ = sample_connected_gnp(args.n, _edge_prob(args), args.seed)
    return g


def _probe_sequence(text: str | None) -> list[list[int]] | None:
    if text is None:
        return None
    try:
        return [[int(v) for v in chunk.split(",")] for chunk in text.split(";") if chunk.strip()]
    except ValueError:
        raise InvalidConfig(f"cannot parse probe sequence {text!r}") from None


def cmd_gen(args) -> None:
    p = _edge_prob(args)
    if args.connected:
        g, _ = sample_connected_gnp(args.n, p, args.seed)
    else:
        g = generate_gnp(GnpParams(args.n, p, args.seed))
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_play(args) -> None:
    g = _load_graph(args)
    cop = make_cop(args.cop, args.k, seed=mix_seed(args.seed, 0xC0), sequence=_probe_sequence(args.probes))
    robber = make_robber(args.robber, seed=mix_seed(args.seed, 0x6B))
    tr = play(g, args.k, cop, robber, args.max_rounds, seed=args.seed)
    text = tr.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve_small(args) -> None:
    budget = _budget(args)
    g = _load_graph(args)
    report = solve_small(g, budget, oracle=not args.no_oracle)
    config = {"graph": args.graph, "family": args.family, "size": args.size, "n": args.n,
              "p": args.p, "d": args.d, "seed": args.seed, "budget": dataclasses.asdict(budget)}
    _emit(args, config, report)


def _experiment_config(args, kind: str) -> ExperimentConfig:
    return ExperimentConfig(
        kind=kind, n=args.n, p=args.p, d=args.d, k=args.k, k_rule=args.k_rule, trials=args.trials,
        max_rounds=args.max_rounds, tf_multiplier=args.tf_multiplier, seed=args.seed, out=args.out,
        threads=args.threads or default_threads(), robber=getattr(args, "robber", "diametric-robber"),
        i_override=args.i_override, A=args.A, B=args.B,
    )


def cmd_mc(args, kind: str) -> None:
    started = time.time()
    cfg = _experiment_config(args, kind)
    stats = mc_capture(cfg) if kind == "mc-capture" else mc_survival(cfg)
    summary = stats.summary()
    if kind == "mc-survival":
        surviving = [r for r in stats.per_trial if not r.captured]
        summary["target_class_min"] = min((min(r.target_sizes) for r in surviving if r.target_sizes), default=None)
    _emit(args, cfg.echo(), summary, capture_tables(stats), [r.seed for r in stats.per_trial], started)


def cmd_expansion(args) -> None:
    started = time.time()
    p = _edge_prob(args)
    rows = expansion_check(args.n, p, args.i, args.samples, args.seed)
    within = {}
    for kind in ("vertex", "pair", "pair-diff"):
        errs = [abs(r[5]) for r in rows if r[0] == kind]
        if errs:
            within[kind] = {"count": len(errs), "within_15pct": sum(e <= 0.15 for e in errs) / len(errs),
                            "within_20pct": sum(e <= 0.20 for e in errs) / len(errs)}
    config = {"n": args.n, "p": p, "i": args.i, "samples": args.samples, "seed": args.seed}
    _emit(args, config, {"config": config, "fractions": within},
          {"expansion": (EXPANSION_HEADER, rows)}, started=started)


def cmd_symmdiff(args) -> None:
    started = time.time()
    p = _edge_prob(args)
    rows, summary = symmdiff_check(args.n, p, args.i, args.pairs, args.seed)
    config = {"n": args.n, "p": p, "i": args.i, "pairs": args.pairs, "seed": args.seed}
    _emit(args, config, summary, {"symmdiff": (SYMMDIFF_HEADER, rows)}, started=started)


def cmd_diameter(args) -> None:
    started = time.time()
    p = _edge_prob(args)
    hist, summary = diameter_check(args.n, p, args.trials, args.seed, args.threads or default_threads())
    config = {"n": args.n, "p": p, "trials": args.trials, "seed": args.seed}
    summary["histogram"] = hist
    _emit(args, config, summary, {"diameters": (["diameter", "count"], list(hist.items()))},
          [mix_seed(args.seed, t) for t in range(args.trials)], started)


def cmd_bounds(args) -> None:
    if (args.p is None) == (args.d is None):
        raise InvalidConfig("give exactly one of --p and --d")
    d = args.d if args.d is not None else args.p * args.n
    case = asy.CaseTag(args.case) if args.case else None
    r = asy.compute_regime(args.n, d, args.i_override, args.i_rule, case)
    rows = asy.bounds_table(r, args.A, args.B)
    regime = {"n": r.n, "d": r.d, "i": r.i, "c": r.c, "x": r.x, "omega": r.omega,
              "omega_prime": r.omega_prime, "case": r.case.value, "i_rule": r.i_rule}
    if args.out:
        table = [[row["quantity"], row["value"], row["flag"]] for row in rows]
        write_results(args.out, build_manifest({"A": args.A, "B": args.B, **regime}, {"regime": regime, "rows": rows},
                                               tables=["bounds"], stamp=args.stamp),
                      {"bounds": (["quantity", "value", "flag"], table)})
    if args.format == "json":
        sys.stdout.write(dump_json({"regime": regime, "rows": rows}))
        return
    for key, value in regime.items():
        sys.stdout.write(f"{key:>32}  {value}\n")
    for row in rows:
        value = "n/a" if row["value"] is None else f"{row['value']:.10g}"
        sys.stdout.write(f"{row['quantity']:>32}  {value:>18}  {row['flag']}\n")


COMMANDS = {
    "gen": cmd_gen,
    "play": cmd_play,
    "solve-small": cmd_solve_small,
    "mc-capture": lambda a: cmd_mc(a, "mc-capture"),
    "mc-survival": lambda a: cmd_mc(a, "mc-survival"),
    "expansion-check": cmd_expansion,
    "symmdiff-check": cmd_symmdiff,
    "diameter-check": cmd_diameter,
    "bounds": cmd_bounds,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help and usage errors
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidConfig, LocGameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())

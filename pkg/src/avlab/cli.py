"""Command-line entry point.

One binary, subcommand style. Human-readable output by default; --json
switches to machine-readable. Exit codes: 0 success, 1 domain or
validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, curves, dataio, tables
from .core import format_ballot
from .errors import ValidationError
from .fitting import (
    CohortSpec,
    Model,
    evaluate_cohort,
    fit_au,
    fit_aut,
    generate_synthetic_cohort,
)
from .service import ServiceConfig, predict_ballot, serve

MODEL_CHOICES = ("complete", "takex", "au", "aut", "optimal")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    common.add_argument("--out", type=Path, default=None, help="write output to this path")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"avlab {__version__}")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[common], help="predict a ballot for a scenario")
    p.add_argument("--scenario", required=True, help="bundled scenario id (A/B) or a JSON file path")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES)
    p.add_argument("--x", type=int, help="top-X size for takex")
    p.add_argument("--alpha", type=float, help="utility/attainability trade-off (au)")
    p.add_argument("--beta", type=float, help="attainability shape (au/aut)")
    p.add_argument("--tau", type=float, help="approval threshold (aut)")
    p.add_argument("--epsilon", type=float, default=None, help="zero-utility guard")
    p.add_argument("--k", type=int, default=None, help="override the scenario's winner count")
    p.add_argument("--missing", type=int, default=None, help="override the missing-ballot count")

    p = sub.add_parser("table2", parents=[common], help="predicted-ballot map over the (alpha, beta) grid")
    p.add_argument("--scenario", default="A")
    p.add_argument("--epsilon", type=float, default=None)

    sub.add_parser("table4", parents=[common], help="optimal ballot and expected utility per condition")

    p = sub.add_parser("curves", parents=[common], help="emit figure CSV (and PNG) files")
    p.add_argument("--figure", type=int, required=True, choices=(1, 2))
    p.add_argument("--no-png", action="store_true", help="skip rendering the PNG next to the CSV")

    p = sub.add_parser("fit", parents=[common], help="grid-fit au or aut parameters to a response CSV")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--model", required=True, choices=("au", "aut"))

    p = sub.add_parser("evaluate", parents=[common], help="leave-one-out accuracy report for all models")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--no-png", action="store_true", help="skip rendering the accuracy chart")

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic response cohort")
    p.add_argument("--voters", type=int, default=50)
    p.add_argument("--model", default="aut", choices=[m.value for m in Model])
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--betas", help="comma-separated beta values voters draw from")
    p.add_argument("--taus", help="comma-separated tau values voters draw from")
    p.add_argument("--alphas", help="comma-separated alpha values voters draw from")

    p = sub.add_parser("serve", parents=[common], help="run the experiment HTTP service")
    p.add_argument("--port", type=int, default=None, help="default AVLAB_PORT or 8000")
    p.add_argument("--data-dir", default=None, help="session event-log directory")
    p.add_argument("--config", default=None, help="JSON config file")

    return parser


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join(f"--{n}" for n in missing)
        raise UsageError(f"model {args.model!r} requires {flags}")


class UsageError(Exception):
    pass


def _emit(args, text: str, obj) -> None:
    payload = json.dumps(obj, indent=2) if args.json else text
    if args.out:
        dataio.atomic_write_text(args.out, payload + "\n")
    else:
        print(payload)


def cmd_predict(args) -> int:
    scenario = dataio.resolve_scenario(args.scenario)
    condition = scenario.condition(winners=args.k, missing=args.missing)
    if args.model == "takex":
        _require(args, ["x"])
    elif args.model == "au":
        _require(args, ["alpha", "beta"])
    elif args.model == "aut":
        _require(args, ["beta", "tau"])
    ballot, value = predict_ballot(
        condition,
        args.model,
        {"alpha": args.alpha, "beta": args.beta, "tau": args.tau, "x": args.x, "epsilon": args.epsilon},
    )
    text = format_ballot(ballot)
    if value is not None:
        text += f" {tables.round_half_away(value):.2f}"
    _emit(
        args,
        text,
        {
            "scenario": condition.id,
            "winners": condition.winners,
            "missing": condition.tally.missing_ballots,
            "model": args.model,
            "ballot": sorted(ballot),
            "value": value,
        },
    )
    return 0


def cmd_table2(args) -> int:
    scenario = dataio.resolve_scenario(args.scenario)
    report = tables.table2_report(scenario, epsilon=args.epsilon or 1e-6)
    _emit(args, tables.table2_text(report), report)
    return 0


def cmd_table4(args) -> int:
    cells = tables.table4_cells(dataio.builtin_scenarios())
    _emit(args, tables.table4_text(cells), [c.to_obj() for c in cells])
    return 0


def cmd_curves(args) -> int:
    out = args.out or Path(f"figure{args.figure}.csv")
    if args.figure == 1:
        rows = curves.figure1_rows()
        dataio.write_curve_csv(rows, curves.FIGURE1_HEADER, out)
        if not args.no_png:
            curves.render_figure1(rows, out.with_suffix(".png"))
    else:
        scenario = dataio.builtin_scenarios()["B"]
        rows = curves.figure2_rows(scenario)
        dataio.write_curve_csv(rows, curves.FIGURE2_HEADER, out)
        if not args.no_png:
            curves.render_figure2(rows, out.with_suffix(".png"))
    print(f"wrote {out}" + ("" if args.no_png else f" and {out.with_suffix('.png')}"))
    return 0


def cmd_fit(args) -> int:
    scenarios = dataio.builtin_scenarios()
    records = dataio.load_responses(args.data, scenarios)
    params = fit_au(records, scenarios) if args.model == "au" else fit_aut(records, scenarios)
    obj = {"model": args.model, "alpha": params.alpha, "beta": params.beta, "tau": params.tau, "epsilon": params.epsilon}
    text = (
        f"alpha={params.alpha:g} beta={params.beta:g}"
        + (f" tau={params.tau:g}" if args.model == "aut" else "")
    )
    _emit(args, text, obj)
    return 0


def cmd_evaluate(args) -> int:
    scenarios = dataio.builtin_scenarios()
    records = dataio.load_responses(args.data, scenarios)
    ks = tuple(sorted({r.winners for r in records}))
    report = evaluate_cohort(records, scenarios, winner_counts=ks or (1, 2, 3))
    if args.out:
        dataio.write_report(report, args.out)
        if not args.no_png:
            curves.render_accuracy_report(report, Path(args.out).with_suffix(".png"))
        print(f"wrote {args.out}")
    print(json.dumps(report.to_obj(), indent=2) if args.json else report.to_text())
    return 0


def _float_list(text: str | None) -> tuple[float, ...] | None:
    if not text:
        return None
    return tuple(float(part) for part in text.split(","))


def cmd_simulate(args) -> int:
    scenarios = dataio.builtin_scenarios()
    ranges = {}
    for key, raw in (("alpha", args.alphas), ("beta", args.betas), ("tau", args.taus)):
        vals = _float_list(raw)
        if vals:
            ranges[key] = vals
    spec = CohortSpec(
        voters=args.voters,
        model=Model(args.model),
        param_ranges=ranges or None,
        noise=args.noise,
        seed=args.seed,
    )
    records = generate_synthetic_cohort(spec, scenarios)
    out = args.out or Path("cohort.csv")
    dataio.write_responses(records, out)
    print(f"wrote {len(records)} records to {out}")
    return 0


def cmd_serve(args) -> int:
    port = args.port
    if port is None:
        port = int(os.environ.get("AVLAB_PORT", "8000"))
    config = ServiceConfig.load(
        config_path=args.config,
        port=port,
        seed=args.seed,
        data_dir=args.data_dir,
    )
    serve(config)
    return 0


_COMMANDS = {
    "predict": cmd_predict,
    "table2": cmd_table2,
    "table4": cmd_table4,
    "curves": cmd_curves,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.exit(2, f"usage error: {exc}\n")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Four subcommands: ``run`` executes a config file end to end, ``figure``
builds one of the named datasets from flags alone, ``check-equivalence``
prints the verdicts for a configured model pair, and ``blp`` evaluates the
backflow measure.  Exit codes: 0 on success, 2 for configuration or usage
errors, 3 for numerical failures, 4 for detected invariant violations.
"""

import argparse
import sys

from dephaselab import __version__, equivalence, workbench
from dephaselab.dephasing import QubitModelParams
from dephaselab.errors import (
    InvariantViolationError,
    NumericalError,
    UnsupportedModelError,
    UsageError,
    ValidationError,
)

_FIGURE_CHOICES = workbench.FIGURES


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dephaselab",
        description="Dephasing-model equivalence, information flow, and "
                    "correlation datasets.",
    )
    parser.add_argument("--version", action="version",
                        version=f"dephaselab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config file and write its CSV")
    p_run.add_argument("--config", required=True, help="path to a JSON config")
    p_run.add_argument("--out", help="output path (overrides the config)")

    p_fig = sub.add_parser("figure", help="build a named dataset from flags")
    p_fig.add_argument("name", choices=_FIGURE_CHOICES)
    p_fig.add_argument("--r", type=float, help="state-family parameter in [0, 1]")
    p_fig.add_argument("--c", type=float, help="population bias of the model pair")
    p_fig.add_argument("--d", type=float, help="transverse partner component")
    p_fig.add_argument("--g", type=float, help="coupling strength (default 1)")
    p_fig.add_argument("--t-max", type=float, dest="t_max", help="grid end time")
    p_fig.add_argument("--points", type=int, help="grid point count")
    p_fig.add_argument("--out", required=True, help="output CSV path")

    p_chk = sub.add_parser("check-equivalence",
                           help="print equivalence verdicts for a config's models")
    p_chk.add_argument("--config", required=True, help="path to a JSON config")

    p_blp = sub.add_parser("blp", help="evaluate the backflow measure for a config")
    p_blp.add_argument("--config", required=True, help="path to a JSON config")
    return parser


def _cmd_run(args) -> int:
    cfg = workbench.load_config(args.config)
    out = args.out if args.out is not None else cfg.out
    if out is None:
        raise ValidationError("no output path: set `out` in the config or pass --out")
    dataset = workbench.run_experiment(cfg)
    workbench.emit_csv(dataset, out)
    print(f"wrote {out} ({dataset.rows.shape[0]} rows)")
    return 0


def _cmd_figure(args) -> int:
    mapping = {"figure": args.name}
    for key in ("r", "c", "d", "g", "t_max", "n_points"):
        value = getattr(args, "points" if key == "n_points" else key)
        if value is not None:
            mapping[key] = value
    cfg = workbench.config_from_mapping(mapping)
    dataset = workbench.run_experiment(cfg)
    workbench.emit_csv(dataset, args.out)
    print(f"wrote {args.out} ({dataset.rows.shape[0]} rows)")
    return 0


def _qubit_params(cfg):
    if not isinstance(cfg.model_a, (QubitModelParams, type(None))):
        return None
    if not isinstance(cfg.model_b, (QubitModelParams, type(None))):
        return None
    pa = cfg.model_a or QubitModelParams((0.0, 0.0, cfg.c), (0.0, 0.0, 1.0), cfg.g)
    pb = cfg.model_b or equivalence.construct_partner(cfg.c, cfg.d, cfg.g)
    return pa, pb


def _verdict_line(verdict) -> str:
    word = "equivalent" if verdict.equivalent else "not equivalent"
    if verdict.borderline:
        word += " (borderline)"
    return f"{word}, max discrepancy {verdict.max_discrepancy:.3e}"


def _cmd_check_equivalence(args) -> int:
    cfg = workbench.load_config(args.config)
    ma, mb, _, _ = workbench._models(cfg)
    td = equivalence.time_domain_check(ma, mb, tol=cfg.tol, steps=cfg.steps)
    print(f"time-domain: {_verdict_line(td)}")
    try:
        mo = equivalence.moment_check(ma, mb, tol=cfg.tol)
        print(f"moments: {_verdict_line(mo)}")
    except UnsupportedModelError as exc:
        print(f"moments: not applicable ({exc})")
    params = _qubit_params(cfg)
    if params is not None:
        ip = equivalence.qubit_condition(*params, tol=cfg.tol)
        print(f"inner-product: {_verdict_line(ip)}")
    return 0


def _cmd_blp(args) -> int:
    cfg = workbench.load_config(args.config)
    if cfg.figure != "blp":
        raise ValidationError(f"config names figure {cfg.figure!r}; expected 'blp'")
    dataset = workbench.run_experiment(cfg)
    print(f"BLP measure: {dataset.metadata['blp_measure']}")
    print(f"best pair: {dataset.metadata['best_pair']}")
    if cfg.out is not None:
        workbench.emit_csv(dataset, cfg.out)
        print(f"wrote {cfg.out} ({dataset.rows.shape[0]} rows)")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "figure": _cmd_figure,
    "check-equivalence": _cmd_check_equivalence,
    "blp": _cmd_blp,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dephaselab: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"dephaselab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except InvariantViolationError as exc:
        print(f"dephaselab: invariant violation: {exc}", file=sys.stderr)
        return 4


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()

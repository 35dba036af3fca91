"""Command line front end.

    rswave run <scenario-file> [--out DIR] [--seed N]
               [--units natural|si] [--no-figures]
    rswave validate <scenario-file>
    rswave list-transforms

Exit status: 0 on success, 1 when a pipeline stage fails (the output
directory then holds a FAILED file naming the stage), 2 when the
scenario file cannot be read, parsed, or validated.
"""

from __future__ import annotations

import argparse
import sys

from . import runner, transforms
from .errors import ScenarioParseError, ScenarioValidationError
from .scenario import parse_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rswave",
        description="Synthesize, transform, and evolve free-field "
                    "wavefunctions from scenario files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario pipeline")
    p_run.add_argument("scenario", help="path to the scenario file")
    p_run.add_argument("--out", default=None, metavar="DIR",
                       help="output directory (overrides output.dir)")
    p_run.add_argument("--seed", type=int, default=None, metavar="N",
                       help="seed for random initial states "
                            "(overrides random.seed)")
    p_run.add_argument("--units", choices=("natural", "si"), default=None,
                       help="unit system (overrides units.system)")
    p_run.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")

    p_val = sub.add_parser("validate",
                           help="parse and check a scenario, run nothing")
    p_val.add_argument("scenario", help="path to the scenario file")

    sub.add_parser("list-transforms",
                   help="print the half-order transform kinds")
    return parser


def _load_scenario(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"scenario error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2) from None
    try:
        return parse_scenario(text)
    except ScenarioParseError as exc:
        print(f"scenario parse error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None
    except ScenarioValidationError as exc:
        print(f"scenario validation error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario)
    summary = runner.run(scenario, out_dir=args.out, seed=args.seed,
                         units_system=args.units,
                         figures=not args.no_figures)
    for stage in summary.stages:
        print(f"stage {stage.index} ({stage.kind}): {stage.status}")
    for line in summary.scalar_lines():
        print(line)
    if summary.failed_stage:
        print(f"failed at {summary.failed_stage}", file=sys.stderr)
    return summary.exit_code


def _cmd_validate(args) -> int:
    scenario = _load_scenario(args.scenario)
    print("ok")
    for key, value in scenario.echo:
        print(f"{key} = {value}")
    return 0


def _cmd_list_transforms(_args) -> int:
    rows = []
    for kind in transforms.KINDS:
        spec = transforms.TransformSpec(kind)
        mult = transforms.spectral_multiplier(spec, 1.0, "+")
        rows.append((kind, spec.direction,
                     f"{mult.real:+.6f}{mult.imag:+.6f}j"))
    width = max(len(r[0]) for r in rows)
    dwidth = max(len(r[1]) for r in rows)
    print(f"{'kind':<{width}}  {'direction':<{dwidth}}  "
          f"multiplier at omega = 1")
    for kind, direction, mult in rows:
        print(f"{kind:<{width}}  {direction:<{dwidth}}  {mult}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate,
               "list-transforms": _cmd_list_transforms}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

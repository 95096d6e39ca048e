"""Command line front-end: ``guidedproj <subcommand> ...``.

Subcommands: ``transform``, ``simulate``, ``evaluate``, ``benchmark`` and
``plot``. Exit status is 0 on success, 1 on usage or configuration errors
and 2 on data errors (unreadable or malformed input). Outputs are written
atomically; CSV outputs get a ``<output>.meta.json`` sidecar that records the
command flags, JSON outputs carry them under ``"command"`` and SVG outputs in
a leading comment.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import diffusion_map, pca_transform, random_projection
from .benchmark import INDICES, METHODS, SCALES, run_experiment
from .data import DataMatrix, csv_text, read_csv, write_atomic
from .diagnostics import PlotSpec, diagnostic_svg
from .errors import GuidedProjectionError, InvalidConfigError, InvalidDataError
from .projection import OSDKind
from .sequencer import GuidedSequence, SequencerConfig, build_sequence, transform
from .simulation import COVARIANCE_METHODS, Setup1Spec, Setup2Spec, gen_setup1, gen_setup2
from .validity import evaluate

logger = logging.getLogger("guidedproj")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="guidedproj", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--labels", default="label", metavar="NAME",
                        help="name of the label column (default 'label')")
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker cap (default: $GP_THREADS or all cores)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("transform", parents=[common], help="transform a CSV data set")
    p.add_argument("--input", required=True, help="input CSV")
    p.add_argument("--output", required=True, help="output scores CSV")
    p.add_argument("--method", choices=("gp", "pca", "rp", "diff"), default="gp")
    p.add_argument("--q", type=int, default=10, help="GP window size (default 10)")
    p.add_argument("--osd", choices=[k.value for k in OSDKind], default="od",
                   help="GP ordering criterion (default od)")
    p.add_argument("--k", type=_positive, help="components for pca, rp and diff")
    p.add_argument("--knn", type=_positive, help="neighbours for the diffusion kernel")
    p.add_argument("--plot", help="write the GP diagnostic plot to this SVG path")
    p.add_argument("--sequence", help="write the GP sequence as JSON to this path")
    p.add_argument("--from-sequence", help="reuse a saved GP sequence instead of building one")
    p.add_argument("--fit", help="CSV the saved sequence was built on (with --from-sequence)")

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic data set")
    p.add_argument("--setup", type=int, choices=(1, 2), required=True)
    p.add_argument("--r", type=int, required=True,
                   help="setup 1: informative block start (1..100); setup 2: noise columns")
    p.add_argument("--n", type=_positive, default=100, help="observations per group")
    p.add_argument("--covariance", choices=COVARIANCE_METHODS, default="eigen")
    p.add_argument("--output", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="cluster validity of a labelled CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="JSON report path (default: standard output)")
    p.add_argument("--max-clusters", type=_positive, default=50)

    p = sub.add_parser("benchmark", parents=[common], help="replicated grid-search experiment")
    p.add_argument("--setup", type=int, choices=(1, 2), required=True)
    p.add_argument("--r", type=int, nargs="+", required=True)
    p.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p.add_argument("--replicates", type=_positive, help="override the scale's replicate count")
    p.add_argument("--n", type=_positive, help="override the scale's observations per group")
    p.add_argument("--rp-repeats", type=_positive, help="override the scale's RP repeats")
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--indices", nargs="+", choices=INDICES, default=list(INDICES))
    p.add_argument("--resolution", type=_positive, default=10)
    p.add_argument("--max-clusters", type=_positive, default=50)
    p.add_argument("--covariance", choices=COVARIANCE_METHODS, default="eigen")
    p.add_argument("--output", required=True, help="per-replicate CSV")
    p.add_argument("--summary", help="JSON summary path")

    p = sub.add_parser("plot", parents=[common], help="render a GP matrix CSV as SVG")
    p.add_argument("--input", required=True, help="GP matrix CSV (gp_1, gp_2, ...)")
    p.add_argument("--output", required=True, help="SVG path")
    p.add_argument("--highlight", type=int, nargs="+", default=[],
                   help="0-based rows to draw last in a distinct colour")
    p.add_argument("--width", type=_positive, default=900)
    p.add_argument("--height", type=_positive, default=500)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--no-color", action="store_true", help="ignore labels when colouring")
    return parser


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "verbose"}


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("GP_THREADS")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise UsageError(f"GP_THREADS must be a positive integer, got {env!r}") from None
        if v < 1:
            raise UsageError(f"GP_THREADS must be a positive integer, got {env!r}")
        return v
    return os.cpu_count() or 1


def _svg_with_flags(svg: str, flags: dict) -> str:
    head, rest = svg.split("\n", 1)
    comment = json.dumps(flags, sort_keys=True).replace("--", "- -")
    return f"{head}\n<!-- command: {comment} -->\n{rest}"


def _write_csv(path: str, text: str, flags: dict) -> None:
    write_atomic(path, text)
    write_atomic(path + ".meta.json", json.dumps({"command": flags}, indent=2, sort_keys=True) + "\n")


def _read(path: str, label_column: str) -> DataMatrix:
    if not Path(path).is_file():
        raise InvalidDataError(f"input file not found: {path}")
    return read_csv(path, label_column)


def cmd_transform(args) -> None:
    data = _read(args.input, args.labels)
    flags = _flags(args)
    if args.method != "gp":
        for name in ("plot", "sequence", "from_sequence"):
            if getattr(args, name):
                raise UsageError(f"--{name.replace('_', '-')} only applies to --method gp")
    outputs = {}
    if args.method == "gp":
        if args.from_sequence:
            if not args.fit:
                raise UsageError("--from-sequence needs --fit")
            fit = _read(args.fit, args.labels)
            try:
                doc = json.loads(Path(args.from_sequence).read_text(encoding="utf-8"))
                seq = GuidedSequence.from_dict(doc)
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise InvalidDataError(f"cannot read sequence {args.from_sequence}: {exc}") from None
            gp = transform(seq, fit.values, data.values)
        else:
            cfg = SequencerConfig(q=args.q, osd_kind=OSDKind(args.osd), rng_seed=args.seed)
            seq, gp = build_sequence(data.values, cfg)
        scores, names = gp.values, gp.column_names()
        if args.sequence:
            outputs[args.sequence] = seq.to_json(command=flags)
        if args.plot:
            spec = PlotSpec(color_by=args.labels if data.labels is not None else None)
            outputs[args.plot] = _svg_with_flags(diagnostic_svg(gp, data.labels, spec), flags)
    else:
        if args.k is None:
            raise UsageError(f"--method {args.method} needs --k")
        if args.method == "pca":
            res = pca_transform(data.values, args.k)
        elif args.method == "rp":
            res = random_projection(data.values, args.k, args.seed)
        else:
            if args.knn is None:
                raise UsageError("--method diff needs --knn")
            res = diffusion_map(data.values, args.knn, args.k)
        scores = res.scores
        names = [f"{args.method}_{j + 1}" for j in range(scores.shape[1])]
    text = csv_text(scores, names, data.labels, args.labels)
    _write_csv(args.output, text, flags)
    for path, content in outputs.items():
        write_atomic(path, content)


def cmd_simulate(args) -> None:
    if args.setup == 1:
        data = gen_setup1(Setup1Spec(args.r, args.n, args.seed, args.covariance))
    else:
        data = gen_setup2(Setup2Spec(args.r, args.n, args.seed, args.covariance))
    _write_csv(args.output, csv_text(data.values, data.column_names, data.labels, args.labels),
               _flags(args))


def cmd_evaluate(args) -> None:
    data = _read(args.input, args.labels)
    if data.labels is None:
        raise InvalidDataError(f"{args.input}: label column {args.labels!r} not found")
    report = evaluate(data.values, data.labels, method="input", max_clusters=args.max_clusters)
    doc = report.to_dict()
    doc["command"] = _flags(args)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def cmd_benchmark(args) -> None:
    scale = SCALES[args.scale]
    result = run_experiment(
        args.setup,
        args.r,
        replicates=args.replicates or scale["replicates"],
        seed=args.seed,
        methods=args.methods,
        indices=args.indices,
        n_per_group=args.n or scale["n_per_group"],
        covariance=args.covariance,
        n_jobs=_threads(args),
        progress=True,
        rp_repeats=args.rp_repeats or scale["rp_repeats"],
        resolution=args.resolution,
        max_clusters=args.max_clusters,
    )
    flags = _flags(args)
    _write_csv(args.output, result.to_csv(), flags)
    if args.summary:
        write_atomic(args.summary, result.to_json(command=flags))


def cmd_plot(args) -> None:
    data = _read(args.input, args.labels)
    labels = None if args.no_color else data.labels
    spec = PlotSpec(width=args.width, height=args.height, line_alpha=args.alpha,
                    highlight=tuple(args.highlight),
                    color_by=args.labels if labels is not None else None)
    write_atomic(args.output, _svg_with_flags(diagnostic_svg(data.values, labels, spec), _flags(args)))


COMMANDS = {
    "transform": cmd_transform,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "benchmark": cmd_benchmark,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        COMMANDS[args.command](args)
    except (UsageError, InvalidConfigError) as exc:
        print(f"guidedproj {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GuidedProjectionError, OSError) as exc:
        print(f"guidedproj {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

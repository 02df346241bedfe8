"""Command line entry points: export the graphs, verify a model directory."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import ExportConfig, export, verify
from .network import LAYER_DIMS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alexnet-export",
        description="Export truncated AlexNet feature graphs and verify them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("export", help="write alexnet_fc*.onnx plus the sidecar")
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument("--layers", nargs="+", default=sorted(LAYER_DIMS),
                     choices=sorted(LAYER_DIMS))
    exp.add_argument("--weights", default="auto",
                     choices=("auto", "pretrained", "random"),
                     help="auto tries pretrained and falls back to random")
    exp.add_argument("--seed", type=int, default=0,
                     help="seed for the random weight fallback")

    ver = sub.add_parser("verify", help="re-read and check an exported directory")
    ver.add_argument("--dir", required=True, help="directory holding the exports")
    ver.add_argument("--layers", nargs="+", default=sorted(LAYER_DIMS),
                     choices=sorted(LAYER_DIMS))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "export":
            result = export(ExportConfig(
                output_dir=args.out, layers=tuple(args.layers),
                weights=args.weights, seed=args.seed,
            ))
            for layer, path in sorted(result.model_paths.items()):
                print(f"wrote {path}")
            print(f"wrote {result.sidecar_path} ({result.provenance})")
            return 0
        report = verify(args.dir, layers=tuple(args.layers))
        for check in report.checks:
            status = "ok" if check.ok else f"FAIL: {check.detail}"
            print(f"{check.file}: {status}")
        if report.composition_max_abs_diff is not None:
            print(f"composition max abs diff: {report.composition_max_abs_diff:.3e}")
        return 0 if report.ok else 1
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

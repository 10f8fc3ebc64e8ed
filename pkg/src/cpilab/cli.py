"""Command-line interface.

Subcommands: simulate, sweep, spectrogram, analyze, materials.
Exit codes: 0 success, 2 configuration error, 3 numeric-contract error.
Every failure prints a single line starting with ``error:`` to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, scanio, scenarios
from .errors import ConfigError, ContractError, CpiLabError
from .materials import get_material, registry_names


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpi-lab",
        description="Chirped-pulse interferometry axial-imaging simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--scenario", help="preset name (see README)")
        group.add_argument("--config", help="path to a scenario JSON file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--plot", action="store_true", help="also write SVG plots")
        p.add_argument("--lambda0-nm", type=float, default=None,
                       help="override the operating wavelength")

    p_sim = sub.add_parser("simulate", help="run axial-scan modes (cpi/wli/qoct/cw_swept)")
    scenario_args(p_sim)

    p_sweep = sub.add_parser("sweep", help="run an operating-wavelength sweep")
    scenario_args(p_sweep)

    p_spec = sub.add_parser("spectrogram", help="synthesise the SFG spectrogram")
    scenario_args(p_spec)

    p_an = sub.add_parser("analyze", help="extract features from a scan CSV")
    p_an.add_argument("scan", help="path to a scan CSV (version header required)")
    p_an.add_argument("--out", default=None, help="write the report JSON here instead of stdout")
    p_an.add_argument("--min-prominence", type=float, default=0.02)

    p_mat = sub.add_parser("materials", help="material registry operations")
    p_mat.add_argument("action", choices=["list"])
    return parser


def _load_config(args) -> scenarios.ScenarioConfig:
    if args.scenario:
        return scenarios.load_preset(args.scenario)
    return scenarios.load_config_file(args.config)


def _print_summary(summary: dict) -> None:
    print(f"scenario {summary['scenario']} (hash {summary['hash']}), "
          f"lambda0 = {summary['lambda0_nm']:.4f} nm")
    for tag, info in summary.get("scans", {}).items():
        feats = info["features"]
        print(f"  {tag}: {len(feats)} feature(s)")
        for f in feats:
            print(
                f"    {f['polarity']:>4} at {f['center_um']:.2f} um, "
                f"FWHM {f['fwhm_um']:.2f} um, visibility {f['visibility']:+.3f}"
            )
        if "dip_separation_um" in info:
            print(
                f"    separation {info['dip_separation_um']:.2f} um -> "
                f"thickness {info['thickness_um']:.2f} um"
            )
    if "sweep" in summary:
        sw = summary["sweep"]
        pred = sw["predicted_period_nm"]
        pred_txt = f", predicted {pred:.4f} nm" if pred else ""
        print(f"  sweep: fitted period {sw['fitted_period_nm']:.4f} nm{pred_txt} "
              f"({sw['n_scans']} scans)")
    for path in summary["outputs"]:
        print(f"  wrote {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("simulate", "sweep", "spectrogram"):
            wanted = {
                "simulate": ("cpi", "wli", "qoct", "cw_swept"),
                "sweep": ("sweep",),
                "spectrogram": ("spectrogram",),
            }[args.command]
            config = _load_config(args)
            summary = scenarios.run_scenario(
                config, args.out, plot=args.plot, lambda0_nm=args.lambda0_nm, modes=wanted
            )
            _print_summary(summary)
        elif args.command == "analyze":
            scan = scanio.read_scan(args.scan)
            feats = analysis.detect_features(scan, min_prominence=args.min_prominence)
            report = scanio.feature_report(scan.kind, scan.meta.get("omega0"), feats)
            if args.out:
                path = scanio.write_json(args.out, report)
                print(f"wrote {path}")
            else:
                import json

                print(json.dumps(report, indent=2, sort_keys=True))
        elif args.command == "materials":
            for name in registry_names():
                mat = get_material(name)
                lo, hi = mat.validity_um
                detail = f"n = {mat.n}" if mat.model == "constant" else f"{len(mat.terms)} Sellmeier terms"
                print(f"{name:14s} {mat.model:10s} {detail:22s} validity {lo:g}-{hi:g} um")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CpiLabError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

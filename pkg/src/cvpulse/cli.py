"""Command-line front end.

Subcommands: ``simulate`` (generate a pulse-record CSV), ``analyze`` (fit and
correct an existing CSV), ``reproduce-paper`` (run the built-in reference
scenario and check the published values), ``scan-theta`` (sweep the relative
phase and tabulate the noise-ellipse rotation).

Exit codes: 0 success, 1 a reproduction or consistency check failed,
2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analysis import (
    EntanglementReport,
    efficiency_inversion,
    end_to_end_report,
    fit_phase_scan,
    reconstruct_covariance,
)
from .entanglement import variance_to_db
from .scenario import (
    DEFAULT_SEED,
    Scenario,
    ScenarioError,
    load_scenario,
    reference_scenario,
)
from .simulate import (
    DEFAULT_CHUNK_SIZE,
    DetectorModel,
    RunConfig,
    read_metadata,
    read_records,
    sample_pulses,
    theta_scan,
    write_records,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_IO_ERROR = 3

_REFERENCE_PULSES = 1_000_000


@dataclass(frozen=True)
class CheckRow:
    """One line of the reproduction report: target value, simulation, verdict."""

    name: str
    target: float
    actual: float
    tolerance: float
    passed: bool


def run_reference_scans(
    pulses_per_scan: int = _REFERENCE_PULSES,
    seed: int = DEFAULT_SEED,
    detector: DetectorModel | None = None,
    block_size: int = 2500,
) -> EntanglementReport:
    """Run the built-in reference scenario through the three-scan protocol."""
    scenario = reference_scenario(n_pulses=pulses_per_scan, seed=seed)
    config = scenario.config
    if detector is not None:
        config = replace(config, detector=detector)
    return end_to_end_report(config, pulses_per_scan, block_size=block_size)


# (name, target, rounding floor, statistical half-width at 1e6 pulses/scan)
_REFERENCE_CHECKS = (
    ("squeezed variance (raw)", 0.70, 0.004, 0.006),
    ("antisqueezed variance (raw)", 1.96, 0.021, 0.012),
    ("single-beam variance (raw)", 1.17, 0.002, 0.008),
    ("squeezed variance (corrected)", 0.56, 0.002, 0.008),
    ("sum variance (Duan-Simon)", 1.12, 0.004, 0.016),
    ("entropy of formation [ebit]", 0.44, 0.006, 0.017),
    ("squeezed level [dB]", -1.55, 0.008, 0.040),
    ("antisqueezed level [dB]", 2.92, 0.048, 0.030),
    ("corrected squeezed level [dB]", -2.52, 0.006, 0.065),
)


def reference_check_rows(
    report: EntanglementReport, pulses_per_scan: int
) -> list[CheckRow]:
    """Compare a reproduction report against the published values.

    Tolerances combine the publication's rounding with a statistical
    half-width that scales as 1/sqrt(pulses per scan).
    """
    scale = math.sqrt(_REFERENCE_PULSES / pulses_per_scan)
    actuals = {
        "squeezed variance (raw)": report.raw_squeezed_variance,
        "antisqueezed variance (raw)": report.raw_antisqueezed_variance,
        "single-beam variance (raw)": report.raw_single_beam_variance,
        "squeezed variance (corrected)": report.corrected_squeezed_variance,
        "sum variance (Duan-Simon)": report.duan_simon,
        "entropy of formation [ebit]": report.entropy_of_formation,
        "squeezed level [dB]": variance_to_db(report.raw_squeezed_variance),
        "antisqueezed level [dB]": variance_to_db(report.raw_antisqueezed_variance),
        "corrected squeezed level [dB]": variance_to_db(
            report.corrected_squeezed_variance
        ),
    }
    rows = []
    for name, target, floor, stat in _REFERENCE_CHECKS:
        tolerance = floor + stat * scale
        actual = actuals[name]
        rows.append(
            CheckRow(
                name=name,
                target=target,
                actual=actual,
                tolerance=tolerance,
                passed=abs(actual - target) <= tolerance,
            )
        )
    return rows


def _emit_check_table(rows: list[CheckRow]) -> None:
    width = max(len(r.name) for r in rows)
    print(f"{'check':<{width}}  {'target':>8}  {'simulated':>10}  {'tol':>7}  status")
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{r.name:<{width}}  {r.target:8.2f}  {r.actual:10.4f}  "
            f"{r.tolerance:7.4f}  {status}"
        )


def _load_or_default_scenario(args, require_pulses: bool = False) -> Scenario:
    seed = getattr(args, "seed", None)
    pulses = getattr(args, "pulses", None)
    block = getattr(args, "block_size", None)
    if args.scenario is not None:
        return load_scenario(
            args.scenario,
            seed_override=seed,
            n_pulses_override=pulses,
            block_size_override=block,
        )
    scenario = reference_scenario(
        n_pulses=pulses if pulses is not None else 250_000,
        seed=seed if seed is not None else DEFAULT_SEED,
    )
    if block is not None:
        scenario = Scenario(
            config=scenario.config, block_size=block, out_stem=scenario.out_stem
        )
    return scenario


def cmd_simulate(args) -> int:
    scenario = _load_or_default_scenario(args)
    train = sample_pulses(scenario.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{scenario.out_stem}.csv"
    write_records(train, csv_path, config=scenario.config, chunk_size=DEFAULT_CHUNK_SIZE)
    summary = {
        "records": str(csv_path),
        "metadata": str(csv_path.with_suffix(".json")),
        "n_pulses": len(train),
        "seed": scenario.config.seed,
    }
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"wrote {summary['n_pulses']} pulses to {summary['records']}")
    return EXIT_OK


def _analysis_config(args, records_path: Path) -> tuple[RunConfig | None, int]:
    """Config for analyze: explicit scenario wins, then the CSV sidecar, then defaults."""
    if args.scenario is not None:
        scenario = load_scenario(args.scenario, block_size_override=args.block_size)
        return scenario.config, scenario.block_size
    sidecar = records_path.with_suffix(".json")
    block = args.block_size if args.block_size is not None else 2500
    if sidecar.exists():
        meta = read_metadata(records_path)
        return RunConfig.from_dict(meta["config"]), block
    return reference_scenario().config, block


def cmd_analyze(args) -> int:
    records_path = Path(args.records)
    config, block_size = _analysis_config(args, records_path)
    train = read_records(records_path)
    fit = fit_phase_scan(train, block_size)
    eta = config.detector.efficiency
    squeezed_corr = efficiency_inversion(fit.v_min, eta)
    antisqueezed_corr = efficiency_inversion(fit.v_max, eta)
    # single-file route: the diagonal variance comes from the two corrected
    # extremes, (antisqueezed + squeezed) / 2; a blocked-arm run is not needed
    v_corr = 0.5 * (antisqueezed_corr + squeezed_corr)
    _, report = reconstruct_covariance(v_corr, squeezed_corr, efficiency_used=eta)
    report = replace(
        report,
        raw_squeezed_variance=fit.v_min,
        raw_antisqueezed_variance=fit.v_max,
        squeezed_stderr=fit.stderr,
        duan_simon_stderr=2.0 * fit.stderr / eta,
        seed=config.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.text_table())
        print(f"report written to {report_path}")
    return EXIT_OK


def cmd_reproduce_paper(args) -> int:
    pulses = args.pulses if args.pulses is not None else _REFERENCE_PULSES
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    block = args.block_size if args.block_size is not None else 2500
    report = run_reference_scans(pulses_per_scan=pulses, seed=seed, block_size=block)
    rows = reference_check_rows(report, pulses)
    all_passed = all(r.passed for r in rows)
    if args.json:
        payload = {
            "checks": [
                {
                    "name": r.name,
                    "target": r.target,
                    "simulated": r.actual,
                    "tolerance": r.tolerance,
                    "passed": r.passed,
                }
                for r in rows
            ],
            "all_passed": all_passed,
            "report": report.to_dict(),
        }
        print(json.dumps(payload, indent=2))
    else:
        _emit_check_table(rows)
        print("all checks passed" if all_passed else "SOME CHECKS FAILED")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "reproduction.json").write_text(
            json.dumps(report.to_dict(), indent=2) + "\n"
        )
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def cmd_scan_theta(args) -> int:
    scenario = _load_or_default_scenario(args)
    thetas = np.linspace(0.0, 2.0 * math.pi, args.points, endpoint=False)
    thetas, v_min, v_max, phi_min = theta_scan(scenario.config, thetas)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "theta_scan.csv"
    table = np.column_stack([thetas, v_min, v_max, phi_min])
    np.savetxt(
        csv_path,
        table,
        fmt="%.10g",
        delimiter=",",
        header="theta_rad,v_min,v_max,phi_at_min_rad",
        comments="",
    )
    summary = {
        "points": int(len(thetas)),
        "v_min_spread": float(v_min.max() - v_min.min()),
        "v_max_spread": float(v_max.max() - v_max.min()),
        "csv": str(csv_path),
    }
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(
            f"{summary['points']} points -> {csv_path}; extreme variances are "
            f"theta-independent to {max(summary['v_min_spread'], summary['v_max_spread']):.2e}"
        )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvpulse",
        description="Simulate and analyze pulsed homodyne measurements of "
        "quadrature-entangled pulse pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pulses=True):
        p.add_argument("--scenario", type=str, default=None, help="JSON scenario file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (64-bit)")
        if pulses:
            p.add_argument("--pulses", type=int, default=None, help="pulses per run/scan")
        p.add_argument(
            "--block-size", type=int, default=None, help="pulses per variance block"
        )
        p.add_argument("--out", type=str, default=".", help="output directory")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p_sim = sub.add_parser("simulate", help="generate a pulse-record CSV")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="fit and correct an existing record CSV")
    p_an.add_argument("records", type=str, help="pulse-record CSV path")
    common(p_an, pulses=False)
    p_an.set_defaults(func=cmd_analyze)

    p_rep = sub.add_parser(
        "reproduce-paper", help="run the built-in reference scenario and check it"
    )
    common(p_rep)
    p_rep.set_defaults(func=cmd_reproduce_paper, out=None)

    p_theta = sub.add_parser("scan-theta", help="sweep the relative phase")
    common(p_theta, pulses=False)
    p_theta.add_argument("--points", type=int, default=16, help="grid points in [0, 2 pi)")
    p_theta.set_defaults(func=cmd_scan_theta)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT if exc.filename else EXIT_IO_ERROR
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    except RuntimeError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())

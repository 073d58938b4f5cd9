"""Command-line interface.

Subcommands:
    estimate  run one recording and write a per-window trace CSV
    evaluate  run every recording in a directory and print the accuracy report
    ablate    run all four modes over a directory and print the comparison table
    synth     generate a synthetic recording from a spec file

Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags or
unreadable paths).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import (
    parse_config_file,
    parse_overrides,
    pipeline_config,
    synth_spec,
)
from .errors import ParameterError
from .io import load_recording, write_recording
from .metrics import EvaluationReport, evaluate_traces
from .pipeline import MODES, EstimateTrace, PipelineConfig, run_recording
from .synth import synth_recording

TRACE_HEADER = "window,b_est,b_true,branch,ms"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, help="pipeline mode (default C4)")
    common.add_argument("--config", type=Path, help="flat key=value config file")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        dest="overrides",
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )

    p = argparse.ArgumentParser(prog="wristhr", description="Wrist-PPG heart-rate estimation")
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common], help="estimate one recording")
    est.add_argument("signal", type=Path, help="recording CSV")
    est.add_argument("--truth", type=Path, help="ground-truth BPM file")
    est.add_argument("--out", type=Path, help="write the per-window trace CSV here")

    ev = sub.add_parser("evaluate", parents=[common], help="evaluate a directory of recordings")
    ev.add_argument("data_dir", type=Path, help="directory of <subject>.csv + <subject>.bpm")
    ev.add_argument("--out", type=Path, help="write per-subject results CSV here")
    ev.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    ab = sub.add_parser("ablate", parents=[common], help="run all four modes on a directory")
    ab.add_argument("data_dir", type=Path)
    ab.add_argument("--out", type=Path, help="write the mode x subject AAE table here")
    ab.add_argument("--jobs", type=int, default=1)

    sy = sub.add_parser("synth", help="generate a synthetic recording")
    sy.add_argument("spec", type=Path, help="synth spec file (flat key=value)")
    sy.add_argument("--out", type=Path, required=True, help="output recording CSV")
    sy.add_argument("--truth-out", type=Path, help="ground-truth output (default: <out>.bpm)")

    return p


def _build_config(args) -> PipelineConfig:
    pairs = []
    if args.config is not None:
        if not args.config.is_file():
            raise FileNotFoundError(f"config file not found: {args.config}")
        pairs.extend(parse_config_file(args.config))
    pairs.extend(parse_overrides(args.overrides))
    if args.mode:
        pairs.append(("mode", args.mode))
    return pipeline_config(pairs)


def _write_trace(trace: EstimateTrace, path: Path) -> None:
    with path.open("w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for r in trace.rows:
            b_true = "" if r.b_true is None else f"{r.b_true:.6g}"
            fh.write(f"{r.window_index},{r.b_est:.6g},{b_true},{r.branch},{r.ms:.3f}\n")


def _discover_subjects(data_dir: Path) -> list[tuple[str, Path, Path]]:
    if not data_dir.is_dir():
        raise FileNotFoundError(f"data directory not found: {data_dir}")
    subjects = []
    for sig in sorted(data_dir.glob("*.csv")):
        truth = sig.with_suffix(".bpm")
        if not truth.is_file():
            raise ParameterError(f"no ground-truth file {truth.name} for {sig.name}")
        subjects.append((sig.stem, sig, truth))
    if not subjects:
        raise ParameterError(f"no recordings (*.csv) found in {data_dir}")
    return subjects


def _run_subject(job: tuple[str, Path, Path, PipelineConfig]) -> EstimateTrace:
    subject_id, sig, truth, cfg = job
    rec = load_recording(
        sig,
        truth,
        subject_id=subject_id,
        window_seconds=cfg.window_seconds,
        shift_seconds=cfg.shift_seconds,
    )
    return run_recording(rec, cfg)


def run_directory(
    data_dir: Path, cfg: PipelineConfig, jobs: int = 1
) -> list[EstimateTrace]:
    """Run every recording in a directory; results ordered by subject id."""
    subjects = _discover_subjects(data_dir)
    work = [(sid, sig, truth, cfg) for sid, sig, truth in subjects]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(_run_subject, work))
    else:
        traces = [_run_subject(job) for job in work]
    return traces


def _print_report(report: EvaluationReport, mode: str) -> None:
    print(f"Mode {mode}")
    print(f"{'subject':<16}{'AAE (BPM)':>10}{'median ms':>12}")
    for sid, value in report.per_subject_aae.items():
        print(f"{sid:<16}{value:>10.2f}{report.per_subject_median_ms[sid]:>12.1f}")
    ba = report.bland_altman
    print(f"{'average AAE':<16}{report.overall_aae:>10.2f}")
    print(f"{'pooled SD':<16}{report.overall_sd:>10.2f}")
    print(f"{'Pearson r':<16}{report.pearson_r:>10.4f}")
    print(f"LOA             [{ba.loa_low:.2f}, {ba.loa_high:.2f}]  (width {ba.loa_high - ba.loa_low:.2f})")


def _cmd_estimate(args) -> int:
    if not args.signal.is_file():
        raise FileNotFoundError(f"recording not found: {args.signal}")
    if args.truth is not None and not args.truth.is_file():
        raise FileNotFoundError(f"ground-truth file not found: {args.truth}")
    cfg = _build_config(args)
    rec = load_recording(
        args.signal,
        args.truth,
        window_seconds=cfg.window_seconds,
        shift_seconds=cfg.shift_seconds,
    )
    trace = run_recording(rec, cfg)
    if args.out is not None:
        _write_trace(trace, args.out)
    truths = trace.truths
    summary = f"{rec.subject_id}: {len(trace.rows)} windows, median {trace.median_ms:.1f} ms/window"
    if truths is not None:
        from .metrics import aae

        summary += f", AAE {aae(trace.estimates, truths):.2f} BPM"
    print(summary)
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _build_config(args)
    traces = run_directory(args.data_dir, cfg, args.jobs)
    report = evaluate_traces(traces)
    _print_report(report, cfg.mode)
    if args.out is not None:
        with args.out.open("w") as fh:
            fh.write("subject,aae,median_ms\n")
            for sid, value in report.per_subject_aae.items():
                fh.write(f"{sid},{value:.6g},{report.per_subject_median_ms[sid]:.3f}\n")
            fh.write(f"average,{report.overall_aae:.6g},\n")
    return 0


def _cmd_ablate(args) -> int:
    base = _build_config(args)
    reports: dict[str, EvaluationReport] = {}
    for mode in MODES:
        cfg = pipeline_config([("mode", mode)], base)
        reports[mode] = evaluate_traces(run_directory(args.data_dir, cfg, args.jobs))
    subjects = list(next(iter(reports.values())).per_subject_aae)
    width = max(8, *(len(s) + 2 for s in subjects))
    print(f"{'mode':<6}" + "".join(f"{s:>{width}}" for s in subjects) + f"{'average':>10}")
    for mode, rep in reports.items():
        cells = "".join(f"{rep.per_subject_aae[s]:>{width}.2f}" for s in subjects)
        print(f"{mode:<6}{cells}{rep.overall_aae:>10.2f}")
    if args.out is not None:
        with args.out.open("w") as fh:
            fh.write("mode," + ",".join(subjects) + ",average\n")
            for mode, rep in reports.items():
                row = ",".join(f"{rep.per_subject_aae[s]:.6g}" for s in subjects)
                fh.write(f"{mode},{row},{rep.overall_aae:.6g}\n")
    return 0


def _cmd_synth(args) -> int:
    if not args.spec.is_file():
        raise FileNotFoundError(f"synth spec not found: {args.spec}")
    spec = synth_spec(parse_config_file(args.spec))
    rec = synth_recording(spec)
    truth_out = args.truth_out or args.out.with_suffix(".bpm")
    write_recording(rec, args.out, truth_out)
    print(f"wrote {args.out} ({rec.n_samples} samples) and {truth_out} "
          f"({rec.ground_truth_bpm.size} windows)")
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "evaluate": _cmd_evaluate,
    "ablate": _cmd_ablate,
    "synth": _cmd_synth,
}


def cli_main(argv: list[str] | None = None) -> int:
    """Parse arguments and run; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, PermissionError, IsADirectoryError, NotADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary: report and set exit code
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

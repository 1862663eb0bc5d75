"""Command-line front end: extract, monitor, and synth subcommands.

Exit codes: 0 success, 2 input or configuration error, 3 pipeline
failure (a run that started but could not produce a result).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import pipeline, plots, report, synth
from .core import PipelineConfig
from .errors import ParameterError, PhantomSpecError, VeinPulseError
from .ingest import SequenceManifest, load_sequence, write_pgm

_PRESET_METHODS = {"paper-mc": pipeline.METHOD_MAX_CURVATURE,
                   "paper-rlt": pipeline.METHOD_LINE_TRACKING}

# CLI override flag -> PipelineConfig field.
_CONFIG_FLAGS = {
    "sigma": "curvature_sigma",
    "iterations": "rlt_iterations",
    "valley_radius": "rlt_valley_radius",
    "percentile": "binarize_percentile",
    "morph_radius": "morph_radius",
    "median_window": "median_window",
    "sg_window": "sg_window",
    "sg_order": "sg_order",
    "prominence": "peak_min_prominence",
    "separation": "peak_min_separation_s",
    "band_fraction": "central_band_fraction",
}
_CONFIG_TOGGLES = {
    "vertical_only": "vertical_profiles_only",
    "rlt_median_last": "rlt_median_last",
    "avg_columns": "average_columns",
    "peaks_on_sg": "peaks_on_sg",
}


def _coerce(text: str):
    lowered = text.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip()


def load_config_file(path: Path | str) -> dict:
    """Read a flat key=value config, or the config block of a run report."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return dict(data.get("config", data))
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = _coerce(value)
    return values


def _resolve_config(args) -> PipelineConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for flag, field_name in _CONFIG_FLAGS.items():
        flag_value = getattr(args, flag, None)
        if flag_value is not None:
            values[field_name] = flag_value
    for flag, field_name in _CONFIG_TOGGLES.items():
        if getattr(args, flag, False):
            values[field_name] = True
    if args.seed is not None:
        values["seed"] = args.seed
    values.pop("method", None)
    return PipelineConfig.from_dict(values)


def _resolve_method(args, config_path_values: dict | None = None) -> str:
    if args.preset:
        preset_method = _PRESET_METHODS[args.preset]
        if args.method and args.method != preset_method:
            raise ParameterError(
                f"--method {args.method} conflicts with --preset {args.preset}"
            )
        return preset_method
    if args.method:
        return args.method
    if config_path_values and "method" in config_path_values:
        return str(config_path_values["method"])
    return pipeline.METHOD_MAX_CURVATURE


def _add_pipeline_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--frames", required=True, help="directory of PGM/PNG frames")
    sub.add_argument("--fps", type=float, required=True, help="capture rate, frames per second")
    sub.add_argument("--pattern", default="*.pgm", help="frame filename glob (default *.pgm)")
    sub.add_argument("--method", choices=pipeline.METHODS, help="vein mapping method")
    sub.add_argument("--preset", choices=sorted(_PRESET_METHODS),
                     help="named method + post-processing bundle")
    sub.add_argument("--seed", type=int, help="seed for the line-tracking walks")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--config", help="key=value config file or a previous report.json")
    sub.add_argument("--sigma", type=float, help="curvature profile smoothing scale, px")
    sub.add_argument("--iterations", type=int, help="line-tracking walk count per frame")
    sub.add_argument("--valley-radius", dest="valley_radius", type=float,
                     help="cross-section flank distance, px")
    sub.add_argument("--percentile", type=float, help="binarization percentile of nonzero scores")
    sub.add_argument("--morph-radius", dest="morph_radius", type=int)
    sub.add_argument("--median-window", dest="median_window", type=int)
    sub.add_argument("--sg-window", dest="sg_window", type=int)
    sub.add_argument("--sg-order", dest="sg_order", type=int)
    sub.add_argument("--prominence", type=float, help="peak prominence floor (default 0.25 x IQR)")
    sub.add_argument("--separation", type=float, help="minimum peak separation, seconds")
    sub.add_argument("--band-fraction", dest="band_fraction", type=float)
    sub.add_argument("--vertical-only", dest="vertical_only", action="store_true",
                     help="restrict curvature profiles to the vertical direction")
    sub.add_argument("--rlt-median-last", dest="rlt_median_last", action="store_true",
                     help="run the median filter after erode/dilate instead of before")
    sub.add_argument("--avg-columns", dest="avg_columns", action="store_true",
                     help="average width over 5 columns around the reference column")
    sub.add_argument("--peaks-on-sg", dest="peaks_on_sg", action="store_true",
                     help="count peaks on the smoothed series instead of its derivative")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veinpulse",
        description="Finger-vein mapping and heart-rate monitoring from transillumination video.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    extract = subs.add_parser("extract", help="write per-frame binary vein maps")
    _add_pipeline_args(extract)

    monitor = subs.add_parser("monitor", help="track a vessel and report heart rate")
    _add_pipeline_args(monitor)

    synth_cmd = subs.add_parser("synth", help="generate a ground-truth phantom dataset")
    synth_cmd.add_argument("--spec", help="key=value phantom spec file (defaults when omitted)")
    synth_cmd.add_argument("--out", required=True, help="output directory")
    synth_cmd.add_argument("--seed", type=int, help="override the spec's seed")
    return parser


def cmd_extract(args) -> int:
    config_file_values = load_config_file(args.config) if args.config else {}
    config = _resolve_config(args)
    method = _resolve_method(args, config_file_values)
    out_dir = Path(args.out)
    raw_dir = out_dir / "raw"
    post_dir = out_dir / "post"
    raw_dir.mkdir(parents=True, exist_ok=True)
    post_dir.mkdir(parents=True, exist_ok=True)

    timings = {}
    t0 = time.perf_counter()
    seq = load_sequence(SequenceManifest(directory=args.frames, pattern=args.pattern, fps=args.fps))
    timings["ingest_ms"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    extractions = pipeline.extract_sequence(seq, config, method)
    timings["extraction_ms"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    for i, ex in enumerate(extractions):
        write_pgm(raw_dir / f"f{i:04d}.pgm", ex.raw_map.to_u8())
        write_pgm(post_dir / f"f{i:04d}.pgm", ex.post_map.to_u8())
    timings["write_ms"] = (time.perf_counter() - t0) * 1000

    run = report.RunReport(
        command="extract",
        method=method,
        config={**config.to_dict(), "fps": args.fps, "method": method},
        outputs={"raw_dir": str(raw_dir), "post_dir": str(post_dir)},
        timings_ms={k: round(v, 3) for k, v in timings.items()},
    )
    report_path = run.write(out_dir / "report.json")
    print(f"wrote {len(extractions)} vein maps to {out_dir} (report: {report_path})")
    return 0


def cmd_monitor(args) -> int:
    config_file_values = load_config_file(args.config) if args.config else {}
    config = _resolve_config(args)
    method = _resolve_method(args, config_file_values)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    timings = {}
    t0 = time.perf_counter()
    seq = load_sequence(SequenceManifest(directory=args.frames, pattern=args.pattern, fps=args.fps))
    timings["ingest_ms"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    extractions = pipeline.extract_sequence(seq, config, method)
    timings["extraction_ms"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    output = pipeline.monitor_sequence(seq, config, method, extractions)
    timings["analysis_ms"] = (time.perf_counter() - t0) * 1000

    t0 = time.perf_counter()
    outputs = {
        "width_csv": str(report.write_width_csv(out_dir / "width.csv", output.series)),
        "peaks_csv": str(report.write_peaks_csv(out_dir / "peaks.csv", output.result)),
        "derivative_svg": str(plots.derivative_trace_figure(
            output.stages["derivative"], output.result, out_dir / "derivative_trace.svg")),
        "stages_svg": str(plots.stages_figure(output.stages, out_dir / "stages.svg")),
    }
    for name, series in output.stages.items():
        outputs[f"stage_{name}_csv"] = str(
            report.write_stage_csv(out_dir / f"stage_{name}.csv", series))
    timings["write_ms"] = (time.perf_counter() - t0) * 1000

    run = report.RunReport(
        command="monitor",
        method=method,
        config={**config.to_dict(), "fps": args.fps, "method": method},
        outputs=outputs,
        timings_ms={k: round(v, 3) for k, v in timings.items()},
        heart_rate=report.heart_rate_summary(output.result),
        warnings=list(output.warnings),
    )
    run.write(out_dir / "report.json")

    for message in output.warnings:
        print(f"warning: {message}", file=sys.stderr)
    print(report.summary_line(output.result))
    return 0


def _parse_vessel(text: str) -> synth.VesselSpec:
    parts = [p for p in text.replace(",", ":").split(":") if p != ""]
    if not 2 <= len(parts) <= 5:
        raise PhantomSpecError(
            "vessel: expected center_row:base_width[:amplitude[:orientation[:anchor_col]]]"
        )
    numbers = [float(p) for p in parts]
    return synth.VesselSpec(
        center_row=numbers[0],
        base_width=numbers[1],
        modulation_amplitude=numbers[2] if len(numbers) > 2 else 0.0,
        orientation_deg=numbers[3] if len(numbers) > 3 else 0.0,
        anchor_col=numbers[4] if len(numbers) > 4 else None,
    )


def load_phantom_spec(path: Path | str | None, seed_override: int | None = None) -> synth.PhantomSpec:
    """Build a PhantomSpec from a flat key=value file (all keys optional).

    The key `vessel` may repeat, one center_row:base_width[:amplitude
    [:orientation[:anchor_col]]] entry per line; omitting it keeps the
    default single modulated vessel.
    """
    values: dict = {}
    vessels: list[synth.VesselSpec] = []
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PhantomSpecError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key == "vessel":
                vessels.append(_parse_vessel(value))
            else:
                values[key] = _coerce(value)
    if vessels:
        values["vessels"] = tuple(vessels)
    if seed_override is not None:
        values["seed"] = seed_override
    known = set(synth.PhantomSpec.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise PhantomSpecError(f"{sorted(unknown)[0]}: unknown phantom spec key")
    for int_key in ("width", "height", "band_top", "band_bottom", "seed"):
        if int_key in values:
            values[int_key] = int(values[int_key])
    return synth.PhantomSpec(**values)


def cmd_synth(args) -> int:
    spec = load_phantom_spec(args.spec, args.seed)
    frames_dir, truth = synth.write_phantom(spec, args.out)
    print(
        f"wrote {spec.n_frames} frames ({spec.width}x{spec.height}, {spec.fps:g} fps, "
        f"{spec.pulse_bpm:g} bpm) to {frames_dir}"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"extract": cmd_extract, "monitor": cmd_monitor, "synth": cmd_synth}
    try:
        return handlers[args.command](args)
    except VeinPulseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

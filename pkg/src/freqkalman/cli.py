"""Command-line interface.

Exit codes: 0 ok, 2 usage/flag validation, 3 I/O or file format,
4 numerical failure (non-finite output), 5 shape mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import AXES, MotionError, RefinementConfig, ShapeMismatch
from .experiments import DEFAULT_GAMMAS, compare_methods, sweep_snr
from .io import (CHANNEL_COLUMNS, MotionFileError, channel_rows, dumps, format_table,
                 list_motion_files, read_motion, read_parts_map, rows_to_csv, svg_line_chart,
                 write_motion, write_text)
from .kalman import refine_motion, steady_state_error, steady_state_gain
from .metrics import ade, apd, fde, jerk_profile, jitter_reduction, mmade, mmfde, multimodal_gt
from .spectral import dct, high_freq_ratio
from .synth import SynthSpec, generate

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_SHAPE = 0, 2, 3, 4, 5

PRNG_NOTE = "SplitMix64 streams per channel; normals by Box-Muller (see freqkalman.synth)"


class UsageError(Exception):
    pass


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _sibling(path, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _write(path, text):
    try:
        write_text(path, text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def _read_motion(path):
    try:
        return read_motion(path)
    except (OSError, MotionFileError) as e:
        raise OSError(f"cannot read motion file {path}: {e}") from e


# -- config ------------------------------------------------------------------

_CONFIG_FLAGS = {"k0": "k0", "q0": "q0", "r0": "r0", "lambda_q": "lambda_q",
                 "lambda_r": "lambda_r", "epsilon": "epsilon", "gamma": "gamma"}


def _add_config_flags(p: argparse.ArgumentParser, with_mode: bool = True):
    p.add_argument("--config", help="JSON config file, or a run report whose config echo to replay")
    if with_mode:
        p.add_argument("--mode", choices=["adaptive", "fixed-kalman", "fixed-suppress"])
    p.add_argument("--k0", type=int)
    p.add_argument("--q0", type=float)
    p.add_argument("--r0", type=float)
    p.add_argument("--lambda-q", dest="lambda_q", type=float)
    p.add_argument("--lambda-r", dest="lambda_r", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--exclude-dc", action="store_true", default=None,
                   help="leave the DC coefficient out of the energy ratio")


def _config_from_args(args) -> RefinementConfig:
    base = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise OSError(f"cannot read config {args.config}: {e}") from e
        base = dict(doc.get("config", doc))
    for attr, key in _CONFIG_FLAGS.items():
        v = getattr(args, attr, None)
        if v is not None:
            base[key] = v
    mode = getattr(args, "mode", None)
    if mode is not None:
        base["mode"] = mode.replace("-", "_")
    if getattr(args, "exclude_dc", None):
        base["include_dc"] = False
    try:
        return RefinementConfig(**base)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid configuration: {e}") from e


# -- synth -------------------------------------------------------------------

def cmd_synth(args) -> int:
    if args.noise_ratio is not None and args.sigma is not None:
        raise UsageError("--noise-ratio and --sigma are mutually exclusive")
    noise = "high_band" if args.noise_ratio is not None else ("white" if args.sigma is not None else "none")
    try:
        spec = SynthSpec(frames=args.frames, joints=args.joints, fps=args.fps, kind=args.kind,
                         seed=args.seed, noise=noise, k0=args.k0,
                         target_ratio=args.noise_ratio if args.noise_ratio is not None else 0.5,
                         sigma=args.sigma or 0.0, max_freq=args.max_freq)
    except ValueError as e:
        raise UsageError(str(e)) from e
    if noise == "high_band" and not 0 <= args.k0 < args.frames:
        raise UsageError("--k0 must be below --frames")
    clean, noisy = generate(spec)
    out = Path(args.out)
    ext = out.suffix or ".json"
    write_motion_checked(out, clean)
    files = {"clean": out.name}
    measured = clean
    if noisy is not None:
        noisy_path = out.with_name(out.stem + ".noisy" + ext)
        write_motion_checked(noisy_path, noisy)
        files["noisy"] = noisy_path.name
        measured = noisy
    rho = [high_freq_ratio(dct(measured.data[:, j, d]), args.k0 if args.k0 <= args.frames else args.frames)
           for j in range(measured.joints) for d in range(3)]
    sidecar = {
        "format_version": 1,
        "tool": f"freqkalman {__version__} synth",
        "spec": {k: getattr(spec, k) for k in spec.__dataclass_fields__},
        "prng": PRNG_NOTE,
        "files": files,
        "rho_measured_on": "noisy" if noisy is not None else "clean",
        "channels": [{"joint_index": j, "axis": AXES[d], "rho": rho[3 * j + d]}
                     for j in range(measured.joints) for d in range(3)],
    }
    _write(_sibling(out, ".sidecar.json"), dumps(sidecar))
    return EXIT_OK


def write_motion_checked(path, motion):
    try:
        write_motion(path, motion)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


# -- refine ------------------------------------------------------------------

def cmd_refine(args) -> int:
    config = _config_from_args(args)
    motion = _read_motion(args.input)
    if config.k0 > motion.frames:
        raise UsageError(f"--k0 {config.k0} exceeds the {motion.frames} input frames")
    t0 = time.perf_counter()
    refined, reports = refine_motion(motion, config, workers=args.workers)
    elapsed = time.perf_counter() - t0
    write_motion_checked(args.output, refined)
    if args.report:
        report = {
            "format_version": 1,
            "tool": f"freqkalman {__version__} refine",
            "config": config.to_dict(),
            "input": {"path": Path(args.input).name, "sha256": _sha256(args.input),
                      "frames": motion.frames, "joints": motion.joints, "fps": motion.fps},
            "channels": [r.to_dict() for r in reports],
            "metrics": {
                "mean_rho": float(np.mean([r.rho for r in reports])),
                "mean_jerk_input": float(jerk_profile(motion).mean()) if motion.frames >= 4 else None,
                "mean_jerk_output": float(jerk_profile(refined).mean()) if motion.frames >= 4 else None,
            },
        }
        if args.timing:
            report["timing"] = {"refine_seconds": elapsed}
        _write(args.report, dumps(report))
        _write(_sibling(args.report, ".channels.csv"), rows_to_csv(CHANNEL_COLUMNS, channel_rows(reports)))
    if args.plot:
        j = args.plot_joint
        if not 0 <= j < motion.joints:
            raise UsageError(f"--plot-joint {j} out of range")
        t = np.arange(motion.frames)
        series = []
        for d, axis in enumerate(AXES):
            series.append({"label": f"{axis} input", "x": t, "y": motion.data[:, j, d],
                           "color": "#d62728"})
            series.append({"label": f"{axis} refined", "x": t, "y": refined.data[:, j, d],
                           "color": "#1f77b4"})
        _write(args.plot, svg_line_chart(series, title=f"joint {j} trajectory", xlabel="frame",
                                         ylabel="position"))
    return EXIT_OK


# -- evaluate ----------------------------------------------------------------

METRIC_NAMES = ("ade", "fde", "apd", "mmade", "mmfde")


def cmd_evaluate(args) -> int:
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = [m for m in wanted if m not in METRIC_NAMES]
    if bad:
        raise UsageError(f"unknown metrics {bad}; choose from {METRIC_NAMES}")
    try:
        pred_files = list_motion_files(args.pred_dir)
    except OSError as e:
        raise OSError(f"cannot list {args.pred_dir}: {e}") from e
    if not pred_files:
        raise UsageError(f"no prediction files in {args.pred_dir}")
    preds = [_read_motion(p) for p in pred_files]
    gt = _read_motion(args.gt) if args.gt else None
    if gt is None and any(m in wanted for m in ("ade", "fde")):
        raise UsageError("--gt is required for ade/fde")

    gt_set = None
    if any(m in wanted for m in ("mmade", "mmfde")):
        if not args.mm_gt_dir:
            raise UsageError("--mm-gt-dir is required for mmade/mmfde")
        if args.past:
            if args.mm_eps is None:
                raise UsageError("--mm-eps is required with --past")
            futures, pasts = [], []
            for f in sorted(Path(args.mm_gt_dir).glob("*.future.*")):
                past = f.with_name(f.name.replace(".future.", ".past."))
                if not past.exists():
                    raise OSError(f"missing paired past file {past}")
                futures.append(_read_motion(f))
                pasts.append(_read_motion(past))
            gt_set = multimodal_gt(pasts, futures, _read_motion(args.past), args.mm_eps)
        else:
            gt_set = [_read_motion(p) for p in list_motion_files(args.mm_gt_dir)]
        if not gt_set:
            raise UsageError("multimodal ground-truth set is empty")

    result = {}
    if "apd" in wanted:
        if len(preds) < 2:
            raise UsageError("apd needs at least two prediction files")
        result["apd"] = apd(preds)
    if "ade" in wanted:
        result["ade"] = ade(preds, gt)
    if "fde" in wanted:
        result["fde"] = fde(preds, gt)
    if "mmade" in wanted:
        result["mmade"] = mmade(preds, gt_set)
    if "mmfde" in wanted:
        result["mmfde"] = mmfde(preds, gt_set)
    doc = {"format_version": 1, "tool": f"freqkalman {__version__} evaluate",
           "metrics": result,
           "metadata": {"K": len(preds), "M": len(gt_set) if gt_set is not None else None,
                        "frames": preds[0].frames, "joints": preds[0].joints,
                        "predictions": [p.name for p in pred_files]}}
    if args.out:
        _write(args.out, dumps(doc))
    else:
        sys.stdout.write(dumps(doc))
    return EXIT_OK


# -- jitter ------------------------------------------------------------------

def cmd_jitter(args) -> int:
    base = _read_motion(args.base)
    refined = _read_motion(args.refined)
    if base.shape != refined.shape:
        raise ShapeMismatch(f"base {base.shape} vs refined {refined.shape}")
    names = base.joint_names or tuple(f"joint{j}" for j in range(base.joints))
    jb, jr = jerk_profile(base), jerk_profile(refined)
    if args.parts_map:
        try:
            groups = read_parts_map(args.parts_map, base.joint_names, base.joints)
        except (OSError, json.JSONDecodeError) as e:
            raise OSError(f"cannot read parts map: {e}") from e
        except ValueError as e:
            raise UsageError(str(e)) from e
        labels = list(groups)
        jb = np.array([jb[i].mean() for i in groups.values()])
        jr = np.array([jr[i].mean() for i in groups.values()])
        red, mean = jitter_reduction(base, refined, groups)
    else:
        labels = list(names)
        red, mean = jitter_reduction(base, refined)
    rows = [[lab, float(b), float(r), float(x)] for lab, b, r, x in zip(labels, jb, jr, red)]
    rows.append(["Average", float(np.mean(jb)), float(np.mean(jr)), mean])
    header = ["Body Part", "Base", "Ours", "Reduction"]
    if args.out:
        if str(args.out).endswith(".csv"):
            _write(args.out, rows_to_csv(header, rows))
        else:
            _write(args.out, dumps({"format_version": 1, "tool": f"freqkalman {__version__} jitter",
                                    "units": "length/frame^3", "columns": header, "rows": rows}))
    else:
        sys.stdout.write(format_table(header, rows))
    return EXIT_OK


# -- steady-state --------------------------------------------------------------

def cmd_steady_state(args) -> int:
    if args.sweep_snr:
        try:
            lo, hi, n = args.sweep_snr.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError as e:
            raise UsageError("--sweep-snr expects lo:hi:n") from e
        config = _config_from_args(args)
        try:
            sweep = sweep_snr(config, lo, hi, n)
        except ValueError as e:
            raise UsageError(str(e)) from e
        header = ["snr", "Q", "R", "P_star", "K_star"]
        rows = [[float(sweep[c][i]) for c in header] for i in range(n)]
        text = rows_to_csv(header, rows)
        if args.out:
            _write(args.out, text)
        else:
            sys.stdout.write(text)
        if args.svg:
            series = [{"label": name, "x": sweep["snr"], "y": sweep[name] / sweep[name].max()}
                      for name in ("Q", "R", "K_star")]
            _write(args.svg, svg_line_chart(series, title="Adaptive parameters vs estimated SNR",
                                            xlabel="SNR_est", ylabel="value / max", logx=True))
        return EXIT_OK
    if args.q is None or args.r is None:
        raise UsageError("give --q and --r, or --sweep-snr")
    if not (args.q > 0 and args.r > 0 and math.isfinite(args.q) and math.isfinite(args.r)):
        raise UsageError("--q and --r must be positive")
    P = steady_state_error(args.q, args.r)
    K = steady_state_gain(args.q, args.r)
    text = dumps({"Q": args.q, "R": args.r, "P_star": P, "K_star": K})
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- compare -------------------------------------------------------------------

def cmd_compare(args) -> int:
    config = _config_from_args(args)
    noisy = _read_motion(args.input)
    clean = _read_motion(args.clean) if args.clean else None
    if clean is not None and clean.shape != noisy.shape:
        raise ShapeMismatch(f"noisy {noisy.shape} vs clean {clean.shape}")
    try:
        gammas = [float(g) for g in args.gammas.split(",")] if args.gammas else list(DEFAULT_GAMMAS)
    except ValueError as e:
        raise UsageError("--gammas expects a comma-separated list of numbers") from e
    if any(not 0 <= g <= 1 for g in gammas):
        raise UsageError("every gamma must lie in [0, 1]")
    if config.k0 > noisy.frames:
        raise UsageError(f"--k0 {config.k0} exceeds the {noisy.frames} input frames")
    rows = compare_methods(noisy, clean, config, gammas)
    header = ["method", "gamma", "mse", "mean_jerk"]
    table = [[r[c] for c in header] for r in rows]
    if args.out:
        if str(args.out).endswith(".csv"):
            _write(args.out, rows_to_csv(header, table))
        else:
            _write(args.out, dumps({"format_version": 1, "tool": f"freqkalman {__version__} compare",
                                    "config": config.to_dict(), "rows": rows}))
    else:
        sys.stdout.write(format_table(header, [[("" if v is None else v) for v in row] for row in table]))
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqkalman", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic clean/noisy motion")
    p.add_argument("--kind", default="sinusoid_mix", choices=["sinusoid_mix", "polynomial", "walk_like"])
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--joints", type=int, default=17)
    p.add_argument("--fps", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-ratio", type=float, help="target high-frequency energy ratio")
    p.add_argument("--sigma", type=float, help="white-noise standard deviation instead")
    p.add_argument("--k0", type=int, default=10)
    p.add_argument("--max-freq", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("refine", help="apply frequency-domain Kalman refinement")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_config_flags(p)
    p.add_argument("--report")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", help="write an SVG trajectory chart")
    p.add_argument("--plot-joint", type=int, default=0)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("evaluate", help="accuracy/diversity metrics for a prediction set")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt")
    p.add_argument("--mm-gt-dir")
    p.add_argument("--past", help="observed past; filters --mm-gt-dir *.future/*.past pairs by --mm-eps")
    p.add_argument("--mm-eps", type=float)
    p.add_argument("--metrics", default="ade,fde,apd")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("jitter", help="jerk-based jitter reduction table")
    p.add_argument("--base", required=True)
    p.add_argument("--refined", required=True)
    p.add_argument("--parts-map")
    p.add_argument("--out")
    p.set_defaults(func=cmd_jitter)

    p = sub.add_parser("steady-state", help="steady-state error and gain, or an SNR sweep")
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--sweep-snr", help="lo:hi:n log-spaced SNR grid")
    _add_config_flags(p, with_mode=False)
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("compare", help="fixed suppression vs fixed and adaptive Kalman")
    p.add_argument("--input", required=True)
    p.add_argument("--clean")
    p.add_argument("--gammas", help="comma-separated suppression factors (default 0.1..0.9)")
    _add_config_flags(p, with_mode=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ShapeMismatch as e:
        print(f"shape mismatch: {e}", file=sys.stderr)
        return EXIT_SHAPE
    except (OSError, MotionError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except FloatingPointError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

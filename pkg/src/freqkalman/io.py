"""File formats: motion files, constraint files, parts maps, reports, SVG.

Numeric formatting rule: every float is written with Python's ``repr``
(shortest decimal string that round-trips to the same double), so reading a
file back yields bit-identical arrays and reruns produce byte-identical files.
Non-finite report values are written as ``null``.

Motion files come in two forms:

* JSON: ``{"format_version": 1, "fps": ..., "joint_names": [...] | null,
  "frames": [[[x, y, z], ...], ...]}``
* CSV: optional first line ``# format_version=1 fps=<fps> joint_names=<a;b;...>``,
  then header ``frame,joint,x,y,z`` and one row per (frame, joint), frame-major.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import AngleConstraint, MotionSequence, ShapeMismatch, Skeleton

FORMAT_VERSION = 1


class MotionFileError(ValueError):
    pass


def fmt(x) -> str:
    return repr(float(x))


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


# -- motion files -------------------------------------------------------------

def motion_to_json(motion: MotionSequence) -> str:
    lines = [
        "{",
        f'  "format_version": {FORMAT_VERSION},',
        f'  "fps": {fmt(motion.fps)},',
        f'  "joint_names": {json.dumps(list(motion.joint_names)) if motion.joint_names else "null"},',
        '  "frames": [',
    ]
    T = motion.frames
    for t in range(T):
        joints = ",".join("[" + ",".join(fmt(v) for v in p) + "]" for p in motion.data[t])
        lines.append(f"    [{joints}]" + ("," if t < T - 1 else ""))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def motion_to_csv(motion: MotionSequence) -> str:
    names = ";".join(motion.joint_names) if motion.joint_names else ""
    rows = [f"# format_version={FORMAT_VERSION} fps={fmt(motion.fps)} joint_names={names}",
            "frame,joint,x,y,z"]
    for t in range(motion.frames):
        for j in range(motion.joints):
            x, y, z = motion.data[t, j]
            rows.append(f"{t},{j},{fmt(x)},{fmt(y)},{fmt(z)}")
    return "\n".join(rows) + "\n"


def motion_from_json(text: str) -> MotionSequence:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "frames" not in doc:
        raise MotionFileError("motion JSON needs a 'frames' key")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise MotionFileError(f"unsupported format_version {version}")
    frames = doc["frames"]
    if not frames:
        raise ShapeMismatch("motion has no frames")
    J = len(frames[0])
    for t, f in enumerate(frames):
        if len(f) != J or any(len(p) != 3 for p in f):
            raise ShapeMismatch(f"frame {t} is not a {J}x3 pose")
    data = np.array(frames, dtype=np.float64)
    return MotionSequence.from_array(data, fps=float(doc.get("fps", 30.0)),
                                     joint_names=doc.get("joint_names"))


def motion_from_csv(text: str) -> MotionSequence:
    lines = text.splitlines()
    fps, names = 30.0, None
    if lines and lines[0].startswith("#"):
        for tok in lines[0][1:].split():
            key, _, val = tok.partition("=")
            if key == "fps":
                fps = float(val)
            elif key == "joint_names" and val:
                names = val.split(";")
            elif key == "format_version" and int(val) != FORMAT_VERSION:
                raise MotionFileError(f"unsupported format_version {val}")
        lines = lines[1:]
    reader = csv.DictReader(lines)
    if reader.fieldnames != ["frame", "joint", "x", "y", "z"]:
        raise MotionFileError(f"expected header frame,joint,x,y,z, got {reader.fieldnames}")
    cells = {}
    for n, row in enumerate(reader, start=2):
        try:
            cells[(int(row["frame"]), int(row["joint"]))] = (float(row["x"]), float(row["y"]), float(row["z"]))
        except (TypeError, ValueError) as e:
            raise MotionFileError(f"line {n}: malformed row") from e
    if not cells:
        raise ShapeMismatch("motion has no rows")
    T = max(t for t, _ in cells) + 1
    J = max(j for _, j in cells) + 1
    if len(cells) != T * J:
        raise ShapeMismatch(f"{len(cells)} rows do not fill a {T}x{J} grid")
    data = np.array([[cells[(t, j)] for j in range(J)] for t in range(T)])
    return MotionSequence.from_array(data, fps=fps, joint_names=names)


def _is_csv(path) -> bool:
    return str(path).lower().endswith(".csv")


def read_motion(path) -> MotionSequence:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return motion_from_csv(text) if _is_csv(path) else motion_from_json(text)
    except json.JSONDecodeError as e:
        raise MotionFileError(f"{path}: {e}") from e


def write_motion(path, motion: MotionSequence) -> None:
    write_text(path, motion_to_csv(motion) if _is_csv(path) else motion_to_json(motion))


def list_motion_files(directory) -> list[Path]:
    """Motion files in ``directory`` sorted by name (deterministic order)."""
    d = Path(directory)
    return sorted(p for p in d.iterdir() if p.suffix.lower() in (".json", ".csv") and p.is_file())


# -- constraint and parts files ----------------------------------------------

def skeleton_from_dict(doc: dict) -> Skeleton:
    J = int(doc["joint_count"])
    parents = doc.get("parents") or [-1] * J
    limbs = doc.get("limb_pairs")
    if limbs is None:
        limbs = [(p, j) for j, p in enumerate(parents) if p >= 0]
    cons = []
    for entry in doc.get("constraints", []):
        kind = entry.get("type", "bone_bone")
        common = dict(name=entry["name"], vec1=tuple(entry["vec1"]),
                      cos_min=float(entry["cos_min"]), cos_max=float(entry["cos_max"]))
        if kind == "bone_bone":
            cons.append(AngleConstraint(vec2=tuple(entry["vec2"]), **common))
        elif kind == "bone_plane":
            cons.append(AngleConstraint(plane=tuple(entry["plane"]), **common))
        else:
            raise ValueError(f"unknown constraint type {kind!r}")
    return Skeleton(J, tuple(parents), tuple(map(tuple, limbs)), tuple(cons), doc.get("joint_names"))


def skeleton_to_dict(skeleton: Skeleton) -> dict:
    cons = []
    for c in skeleton.angle_constraints:
        entry = {"name": c.name, "type": c.kind, "vec1": list(c.vec1)}
        if c.plane is None:
            entry["vec2"] = list(c.vec2)
        else:
            entry["plane"] = list(c.plane)
        entry.update(cos_min=c.cos_min, cos_max=c.cos_max)
        cons.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "joint_count": skeleton.joint_count,
        "joint_names": list(skeleton.joint_names) if skeleton.joint_names else None,
        "parents": list(skeleton.parents),
        "limb_pairs": [list(p) for p in skeleton.limb_pairs],
        "constraints": cons,
    }


def read_constraints(path) -> Skeleton:
    return skeleton_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_constraints(path, skeleton: Skeleton) -> None:
    write_text(path, dumps(skeleton_to_dict(skeleton)))


def read_parts_map(path, joint_names: Sequence[str] | None, joints: int) -> dict[str, list[int]]:
    """Load ``{"parts": {label: [joint name or index, ...]}}`` into index lists."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    parts = doc.get("parts", doc)
    out = {}
    for label, members in parts.items():
        idx = []
        for m in members:
            if isinstance(m, int):
                i = m
            elif joint_names and m in joint_names:
                i = list(joint_names).index(m)
            else:
                raise ValueError(f"part {label!r}: unknown joint {m!r}")
            if not 0 <= i < joints:
                raise ValueError(f"part {label!r}: joint index {i} out of range")
            idx.append(i)
        out[label] = idx
    return out


# -- tables and reports ------------------------------------------------------

def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (_fmt_cell(v)) for v in row])
    return buf.getvalue()


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else ""
    return v


def format_table(header: Sequence[str], rows: Sequence[Sequence], digits: int = 6) -> str:
    """Fixed-width plain-text table for terminal output."""
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return "nan" if not math.isfinite(v) else f"{v:.{digits}g}"
        return str(v)
    text = [[cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in text)) if text else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in text]
    return "\n".join(lines) + "\n"


CHANNEL_COLUMNS = ("joint_index", "axis", "rho", "snr_est", "Q", "R",
                   "steady_state_P", "steady_state_K", "energy_total", "energy_high")


def channel_rows(reports) -> list[list]:
    return [[getattr(r, c) for c in CHANNEL_COLUMNS] for r in reports]


# -- SVG ---------------------------------------------------------------------

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def svg_line_chart(series: Sequence[dict], title: str = "", xlabel: str = "", ylabel: str = "",
                   width: int = 640, height: int = 400, logx: bool = False, logy: bool = False) -> str:
    """Minimal SVG line chart.

    Each series is ``{"label", "x", "y"}`` with optional ``"color"`` and
    ``"dashed"``. Coordinates are written with 2 decimals, so output is
    deterministic.
    """
    ml, mr, mt, mb = 70, 150, 40, 50
    pw, ph = width - ml - mr, height - mt - mb

    def tx(v):
        return np.log10(v) if logx else np.asarray(v, dtype=float)

    def ty(v):
        return np.log10(v) if logy else np.asarray(v, dtype=float)

    xs = np.concatenate([tx(s["x"]) for s in series])
    ys = np.concatenate([ty(s["y"]) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="24" text-anchor="middle" font-size="15">{_esc(title)}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw / 2:.2f}" y="{height - 10}" text-anchor="middle" font-size="12">{_esc(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{mt + ph / 2:.2f}" text-anchor="middle" font-size="12" '
                   f'transform="rotate(-90 16 {mt + ph / 2:.2f})">{_esc(ylabel)}</text>')
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        lx = f"1e{fx:.1f}" if logx else f"{fx:.3g}"
        ly = f"1e{fy:.1f}" if logy else f"{fy:.3g}"
        out.append(f'<text x="{px(fx):.2f}" y="{mt + ph + 16}" text-anchor="middle" font-size="10">{lx}</text>')
        out.append(f'<text x="{ml - 6}" y="{py(fy) + 3:.2f}" text-anchor="end" font-size="10">{ly}</text>')
    for i, s in enumerate(series):
        color = s.get("color", PALETTE[i % len(PALETTE)])
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(tx(s["x"]), ty(s["y"])))
        dash = ' stroke-dasharray="6,4"' if s.get("dashed") else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = mt + 14 + 18 * i
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{ml + pw + 34}" y="{ly + 4}" font-size="11">{_esc(s["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")

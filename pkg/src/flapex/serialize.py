"""JSON and CSV formats for configurations, pairs, samples and reports.

Floats are written with 17 significant digits so every value round-trips
exactly; files end with a newline.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .expansion import ExpansionReport
from .flaps import Configuration, FlappedPair, FlapSpec, PointLabel
from .motion import MotionSample
from .simplex import Simplex, normals_pairwise_obtuse


def fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite number {x}")
    return format(x, ".17g")


def dumps(obj, indent: int | None = None) -> str:
    """``json.dumps`` with 17-significant-digit floats."""
    return _encode(obj, indent, 0)


def _encode(obj, indent, level) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        items = [_encode(x, indent, level + 1) for x in obj]
        return _wrap("[", "]", items, indent, level)
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return _wrap("{", "}", items, indent, level)
    raise InputError(f"cannot serialize {type(obj).__name__}")


def _wrap(open_, close, items, indent, level) -> str:
    if not items:
        return open_ + close
    # only the outer levels are indented; numeric rows stay on one line
    if indent is None or level >= 2:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    return open_ + "\n" + ",\n".join(pad + x for x in items) + "\n" + " " * (indent * level) + close


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj, indent=1) + "\n", encoding="utf-8")
    return path


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


# --- configurations -----------------------------------------------------


def configuration_to_dict(cfg: Configuration) -> dict:
    out = {
        "dim": cfg.dim,
        "points": [
            {"label": lab.to_dict(), "coords": row}
            for lab, row in zip(cfg.labels, cfg.coords.tolist())
        ],
    }
    if cfg.flapped:
        out["flapped"] = True
    return out


def configuration_from_dict(obj: dict) -> Configuration:
    try:
        labels = tuple(PointLabel.from_dict(pt["label"]) for pt in obj["points"])
        coords = np.array([[float(x) for x in pt["coords"]] for pt in obj["points"]])
        dim = int(obj["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed configuration: {exc}") from exc
    if coords.ndim != 2 or coords.shape[1] != dim:
        raise InputError(f"configuration coordinates do not have dimension {dim}")
    return Configuration(labels, coords, flapped=bool(obj.get("flapped", False)))


def pair_to_dict(pair: FlappedPair) -> dict:
    S = pair.spec.simplex
    return {
        "dim": pair.spec.d,
        "depth": pair.spec.s,
        "simplex": {"kind": S.kind, "vertices": S.vertices.tolist()},
        "normalsPairwiseObtuse": pair.normals_pairwise_obtuse,
        "p": configuration_to_dict(pair.p),
        "q": configuration_to_dict(pair.q),
    }


def pair_from_dict(obj: dict) -> FlappedPair:
    try:
        S = Simplex(np.array(obj["simplex"]["vertices"], dtype=float), kind=obj["simplex"]["kind"])
        spec = FlapSpec(S, float(obj["depth"]))
        p = configuration_from_dict(obj["p"])
        q = configuration_from_dict(obj["q"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed pair file: {exc}") from exc
    return FlappedPair(p, q, spec, normals_pairwise_obtuse(S)[0])


# --- samples ------------------------------------------------------------


def sample_to_dict(sample: MotionSample) -> dict:
    return {
        "dim": sample.ambient_dim,
        "grid": sample.grid.tolist(),
        "frames": [
            {"t": float(t), "configuration": configuration_to_dict(sample.frame(m))}
            for m, t in enumerate(sample.grid)
        ],
    }


def sample_from_dict(obj: dict) -> MotionSample:
    try:
        grid = np.array(obj["grid"], dtype=float)
        cfgs = [configuration_from_dict(fr["configuration"]) for fr in obj["frames"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed sample file: {exc}") from exc
    if not cfgs or any(c.labels != cfgs[0].labels for c in cfgs):
        raise InputError("sample frames must share one label list")
    return MotionSample(cfgs[0].labels, grid, np.stack([c.coords for c in cfgs]))


def sample_to_csv(sample: MotionSample) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "label"] + [f"x{c}" for c in range(sample.ambient_dim)])
    for m, t in enumerate(sample.grid):
        for lab, row in zip(sample.labels, sample.frames[m]):
            w.writerow([fmt(t), str(lab)] + [fmt(x) for x in row])
    return buf.getvalue()


def sample_from_csv(text: str) -> MotionSample:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != ["t", "label"]:
        raise InputError("sample CSV needs a 't,label,x0,...' header")
    times, labels, frames = [], [], {}
    for row in rows[1:]:
        t = float(row[0])
        if t not in frames:
            times.append(t)
            frames[t] = []
        lab = PointLabel.parse(row[1])
        if len(times) == 1:
            labels.append(lab)
        frames[t].append([float(x) for x in row[2:]])
    return MotionSample(tuple(labels), np.array(times), np.array([frames[t] for t in times]))


# --- reports ------------------------------------------------------------


def report_to_csv(report: ExpansionReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label1", "label2", "dBefore", "dAfter", "gap", "class", "caseTag"])
    for pc in report.pairs:
        w.writerow([str(pc.first), str(pc.second), fmt(pc.d_before), fmt(pc.d_after),
                    fmt(pc.gap), pc.cls, pc.case_tag])
    return buf.getvalue()

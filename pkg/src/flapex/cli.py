"""Command-line front end.

Every subcommand prints a one-line JSON summary to stdout. Exit status is
0 on success, 1 when the analysis finds a domain failure (for instance a
contraction in ``verify``) and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import serialize
from .errors import (
    ConfigurationError,
    DimensionError,
    DomainError,
    FlapexError,
    GeometryError,
    InputError,
    LabelError,
    SamplingError,
)
from .expansion import expansion_report
from .flaps import FlapSpec, build_flapped_pair
from .linalg import embedding_dimension
from .motion import DEFAULT_SAMPLES, alexander_motion, monotonicity_report, sample_motion
from .obstruction import obstruction_pipeline
from .search import optimize_expansion_path
from .simplex import normals_pairwise_obtuse, regular_simplex
from .svg import svg_snapshot

log = logging.getLogger("flapex")

OUT_DIR_ENV = "FLAPEX_OUT_DIR"
INPUT_ERRORS = (InputError, DimensionError, ConfigurationError, LabelError, GeometryError,
                DomainError, SamplingError)


class DomainFailure(Exception):
    """The command ran, but its result is a negative finding."""


def _out_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / default_name


def _emit(summary: dict) -> None:
    sys.stdout.write(serialize.dumps(summary) + "\n")


def _load_pair(path):
    return serialize.pair_from_dict(serialize.read_json(path))


def _load_sample(path):
    path = Path(path)
    if path.suffix == ".csv":
        try:
            return serialize.sample_from_csv(path.read_text(encoding="utf-8"))
        except (OSError, ValueError, IndexError) as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return serialize.sample_from_dict(serialize.read_json(path))


def _pair_sample(args, pair):
    if getattr(args, "sample", None):
        return _load_sample(args.sample)
    return sample_motion(alexander_motion(pair.p, pair.q), args.samples)


# --- subcommands --------------------------------------------------------


def cmd_simplex(args) -> dict:
    S = regular_simplex(args.dim)
    obtuse, pair, worst = normals_pairwise_obtuse(S)
    out = _out_path(args, f"simplex_d{args.dim}.json")
    serialize.write_json(out, {"dim": S.dim, "kind": S.kind, "vertices": S.vertices.tolist(),
                               "normals": S.normals.tolist()})
    return {"command": "simplex", "dim": S.dim, "normalsPairwiseObtuse": obtuse,
            "worstPair": list(pair), "worstDot": worst, "out": str(out)}


def cmd_build(args) -> dict:
    pair = build_flapped_pair(FlapSpec(regular_simplex(args.dim), args.depth))
    out = _out_path(args, "pair.json")
    serialize.write_json(out, serialize.pair_to_dict(pair))
    return {"command": "build", "dim": args.dim, "depth": args.depth, "points": len(pair.p),
            "normalsPairwiseObtuse": pair.normals_pairwise_obtuse, "out": str(out)}


def cmd_verify(args) -> dict:
    pair = _load_pair(args.pair)
    p, q = (pair.q, pair.p) if args.reverse else (pair.p, pair.q)
    report = expansion_report(p, q, args.tol)
    summary = {"command": "verify", **report.summary(),
               "tagMismatches": len(report.tag_mismatches())}
    if args.out:
        Path(args.out).write_text(serialize.report_to_csv(report), encoding="utf-8")
        summary["out"] = args.out
    if not report.is_expansion:
        raise DomainFailure(summary)
    return summary


def cmd_motion(args) -> dict:
    pair = _load_pair(args.pair)
    sample = sample_motion(alexander_motion(pair.p, pair.q), args.samples)
    mono = monotonicity_report(sample, args.tol)
    out = _out_path(args, "motion.json")
    if out.suffix == ".csv":
        out.write_text(serialize.sample_to_csv(sample), encoding="utf-8")
    else:
        serialize.write_json(out, serialize.sample_to_dict(sample))
    summary = {"command": "motion", "frames": int(sample.grid.size), "points": sample.n_points,
               "ambientDim": sample.ambient_dim, "monotone": mono.ok,
               "minIncrement": mono.min_increment, "out": str(out)}
    if not mono.ok:
        raise DomainFailure(summary)
    return summary


def cmd_embed(args) -> dict:
    summary = {"command": "embed", "relTolerance": args.tol}
    if args.sample:
        frame = _load_sample(args.sample).frame_at(args.t)
        summary.update(t=args.t, rank=embedding_dimension(frame.coords, args.tol).numeric_rank)
        return summary
    pair = _load_pair(args.pair)
    if args.motion == "alexander":
        pts = alexander_motion(pair.p, pair.q).positions(args.t)
        rep = embedding_dimension(pts, args.tol)
        summary.update(motion="alexander", t=args.t, rank=rep.numeric_rank,
                       euclideanConsistent=rep.euclidean_consistent)
    else:
        summary.update(rankP=embedding_dimension(pair.p.coords, args.tol).numeric_rank,
                       rankQ=embedding_dimension(pair.q.coords, args.tol).numeric_rank)
    return summary


def cmd_obstruct(args) -> dict:
    pair = _load_pair(args.pair)
    sample = _pair_sample(args, pair)
    if args.ambient is not None:
        sample = sample.truncated(args.ambient)
    result = obstruction_pipeline(sample, pair.spec, args.tol)
    out = _out_path(args, "certificate.json")
    serialize.write_json(out, result.to_dict())
    summary = {"command": "obstruct", "kind": result.kind, "ambientDim": sample.ambient_dim,
               "out": str(out)}
    if hasattr(result, "reason"):
        summary["reason"] = result.reason
    return summary


def cmd_search(args) -> dict:
    pair = _load_pair(args.pair)
    result = optimize_expansion_path(
        pair.p, pair.q, args.ambient, waypoints=args.waypoints, budget=args.budget,
        seed=args.seed, restarts=args.restarts, refine=args.refine, init=args.init,
    )
    out = _out_path(args, "search.json")
    serialize.write_json(out, result.to_dict())
    return {"command": "search", "label": "evidence", "ambientDim": args.ambient,
            "bestResidual": result.best_residual, "iterations": result.iterations,
            "restartResiduals": [r.best_residual for r in result.restarts], "out": str(out)}


def cmd_snapshot(args) -> dict:
    pair = _load_pair(args.pair)
    if pair.spec.d != 2:
        raise DimensionError(f"snapshots support d = 2 only, got d = {pair.spec.d}")
    sample = _pair_sample(args, pair)
    out = _out_path(args, f"snapshot_t{args.t:g}.svg")
    svg_snapshot(sample, pair.spec, args.t, out)
    return {"command": "snapshot", "t": args.t, "out": str(out)}


# --- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flapex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help=f"output path (default: ${OUT_DIR_ENV} or cwd)")
        return sp

    sp = add("simplex", cmd_simplex, "write the regular simplex and its normals")
    sp.add_argument("--dim", type=int, required=True)

    sp = add("build", cmd_build, "build the inward/outward flapped pair")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--depth", type=float, default=0.5)

    sp = add("verify", cmd_verify, "check that q is an expansion of p")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--reverse", action="store_true", help="compare q against p instead")

    sp = add("motion", cmd_motion, "sample the half-turn motion (JSON, or CSV by suffix)")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("embed", cmd_embed, "embedding dimension of p, q or a motion frame")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--pair")
    src.add_argument("--sample")
    sp.add_argument("--motion", choices=["alexander"])
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("obstruct", cmd_obstruct, "run the obstruction pipeline on a sampled motion")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--sample")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--ambient", type=int, help="keep only the first AMBIENT coordinates")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("search", cmd_search, "search for a continuous expansion in E^ambient")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--ambient", type=int, required=True)
    sp.add_argument("--waypoints", type=int, default=8)
    sp.add_argument("--budget", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=1)
    sp.add_argument("--refine", type=int, default=4)
    sp.add_argument("--init", choices=["straight", "alexander"], default="straight")

    sp = add("snapshot", cmd_snapshot, "SVG of a planar motion frame")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--sample")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--t", type=float, default=0.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        summary = args.func(args)
    except DomainFailure as exc:
        _emit(exc.args[0])
        return 1
    except INPUT_ERRORS as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)})
        return 2
    except FlapexError as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)})
        return 1
    except OSError as exc:
        _emit({"command": args.command, "error": "OSError", "message": str(exc)})
        return 2
    _emit(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())

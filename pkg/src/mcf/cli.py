"""Command-line front end.

Subcommands::

    mcf simulate     --model gaussian --n 50000 --seed 1 --output sample.csv
    mcf analyze      --input sample.csv --output result.json [--radius R]
    mcf compare-pca  --input sample.csv --output compare.json
    mcf tailcheck    --input sample.csv --output tail.json --theta-a 1,0 --theta-b 0,1

Every JSON output carries ``"schema_version": 1`` and echoes the seed and
tolerances used. Errors are written to stderr as a JSON object and the
process exits with a nonzero status.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import models
from .core import DataMatrix, axis_angle, center, normalize
from .cumulant import RELIABLE_ESS, cumulant_profile
from .exceptions import MCFError, OutsideDomain, ParseError, StandardizedInputWarning
from .optimizer import OptimizerConfig, auto_radius, mcf
from .tail import verify_theorem1

SCHEMA_VERSION = 1
SCHEMA_DIR = Path(__file__).with_name("schemas")
PROFILE_POINTS = 21
TAIL_RADII = 10
MIN_SIMULATE_N = 30

DEFAULT_PARAMS = {
    "gaussian": {"sigma": [[1.2, 0.0], [0.0, 0.5143]]},
    "skew-normal": {"sigma": [[1.2, 0.0], [0.0, 0.5143]], "alpha": [4.365, -1.455]},
    "gamma": {"alpha0": 2.0, "alphas": [0.5, 4.0]},
}

EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# I/O


def read_csv(path) -> np.ndarray:
    """Parse a numeric CSV; a non-numeric first row is taken as a header.

    Raises
    ------
    ParseError
        On ragged or non-numeric rows, with the 1-based line number.
    """
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                if lineno == 1:
                    continue
                raise ParseError(f"non-numeric value on line {lineno}", line=lineno) from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(f"expected {width} fields on line {lineno}, got {len(vals)}", line=lineno)
            if not all(np.isfinite(vals)):
                raise ParseError(f"non-finite value on line {lineno}", line=lineno)
            rows.append(vals)
    if not rows:
        raise ParseError("no numeric rows found", line=None)
    return np.array(rows, dtype=float)


def write_csv(path, X, header) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, X, delimiter=",", fmt="%.17g")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _parse_params(text, model):
    if text is None:
        return DEFAULT_PARAMS[model]
    p = Path(text)
    if p.is_file():
        text = p.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--params is neither a file nor valid JSON: {exc.msg}") from None


def _parse_vector(text, name):
    try:
        v = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"{name} must be comma-separated numbers, got {text!r}") from None
    return normalize(v)


def _input_warnings(X) -> list[str]:
    """Diagnostics about the raw input: constant and unit-variance columns."""
    notes = []
    if X.shape[0] < 2:
        return notes
    sd = X.std(axis=0, ddof=1)
    const = np.flatnonzero(sd <= 1e-12 * np.maximum(1.0, np.abs(X).max(axis=0)))
    if const.size:
        cols = ", ".join(f"v{i + 1}" for i in const)
        notes.append(f"ConstantColumn: column(s) {cols} are constant and carry no signal")
    if X.shape[1] > 1 and not const.size:
        unit = np.isclose(sd, 1.0, rtol=0, atol=1e-8) | np.isclose(X.std(axis=0), 1.0, rtol=0, atol=1e-8)
        if np.all(unit):
            msg = (
                "every column has unit variance, as after standardization; rescaling the "
                "variables changes the tail geometry, so the maxima lose their validity as "
                "anomaly directions of the original data"
            )
            warnings.warn(msg, StandardizedInputWarning, stacklevel=2)
            notes.append(f"StandardizedInputWarning: {msg}")
    return notes


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        starts=args.starts,
        max_iters=args.max_iters,
        step_init=args.step_init,
        grad_tol=args.grad_tol,
        angle_dedup_deg=args.dedup_deg,
        seed=args.seed,
    )


def _echo(args, cfg) -> dict:
    return {
        "input": str(args.input),
        "radius": args.radius,
        "auto_radius": args.radius is None,
        "ess_min": args.ess_min,
        "optimizer": cfg.to_dict(),
    }


def _load_and_fit(args):
    X = read_csv(args.input)
    notes = _input_warnings(X)
    cfg = _config(args)
    res = mcf(DataMatrix(X), cfg, radius=args.radius, ess_min=args.ess_min)
    res.warnings[:0] = notes
    return X, cfg, res


# Commands


def run_simulate(args) -> dict:
    if args.n < MIN_SIMULATE_N:
        raise ValueError(f"--n must be at least {MIN_SIMULATE_N}, got {args.n}")
    params = models.model_from_dict(args.model, _parse_params(args.params, args.model))
    sampler = {
        "gaussian": models.sample_gaussian,
        "skew-normal": models.sample_skew_normal,
        "gamma": models.sample_gamma,
    }[args.model]
    dm = sampler(params, args.n, args.seed)
    out = Path(args.output)
    write_csv(out, dm.values, [f"v{i + 1}" for i in range(dm.n_features)])
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "model": args.model,
        "params": params.to_dict(),
        "n_samples": args.n,
        "seed": args.seed,
        "data": str(out),
    }
    write_json(out.with_suffix(".json"), sidecar)
    return sidecar


def run_analyze(args) -> dict:
    X, cfg, res = _load_and_fit(args)
    out = Path(args.output)
    doc = {"schema_version": SCHEMA_VERSION, "command": "analyze", **res.to_dict(), "config": _echo(args, cfg)}
    write_json(out, doc)

    Xc = center(DataMatrix(X)).values
    radii = np.linspace(0.0, res.radius_used, PROFILE_POINTS)
    rows = []
    for k, m in enumerate(res.maxima):
        prof = cumulant_profile(Xc, m.direction, radii)
        rows += [(k, r, g, e) for r, g, e in zip(prof.radii, prof.values, prof.ess)]
    with open(out.with_name(out.stem + "_profile.csv"), "w", newline="", encoding="utf-8") as fh:
        fh.write("maximum,radius,g,ess\n")
        for k, r, g, e in rows:
            fh.write(f"{k},{r:.17g},{g:.17g},{e:.17g}\n")
    return doc


def run_compare_pca(args) -> dict:
    _, cfg, res = _load_and_fit(args)
    dirs = res.directions
    maxima = []
    for m in res.maxima:
        maxima.append(
            {
                "theta": m.direction.tolist(),
                "g": float(m.g_value),
                "angle_to_pc1": axis_angle(m.direction, res.pc1),
            }
        )
    pairwise = [
        {"i": i, "j": j, "angle": float(np.degrees(np.arccos(np.clip(dirs[i] @ dirs[j], -1.0, 1.0))))}
        for i in range(len(dirs))
        for j in range(i + 1, len(dirs))
    ]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "compare-pca",
        "radius_used": float(res.radius_used),
        "pc1": res.pc1.tolist(),
        "maxima": maxima,
        "pairwise_angles": pairwise,
        "min_angle_to_pc1": min(m["angle_to_pc1"] for m in maxima),
        "warnings": list(res.warnings),
        "config": _echo(args, cfg),
    }
    write_json(args.output, doc)
    return doc


def run_tailcheck(args) -> dict:
    if args.theta_a is None or args.theta_b is None:
        raise ValueError("tailcheck needs --theta-a and --theta-b")
    X = read_csv(args.input)
    notes = _input_warnings(X)
    dm = center(DataMatrix(X))
    ta = _parse_vector(args.theta_a, "--theta-a")
    tb = _parse_vector(args.theta_b, "--theta-b")
    if ta.size != dm.n_features or tb.size != dm.n_features:
        raise ValueError(f"directions must have {dm.n_features} components")
    if args.radii:
        radii = np.array([float(t) for t in args.radii.split(",") if t.strip()])
    else:
        r_max = args.radius if args.radius is not None else auto_radius(dm, args.ess_min, seed=args.seed)
        radii = np.linspace(r_max / TAIL_RADII, r_max, TAIL_RADII)
    rep = verify_theorem1(dm, ta, tb, radii, ess_min=args.ess_min)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "tailcheck",
        "theta_a": ta.tolist(),
        "theta_b": tb.tolist(),
        **rep.to_dict(),
        "warnings": notes,
        "config": {"input": str(args.input), "ess_min": args.ess_min, "seed": args.seed},
    }
    write_json(args.output, doc)
    return doc


COMMANDS = {
    "simulate": run_simulate,
    "analyze": run_analyze,
    "compare-pca": run_compare_pca,
    "tailcheck": run_tailcheck,
}


def build_parser() -> argparse.ArgumentParser:
    defaults = OptimizerConfig()
    parser = _Parser(prog="mcf", description="Maxima of the cumulant function.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="draw a sample from a model family")
    sim.add_argument("--model", required=True, choices=sorted(DEFAULT_PARAMS))
    sim.add_argument("--params", help="JSON text or path; defaults to the reference parameters")
    sim.add_argument("--n", type=int, default=50_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--output", required=True)

    for name, text in [
        ("analyze", "locate the cumulant maxima of a CSV sample"),
        ("compare-pca", "compare the maxima with the first principal component"),
        ("tailcheck", "compare the tails and cumulant functions along two directions"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--radius", type=float)
        grp.add_argument("--auto-radius", action="store_true", help="pick the radius from --ess-min (default)")
        p.add_argument("--ess-min", type=float, default=RELIABLE_ESS)
        p.add_argument("--starts", type=int, default=defaults.starts)
        p.add_argument("--seed", type=int, default=defaults.seed)
        p.add_argument("--max-iters", type=int, default=defaults.max_iters)
        p.add_argument("--step-init", type=float, default=defaults.step_init)
        p.add_argument("--grad-tol", type=float, default=defaults.grad_tol)
        p.add_argument("--dedup-deg", type=float, default=defaults.angle_dedup_deg)
        if name == "tailcheck":
            p.add_argument("--theta-a")
            p.add_argument("--theta-b")
            p.add_argument("--radii", help="comma-separated ascending radii")
    return parser


def _error_doc(exc, code) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ParseError) and exc.line is not None:
        doc["line"] = exc.line
    if isinstance(exc, OutsideDomain):
        doc["constraint"] = exc.constraint
    return doc


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(json.dumps(_error_doc(exc, EXIT_USAGE)), file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except (MCFError, ValueError, OSError) as exc:
        print(json.dumps(_error_doc(exc, EXIT_ERROR)), file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())

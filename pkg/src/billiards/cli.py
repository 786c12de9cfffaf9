"""Command-line entry point.

Commands::

    billiards solve --surface sphere --m 2 --A 1,0,0 --B 0,1,0 --n 2 --starts 200 --seed 7
    billiards oracle --phi 1.5707963 --n 3
    billiards cohomology --m 3 --n 5 --field q --products --out coho.json
    billiards verify --m 2 --n 4

Exit status is 0 on success with every verdict true, 1 when a verdict fails
and 2 on usage errors.  Reports are JSON (sorted keys, so identical arguments
give byte-identical output) unless ``--format text`` is requested.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .configspace import ConfigurationError
from .field import Field
from .geometry import GeometryError, parse_surface
from .leray import ResourceError, verify_theorem4
from .oracle import endpoints_at_angle, sphere_trajectories
from .solver import SolveOptions, find_critical_points, result_to_json

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2
COMMANDS = ("solve", "oracle", "cohomology", "verify")
FIELDS = ("q", "f2", "f3", "f5")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    verbose: int = 0


def _vector(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty vector")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="billiards", description="Billiard trajectories and configuration-space cohomology.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report here (atomically) instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("solve", help="multistart Newton search for trajectories")
    p.add_argument("--surface", choices=("sphere", "ellipsoid"), default="sphere")
    p.add_argument("--m", type=int)
    p.add_argument("--axes", type=_vector)
    p.add_argument("--A", type=_vector, required=True)
    p.add_argument("--B", type=_vector, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--hessian", choices=("analytic", "fd"), default="analytic")
    common(p)

    p = sub.add_parser("oracle", help="closed-form trajectories on the unit sphere")
    p.add_argument("--phi", type=float, help="angle between A and B (A = e1, B in the e1,e2-plane)")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--A", type=_vector)
    p.add_argument("--B", type=_vector)
    p.add_argument("--n", type=int, required=True)
    common(p)

    for name, help_ in (("cohomology", "cohomology of the spectral-sequence term"), ("verify", "run every cohomology check")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--field", choices=FIELDS, default="q")
        if name == "cohomology":
            p.add_argument("--products", action="store_true", help="include the cup-product table")
        common(p)
    return parser


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out", "format", "verbose")}
    cfg = RunConfig(args.command, params, args.out, args.format, args.verbose)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    p = cfg.params
    if p.get("n") is not None and p["n"] < 1:
        raise UsageError("--n must be >= 1")
    if cfg.command in ("cohomology", "verify"):
        if p["m"] < 2:
            raise UsageError("--m must be >= 2 for cohomology")
    elif cfg.command == "solve":
        if p["m"] is not None and p["m"] < 1:
            raise UsageError("--m must be >= 1")
        if p["surface"] == "sphere" and p["m"] is None and p["axes"] is None:
            raise UsageError("sphere needs --m")
        if p["starts"] < 1:
            raise UsageError("--starts must be >= 1")
        if not p["tol"] > 0:
            raise UsageError("--tol must be positive")
    elif cfg.command == "oracle":
        if p["m"] < 1:
            raise UsageError("--m must be >= 1")
        if (p["A"] is None) != (p["B"] is None):
            raise UsageError("give both --A and --B, or --phi")
        if p["A"] is None and p["phi"] is None:
            raise UsageError("oracle needs --phi or --A/--B")
        if p["phi"] is not None and not 0 < p["phi"] < math.pi:
            raise UsageError("--phi must lie strictly between 0 and pi")


def _run_solve(p: dict) -> tuple[dict, bool]:
    surface = parse_surface(p["surface"], p["m"], p["axes"])
    opts = SolveOptions(starts=p["starts"], seed=p["seed"], newton_tol=p["tol"], hessian=p["hessian"])
    result = find_critical_points(surface, np.array(p["A"]), np.array(p["B"]), p["n"], opts)
    report = result_to_json(result)
    return report, report["passed"]


def _run_oracle(p: dict) -> tuple[dict, bool]:
    if p["A"] is not None:
        A, B = np.array(p["A"]), np.array(p["B"])
    else:
        A, B = endpoints_at_angle(p["phi"], p["m"])
    trajs = sphere_trajectories(A, B, p["n"])
    report = {
        "surface": {"kind": "sphere", "m": len(A) - 1},
        "A": A.tolist(),
        "B": B.tolist(),
        "n": p["n"],
        "count": len(trajs),
        "trajectories": [t.to_json() for t in trajs],
    }
    return report, True


def _run_cohomology(p: dict, products: bool) -> tuple[dict, bool]:
    report = verify_theorem4(p["m"], p["n"], Field.from_name(p["field"]), products=products)
    return report.to_json(), report.ok


def run_config(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.command == "solve":
        return _run_solve(cfg.params)
    if cfg.command == "oracle":
        return _run_oracle(cfg.params)
    if cfg.command == "cohomology":
        return _run_cohomology(cfg.params, cfg.params["products"])
    return _run_cohomology(cfg.params, True)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = []
    for key in sorted(report):
        val = report[key]
        if key == "trajectories":
            lines.append(f"trajectories: {len(val)}")
            for t in val:
                extras = " ".join(f"{k}={t[k]}" for k in ("k", "alpha", "value", "morse_index", "residual") if k in t)
                lines.append(f"  {extras}")
        elif isinstance(val, dict):
            lines.append(f"{key}: " + ", ".join(f"{k}={v}" for k, v in val.items()))
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".billiards-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"billiards: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, ok = run_config(cfg)
    except (GeometryError, ConfigurationError, ResourceError, ValueError) as exc:
        print(f"billiards: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg.fmt)
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERDICT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

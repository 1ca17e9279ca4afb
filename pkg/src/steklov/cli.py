"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Set STEKLOV_OUT_DIR to write reports there instead of stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .ball_eigen import nu1_ball_sweep, sweep_to_csv
from .domains import StarDomain
from .errors import SteklovError
from .fourier import FourierSeries
from .spaces import named_space, space_from_json
from .steklov2d import DEFAULT_N, WeightedPlanarDomain, conformal_model, dtn_spectrum
from .suites import SUITES, run_suite

OUT_DIR_ENV = "STEKLOV_OUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _emit(text: str, out: str | None, default_name: str):
    path = out
    if path is None and os.environ.get(OUT_DIR_ENV):
        path = str(Path(os.environ[OUT_DIR_ENV]) / default_name)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    print(f"wrote {p}", file=sys.stderr)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def _parse_grid(spec: str):
    """``start:stop:count`` (inclusive, evenly spaced)."""
    try:
        a, b, n = spec.split(":")
        return list(np.linspace(float(a), float(b), int(n)))
    except ValueError:
        raise InputError(f"bad grid {spec!r}; expected start:stop:count") from None


def _space(name: str, n):
    if name.endswith(".json"):
        path = Path(name)
        return space_from_json(_load_json(name), path.parent)
    return named_space(name, n)


def cmd_ball_eigen(args) -> int:
    space = _space(args.space, args.n)
    radii = list(args.R or [])
    if args.R_grid:
        radii += _parse_grid(args.R_grid)
    if not radii:
        raise InputError("give at least one radius with --R or --R-grid")
    entries = nu1_ball_sweep(space, radii, workers=args.workers)
    _emit(sweep_to_csv(entries, space.label), args.out, "ball_eigen.csv")
    failed = [e for e in entries if e.result is None]
    for e in failed:
        print(f"R = {e.R!r}: {e.error}", file=sys.stderr)
    return EXIT_USAGE if failed else EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite)
    _emit(rep.to_json(), args.out, f"verify_{args.suite}.json")
    if not args.quiet:
        print(rep.summary(), file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def load_spectrum_domain(path: str) -> WeightedPlanarDomain:
    """A planar domain (``w_fourier`` given) or a star domain in a 2D ambient."""
    obj = _load_json(path)
    if not isinstance(obj, dict) or "rho_fourier" not in obj:
        raise InputError(f"{path}: expected an object with 'rho_fourier'")
    try:
        if "w_fourier" in obj:
            return WeightedPlanarDomain(FourierSeries.from_dict(obj["rho_fourier"]),
                                        FourierSeries.from_dict(obj["w_fourier"]))
        return conformal_model(StarDomain.from_dict(obj, Path(path).parent))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: bad domain description ({exc})") from None


def cmd_spectrum(args) -> int:
    dom = load_spectrum_domain(args.domain)
    spec = dtn_spectrum(dom, modes=args.modes, N=args.N)
    _emit(spec.to_json(), args.out, "spectrum.json")
    if args.densities:
        _emit(spec.densities_csv(), args.densities, "densities.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steklov", description="Steklov eigenvalue computations and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("ball-eigen", help="nu_1 of geodesic balls (CSV)")
    b.add_argument("--space", required=True, help="named space (H2, S2, Rn, CHn, ...) or a space JSON file")
    b.add_argument("--n", type=int, help="dimension for names ending in 'n'")
    b.add_argument("--R", type=float, action="append", help="radius; repeat for several")
    b.add_argument("--R-grid", help="start:stop:count")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", help="output path ('-' for stdout)")
    b.set_defaults(func=cmd_ball_eigen)

    v = sub.add_parser("verify", help="run a verification suite (JSON)")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--out")
    v.add_argument("--quiet", action="store_true", help="no summary on stderr")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="low Steklov spectrum of a domain (JSON)")
    s.add_argument("domain", help="domain JSON file")
    s.add_argument("--modes", type=int, default=6)
    s.add_argument("--N", type=int, default=DEFAULT_N)
    s.add_argument("--out")
    s.add_argument("--densities", help="also write boundary eigendensities as CSV")
    s.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SteklovError, ValueError) as exc:
        print(f"steklov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

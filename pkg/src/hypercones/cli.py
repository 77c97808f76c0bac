"""Batch command-line front end.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 for In / Holds /
all-pass, 1 for Out / FailsWithWitness / suite failure, 2 for parse
errors, 3 for dimension mismatches, 4 for ambiguous or inconclusive
results.  The default seed comes from HYPERCONE_SEED when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import autgroup, cones, faces, gallery, spectrum, suite
from .autgroup import LinearMap
from .cones import DerivedCone
from .report import InconclusiveError, Membership, Verdict

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_AMBIGUOUS = 4

_MEMBERSHIP_EXIT = {
    Membership.IN: EXIT_OK,
    Membership.OUT: EXIT_NEGATIVE,
    Membership.BOUNDARY: EXIT_AMBIGUOUS,
}
_VERDICT_EXIT = {
    Verdict.HOLDS: EXIT_OK,
    Verdict.FAILS: EXIT_NEGATIVE,
    Verdict.INCONCLUSIVE: EXIT_AMBIGUOUS,
}


class ParseFailure(Exception):
    pass


class DimensionFailure(Exception):
    pass


def _emit(data, compact: bool):
    if compact:
        sys.stdout.write(json.dumps(data, sort_keys=True, separators=(",", ":")))
    else:
        sys.stdout.write(json.dumps(data, sort_keys=True, indent=2))
    sys.stdout.write("\n")


def _diag(message: str):
    print(message, file=sys.stderr)


def _parse_point(text: str):
    try:
        return tuple(Fraction(tok.strip()) for tok in text.split(",") if tok.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseFailure(f"cannot parse point {text!r}: {exc}") from None


def _parse_cone(cone_id: str):
    try:
        return gallery.parse_cone_id(cone_id)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"cannot resolve cone id {cone_id!r}: {exc}") from None


def _check_dimension(cone, point):
    view = cones.cone_view(cone)
    if len(point) != view.nvars:
        raise DimensionFailure(
            f"point has {len(point)} coordinates, cone lives in {view.nvars}"
        )


def _load_matrix(path: str) -> LinearMap:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return LinearMap.from_json_rows(data)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"cannot load matrix from {path!r}: {exc}") from None


def _default_seed() -> int:
    raw = os.environ.get("HYPERCONE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def default_generator_model(cone) -> faces.GeneratedFaceModel:
    """Built-in extreme-ray generators for the gallery cones."""
    view = cones.cone_view(cone)
    kind = view.gallery.kind if view.gallery else None
    if kind == "Orthant":
        n = view.gallery.params["n"]
        gens = [tuple(Fraction(1 if j == i else 0) for j in range(n)) for i in range(n)]
    elif kind == "PSD":
        n = view.gallery.params["n"]
        gens = []
        for i in range(n):
            u = [Fraction(1 if j == i else 0) for j in range(n)]
            gens.append(gallery.svec(tuple(tuple(a * b for b in u) for a in u)))
        for i in range(n):
            for j in range(i + 1, n):
                u = [Fraction(1 if t in (i, j) else 0) for t in range(n)]
                gens.append(gallery.svec(tuple(tuple(a * b for b in u) for a in u)))
    elif kind == "SOC":
        n = view.gallery.params["n"]
        gens = []
        for j in range(1, n):
            for s in (1, -1):
                ray = [Fraction(1)] + [Fraction(0)] * (n - 1)
                ray[j] = Fraction(s)
                gens.append(tuple(ray))
        if n >= 3:
            ray = [Fraction(0)] * n
            ray[0], ray[1], ray[2] = Fraction(5), Fraction(3), Fraction(4)
            gens.append(tuple(ray))
    elif kind == "L1":
        gens = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)]
    else:
        raise ParseFailure(
            "no built-in generators for this cone; supply a gallery cone id"
        )
    return faces.GeneratedFaceModel(cones.cone_view(cone), gens)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_eig(args) -> int:
    cone = _parse_cone(args.cone_id)
    point = _parse_point(args.point)
    _check_dimension(cone, point)
    spec = spectrum.eigenvalues(cone, point, zero_tol=args.tol * 10)
    _emit(spec.to_json_dict(), args.json)
    return EXIT_OK


def cmd_member(args) -> int:
    cone = _parse_cone(args.cone_id)
    point = _parse_point(args.point)
    _check_dimension(cone, point)
    if isinstance(cone, DerivedCone):
        base, k = cone.base, cone.k
    else:
        base, k = cone, 0
    verdict = cones.contains_by_inequalities(base, k, point, args.tol)
    _emit(
        {
            "cone": args.cone_id,
            "verdict": verdict.value,
            "tol": args.tol,
            "point": [str(v) for v in point],
        },
        args.json,
    )
    return _MEMBERSHIP_EXIT[verdict]


def cmd_deriv(args) -> int:
    cone = _parse_cone(args.cone_id)
    if isinstance(cone, DerivedCone):
        base, offset = cone.base, cone.k
    else:
        base, offset = cone, 0
    k = offset + args.k
    if not 0 <= k <= base.d:
        raise ParseFailure(f"derivative order {k} outside 0..{base.d}")
    _emit(base.derivs[k].to_json_dict(), args.json)
    return EXIT_OK


def cmd_autcheck(args) -> int:
    cone = _parse_cone(args.cone_id)
    mapping = _load_matrix(args.matrix_file)
    view = cones.cone_view(cone)
    if mapping.n != view.nvars:
        raise DimensionFailure(
            f"matrix is {mapping.n}x{mapping.n}, cone lives in {view.nvars}"
        )
    if args.k is not None:
        if isinstance(cone, DerivedCone):
            raise ParseFailure("--k is for base cone ids; the id already has k")
        report = autgroup.check_deriv_automorphism(
            cone, args.k, mapping, samples=args.samples, seed=args.seed, tol=args.tol
        )
    else:
        report = autgroup.check_automorphism(
            cone, mapping, samples=args.samples, seed=args.seed, tol=args.tol
        )
    for warning in report.regime_warnings:
        _diag(f"warning: {warning}")
    _emit(report.to_json_dict(), args.json)
    return _VERDICT_EXIT[report.verdict]


def cmd_chain(args) -> int:
    cone = _parse_cone(args.cone_id)
    model = default_generator_model(cone)
    try:
        chain = faces.build_chain(model, args.start, seed=args.seed if args.shuffle else None)
    except faces.ChainError as exc:
        _diag(f"chain construction failed: {exc}")
        return EXIT_NEGATIVE
    _emit(chain.to_json_dict(), args.json)
    return EXIT_OK


def cmd_rogcheck(args) -> int:
    cone = _parse_cone(args.cone_id)
    model = default_generator_model(cone)
    report = faces.rog_check(model, zero_tol=args.tol * 10)
    _emit(report.to_json_dict(), args.json)
    return _VERDICT_EXIT[report.verdict]


def cmd_garding(args) -> int:
    import numpy as np

    cone = _parse_cone(args.cone_id)
    view = cones.cone_view(cone)
    rng = np.random.default_rng(args.seed)
    worst_random = float("inf")
    worst_prop = 0.0
    best_perturbed = float("inf")
    problems = []
    for i in range(args.samples):
        pts = rng.standard_normal((view.d, view.nvars))
        lam, _ = view.lambda_min(pts)
        xs = pts - (lam - 0.25)[:, None] * view.e_float[None, :]
        rep = autgroup.garding_check(view.p, view.e, xs, tol=args.tol)
        worst_random = min(worst_random, rep.details["gap"])
        if not rep.holds:
            problems.append({"kind": "random", "i": i})
    for i in range(max(args.samples // 10, 1)):
        base = rng.standard_normal(view.nvars)
        lam, _ = view.lambda_min(base[None, :])
        base = base - (lam[0] - 0.25) * view.e_float
        scalars = rng.uniform(0.5, 3.0, size=view.d)
        rep = autgroup.garding_check(
            view.p, view.e, scalars[:, None] * base[None, :], tol=args.tol
        )
        worst_prop = max(worst_prop, abs(rep.details["gap"]))
        if not rep.holds:
            problems.append({"kind": "proportional", "i": i})
    _emit(
        {
            "cone": args.cone_id,
            "samples": args.samples,
            "min_gap_random": worst_random,
            "max_gap_proportional": worst_prop,
            "problems": problems,
        },
        args.json,
    )
    return EXIT_OK if not problems else EXIT_NEGATIVE


def cmd_suite(args) -> int:
    def progress(check, elapsed):
        _diag(f"{check.name}: {check.status} ({elapsed:.2f}s)")

    try:
        result = suite.run_suite(
            seed=args.seed,
            name_filter=args.filter,
            timing=args.timing,
            progress=progress,
        )
    except ValueError as exc:
        raise ParseFailure(str(exc)) from None
    _emit(result.to_json_dict(), args.json)
    counts = result.counts
    if counts[suite.FAIL]:
        return EXIT_NEGATIVE
    if counts[suite.INCONCLUSIVE]:
        return EXIT_AMBIGUOUS
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercone",
        description="Eigenvalues, membership, facial chains and automorphism "
        "certificates for cones of real-rooted directions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, point=False):
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument(
            "--json",
            action="store_true",
            help="compact single-line JSON (default is indented)",
        )

    p = sub.add_parser("eig", help="eigenvalues of a point")
    p.add_argument("cone_id")
    p.add_argument("point", help="comma-separated rationals, e.g. 1,3/2,-0.25")
    common(p)
    p.set_defaults(fn=cmd_eig)

    p = sub.add_parser("member", help="three-valued cone membership")
    p.add_argument("cone_id")
    p.add_argument("point")
    common(p)
    p.set_defaults(fn=cmd_member)

    p = sub.add_parser("deriv", help="print the k-th derivative polynomial")
    p.add_argument("cone_id")
    p.add_argument("--k", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_deriv)

    p = sub.add_parser("autcheck", help="certify or refute a linear map")
    p.add_argument("cone_id")
    p.add_argument("matrix_file", help="JSON rows of rationals as strings")
    p.add_argument("--k", type=int, default=None,
                   help="check the k-th derivative relaxation instead")
    p.add_argument("--samples", type=int, default=800)
    common(p)
    p.set_defaults(fn=cmd_autcheck)

    p = sub.add_parser("chain", help="greedy face chain from built-in generators")
    p.add_argument("cone_id")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--shuffle", action="store_true",
                   help="shuffle candidate order under --seed")
    common(p)
    p.set_defaults(fn=cmd_chain)

    p = sub.add_parser("rogcheck", help="are all built-in generators rank one?")
    p.add_argument("cone_id")
    common(p)
    p.set_defaults(fn=cmd_rogcheck)

    p = sub.add_parser("garding", help="sampled polarized-mean inequality check")
    p.add_argument("cone_id")
    p.add_argument("--samples", type=int, default=100)
    common(p)
    p.set_defaults(fn=cmd_garding)

    p = sub.add_parser("suite", help="run the named verification checks")
    p.add_argument("--filter", default=None, help="substring of check names")
    p.add_argument("--timing", action="store_true",
                   help="include wall times in the JSON output")
    common(p)
    p.set_defaults(fn=cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the parse-error code
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except ParseFailure as exc:
        _diag(f"error: {exc}")
        return EXIT_PARSE
    except DimensionFailure as exc:
        _diag(f"error: {exc}")
        return EXIT_DIMENSION
    except InconclusiveError as exc:
        _diag(f"inconclusive: {exc}")
        return EXIT_AMBIGUOUS
    except ValueError as exc:
        _diag(f"error: {exc}")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

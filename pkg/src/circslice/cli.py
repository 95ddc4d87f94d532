"""Command-line front end: ``circslice COMMAND --spec FILE ... --seed N``."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path
import sys

import numpy as np

from . import catalog
from .bodies import InvalidBodyError
from .comparator import bp_compare, circularity_test, necessity_demo
from .functionals import (
    circularity_defect,
    closed_form_volume,
    slice_measure,
    slice_values,
    theorem1_functional,
    volume_polar,
)
from .oracle import BoundingRadiusError, constant_check, mc_volume_rejection, slice_grid_oracle
from .report import FORMATS, Report, Row, emit_report
from .sampling import QuadratureSpec, rng, sample_sphere
from .specio import BodySpec, BodyValidationError, SpecError, parse_body_spec

COMMANDS = ("volume", "slice", "functional", "defect", "circularity", "compare", "demo-necessity", "selfcheck")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_SELFCHECK = 0, 1, 2, 3

CIRCULAR = "circular (defect ≈ 0)"
NOT_CIRCULAR = "not circular (defect > 0)"
SIGNIFICANT = 5.0
GAP_TOL = 1e-9

# selfcheck: constant suite and oracle cross-validation
CONSTANT_CASES = [(1, 2), (2, 2), (3, 2), (1, 4), (2, 4)]
GRID_PAIRS = 10
GRID_N = 512
GRID_RTOL = 0.02


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    quadrature: QuadratureSpec
    tol: float = 1e-9
    format: str = "table"
    direction: tuple | None = None
    out: Path | None = None


def defect_verdict(rep) -> str:
    if rep.significance > SIGNIFICANT:
        return NOT_CIRCULAR
    if abs(rep.defect.value) <= 3 * rep.defect.std_error and rep.max_relative_gap <= GAP_TOL:
        return CIRCULAR
    return "inconclusive"


def _row(spec: BodySpec, command, est, seed, verdict="") -> Row:
    alg = spec.algebra
    return Row(spec.label, command, alg.n, alg.d, est.value, est.std_error, est.samples, seed, verdict)


def _direction(cfg: RunConfig, m: int) -> np.ndarray:
    if cfg.direction is None:
        w = np.zeros(m)
        w[0] = 1.0
        return w
    w = np.asarray(cfg.direction, dtype=float)
    if w.shape != (m,):
        raise UsageError(f"--direction needs {m} coordinates, got {w.size}")
    norm = np.linalg.norm(w)
    if norm == 0:
        raise UsageError("--direction must be nonzero")
    return w / norm


def run_command(cfg: RunConfig, bodies: list[BodySpec]) -> Report:
    q = cfg.quadrature
    seed = q.seed
    rep = Report(cfg.command)
    cmd = cfg.command

    if cmd == "selfcheck":
        return selfcheck(q)
    if cmd == "compare":
        if len(bodies) != 2:
            raise UsageError("compare needs exactly two --spec files (A then B)")
        a, b = bodies
        cr = bp_compare(a.body, b.body, q, cfg.tol)
        diff = cr.difference
        rep.rows.append(_row(a, "compare", diff, seed, cr.conclusion))
        rep.rows[-1].label = f"{a.label} vs {b.label}"
        rep.details.append(
            {
                "A": a.label,
                "B": b.label,
                "dominated": cr.dominated,
                "lines": cr.lines,
                "worst_slice_ratio": cr.worst_ratio,
                "witness_line": cr.witness,
                "volume_A": [cr.volume_a.value, cr.volume_a.std_error],
                "volume_B": [cr.volume_b.value, cr.volume_b.std_error],
                "A_circular": cr.a_circular.circular,
                "A_worst_phase_gap": cr.a_circular.worst_gap,
                "significance": cr.significance,
                "conclusion": cr.conclusion,
            }
        )
        rep.notes.append(cr.caveat)
        return rep
    if not bodies:
        raise UsageError(f"{cmd} needs at least one --spec file")

    for spec in bodies:
        body = spec.body
        if cmd == "volume":
            est = volume_polar(body, q)
            exact = closed_form_volume(body)
            verdict = "" if exact is None else f"closed form {exact:.12g}"
            rep.rows.append(_row(spec, cmd, est, seed, verdict))
        elif cmd == "slice":
            w = _direction(cfg, body.m)
            sm = slice_measure(body, w, q)
            alg = spec.algebra
            rep.rows.append(
                Row(spec.label, cmd, alg.n, alg.d, sm.value, sm.std_error, sm.rule_size,
                    seed if alg.d == 4 else None, "line " + ",".join(f"{x:.6g}" for x in w))
            )
        elif cmd == "functional":
            rep.rows.append(_row(spec, cmd, theorem1_functional(body, q), seed))
        elif cmd == "defect":
            dr = circularity_defect(body, q)
            rep.rows.append(_row(spec, cmd, dr.defect, seed, defect_verdict(dr)))
            rep.details.append(
                {
                    "label": spec.label,
                    "volume": [dr.volume.value, dr.volume.std_error],
                    "functional": [dr.functional.value, dr.functional.std_error],
                    "significance": dr.significance,
                    "paired_std_error": dr.paired_std_error,
                    "max_relative_gap": dr.max_relative_gap,
                }
            )
        elif cmd == "circularity":
            cr = circularity_test(body, q, cfg.tol, with_defect=True)
            verdict = "circular within tol" if cr.circular else "not circular (witness)"
            alg = spec.algebra
            rep.rows.append(Row(spec.label, cmd, alg.n, alg.d, cr.worst_gap, 0.0, cr.pairs, seed, verdict))
            d = {"label": spec.label, "worst_gap": cr.worst_gap, "tol": cr.tol,
                 "defect_significance": cr.defect_significance}
            if cr.witness is not None:
                d["witness"] = {"omega": cr.witness.omega, "q": cr.witness.q,
                                "relative_gap": cr.witness.relative_gap}
            rep.details.append(d)
        elif cmd == "demo-necessity":
            try:
                nr = necessity_demo(body, q, cfg.tol)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            verdict = "circularity needed" if nr.significance > SIGNIFICANT else "inconclusive"
            rep.rows.append(_row(spec, cmd, nr.gap, seed, verdict))
            rep.details.append(
                {
                    "label": spec.label,
                    "volume_original": [nr.volume_original.value, nr.volume_original.std_error],
                    "volume_circularized": [nr.volume_circularized.value, nr.volume_circularized.std_error],
                    "closed_form_original": nr.closed_form_original,
                    "max_slice_rel_diff": nr.max_slice_rel_diff,
                    "slice_lines": nr.lines,
                    "significance": nr.significance,
                    "circularized_passes_test": nr.circularized_check.circular,
                }
            )
        else:
            raise UsageError(f"unknown command {cmd!r}")
    return rep


def selfcheck(q: QuadratureSpec) -> Report:
    """Constant suite plus oracle agreement on the catalog bodies."""
    rep = Report("selfcheck")
    seed = q.seed
    for n, d in CONSTANT_CASES:
        c = constant_check(n, d, q)
        ok = c.passed
        rep.ok &= ok
        rep.rows.append(Row(f"constant n={n} d={d}", "selfcheck", n, d, c.functional.value,
                            c.functional.std_error, c.functional.samples, seed, "pass" if ok else "FAIL"))
    bodies = catalog.complex_catalog()
    for name, body in bodies.items():
        polar = volume_polar(body, q)
        try:
            rej = mc_volume_rejection(body, q.sphere_samples, seed)
        except BoundingRadiusError as exc:
            rep.ok = False
            rep.notes.append(f"{name}: {exc}")
            continue
        diff = polar.minus(rej)
        ok = abs(diff.value) <= 3 * diff.std_error
        rep.ok &= ok
        rep.rows.append(Row(f"oracle volume {name}", "selfcheck", body.algebra.n, body.algebra.d, diff.value,
                            diff.std_error, diff.samples, seed, "pass" if ok else "FAIL"))
    names = sorted(bodies)
    pick = rng(seed, "selfcheck/grid-bodies").integers(0, len(names), GRID_PAIRS)
    lines = sample_sphere(4, GRID_PAIRS, seed, label="selfcheck/grid-lines")
    for k, (i, w) in enumerate(zip(pick, lines)):
        body = bodies[names[i]]
        rule = float(slice_values(body, w[None, :], q)[0])
        grid = slice_grid_oracle(body, w, GRID_N)
        rel = abs(grid - rule) / rule
        ok = rel <= GRID_RTOL
        rep.ok &= ok
        rep.rows.append(Row(f"oracle slice {names[i]} #{k}", "selfcheck", body.algebra.n, body.algebra.d,
                            grid - rule, 0.0, GRID_N * GRID_N, seed, "pass" if ok else "FAIL"))
    return rep


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="circslice", description="Volumes, complex-line slices and circularity of star bodies.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", action="append", default=[], type=Path, metavar="PATH",
                   help="body spec file (JSON); repeat for several bodies")
    p.add_argument("--samples", type=int, default=200_000, metavar="N", help="sphere samples")
    p.add_argument("--circle-nodes", type=int, default=64, metavar="K", help="circle rule nodes (d=2)")
    p.add_argument("--phase-samples", type=int, default=512, metavar="Q", help="unit quaternion samples (d=4)")
    p.add_argument("--seed", type=int, default=None, metavar="U64", help="master seed (required)")
    p.add_argument("--tol", type=float, default=1e-9, metavar="X", help="relative tolerance for comparisons")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out", type=Path, default=None, metavar="PATH", help="write the report here")
    p.add_argument("--direction", type=str, default=None, metavar="X1,...,Xm",
                   help="line direction for `slice` (default: first basis vector)")
    p.add_argument("--chunk-size", type=int, default=2048, help="reduction chunk size")
    p.add_argument("--workers", type=int, default=1, help="evaluation threads (results do not depend on it)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        bodies = [parse_body_spec(path.read_text(), default_label=path.stem) for path in args.spec]
        deterministic = args.command == "slice" and all(b.algebra.d == 2 for b in bodies)
        if args.seed is None and not deterministic:
            raise UsageError(f"--seed is required for {args.command}")
        direction = None
        if args.direction is not None:
            try:
                direction = tuple(float(x) for x in args.direction.split(","))
            except ValueError:
                raise UsageError("--direction must be comma-separated numbers") from None
        quad = QuadratureSpec(
            sphere_samples=args.samples,
            circle_nodes=args.circle_nodes,
            phase_samples=args.phase_samples,
            seed=args.seed or 0,
            chunk_size=args.chunk_size,
            workers=args.workers,
        )
        cfg = RunConfig(args.command, quad, args.tol, args.format, direction, args.out)
        report = run_command(cfg, bodies)
    except (SpecError, UsageError, OSError) as exc:
        print(f"circslice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, (BodyValidationError, InvalidBodyError)):
            print(f"circslice: invalid body: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"circslice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = emit_report(report, args.format)
    if args.out is not None:
        args.out.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if args.command == "selfcheck" and not report.ok:
        return EXIT_SELFCHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Slicewise volume comparison and statistical circularity testing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import phase_rotate
from .bodies import Circularized, StarBody, radial
from .functionals import (
    DefectReport,
    circularity_defect,
    circularize,
    closed_form_volume,
    slice_values,
    sphere_directions,
    volume_polar,
)
from .sampling import Estimate, QuadratureSpec, map_chunks, phase_rule, sample_phase_group, sample_sphere

SAMPLED_LINES_CAVEAT = "domination is checked on the sampled lines only"

CONFIRMED = "confirmed"
INCONCLUSIVE = "inconclusive"
HYPOTHESIS_FAILED = "hypothesis failed"
CONTRADICTED = "contradicted"


@dataclass(frozen=True)
class CircularityWitness:
    omega: np.ndarray
    q: np.ndarray
    relative_gap: float


@dataclass(frozen=True)
class CircularityResult:
    circular: bool
    worst_gap: float
    tol: float
    pairs: int
    witness: CircularityWitness | None
    defect: DefectReport | None = None

    @property
    def defect_significance(self) -> float | None:
        return None if self.defect is None else self.defect.significance


def circularity_test(
    body: StarBody, spec: QuadratureSpec, tol: float = 1e-9, with_defect: bool = False
) -> CircularityResult:
    """Compare rho(q omega) with rho(omega) on random (omega, q) pairs.

    Returns the worst relative gap; a witness is attached whenever that gap
    exceeds ``tol``.  With ``with_defect`` the circularity defect is computed
    as corroborating evidence.
    """
    alg = body.algebra
    count = spec.sphere_samples
    omegas = sample_sphere(alg.m, count, spec.seed, label="circularity/directions")
    qs = sample_phase_group(alg.d, count, spec.seed, label="circularity/phases")

    def work(idx):
        w, q = omegas[idx], qs[idx]
        rotated = phase_rotate(w, q, alg.d)
        base = radial(body, w, check=False)
        moved = radial(body, rotated, check=False)
        return np.abs(moved - base) / base

    idx = np.arange(count)
    gaps = map_chunks(work, idx, spec.chunk_size, spec.workers)
    i = int(np.argmax(gaps))
    worst = float(gaps[i])
    witness = CircularityWitness(omegas[i], qs[i], worst) if worst > tol else None
    defect = circularity_defect(body, spec) if with_defect else None
    return CircularityResult(worst <= tol, worst, tol, count, witness, defect)


@dataclass(frozen=True)
class ComparisonReport:
    dominated: bool
    lines: int
    worst_ratio: float
    witness: np.ndarray | None
    volume_a: Estimate
    volume_b: Estimate
    a_circular: CircularityResult
    conclusion: str
    caveat: str = SAMPLED_LINES_CAVEAT

    @property
    def difference(self) -> Estimate:
        return self.volume_b.minus(self.volume_a)

    @property
    def significance(self) -> float:
        return self.difference.significance()


def slice_domination(a: StarBody, b: StarBody, spec: QuadratureSpec):
    """Slices of both bodies on the shared sampled lines and the worst ratio a/b."""
    lines = sphere_directions(a, spec)
    phases = phase_rule(a.algebra.d, spec)
    sa = slice_values(a, lines, spec, phases)
    sb = slice_values(b, lines, spec, phases)
    ratio = sa / sb
    return lines, sa, sb, ratio


def bp_compare(a: StarBody, b: StarBody, spec: QuadratureSpec, tol: float = 1e-9) -> ComparisonReport:
    """Check the hypotheses and the volume conclusion of a slicewise comparison.

    The conclusion vol(a) <= vol(b) is never assumed: it is reported as
    ``confirmed`` when both hypotheses hold on the sample and the volume
    gap exceeds three combined standard errors, ``inconclusive`` when it is
    within noise, and ``hypothesis failed`` when slice domination or the
    circularity of ``a`` fails.
    """
    if a.algebra != b.algebra:
        raise ValueError(f"bodies live in different spaces: {a.algebra} vs {b.algebra}")
    lines, sa, sb, ratio = slice_domination(a, b, spec)
    dominated = bool(np.all(sa <= sb * (1.0 + tol)))
    worst = int(np.argmax(ratio))
    witness = None if dominated else lines[worst]
    circ = circularity_test(a, spec, tol)
    vol_a = volume_polar(a, spec, lines)
    vol_b = volume_polar(b, spec, lines)
    diff = vol_b.minus(vol_a)
    if not (dominated and circ.circular):
        conclusion = HYPOTHESIS_FAILED
    elif diff.value < -3 * diff.std_error:
        conclusion = CONTRADICTED
    elif diff.value > 3 * diff.std_error:
        conclusion = CONFIRMED
    else:
        conclusion = INCONCLUSIVE
    return ComparisonReport(
        dominated=dominated,
        lines=len(lines),
        worst_ratio=float(ratio[worst]),
        witness=witness,
        volume_a=vol_a,
        volume_b=vol_b,
        a_circular=circ,
        conclusion=conclusion,
    )


@dataclass(frozen=True)
class NecessityReport:
    body: StarBody
    circularized: Circularized
    max_slice_rel_diff: float
    lines: int
    volume_original: Estimate
    volume_circularized: Estimate
    closed_form_original: float | None
    circularized_check: CircularityResult
    witness: CircularityWitness | None = field(default=None)

    @property
    def gap(self) -> Estimate:
        return self.volume_original.minus(self.volume_circularized)

    @property
    def significance(self) -> float:
        return self.gap.significance()


def necessity_demo(
    a: StarBody, spec: QuadratureSpec, tol: float = 1e-9, slice_lines: int = 1000
) -> NecessityReport:
    """Show that circularity of the smaller-slice body cannot be dropped.

    ``b = circularize(a)`` has exactly the slices of ``a`` (same phase rule)
    yet strictly smaller volume, so equal slices with a non-circular body on
    one side do not order the volumes.  Slices are compared on the first
    ``slice_lines`` sampled lines; volumes use the full sample.
    """
    test = circularity_test(a, spec, tol)
    if test.circular:
        raise ValueError(
            f"necessity demo needs a non-circular body; worst phase gap {test.worst_gap:.3e} <= {tol}"
        )
    b = circularize(a, spec)
    lines = sphere_directions(a, spec)
    phases = phase_rule(a.algebra.d, spec)
    probe = lines[:slice_lines]
    sa = slice_values(a, probe, spec, phases)
    sb = slice_values(b, probe, spec, phases)
    rel = float(np.max(np.abs(sa - sb) / sa))
    return NecessityReport(
        body=a,
        circularized=b,
        max_slice_rel_diff=rel,
        lines=len(probe),
        volume_original=volume_polar(a, spec, lines),
        volume_circularized=volume_polar(b, spec, lines),
        closed_form_original=closed_form_volume(a),
        circularized_check=circularity_test(b, spec, tol),
        witness=test.witness,
    )

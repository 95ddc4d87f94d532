"""Volume, line cross-sections and the circularity defect.

Inner averages over a phase orbit are always taken along the orbit of the
canonical representative ``c(omega)`` (see
:func:`~circslice.algebra.orbit_representative`).  The resulting slice
measure is therefore a function of the line alone, not of the direction
chosen to represent it, and circularized bodies are exactly phase invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from fractions import Fraction

import numpy as np

from .algebra import check_unit, orbit_points, orbit_representative
from .bodies import (
    Ball,
    Circularized,
    Ellipsoid,
    LinearImage,
    LpBall,
    Polydisc,
    StarBody,
    radial,
)
from .sampling import Estimate, QuadratureSpec, estimate_mean, map_chunks, phase_rule, sample_sphere


def gamma_half(k: int) -> float:
    """Gamma(k / 2) for a positive integer ``k`` by exact recurrence."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k % 2 == 0:
        return float(math.factorial(k // 2 - 1))
    j = (k - 1) // 2
    # Gamma(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)
    return float(Fraction(math.factorial(2 * j), 4**j * math.factorial(j))) * math.sqrt(math.pi)


def sphere_surface(m: int) -> float:
    """Surface area of the unit sphere S^{m-1} in R^m."""
    return 2.0 * math.pi ** (m / 2) / gamma_half(m)


def ball_volume(m: int, r: float = 1.0) -> float:
    return sphere_surface(m) / m * r**m


def fibre_constant(d: int) -> float:
    """Measure of the unit d-ball: converts a mean of rho^d into a slice measure."""
    return ball_volume(d)


def line_functional_constant(n: int, d: int) -> float:
    """Normalising constant of the mean n-th power of slice measures.

    1/n! for complex lines; 2^n/(2n)! for quaternionic lines (the value for
    which the unit ball of H^n is an equality case).
    """
    if d == 2:
        return 1.0 / math.factorial(n)
    if d == 4:
        return 2.0**n / math.factorial(2 * n)
    raise ValueError("d must be 2 or 4")


def orbit_powers(body: StarBody, omega: np.ndarray, phases: np.ndarray, check: bool = False) -> np.ndarray:
    """``rho(q_k c(omega))^d`` for each phase ``q_k``; shape ``omega.shape[:-1] + (K,)``."""
    d, m = body.algebra.d, body.m
    omega = np.asarray(omega, dtype=float)
    lead = omega.shape[:-1]
    c = orbit_representative(omega.reshape(-1, m), d)
    pts = orbit_points(c, phases).reshape(lead + (len(phases), m))
    if check:
        rho = radial(body, pts, check=False)
    else:
        rho = body._rho(pts)
    return rho**d


def _fibre_means(body: StarBody, omegas: np.ndarray, phases: np.ndarray, spec: QuadratureSpec):
    """Per direction: (mean_k rho^{dn}, mean_k rho^d) over the orbit rule."""
    n = body.algebra.n

    def work(w):
        t = orbit_powers(body, w, phases, check=True)
        return np.stack([np.mean(t**n, axis=-1), np.mean(t, axis=-1)], axis=-1)

    out = map_chunks(work, omegas, _batch(spec, len(phases) * body.m), spec.workers)
    return out[:, 0], out[:, 1]


def _batch(spec: QuadratureSpec, cost: int) -> int:
    # keeps orbit tables near 1 MB; values are pointwise so batching never changes results
    return max(1, min(spec.chunk_size, (1 << 17) // cost))


def sphere_directions(body: StarBody, spec: QuadratureSpec) -> np.ndarray:
    """The shared sphere sample used by every sphere integral of ``spec``."""
    return sample_sphere(body.m, spec.sphere_samples, spec.seed)


def radial_values(body: StarBody, omegas: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    return map_chunks(lambda w: radial(body, w, check=False), omegas, spec.chunk_size, spec.workers)


def volume_polar(body: StarBody, spec: QuadratureSpec, omegas: np.ndarray | None = None) -> Estimate:
    """vol(D) = |S^{m-1}|/m * E[rho(omega)^m] for uniform omega."""
    m = body.m
    if omegas is None:
        omegas = sphere_directions(body, spec)
    rho = radial_values(body, omegas, spec)
    return estimate_mean(rho**m, spec.chunk_size).scaled(sphere_surface(m) / m)


def closed_form_volume(body: StarBody) -> float | None:
    """Exact volume for bodies with a known formula, else None."""
    m = body.m
    if isinstance(body, Ball):
        return ball_volume(m, body.r)
    if isinstance(body, Ellipsoid):
        return ball_volume(m) / math.sqrt(np.linalg.det(body.A))
    if isinstance(body, Polydisc):
        d = body.algebra.d
        return math.prod(ball_volume(d, r) for r in body.radii)
    if isinstance(body, LpBall):
        p, r = body.p, body.r
        if p == math.inf:
            return (2.0 * r) ** m
        if p == 1.0:
            return (2.0 * r) ** m / math.factorial(m)
        if p == 2.0:
            return ball_volume(m, r)
        return (2.0 * math.gamma(1.0 + 1.0 / p)) ** m / math.gamma(1.0 + m / p) * r**m
    if isinstance(body, LinearImage):
        inner = closed_form_volume(body.inner)
        if inner is None:
            return None
        return abs(float(np.linalg.det(body.T))) * inner
    return None


@dataclass(frozen=True)
class SliceMeasure:
    """Slice measure of one line; ``std_error`` is 0 for the deterministic circle rule."""

    line: np.ndarray
    value: float
    std_error: float
    rule_size: int


def slice_values(body: StarBody, omegas: np.ndarray, spec: QuadratureSpec, phases=None) -> np.ndarray:
    """d-dimensional measure of D cut by the line through each row of ``omegas``."""
    d = body.algebra.d
    if phases is None:
        phases = phase_rule(d, spec)

    def work(w):
        return fibre_constant(d) * np.mean(orbit_powers(body, w, phases, check=True), axis=-1)

    omegas = np.atleast_2d(omegas)
    return map_chunks(work, omegas, _batch(spec, len(phases) * body.m), spec.workers)


def slice_measure(body: StarBody, omega, spec: QuadratureSpec) -> SliceMeasure:
    """Area (d = 2) or 4-volume (d = 4) of D intersected with the line of ``omega``."""
    omega = check_unit(np.asarray(omega, dtype=float))
    d = body.algebra.d
    phases = phase_rule(d, spec)
    value = float(slice_values(body, omega[None, :], spec, phases)[0])
    se = 0.0
    if d == 4:
        t = fibre_constant(d) * orbit_powers(body, omega[None, :], phases, check=True)[0]
        se = float(np.std(t, ddof=1) / np.sqrt(len(t))) if len(t) > 1 else math.inf
    return SliceMeasure(omega, value, se, len(phases))


def theorem1_functional(body: StarBody, spec: QuadratureSpec, omegas: np.ndarray | None = None) -> Estimate:
    """c_{n,d} * E_line[slice^n] over lines through uniform sphere directions."""
    n, d = body.algebra.n, body.algebra.d
    if omegas is None:
        omegas = sphere_directions(body, spec)
    s = slice_values(body, omegas, spec)
    return estimate_mean(s**n, spec.chunk_size).scaled(line_functional_constant(n, d))


@dataclass(frozen=True)
class DefectReport:
    volume: Estimate
    functional: Estimate
    defect: Estimate
    paired_std_error: float
    max_relative_gap: float
    min_gap: float

    @property
    def significance(self) -> float:
        return self.defect.significance()


def circularity_defect(body: StarBody, spec: QuadratureSpec) -> DefectReport:
    """Volume minus the line functional, both from the same sphere draws.

    The volume term is the orbit-averaged polar integral, so the defect is
    the sample mean of pointwise Jensen gaps
    ``mean_k (rho^d)^n - (mean_k rho^d)^n``, each nonnegative for the
    discrete phase measure.  ``defect.std_error`` combines the two standard
    errors in quadrature; the (smaller) standard error of the paired
    differences is reported separately.
    """
    n, d, m = body.algebra.n, body.algebra.d, body.m
    omegas = sphere_directions(body, spec)
    phases = phase_rule(d, spec)
    high, low = _fibre_means(body, omegas, phases, spec)
    vol_scale = sphere_surface(m) / m
    volume = estimate_mean(high, spec.chunk_size).scaled(vol_scale)
    slices = fibre_constant(d) * low
    functional = estimate_mean(slices**n, spec.chunk_size).scaled(line_functional_constant(n, d))
    gaps = high - low**n
    paired = estimate_mean(gaps, spec.chunk_size).scaled(vol_scale)
    defect = volume.minus(functional)
    return DefectReport(
        volume=volume,
        functional=functional,
        defect=defect,
        paired_std_error=paired.std_error,
        max_relative_gap=float(np.max(np.abs(gaps) / high)),
        min_gap=float(np.min(gaps)),
    )


def circularize(body: StarBody, spec: QuadratureSpec) -> Circularized:
    """Circular body with the same line cross-sections as ``body``.

    Uses the phase rule of ``spec`` (K circle nodes for d = 2, the seeded
    S^3 sample for d = 4); slices of input and output agree when measured
    with that same rule.
    """
    return Circularized(body, phase_rule(body.algebra.d, spec))

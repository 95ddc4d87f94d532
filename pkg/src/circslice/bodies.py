"""Star bodies represented by their radial functions.

Every body knows its ambient :class:`~circslice.algebra.Algebra` and
evaluates ``rho(omega) = max{t >= 0 : t omega in D}`` on arrays of unit
directions of shape ``(..., m)``.  Bodies are immutable; evaluation is a pure
function and safe to call from several threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from .algebra import Algebra, block_norms, blocks, check_unit, commutes_with_phases


class InvalidBodyError(ValueError):
    """A radial function produced a non-finite or non-positive value."""

    def __init__(self, variant: str, message: str):
        super().__init__(f"{variant}: {message}")
        self.variant = variant


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class StarBody:
    """Base class.  Subclasses implement ``_rho`` on unit directions."""

    algebra: Algebra

    @property
    def kind(self) -> str:
        return type(self).__name__

    @property
    def m(self) -> int:
        return self.algebra.m

    @property
    def known_circular(self) -> bool:
        return False

    def children(self) -> tuple["StarBody", ...]:
        return ()

    def _rho(self, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, omega) -> np.ndarray:
        return radial(self, omega)


def _check_dim(body: StarBody, omega: np.ndarray):
    if omega.shape[-1] != body.m:
        raise ValueError(f"direction has {omega.shape[-1]} coordinates, {body.kind} lives in R^{body.m}")


def _bad(values: np.ndarray) -> np.ndarray:
    return ~np.isfinite(values) | (values <= 0)


def _locate(body: StarBody, omega: np.ndarray) -> StarBody:
    """Deepest sub-body whose radial function misbehaves on ``omega``."""
    for child in body.children():
        with np.errstate(all="ignore"):
            if np.any(_bad(child._rho(omega))):
                return _locate(child, _child_directions(body, child, omega))
    return body


def _child_directions(parent: StarBody, child: StarBody, omega: np.ndarray) -> np.ndarray:
    if isinstance(parent, LinearImage):
        u = omega @ parent._Tinv.T
        return u / np.linalg.norm(u, axis=-1, keepdims=True)
    return omega


def radial(body: StarBody, omega, check: bool = True) -> np.ndarray:
    """Radial function of ``body`` at unit direction(s) ``omega``.

    Raises :class:`InvalidBodyError` naming the offending variant when any
    value is non-finite or non-positive.  Pass ``check=False`` for unit-norm
    checking to be skipped on trusted internal inputs.
    """
    omega = np.asarray(omega, dtype=float)
    _check_dim(body, omega)
    if check:
        check_unit(omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.asarray(body._rho(omega), dtype=float)
    if np.any(_bad(rho)):
        culprit = _locate(body, omega)
        worst = rho[_bad(rho)].ravel()[0]
        raise InvalidBodyError(culprit.kind, f"radial function returned {worst!r}")
    return rho


@dataclass(frozen=True, eq=False)
class Ball(StarBody):
    r: float
    algebra: Algebra

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"ball radius must be positive and finite, got {self.r}")

    @property
    def known_circular(self):
        return True

    def _rho(self, omega):
        return np.full(omega.shape[:-1], float(self.r))


@dataclass(frozen=True, eq=False)
class Ellipsoid(StarBody):
    """The region {x : x^T A x <= 1} for a symmetric positive-definite ``A``."""

    A: np.ndarray
    algebra: Algebra

    def __post_init__(self):
        A = _frozen(self.A)
        m = self.algebra.m
        if A.shape != (m, m):
            raise ValueError(f"ellipsoid matrix must be {m}x{m}, got {A.shape}")
        if not np.allclose(A, A.T, rtol=0, atol=1e-12 * np.max(np.abs(A))):
            raise ValueError("ellipsoid matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(A)) <= 0:
            raise ValueError("ellipsoid matrix must be positive definite")
        object.__setattr__(self, "A", A)

    @property
    def known_circular(self):
        return commutes_with_phases(self.A, self.algebra)

    def _rho(self, omega):
        return 1.0 / np.sqrt(np.einsum("...i,ij,...j->...", omega, self.A, omega))


@dataclass(frozen=True, eq=False)
class Polydisc(StarBody):
    """Product of block discs |z_i| <= r_i (balls of R^4 when d = 4)."""

    radii: tuple
    algebra: Algebra

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) != self.algebra.n:
            raise ValueError(f"polydisc needs {self.algebra.n} radii, got {len(radii)}")
        if not all(r > 0 and math.isfinite(r) for r in radii):
            raise ValueError(f"polydisc radii must be positive, got {radii}")
        object.__setattr__(self, "radii", radii)

    @property
    def known_circular(self):
        return True

    def _rho(self, omega):
        norms = block_norms(omega, self.algebra.d)
        with np.errstate(divide="ignore"):
            return np.min(np.asarray(self.radii) / norms, axis=-1)


@dataclass(frozen=True, eq=False)
class LpBall(StarBody):
    """Real l_p ball {x : ||x||_p <= r}; ``p = inf`` is the cube [-r, r]^m."""

    p: float
    r: float
    algebra: Algebra

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1:
            raise ValueError(f"l_p exponent must be in [1, inf], got {self.p}")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"l_p ball radius must be positive, got {self.r}")
        object.__setattr__(self, "p", p)

    @property
    def known_circular(self):
        # only the Euclidean ball is phase invariant
        return self.p == 2.0

    def _rho(self, omega):
        return self.r / np.linalg.norm(omega, ord=self.p, axis=-1)


@dataclass(frozen=True, eq=False)
class LinearImage(StarBody):
    """The image T(inner) under an invertible linear map."""

    T: np.ndarray
    inner: StarBody

    def __post_init__(self):
        T = _frozen(self.T)
        m = self.inner.m
        if T.shape != (m, m):
            raise ValueError(f"linear map must be {m}x{m}, got {T.shape}")
        if abs(np.linalg.det(T)) < 1e-300 or np.linalg.cond(T) > 1e12:
            raise ValueError("linear map must be invertible")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "_Tinv", _frozen(np.linalg.inv(T)))
        c = T[0, 0]
        object.__setattr__(self, "_scalar", c if c > 0 and np.array_equal(T, c * np.eye(m)) else None)

    @property
    def algebra(self):
        return self.inner.algebra

    @property
    def known_circular(self):
        return self.inner.known_circular and commutes_with_phases(self.T, self.algebra)

    def children(self):
        return (self.inner,)

    def _rho(self, omega):
        if self._scalar is not None:
            return self._scalar * self.inner._rho(omega)
        u = omega @ self._Tinv.T
        scale = np.linalg.norm(u, axis=-1)
        return self.inner._rho(u / scale[..., None]) / scale


@dataclass(frozen=True, eq=False)
class _Binary(StarBody):
    left: StarBody
    right: StarBody

    def __post_init__(self):
        if self.left.algebra != self.right.algebra:
            raise ValueError(f"cannot combine bodies in {self.left.algebra} and {self.right.algebra}")

    @property
    def algebra(self):
        return self.left.algebra

    @property
    def known_circular(self):
        return self.left.known_circular and self.right.known_circular

    def children(self):
        return (self.left, self.right)


class Intersection(_Binary):
    def _rho(self, omega):
        return np.minimum(self.left._rho(omega), self.right._rho(omega))


class Union(_Binary):
    def _rho(self, omega):
        return np.maximum(self.left._rho(omega), self.right._rho(omega))


# Perturbation catalog.  Each entry is an even function of the direction
# with values in [-1, 1]; ``phase_invariant`` marks those constant on orbits.


@dataclass(frozen=True)
class Perturbation:
    name: str
    func: Callable[[np.ndarray, Algebra], np.ndarray]
    phase_invariant: bool
    min_dim: int = 2
    min_blocks: int = 1


def _re_square(w, alg):
    return w[..., 0] ** 2 - w[..., 1] ** 2


def _cross(w, alg):
    return 2.0 * w[..., 0] * w[..., 2]


def _axis_quartic(w, alg):
    return 2.0 * w[..., 0] ** 4 - 1.0


def _block_contrast(w, alg):
    b = np.sum(blocks(w, alg.d) ** 2, axis=-1)
    return b[..., 0] - b[..., 1]


PERTURBATIONS = {
    p.name: p
    for p in [
        Perturbation("re_square", _re_square, phase_invariant=False),
        Perturbation("cross", _cross, phase_invariant=False, min_dim=3),
        Perturbation("axis_quartic", _axis_quartic, phase_invariant=False),
        Perturbation("block_contrast", _block_contrast, phase_invariant=True, min_blocks=2),
    ]
}


@dataclass(frozen=True, eq=False)
class RadialPerturbation(StarBody):
    """Radial function ``rho_inner * (1 + amplitude * f)`` with ``f`` from the catalog."""

    inner: StarBody
    amplitude: float
    perturbation: str = "re_square"

    def __post_init__(self):
        if self.perturbation not in PERTURBATIONS:
            raise ValueError(
                f"unknown perturbation {self.perturbation!r}; choose from {sorted(PERTURBATIONS)}"
            )
        f = PERTURBATIONS[self.perturbation]
        if self.inner.m < f.min_dim or self.inner.algebra.n < f.min_blocks:
            raise ValueError(f"perturbation {f.name!r} is not defined in {self.inner.algebra}")
        # |f| <= 1 so this keeps 1 + amplitude * f > 0
        if not abs(self.amplitude) < 1:
            raise ValueError(f"perturbation amplitude must satisfy |amplitude| < 1, got {self.amplitude}")

    @property
    def algebra(self):
        return self.inner.algebra

    @property
    def known_circular(self):
        return self.inner.known_circular and PERTURBATIONS[self.perturbation].phase_invariant

    def children(self):
        return (self.inner,)

    def _rho(self, omega):
        f = PERTURBATIONS[self.perturbation].func(omega, self.algebra)
        return self.inner._rho(omega) * (1.0 + self.amplitude * f)


@dataclass(frozen=True, eq=False)
class CustomRadial(StarBody):
    """A body given by an arbitrary vectorised radial evaluator."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    algebra: Algebra
    circular: bool = False
    label: str = "custom"

    @property
    def known_circular(self):
        return self.circular

    def _rho(self, omega):
        return np.asarray(self.evaluator(omega), dtype=float)


@dataclass(frozen=True, eq=False)
class Circularized(StarBody):
    """Phase-averaged body produced by :func:`circslice.functionals.circularize`.

    ``rho_c(omega)^d`` is the mean of ``rho(q c(omega))^d`` over the rule's
    phases ``q``, where ``c(omega)`` is the orbit representative, so the
    result is exactly invariant under the phase action.
    """

    inner: StarBody
    phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "phases", _frozen(self.phases))

    @property
    def algebra(self):
        return self.inner.algebra

    @property
    def known_circular(self):
        return True

    def children(self):
        return (self.inner,)

    def _rho(self, omega):
        from .functionals import orbit_powers

        d, m = self.algebra.d, self.m
        flat = omega.reshape(-1, m)
        step = max(1, (1 << 17) // (len(self.phases) * m))
        out = np.empty(len(flat))
        for s in range(0, len(flat), step):
            t = orbit_powers(self.inner, flat[s:s + step], self.phases)
            out[s:s + step] = np.mean(t, axis=-1) ** (1.0 / d)
        return out.reshape(omega.shape[:-1])


def ball(r: float = 1.0, n: int = 2, d: int = 2) -> Ball:
    return Ball(r, Algebra(d, n))


def cube(r: float = 1.0, n: int = 2, d: int = 2) -> LpBall:
    return LpBall(math.inf, r, Algebra(d, n))


@dataclass(frozen=True)
class ValidationFailure:
    check: str
    direction: np.ndarray
    value: float
    mirror_value: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    probes: int
    worst_symmetry: float
    max_radial: float
    failures: tuple

    def summary(self) -> str:
        if self.ok:
            return f"valid ({self.probes} probes, worst symmetry gap {self.worst_symmetry:.2e})"
        f = self.failures[0]
        return f"{f.check} failure at direction {np.array2string(f.direction, precision=6)}: value {f.value!r}"


def validate_body(
    body: StarBody, probes: int = 1000, seed: int = 0, bound: float = 1e12, sym_tol: float = 1e-9
) -> ValidationReport:
    """Probe positivity, boundedness and origin symmetry on random directions.

    Never raises for a misbehaving body; failures are listed in the report
    (at most a few per check).
    """
    from .sampling import sample_sphere

    if probes < 1:
        raise ValueError("probes must be >= 1")
    omega = sample_sphere(body.m, probes, seed, label="validate")
    with np.errstate(all="ignore"):
        rho = np.asarray(body._rho(omega), dtype=float)
        mirror = np.asarray(body._rho(-omega), dtype=float)
    failures = []

    def record(check, mask, values, mirror_values=None):
        for i in np.flatnonzero(mask)[:3]:
            mv = None if mirror_values is None else float(mirror_values[i])
            failures.append(ValidationFailure(check, omega[i], float(values[i]), mv))

    record("finite", ~np.isfinite(rho), rho)
    record("positivity", np.isfinite(rho) & (rho <= 0), rho)
    record("boundedness", np.isfinite(rho) & (rho > bound), rho)
    good = np.isfinite(rho) & np.isfinite(mirror) & (rho > 0)
    sym = np.zeros_like(rho)
    sym[good] = np.abs(mirror[good] - rho[good]) / rho[good]
    record("symmetry", good & (sym > sym_tol), rho, mirror)
    worst = float(np.max(sym)) if good.any() else math.inf
    return ValidationReport(
        ok=not failures,
        probes=probes,
        worst_symmetry=worst,
        max_radial=float(np.max(rho[good])) if good.any() else math.nan,
        failures=tuple(failures),
    )

"""Block algebra for C^n and H^n viewed as real Euclidean space.

A point of R^m, m = d*n, is split into n consecutive blocks of d real
coordinates.  For d = 2 each block is a complex number (x, y) = x + iy; for
d = 4 it is a quaternion (a, b, c, d) = a + bi + cj + dk with Hamilton's
convention ij = k.  Unit scalars ("phases") act on a point by left
multiplication of every block.

All functions are vectorised over leading axes: directions have shape
``(..., m)`` and phases have shape ``(..., d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Algebra:
    """Block dimension ``d`` (2 complex, 4 quaternionic) and block count ``n``."""

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (2, 4):
            raise ValueError(f"block dimension d must be 2 or 4, got {self.d}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"block count n must be a positive integer, got {self.n}")

    @classmethod
    def complex(cls, n: int) -> "Algebra":
        return cls(2, n)

    @classmethod
    def quaternion(cls, n: int) -> "Algebra":
        return cls(4, n)

    @property
    def m(self) -> int:
        """Ambient real dimension."""
        return self.d * self.n

    @property
    def name(self) -> str:
        return "C" if self.d == 2 else "H"

    def __str__(self):
        return f"{self.name}^{self.n}"


def blocks(x: np.ndarray, d: int) -> np.ndarray:
    """View ``(..., m)`` as ``(..., m // d, d)``."""
    x = np.asarray(x, dtype=float)
    return x.reshape(x.shape[:-1] + (x.shape[-1] // d, d))


def block_norms(x: np.ndarray, d: int) -> np.ndarray:
    return np.sqrt(np.sum(blocks(x, d) ** 2, axis=-1))


def check_unit(x: np.ndarray, tol: float = UNIT_TOL, what: str = "direction") -> np.ndarray:
    """Return ``x`` as a float array, raising if any row is not a unit vector."""
    x = np.asarray(x, dtype=float)
    err = np.abs(np.linalg.norm(x, axis=-1) - 1.0)
    if np.any(err > tol):
        raise ValueError(f"{what} must have unit norm (max deviation {float(np.max(err)):.3e})")
    return x


def phase_from_angle(theta) -> np.ndarray:
    """Unit complex number e^{i theta} as ``(cos theta, sin theta)``."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def identity_phase(d: int) -> np.ndarray:
    q = np.zeros(d)
    q[0] = 1.0
    return q


def conjugate(q: np.ndarray) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1.0
    return q


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product ``p * q`` of quaternion arrays (broadcasting)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    a2, b2, c2, d2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def cmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Complex product of ``(re, im)`` pair arrays (broadcasting)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.stack(
        [
            p[..., 0] * q[..., 0] - p[..., 1] * q[..., 1],
            p[..., 0] * q[..., 1] + p[..., 1] * q[..., 0],
        ],
        axis=-1,
    )


def phase_rotate(omega: np.ndarray, q: np.ndarray, d: int | None = None) -> np.ndarray:
    """Left-multiply every d-block of ``omega`` by the unit scalar ``q``.

    ``omega`` has shape ``(..., m)`` and ``q`` shape ``(..., d)``; leading
    axes broadcast against each other, so ``omega[:, None, :]`` with ``q`` of
    shape ``(K, d)`` gives the full ``(N, K, m)`` orbit table.
    """
    q = np.asarray(q, dtype=float)
    if d is None:
        d = q.shape[-1]
    if q.shape[-1] != d:
        raise ValueError(f"phase has {q.shape[-1]} components, expected {d}")
    b = blocks(omega, d)
    qb = q[..., None, :]
    out = cmul(qb, b) if d == 2 else qmul(qb, b)
    return out.reshape(out.shape[:-2] + (out.shape[-2] * d,))


def left_matrices(q: np.ndarray) -> np.ndarray:
    """Real d x d matrices of left multiplication by each phase, shape ``(..., d, d)``."""
    q = np.asarray(q, dtype=float)
    d = q.shape[-1]
    basis = np.eye(d)
    prod = cmul(q[..., None, :], basis) if d == 2 else qmul(q[..., None, :], basis)
    # prod[..., j, :] = q * e_j is column j
    return np.swapaxes(prod, -1, -2)


def orbit_points(omega: np.ndarray, q: np.ndarray) -> np.ndarray:
    """All rotations ``q_k omega`` as one matrix product, shape ``(B, K, m)``.

    Same values as ``phase_rotate(omega[:, None, :], q)`` up to rounding.
    """
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    q = np.atleast_2d(q)
    K, d = q.shape
    B, m = omega.shape
    n = m // d
    W = left_matrices(q).transpose(2, 0, 1).reshape(d, K * d)
    out = omega.reshape(B * n, d) @ W
    return out.reshape(B, n, K, d).transpose(0, 2, 1, 3).reshape(B, K, m)


def plane_point(omega: np.ndarray, s, q: np.ndarray) -> np.ndarray:
    """The point ``s * (q omega)`` of the d-plane through ``omega``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("plane radius s must be nonnegative")
    return s[..., None] * phase_rotate(omega, q)


def orbit_representative(omega: np.ndarray, d: int) -> np.ndarray:
    """Canonical point of the phase orbit of ``omega``.

    The block of largest norm is rotated onto the positive real axis.  Every
    point of the orbit {q omega} maps to the same representative (up to
    rounding), so functions of the representative are exactly phase invariant.
    """
    omega = np.asarray(omega, dtype=float)
    b = blocks(omega, d)
    norms = np.sqrt(np.sum(b**2, axis=-1))
    j = np.argmax(norms, axis=-1)
    lead = np.take_along_axis(b, j[..., None, None], axis=-2)[..., 0, :]
    lead_norm = np.take_along_axis(norms, j[..., None], axis=-1)
    q = conjugate(lead) / lead_norm
    return phase_rotate(omega, q, d)


def phase_generators(algebra: Algebra) -> list[np.ndarray]:
    """Real m x m matrices whose commutant is the set of phase-equivariant maps.

    For d = 2 this is multiplication by i; for d = 4 left multiplication by
    i and j (k = ij is then automatic).
    """
    d, n = algebra.d, algebra.n
    units = [1] if d == 2 else [1, 2]
    gens = []
    for u in units:
        e = identity_phase(d) * 0.0
        e[u] = 1.0
        # column c of the block matrix is e * basis_c
        basis = np.eye(d)
        block = (cmul(e, basis) if d == 2 else qmul(e, basis)).T
        gens.append(np.kron(np.eye(n), block))
    return gens


def commutes_with_phases(M: np.ndarray, algebra: Algebra, rtol: float = 1e-12) -> bool:
    M = np.asarray(M, dtype=float)
    scale = max(float(np.max(np.abs(M))), 1.0)
    return all(np.max(np.abs(M @ G - G @ M)) <= rtol * scale for G in phase_generators(algebra))


def complex_to_real(H) -> np.ndarray:
    """Realification of a complex n x n matrix acting on C^n = R^{2n}."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    R = np.empty((2 * n, 2 * n))
    R[0::2, 0::2] = H.real
    R[0::2, 1::2] = -H.imag
    R[1::2, 0::2] = H.imag
    R[1::2, 1::2] = H.real
    return R


def quaternion_angle_pair(theta: float, axis=(1.0, 0.0, 0.0)) -> np.ndarray:
    """Unit quaternion cos(theta) + sin(theta) u for a unit imaginary axis u."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    return np.concatenate([[math.cos(theta)], math.sin(theta) * u])

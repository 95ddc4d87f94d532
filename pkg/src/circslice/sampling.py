"""Seeded sampling on spheres and phase groups, and error-carrying means.

Randomness is drawn from independent substreams of one master seed.  A
substream is identified by a label such as ``"sphere"`` or ``"rejection"``;
the label is hashed into the ``spawn_key`` of a :class:`numpy.random.SeedSequence`,
so adding a new label never perturbs the draws of existing ones.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import zlib

import numpy as np

from .algebra import phase_from_angle

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class QuadratureSpec:
    """Sample counts and seed for the nested sphere x phase integrals.

    ``workers`` only controls how many threads evaluate radial functions;
    results are bit-identical for every value.
    """

    sphere_samples: int = 200_000
    circle_nodes: int = 64
    phase_samples: int = 512
    seed: int = 0
    chunk_size: int = 2048
    workers: int = 1

    def __post_init__(self):
        if self.sphere_samples < 1:
            raise ValueError("sphere_samples must be >= 1")
        if self.circle_nodes < 4 or self.circle_nodes % 2:
            raise ValueError("circle_nodes must be even and >= 4")
        if self.phase_samples < 1:
            raise ValueError("phase_samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed <= SEED_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def replace(self, **changes) -> "QuadratureSpec":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    samples: int

    def scaled(self, c: float) -> "Estimate":
        return Estimate(c * self.value, abs(c) * self.std_error, self.samples)

    def minus(self, other: "Estimate") -> "Estimate":
        """Difference with the errors combined in quadrature."""
        return Estimate(
            self.value - other.value,
            math.hypot(self.std_error, other.std_error),
            min(self.samples, other.samples),
        )

    def significance(self) -> float:
        if self.std_error > 0:
            return self.value / self.std_error
        return math.copysign(math.inf, self.value) if self.value else 0.0

    def __str__(self):
        return f"{self.value:.6g} +/- {self.std_error:.2g} (N={self.samples})"


class NonFiniteValueError(ValueError):
    def __init__(self, index: int, value: float):
        super().__init__(f"non-finite value {value!r} at index {index}")
        self.index = index


def rng(seed: int, label: str) -> np.random.Generator:
    """Generator for the substream ``label`` of master ``seed``."""
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(key,))))


def _unit_gaussian(gen: np.random.Generator, count: int, dim: int) -> np.ndarray:
    x = gen.standard_normal((count, dim))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms == 0):
        bad = norms == 0
        x[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    return x / norms[:, None]


def sample_sphere(m: int, count: int, seed: int, label: str = "sphere") -> np.ndarray:
    """``count`` i.i.d. uniform unit vectors in R^m, shape ``(count, m)``."""
    if m < 2:
        raise ValueError("sphere dimension m must be >= 2")
    return _unit_gaussian(rng(seed, label), count, m)


def sample_phase_group(d: int, count: int, seed: int, label: str = "phase") -> np.ndarray:
    """Uniform unit complex numbers (d = 2) or unit quaternions (d = 4)."""
    if d not in (2, 4):
        raise ValueError("phase group dimension must be 2 or 4")
    return _unit_gaussian(rng(seed, label), count, d)


def circle_nodes(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Equally spaced phases e^{2 pi i k / K} with weights 1/K.

    Exact for trigonometric polynomials of degree < K.
    """
    if K < 4 or K % 2:
        raise ValueError("K must be even and >= 4")
    theta = 2.0 * np.pi * np.arange(K) / K
    return phase_from_angle(theta), np.full(K, 1.0 / K)


def phase_rule(d: int, spec: QuadratureSpec) -> np.ndarray:
    """Phases used for inner (fibre) averages: circle nodes or sampled S^3."""
    if d == 2:
        return circle_nodes(spec.circle_nodes)[0]
    return sample_phase_group(4, spec.phase_samples, spec.seed)


def _chunk_sums(x: np.ndarray, chunk_size: int) -> float:
    starts = np.arange(0, x.size, chunk_size)
    return math.fsum(np.add.reduceat(x, starts))


def estimate_mean(values, chunk_size: int = 2048) -> Estimate:
    """Mean and standard error with a fixed chunked reduction order."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot estimate the mean of an empty sequence")
    bad = ~np.isfinite(x)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonFiniteValueError(i, float(x[i]))
    n = x.size
    if np.all(x == x[0]):
        return Estimate(float(x[0]), 0.0, n)
    mean = _chunk_sums(x, chunk_size) / n
    if n == 1:
        return Estimate(mean, math.inf, 1)
    ss = _chunk_sums((x - mean) ** 2, chunk_size)
    return Estimate(mean, math.sqrt(ss / (n - 1) / n), n)


def map_chunks(func, x: np.ndarray, chunk_size: int, workers: int = 1) -> np.ndarray:
    """Apply ``func`` to consecutive row chunks of ``x`` and concatenate.

    Output rows are stored by position, so the thread count cannot change
    the result.
    """
    starts = range(0, len(x), chunk_size)
    pieces = [x[s:s + chunk_size] for s in starts]
    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(func, pieces))
    else:
        out = [func(p) for p in pieces]
    return np.concatenate(out, axis=0)

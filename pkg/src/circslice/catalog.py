"""Named test bodies used by the self-check and the test suite."""

from __future__ import annotations

import math

import numpy as np

from .algebra import Algebra, complex_to_real
from .bodies import (
    Ball,
    Ellipsoid,
    Intersection,
    LinearImage,
    LpBall,
    Polydisc,
    RadialPerturbation,
    StarBody,
    Union,
)

# Hermitian positive-definite matrix on C^2; its realification commutes with i
HERMITIAN_2 = np.array([[2.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.0]])

SKEW_MAP_4 = np.array(
    [
        [1.2, 0.3, 0.0, 0.1],
        [0.0, 0.9, 0.2, 0.0],
        [0.1, 0.0, 1.1, 0.3],
        [0.0, 0.2, 0.0, 0.8],
    ]
)


def circular_ellipsoid(n: int = 2) -> Ellipsoid:
    if n != 2:
        raise ValueError("the catalog Hermitian ellipsoid is defined for n = 2")
    return Ellipsoid(complex_to_real(HERMITIAN_2), Algebra(2, 2))


def complex_catalog() -> dict[str, StarBody]:
    """Bodies in C^2 = R^4."""
    alg = Algebra(2, 2)
    b = Ball(1.0, alg)
    cube = LpBall(math.inf, 1.0, alg)
    return {
        "ball": b,
        "polydisc_1_1": Polydisc((1.0, 1.0), alg),
        "polydisc_1_2": Polydisc((1.0, 2.0), alg),
        "ellipsoid_diag": Ellipsoid(np.diag([4.0, 4.0, 1.0, 1.0]), alg),
        "ellipsoid_hermitian": circular_ellipsoid(),
        "cube": cube,
        "cross_polytope": LpBall(1.0, 1.0, alg),
        "l3_ball": LpBall(3.0, 1.0, alg),
        "skew_ball": LinearImage(SKEW_MAP_4, b),
        "skew_cube": LinearImage(SKEW_MAP_4, cube),
        "ball_cap_cube": Intersection(Ball(1.2, alg), cube),
        "ball_cup_cube": Union(Ball(1.2, alg), cube),
        "perturbed_ball": RadialPerturbation(b, 0.1, "re_square"),
        "perturbed_cross": RadialPerturbation(b, 0.2, "cross"),
        "contrast_ball": RadialPerturbation(b, 0.2, "block_contrast"),
    }


def quaternion_catalog() -> dict[str, StarBody]:
    """Bodies in H^2 = R^8."""
    alg = Algebra(4, 2)
    return {
        "ball": Ball(1.0, alg),
        "polydisc_1_1": Polydisc((1.0, 1.0), alg),
        "cube": LpBall(math.inf, 1.0, alg),
    }

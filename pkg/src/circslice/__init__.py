"""Volumes, complex-line cross-sections and circularity of star bodies in C^n and H^n."""

from .algebra import Algebra, orbit_representative, phase_from_angle, phase_rotate, plane_point
from .bodies import (
    Ball,
    Circularized,
    CustomRadial,
    Ellipsoid,
    Intersection,
    InvalidBodyError,
    LinearImage,
    LpBall,
    Polydisc,
    RadialPerturbation,
    StarBody,
    Union,
    radial,
    validate_body,
)
from .comparator import bp_compare, circularity_test, necessity_demo
from .functionals import (
    circularity_defect,
    circularize,
    closed_form_volume,
    slice_measure,
    theorem1_functional,
    volume_polar,
)
from .oracle import constant_check, mc_volume_rejection, slice_grid_oracle
from .sampling import Estimate, QuadratureSpec, circle_nodes, estimate_mean, sample_phase_group, sample_sphere

__version__ = "0.1.0"

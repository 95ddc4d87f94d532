import math

import numpy as np
import pytest

from circslice.algebra import Algebra, phase_from_angle
from circslice.bodies import Ball, LinearImage, LpBall, Polydisc, RadialPerturbation, radial
from circslice.comparator import (
    CONFIRMED,
    HYPOTHESIS_FAILED,
    INCONCLUSIVE,
    bp_compare,
    circularity_test,
    necessity_demo,
    slice_domination,
)
from circslice.functionals import slice_values
from circslice.sampling import QuadratureSpec

C2 = Algebra(2, 2)
SPEC = QuadratureSpec(sphere_samples=20_000, seed=5)
CUBE = LpBall(math.inf, 1.0, C2)


def test_circularity_of_polydisc():
    res = circularity_test(Polydisc((1, 2), C2), SPEC)
    assert res.circular and res.worst_gap <= 1e-9 and res.witness is None


def test_cube_witness():
    res = circularity_test(CUBE, SPEC)
    assert not res.circular
    assert res.worst_gap > 0.1
    assert res.worst_gap <= math.sqrt(2) - 1 + 1e-12
    w = res.witness
    # the witness reproduces its own gap
    from circslice.algebra import phase_rotate

    r0, r1 = radial(CUBE, w.omega), radial(CUBE, phase_rotate(w.omega, w.q))
    assert abs(abs(r1 - r0) / r0 - w.relative_gap) <= 1e-12


def test_cube_hand_witness():
    # e1 turned by pi/4 lands on (1, 1)/sqrt2 in the first block
    e1 = np.array([1.0, 0, 0, 0])
    from circslice.algebra import phase_rotate

    moved = phase_rotate(e1, phase_from_angle(math.pi / 4))
    assert radial(CUBE, moved) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_perturbation_witness_scales_with_amplitude():
    eps = 0.05
    res = circularity_test(RadialPerturbation(Ball(1.0, C2), eps), SPEC)
    # f = w1^2 - w2^2 swings over [-1, 1] along a phase orbit of e1
    assert 0.8 * 2 * eps < res.worst_gap <= 2 * eps / (1 - eps) + 1e-12


def test_circularity_reports_defect():
    res = circularity_test(CUBE, SPEC, with_defect=True)
    assert res.defect_significance > 5
    assert circularity_test(CUBE, SPEC).defect_significance is None


def test_compare_balls():
    rep = bp_compare(Ball(1.0, C2), Ball(1.1, C2), SPEC)
    assert rep.dominated and rep.conclusion == CONFIRMED
    assert rep.worst_ratio == pytest.approx(1 / 1.21, rel=1e-14)
    assert rep.volume_b.value / rep.volume_a.value == pytest.approx(1.1**4, rel=1e-12)


def test_compare_ball_polydisc():
    rep = bp_compare(Ball(1.0, C2), Polydisc((1, 1), C2), SPEC)
    assert rep.dominated and rep.a_circular.circular
    assert rep.conclusion == CONFIRMED and rep.significance > 5
    assert rep.witness is None
    assert "sampled lines" in rep.caveat
    # the polydisc contains the ball, so its slices are at least pi
    _, _, sb, _ = slice_domination(Ball(1.0, C2), Polydisc((1, 1), C2), SPEC)
    assert sb.min() >= math.pi * (1 - 1e-12)


def test_compare_reports_domination_failure():
    rep = bp_compare(Ball(1.01, C2), Polydisc((1, 1), C2), SPEC)
    assert not rep.dominated
    assert rep.conclusion == HYPOTHESIS_FAILED
    assert rep.worst_ratio > 1.0
    s = slice_values(Ball(1.01, C2), rep.witness[None], SPEC)[0]
    t = slice_values(Polydisc((1, 1), C2), rep.witness[None], SPEC)[0]
    assert s > t


def test_noncircular_a_is_a_hypothesis_failure():
    rep = bp_compare(CUBE, Ball(3.0, C2), SPEC)
    assert rep.dominated and not rep.a_circular.circular
    assert rep.conclusion == HYPOTHESIS_FAILED


def test_equal_bodies_are_inconclusive():
    rep = bp_compare(Polydisc((1, 2), C2), Polydisc((1, 2), C2), SPEC)
    assert rep.dominated and rep.conclusion == INCONCLUSIVE


@pytest.mark.parametrize("c", [1.0, 1.3, 2.0])
def test_scaling_equivariance(c):
    a = Polydisc((1, 2), C2)
    rep = bp_compare(a, LinearImage(c * np.eye(4), a), SPEC)
    assert rep.dominated
    assert rep.volume_b.value / rep.volume_a.value == pytest.approx(c**4, rel=1e-12)


def test_transitivity_on_shared_lines():
    a, b, c = Ball(1.0, C2), Polydisc((1, 1), C2), Polydisc((1.5, 1.5), C2)
    _, sa, sb, _ = slice_domination(a, b, SPEC)
    _, sb2, sc, _ = slice_domination(b, c, SPEC)
    np.testing.assert_array_equal(sb, sb2)
    assert np.all(sa <= sb) and np.all(sb <= sc) and np.all(sa <= sc)


def test_necessity_demo_cube():
    rep = necessity_demo(CUBE, SPEC)
    assert rep.max_slice_rel_diff <= 1e-12
    assert rep.closed_form_original == 16.0
    assert rep.volume_circularized.value < 16.0
    assert rep.significance > 5
    assert rep.circularized_check.circular
    assert rep.witness is not None


def test_necessity_gap_is_second_order():
    gaps = [necessity_demo(RadialPerturbation(Ball(1.0, C2), e), SPEC).gap.value for e in (0.1, 0.05)]
    assert gaps[0] > 0 and gaps[1] > 0
    assert 4 * 0.7 <= gaps[0] / gaps[1] <= 4 * 1.3


def test_necessity_rejects_circular():
    with pytest.raises(ValueError, match="non-circular"):
        necessity_demo(Ball(1.0, C2), SPEC)


def test_compare_needs_same_space():
    with pytest.raises(ValueError):
        bp_compare(Ball(1.0, C2), Ball(1.0, Algebra(2, 3)), SPEC)

import json
import math
from pathlib import Path

import numpy as np
import pytest

from circslice.algebra import Algebra
from circslice.bodies import Ball, CustomRadial, Intersection, LpBall, Polydisc, radial
from circslice.catalog import complex_catalog, quaternion_catalog
from circslice.sampling import sample_sphere
from circslice.specio import BodyValidationError, SpecError, dump_body_spec, parse_body_spec

SPECS = Path(__file__).resolve().parents[1] / "specs"


def test_ball_spec():
    spec = parse_body_spec('{"d": 2, "n": 2, "body": {"kind": "ball", "r": 1}}')
    assert isinstance(spec.body, Ball) and spec.body.r == 1.0 and spec.body.m == 4
    assert spec.label == "ball"


def test_nested_intersection_is_min():
    text = json.dumps({"d": 2, "n": 2, "label": "x",
                       "body": {"kind": "intersection",
                                "of": [{"kind": "ball", "r": 1.2}, {"kind": "polydisc", "radii": [1, 1]},
                                       {"kind": "lp_ball", "p": 4, "r": 1.1}]}})
    body = parse_body_spec(text).body
    w = sample_sphere(4, 300, 0)
    expect = np.minimum.reduce([radial(b, w) for b in (Ball(1.2, body.algebra), Polydisc((1, 1), body.algebra),
                                                        LpBall(4, 1.1, body.algebra))])
    np.testing.assert_array_equal(radial(body, w), expect)


def test_negative_radius_names_path():
    text = '{"d": 2, "n": 2, "body": {"kind": "union", "of": [{"kind": "ball", "r": 1}, {"kind": "ball", "r": -2}]}}'
    with pytest.raises(SpecError) as info:
        parse_body_spec(text)
    assert info.value.path == "body.of[1].r"


@pytest.mark.parametrize(
    "text,path",
    [
        ('{"d": 3, "n": 2, "body": {"kind": "ball", "r": 1}}', "d"),
        ('{"d": 2, "n": 0, "body": {"kind": "ball", "r": 1}}', "n"),
        ('{"d": 2, "n": 2}', "<document>.body"),
        ('{"d": 2, "n": 2, "body": {"kind": "blob"}}', "body.kind"),
        ('{"d": 2, "n": 2, "body": {"kind": "ball", "r": "big"}}', "body.r"),
        ('{"d": 2, "n": 2, "body": {"kind": "ellipsoid", "A": [[1, 0], [0, 1]]}}', "body.A"),
        ('{"d": 2, "n": 2, "body": {"kind": "lp_ball", "p": 0.5, "r": 1}}', "body.p"),
        ('{"d": 2, "n": 2, "body": {"kind": "polydisc", "radii": [1]}}', "body"),
        ('{"d": 2, "n": 2, "body": {"kind": "intersection", "of": [{"kind": "ball", "r": 1}]}}', "body.of"),
        ('{"d": 2, "n": 2, "body": {"kind": "perturbation", "amplitude": 1.5, "of": {"kind": "ball", "r": 1}}}',
         "body"),
    ],
)
def test_spec_errors(text, path):
    with pytest.raises(SpecError) as info:
        parse_body_spec(text)
    assert info.value.path == path


def test_json_syntax_error_has_line():
    with pytest.raises(SpecError) as info:
        parse_body_spec('{"d": 2,\n "n": 2,\n "body": {kind: ball}}')
    assert info.value.line == 3


def test_validation_failure_lists_witness():
    # a non-symmetric ellipsoid matrix is caught by construction; an indefinite one too
    with pytest.raises(SpecError):
        parse_body_spec('{"d": 2, "n": 1, "body": {"kind": "ellipsoid", "A": [[1, 0], [0, -1]]}}')
    # a huge ball is constructible but fails the boundedness check
    with pytest.raises(BodyValidationError) as info:
        parse_body_spec('{"d": 2, "n": 1, "body": {"kind": "ball", "r": 1e20}}')
    assert info.value.report.failures[0].direction is not None
    parse_body_spec('{"d": 2, "n": 1, "body": {"kind": "ball", "r": 1e20}}', validate=False)


ROUND_TRIP = {**complex_catalog(), **{f"H/{k}": v for k, v in quaternion_catalog().items()}}


@pytest.mark.parametrize("name", sorted(ROUND_TRIP))
def test_round_trip(name):
    body = ROUND_TRIP[name]
    back = parse_body_spec(dump_body_spec(body, label=name))
    assert back.label == name
    assert back.body.known_circular == body.known_circular
    w = sample_sphere(body.m, 1000, 3)
    a, b = radial(body, w), radial(back.body, w)
    assert np.max(np.abs(a - b) / a) <= 1e-15


def test_custom_bodies_cannot_be_dumped():
    with pytest.raises(ValueError):
        dump_body_spec(CustomRadial(lambda w: np.ones(w.shape[:-1]), Algebra(2, 1)))


@pytest.mark.parametrize("path", sorted(SPECS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_specs_parse(path):
    spec = parse_body_spec(path.read_text())
    assert spec.label


def test_inf_exponent():
    body = parse_body_spec('{"d": 2, "n": 2, "body": {"kind": "lp_ball", "p": "inf", "r": 1}}').body
    assert body.p == math.inf
    assert '"inf"' in dump_body_spec(body)

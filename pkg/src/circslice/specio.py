"""JSON body-spec files.

A spec file looks like::

    {"d": 2, "n": 2, "label": "unit ball",
     "body": {"kind": "intersection",
              "of": [{"kind": "ball", "r": 1.2},
                     {"kind": "lp_ball", "p": "inf", "r": 1}]}}

See ``docs/body_spec.md`` for every node kind.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np

from .algebra import Algebra
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
    validate_body,
)


class SpecError(ValueError):
    """Malformed spec; ``path`` locates the offending field (e.g. ``body.of[1].r``)."""

    def __init__(self, path: str, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{path}: {message}")
        self.path = path
        self.line = line


class BodyValidationError(ValueError):
    def __init__(self, label: str, report):
        super().__init__(f"{label}: {report.summary()}")
        self.report = report


@dataclass(frozen=True)
class BodySpec:
    label: str
    body: StarBody

    @property
    def algebra(self) -> Algebra:
        return self.body.algebra


def _field(node: dict, key: str, path: str):
    if key not in node:
        raise SpecError(f"{path}.{key}", "missing field")
    return node[key]


def _number(value, path: str, allow_inf: bool = False) -> float:
    if allow_inf and value in ("inf", "infinity", "Infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(path, f"expected a number, got {value!r}")
    return float(value)


def _matrix(value, path: str, m: int) -> np.ndarray:
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(path, "expected a numeric matrix") from None
    if a.shape != (m, m):
        raise SpecError(path, f"expected a {m}x{m} matrix, got shape {a.shape}")
    return a


def _build(node, path: str, alg: Algebra) -> StarBody:
    if not isinstance(node, dict):
        raise SpecError(path, "expected an object")
    kind = _field(node, "kind", path)

    def positive(key):
        v = _number(_field(node, key, path), f"{path}.{key}")
        if not v > 0:
            raise SpecError(f"{path}.{key}", f"must be positive, got {v:g}")
        return v

    def child(key):
        return _build(_field(node, key, path), f"{path}.{key}", alg)

    def children():
        items = _field(node, "of", path)
        if not isinstance(items, list) or len(items) < 2:
            raise SpecError(f"{path}.of", "expected a list of at least two bodies")
        return [_build(x, f"{path}.of[{i}]", alg) for i, x in enumerate(items)]

    try:
        if kind == "ball":
            return Ball(positive("r"), alg)
        if kind == "ellipsoid":
            return Ellipsoid(_matrix(_field(node, "A", path), f"{path}.A", alg.m), alg)
        if kind == "polydisc":
            radii = _field(node, "radii", path)
            if not isinstance(radii, list):
                raise SpecError(f"{path}.radii", "expected a list")
            vals = [_number(r, f"{path}.radii[{i}]") for i, r in enumerate(radii)]
            for i, r in enumerate(vals):
                if not r > 0:
                    raise SpecError(f"{path}.radii[{i}]", f"must be positive, got {r:g}")
            return Polydisc(tuple(vals), alg)
        if kind == "lp_ball":
            p = _number(_field(node, "p", path), f"{path}.p", allow_inf=True)
            if not p >= 1:
                raise SpecError(f"{path}.p", f"must be in [1, inf], got {p:g}")
            return LpBall(p, positive("r"), alg)
        if kind == "linear_image":
            return LinearImage(_matrix(_field(node, "T", path), f"{path}.T", alg.m), child("of"))
        if kind in ("intersection", "union"):
            cls = Intersection if kind == "intersection" else Union
            parts = children()
            body = parts[0]
            for p in parts[1:]:
                body = cls(body, p)
            return body
        if kind == "perturbation":
            amp = _number(_field(node, "amplitude", path), f"{path}.amplitude")
            return RadialPerturbation(child("of"), amp, node.get("f", "re_square"))
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(path, str(exc)) from None
    raise SpecError(f"{path}.kind", f"unknown body kind {kind!r}")


def parse_body_spec(
    text: str, validate: bool = True, probes: int = 256, default_label: str | None = None
) -> BodySpec:
    """Parse and validate a JSON body spec.

    Raises :class:`SpecError` (with a field path, or a line number for JSON
    syntax errors) or :class:`BodyValidationError` listing a witness direction.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("<document>", exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise SpecError("<document>", "expected a JSON object")
    d = _field(doc, "d", "<document>")
    n = _field(doc, "n", "<document>")
    if d not in (2, 4):
        raise SpecError("d", f"must be 2 or 4, got {d!r}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SpecError("n", f"must be a positive integer, got {n!r}")
    alg = Algebra(d, n)
    body = _build(_field(doc, "body", "<document>"), "body", alg)
    label = str(doc.get("label") or default_label or _default_label(body))
    if validate:
        report = validate_body(body, probes=probes, seed=0)
        if not report.ok:
            raise BodyValidationError(label, report)
    return BodySpec(label, body)


def _default_label(body: StarBody) -> str:
    return body_to_node(body)["kind"]


def _num_out(x: float):
    return "inf" if x == math.inf else float(x)


def body_to_node(body: StarBody) -> dict:
    if isinstance(body, Ball):
        return {"kind": "ball", "r": float(body.r)}
    if isinstance(body, Ellipsoid):
        return {"kind": "ellipsoid", "A": body.A.tolist()}
    if isinstance(body, Polydisc):
        return {"kind": "polydisc", "radii": list(body.radii)}
    if isinstance(body, LpBall):
        return {"kind": "lp_ball", "p": _num_out(body.p), "r": float(body.r)}
    if isinstance(body, LinearImage):
        return {"kind": "linear_image", "T": body.T.tolist(), "of": body_to_node(body.inner)}
    if isinstance(body, (Intersection, Union)):
        kind = "intersection" if isinstance(body, Intersection) else "union"
        return {"kind": kind, "of": [body_to_node(body.left), body_to_node(body.right)]}
    if isinstance(body, RadialPerturbation):
        return {
            "kind": "perturbation",
            "amplitude": float(body.amplitude),
            "f": body.perturbation,
            "of": body_to_node(body.inner),
        }
    raise ValueError(f"{body.kind} bodies cannot be written to a spec file")


def dump_body_spec(body: StarBody, label: str | None = None) -> str:
    doc = {"d": body.algebra.d, "n": body.algebra.n}
    if label is not None:
        doc["label"] = label
    doc["body"] = body_to_node(body)
    return json.dumps(doc, indent=2)

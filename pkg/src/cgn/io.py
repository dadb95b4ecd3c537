"""
JSON problem files and certificate documents.

A problem file bundles everything the command line needs::

    {
      "name": "sqrt2",
      "map": {"n": 1, "m": 1, "components": [[[1.0, [2]], [-2.0, [0]]]]},
      "outer": {"kind": "max_affine", "A": [[1.0], [-1.0]], "b": [0.0, 0.0]},
      "x0": [1.5],
      "delta": "inf",
      "eta": 1.0,
      "regularity": {"kind": "regular", "r": 0.5, "beta": 0.5},
      "majorant": {"kind": "lipschitz", "K": 2.0, "R": 0.5},
      "overrides": {"xi": 0.125, "tol_feas": 1e-12}
    }

Files are validated against :data:`PROBLEM_SCHEMA` before anything is
computed; unknown keys are rejected. Infinite reals are written as the
string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import jsonschema
import numpy as np

from .errors import SchemaError
from .majorant import CUSTOM_CATALOG, MajorantModel, majorant_from_dict, majorant_to_dict
from .outer import outer_from_dict, outer_to_dict
from .polynomial import PolynomialMap
from .problem import CompositeProblem
from .regularity import QuasiRegular, RegularPoint, Robinson, regularity_from_dict

__all__ = [
    "PROBLEM_SCHEMA",
    "CERTIFICATE_SCHEMA",
    "ProblemSpec",
    "parse_problem",
    "load_problem",
    "problem_to_dict",
    "dumps",
    "validate_certificate",
]

_number = {"type": "number"}
_extended = {"oneOf": [{"type": "number"}, {"const": "inf"}]}
_vector = {"type": "array", "items": _number}
_matrix = {"type": "array", "items": _vector}


def _obj(props, required=(), **extra):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False, **extra}


_MAP = _obj(
    {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "components": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {
                    "type": "array",
                    "prefixItems": [_number, {"type": "array", "items": {"type": "integer", "minimum": 0}}],
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
    },
    ("n", "m", "components"),
)

_OUTER = {
    "oneOf": [
        _obj({"kind": {"const": "max_affine"}, "A": _matrix, "b": _vector}, ("kind", "A", "b")),
        _obj({"kind": {"const": "l1"}, "c": _vector}, ("kind", "c")),
        _obj({"kind": {"const": "linf"}, "c": _vector}, ("kind", "c")),
    ]
}

_REGULARITY = {
    "oneOf": [
        _obj(
            {"kind": {"const": "quasi_regular"}, "r": _extended, "breakpoints": _vector, "values": _vector},
            ("kind", "r", "breakpoints", "values"),
        ),
        _obj({"kind": {"const": "regular"}, "r": _extended, "beta": _number}, ("kind", "r", "beta")),
        _obj(
            {
                "kind": {"const": "robinson"},
                "beta0": {"type": ["number", "null"]},
                "cone": _obj({"G": _matrix}, ("G",)),
                "vrep": _obj({"vertices": _matrix, "rays": _matrix}, ("vertices",)),
            },
            ("kind",),
        ),
    ]
}

_MAJORANT = {
    "oneOf": [
        _obj({"kind": {"const": "lipschitz"}, "K": _number, "R": _extended}, ("kind", "K")),
        _obj({"kind": {"const": "smale"}, "gamma": _number}, ("kind", "gamma")),
        _obj(
            {
                "kind": {"const": "custom"},
                "name": {"enum": sorted(CUSTOM_CATALOG)},
                "R": _extended,
                "params": {"type": "object", "additionalProperties": _number},
            },
            ("kind", "name", "R"),
        ),
    ]
}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cgn problem file",
    **_obj(
        {
            "name": {"type": "string"},
            "description": {"type": "string"},
            "map": _MAP,
            "outer": _OUTER,
            "x0": _vector,
            "delta": _extended,
            "eta": {"type": "number", "minimum": 1},
            "regularity": _REGULARITY,
            "majorant": _MAJORANT,
            "overrides": _obj(
                {
                    "xi": _number,
                    "alpha": _number,
                    "tol_step": {"type": "number", "exclusiveMinimum": 0},
                    "tol_feas": {"type": "number", "exclusiveMinimum": 0},
                    "max_iter": {"type": "integer", "minimum": 0},
                    "rule": {"enum": ["min_norm", "first_vertex"]},
                }
            ),
        },
        ("map", "outer", "x0"),
    ),
}

_num_or_null = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf"]}, {"type": "null"}]}

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "cgn certificate",
    **_obj(
        {
            "theorem": {"enum": ["quasi-regular", "regular", "robinson"]},
            "valid": {"type": "boolean"},
            "xi": _num_or_null,
            "alpha": _num_or_null,
            "alpha_bound": _num_or_null,
            "alpha_strict": {"type": "boolean"},
            "eta": _num_or_null,
            "delta": _num_or_null,
            "d0": _num_or_null,
            "beta_at_zero": _num_or_null,
            "beta0": _num_or_null,
            "cube_vertices": {"type": ["integer", "null"]},
            "t_star": _num_or_null,
            "radius": _num_or_null,
            "h4": {"type": "boolean"},
            "rate": {"enum": ["Q-quadratic", "Q-linear only"]},
            "checks": {
                "type": "array",
                "items": _obj(
                    {"condition": {"type": "string"}, "lhs": _num_or_null, "rhs": _num_or_null, "holds": {"type": "boolean"}},
                    ("condition", "lhs", "rhs", "holds"),
                ),
            },
            "scalar_trace": {"type": "array", "items": _num_or_null},
            "q_quadratic_constant": _num_or_null,
            "predicted_error": {"type": "array", "items": _num_or_null},
            "notes": {"type": "array", "items": {"type": "string"}},
            "name": {"type": "string"},
        },
        ("theorem", "valid", "checks", "t_star", "scalar_trace"),
    ),
}


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A parsed problem file."""

    problem: CompositeProblem
    regularity: object = None
    majorant: Optional[MajorantModel] = None
    overrides: dict = field(default_factory=dict)
    name: str = ""
    description: str = ""

    @property
    def max_iter(self):
        return int(self.overrides.get("max_iter", 100))

    @property
    def rule(self):
        return self.overrides.get("rule", "min_norm")

    @property
    def xi(self):
        return self.overrides.get("xi")

    @property
    def alpha(self):
        return self.overrides.get("alpha")


def _ext(v):
    return math.inf if v == "inf" else float(v)


def _validation_message(err):
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    return f"{where}: {err.message}"


def parse_problem(doc) -> ProblemSpec:
    """
    Validate a decoded problem document and build its objects.

    Raises
    ------
    SchemaError
        On schema violations and on data that cannot form a problem
        (dimension mismatches, unbounded outer functions, invalid constants).
    """
    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as err:
        raise SchemaError(_validation_message(err)) from None
    over = dict(doc.get("overrides", {}))
    try:
        F = PolynomialMap.from_dict(doc["map"])
        h = outer_from_dict(doc["outer"])
        kw = {k: over[k] for k in ("tol_step", "tol_feas") if k in over}
        problem = CompositeProblem(
            F, h, np.array(doc["x0"], dtype=float), delta=_ext(doc.get("delta", "inf")), eta=float(doc.get("eta", 1.0)), **kw
        )
        reg = None
        if "regularity" in doc:
            rdoc = dict(doc["regularity"])
            if "r" in rdoc:
                rdoc["r"] = _ext(rdoc["r"])
            reg = regularity_from_dict(rdoc)
        maj = None
        if "majorant" in doc:
            mdoc = dict(doc["majorant"])
            if "R" in mdoc:
                mdoc["R"] = _ext(mdoc["R"])
            maj = majorant_from_dict(mdoc)
    except SchemaError:
        raise
    except (ValueError, KeyError, TypeError) as err:
        raise SchemaError(f"invalid problem data: {err}") from None
    return ProblemSpec(problem, reg, maj, over, doc.get("name", ""), doc.get("description", ""))


def load_problem(path) -> ProblemSpec:
    """Read and parse a problem file; malformed JSON raises :class:`SchemaError`."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise SchemaError(f"malformed JSON: {err}") from None
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from None
    return parse_problem(doc)


def _ext_out(v):
    return "inf" if math.isinf(v) else float(v)


def _regularity_to_dict(reg):
    if isinstance(reg, QuasiRegular):
        return {"kind": "quasi_regular", "r": _ext_out(reg.r), "breakpoints": list(reg.breakpoints), "values": list(reg.values)}
    if isinstance(reg, RegularPoint):
        return {"kind": "regular", "r": _ext_out(reg.r), "beta": reg.beta}
    doc = {"kind": "robinson"}
    if reg.beta0 is not None:
        doc["beta0"] = reg.beta0
    if reg.cone is not None:
        doc["cone"] = {"G": reg.cone.tolist()}
    if reg.vrep is not None:
        v, r = reg.vrep
        doc["vrep"] = {"vertices": np.asarray(v).tolist(), "rays": np.asarray(r).tolist()}
    return doc


def problem_to_dict(spec: ProblemSpec) -> dict:
    """Inverse of :func:`parse_problem`."""
    p = spec.problem
    doc = {}
    if spec.name:
        doc["name"] = spec.name
    if spec.description:
        doc["description"] = spec.description
    doc.update(
        {
            "map": p.F.to_dict(),
            "outer": outer_to_dict(p.h),
            "x0": p.x0.tolist(),
            "delta": _ext_out(p.delta),
            "eta": p.eta,
        }
    )
    if spec.regularity is not None:
        doc["regularity"] = _regularity_to_dict(spec.regularity)
    if spec.majorant is not None:
        mdoc = majorant_to_dict(spec.majorant)
        if "R" in mdoc and not isinstance(mdoc["R"], str):
            mdoc["R"] = _ext_out(mdoc["R"])
        doc["majorant"] = mdoc
    if spec.overrides:
        doc["overrides"] = dict(spec.overrides)
    return doc


def dumps(doc) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def validate_certificate(doc):
    """Raise :class:`SchemaError` unless ``doc`` is a well-formed certificate document."""
    try:
        jsonschema.validate(doc, CERTIFICATE_SCHEMA)
    except jsonschema.ValidationError as err:
        raise SchemaError(_validation_message(err)) from None

"""Scenario documents.

A scenario is a flat JSON object with sections `model`, `initial_state`,
`motion`, and optional `integration`, `output`, `portrait`. Validation
errors always carry the offending key path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .constitutive import (
    DruckerPragerLike,
    GradeZeroIsotropic,
    MaterialModel,
    NormalityDirection,
    VonMises,
)
from .engine import IntegrationOptions, MaterialState
from .errors import ScenarioError
from .motions import (
    ConstantVelocityGradient,
    PiecewiseMotion,
    RigidRotation,
    SimpleShear,
    SuperposedRotation,
)
from .tensors import Sym3, inner

__all__ = ["Scenario", "PortraitSpec", "load_scenario", "parse_scenario"]


@dataclass(frozen=True)
class PortraitSpec:
    basis_a: Sym3
    basis_b: Sym3
    a_values: np.ndarray
    b_values: np.ndarray


@dataclass(frozen=True)
class Scenario:
    model: MaterialModel
    initial_state: MaterialState
    motion: PiecewiseMotion
    t_end: float
    options: IntegrationOptions
    stride: int
    out_path: str | None
    portrait: PortraitSpec | None


def _mapping(node, path):
    if not isinstance(node, dict):
        raise ScenarioError(path, f"expected an object, got {type(node).__name__}")
    return node


def _check_keys(node, path, allowed):
    for key in node:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}", "unknown key")


def _get(node, path, key, required=True, default=None):
    if key not in node:
        if required:
            raise ScenarioError(f"{path}.{key}", "missing required key")
        return default
    return node[key]


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {value!r}")
    v = float(value)
    if not np.isfinite(v):
        raise ScenarioError(path, "number must be finite")
    return v


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, f"expected an integer, got {value!r}")
    return value


def _vector(value, path, n):
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(path, f"expected a list of {n} numbers")
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(value)]


def _matrix3(value, path):
    if not isinstance(value, list) or len(value) != 3:
        raise ScenarioError(path, "expected a 3x3 nested list")
    rows = [_vector(row, f"{path}[{i}]", 3) for i, row in enumerate(value)]
    return np.array(rows)


def _parse_model(node, path):
    node = _mapping(node, path)
    _check_keys(node, path, {"elastic", "yield", "direction", "grad_eps"})
    grad_eps = _number(_get(node, path, "grad_eps", required=False, default=1e-9),
                       f"{path}.grad_eps")

    elastic_node = _mapping(_get(node, path, "elastic"), f"{path}.elastic")
    etype = _get(elastic_node, f"{path}.elastic", "type")
    if etype == "grade_zero_isotropic":
        _check_keys(elastic_node, f"{path}.elastic", {"type", "lambda_e", "mu_e"})
        try:
            elastic = GradeZeroIsotropic(
                lambda_e=_number(_get(elastic_node, f"{path}.elastic", "lambda_e",
                                      required=False, default=1.0),
                                 f"{path}.elastic.lambda_e"),
                mu_e=_number(_get(elastic_node, f"{path}.elastic", "mu_e",
                                  required=False, default=1.0),
                             f"{path}.elastic.mu_e"),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.elastic", str(exc)) from exc
    else:
        raise ScenarioError(f"{path}.elastic.type", f"unknown elastic type {etype!r}")

    yield_node = _mapping(_get(node, path, "yield"), f"{path}.yield")
    ytype = _get(yield_node, f"{path}.yield", "type")
    if ytype == "von_mises":
        _check_keys(yield_node, f"{path}.yield", {"type"})
        yield_fn = VonMises(grad_eps=grad_eps)
    elif ytype == "drucker_prager_like":
        _check_keys(yield_node, f"{path}.yield", {"type", "alpha"})
        yield_fn = DruckerPragerLike(
            alpha=_number(_get(yield_node, f"{path}.yield", "alpha"),
                          f"{path}.yield.alpha"),
            grad_eps=grad_eps,
        )
    else:
        raise ScenarioError(f"{path}.yield.type", f"unknown yield type {ytype!r}")

    direction_node = _mapping(
        _get(node, path, "direction", required=False, default={"type": "normality"}),
        f"{path}.direction",
    )
    dtype = _get(direction_node, f"{path}.direction", "type")
    if dtype == "normality":
        _check_keys(direction_node, f"{path}.direction", {"type", "c0", "c1"})
        try:
            direction = NormalityDirection(
                c0=_number(_get(direction_node, f"{path}.direction", "c0",
                                required=False, default=0.1),
                           f"{path}.direction.c0"),
                c1=_number(_get(direction_node, f"{path}.direction", "c1",
                                required=False, default=0.2),
                           f"{path}.direction.c1"),
                elastic=elastic,
                yield_fn=yield_fn,
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.direction", str(exc)) from exc
    else:
        raise ScenarioError(f"{path}.direction.type",
                            f"unknown direction type {dtype!r}")

    return MaterialModel(elastic=elastic, yield_fn=yield_fn, direction=direction)


def _parse_motion_segment(node, path):
    node = _mapping(node, path)
    mtype = _get(node, path, "type")
    if mtype == "simple_shear":
        _check_keys(node, path, {"type", "rate", "duration"})
        duration = _number(_get(node, path, "duration"), f"{path}.duration")
        return duration, SimpleShear(rate=_number(_get(node, path, "rate"),
                                                  f"{path}.rate"))
    if mtype == "constant_velocity_gradient":
        _check_keys(node, path, {"type", "L", "duration"})
        duration = _number(_get(node, path, "duration"), f"{path}.duration")
        return duration, ConstantVelocityGradient(
            _matrix3(_get(node, path, "L"), f"{path}.L")
        )
    if mtype == "rigid_rotation":
        _check_keys(node, path, {"type", "axis", "rate", "duration"})
        duration = _number(_get(node, path, "duration"), f"{path}.duration")
        try:
            motion = RigidRotation(
                axis=_vector(_get(node, path, "axis"), f"{path}.axis", 3),
                rate=_number(_get(node, path, "rate"), f"{path}.rate"),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.axis", str(exc)) from exc
        return duration, motion
    if mtype == "superposed_rotation":
        _check_keys(node, path, {"type", "spin_rate", "axis", "base"})
        base = _parse_motion(_get(node, path, "base"), f"{path}.base")
        duration = base.domain[1]
        try:
            motion = SuperposedRotation(
                base=base,
                spin_rate=_number(_get(node, path, "spin_rate"),
                                  f"{path}.spin_rate"),
                axis=_vector(_get(node, path, "axis"), f"{path}.axis", 3),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.axis", str(exc)) from exc
        return duration, motion
    raise ScenarioError(f"{path}.type", f"unknown motion type {mtype!r}")


def _parse_motion(node, path):
    if not isinstance(node, list):
        raise ScenarioError(path, "expected a list of motion segments")
    if not node:
        raise ScenarioError(path, "motion program has no segments")
    segments = []
    for i, seg in enumerate(node):
        duration, motion = _parse_motion_segment(seg, f"{path}[{i}]")
        if not duration > 0.0:
            raise ScenarioError(f"{path}[{i}].duration", "duration must be positive")
        segments.append((duration, motion))
    return PiecewiseMotion(segments)


def _parse_options(node, path):
    if node is None:
        return IntegrationOptions()
    node = _mapping(node, path)
    allowed = {"dt_max", "tol_yield", "tol_psi", "event_bisection_iters",
               "case3_probe_depth"}
    _check_keys(node, path, allowed)
    kwargs = {}
    for key in ("dt_max", "tol_yield", "tol_psi"):
        if key in node:
            kwargs[key] = _number(node[key], f"{path}.{key}")
    for key in ("event_bisection_iters", "case3_probe_depth"):
        if key in node:
            kwargs[key] = _integer(node[key], f"{path}.{key}")
    try:
        return IntegrationOptions(**kwargs)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from exc


def _parse_portrait(node, path):
    if node is None:
        return None
    node = _mapping(node, path)
    _check_keys(node, path, {"basis_a", "basis_b", "a_range", "b_range"})
    basis_a = Sym3(_vector(_get(node, path, "basis_a"), f"{path}.basis_a", 6))
    basis_b = Sym3(_vector(_get(node, path, "basis_b"), f"{path}.basis_b", 6))
    gram = (inner(basis_a, basis_a) * inner(basis_b, basis_b)
            - inner(basis_a, basis_b) ** 2)
    scale = inner(basis_a, basis_a) * inner(basis_b, basis_b)
    if scale == 0.0 or gram <= 1e-12 * scale:
        raise ScenarioError(f"{path}.basis_b",
                            "slice basis tensors are not linearly independent")

    def parse_range(key):
        r = _vector(_get(node, path, key), f"{path}.{key}", 3)
        lo, hi, count = r[0], r[1], r[2]
        n = int(count)
        if n != count or n < 1:
            raise ScenarioError(f"{path}.{key}[2]",
                                "sample count must be a positive integer")
        if n > 1 and not hi > lo:
            raise ScenarioError(f"{path}.{key}", "range must be increasing")
        return np.linspace(lo, hi, n)

    return PortraitSpec(
        basis_a=basis_a,
        basis_b=basis_b,
        a_values=parse_range("a_range"),
        b_values=parse_range("b_range"),
    )


def parse_scenario(data) -> Scenario:
    root = _mapping(data, "<root>")
    _check_keys(root, "<root>",
                {"model", "initial_state", "motion", "integration", "output",
                 "portrait"})
    model = _parse_model(_get(root, "<root>", "model"), "model")
    options = _parse_options(root.get("integration"), "integration")
    motion = _parse_motion(_get(root, "<root>", "motion"), "motion")

    state_node = _mapping(_get(root, "<root>", "initial_state"), "initial_state")
    _check_keys(state_node, "initial_state", {"stress", "hardening", "time"})
    stress = Sym3(_vector(_get(state_node, "initial_state", "stress"),
                          "initial_state.stress", 6))
    hardening = _number(_get(state_node, "initial_state", "hardening"),
                        "initial_state.hardening")
    t0 = _number(_get(state_node, "initial_state", "time", required=False,
                      default=0.0), "initial_state.time")
    if t0 != 0.0:
        raise ScenarioError("initial_state.time",
                            "motion programs start at time 0")
    f0 = model.yield_fn.value(stress)
    if f0 > hardening + options.tol_yield:
        raise ScenarioError(
            "initial_state",
            f"violates the admissibility axiom f(T0) <= k0: "
            f"f(T0) = {f0:.12g}, k0 = {hardening:.12g}",
        )
    state = MaterialState(t=t0, stress=stress, hardening=hardening)

    output_node = root.get("output")
    stride = 1
    out_path = None
    if output_node is not None:
        output_node = _mapping(output_node, "output")
        _check_keys(output_node, "output", {"stride", "path"})
        if "stride" in output_node:
            stride = _integer(output_node["stride"], "output.stride")
            if stride < 1:
                raise ScenarioError("output.stride", "stride must be at least 1")
        if "path" in output_node:
            if not isinstance(output_node["path"], str):
                raise ScenarioError("output.path", "expected a string")
            out_path = output_node["path"]

    portrait = _parse_portrait(root.get("portrait"), "portrait")
    return Scenario(
        model=model,
        initial_state=state,
        motion=motion,
        t_end=t0 + motion.domain[1],
        options=options,
        stride=stride,
        out_path=out_path,
        portrait=portrait,
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError("<file>", f"invalid JSON in {path}: {exc}") from exc
    return parse_scenario(data)

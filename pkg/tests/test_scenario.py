import copy
import json
import math

import numpy as np
import pytest

from ratepoint.constitutive import DruckerPragerLike
from ratepoint.errors import ScenarioError
from ratepoint.scenario import load_scenario, parse_scenario

MINIMAL = {
    "model": {
        "elastic": {"type": "grade_zero_isotropic"},
        "yield": {"type": "von_mises"},
    },
    "initial_state": {
        "stress": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        "hardening": 1.0,
    },
    "motion": [
        {"type": "simple_shear", "rate": 1.0, "duration": 1.0},
    ],
}


def scenario_data(**overrides):
    data = copy.deepcopy(MINIMAL)
    data.update(overrides)
    return data


def test_minimal_scenario_parses():
    sc = parse_scenario(scenario_data())
    assert sc.t_end == 1.0
    assert sc.stride == 1
    assert sc.out_path is None
    assert sc.portrait is None
    assert sc.options.dt_max == 1e-3
    assert sc.initial_state.hardening == 1.0
    assert sc.motion.domain == (0.0, 1.0)


def test_model_defaults_and_overrides():
    data = scenario_data()
    data["model"] = {
        "elastic": {"type": "grade_zero_isotropic", "lambda_e": 2.0, "mu_e": 0.5},
        "yield": {"type": "drucker_prager_like", "alpha": 0.3},
        "direction": {"type": "normality", "c0": 0.2, "c1": 0.4},
        "grad_eps": 1e-8,
    }
    sc = parse_scenario(data)
    assert sc.model.elastic.lambda_e == 2.0
    assert sc.model.elastic.mu_e == 0.5
    assert isinstance(sc.model.yield_fn, DruckerPragerLike)
    assert sc.model.yield_fn.alpha == 0.3
    assert sc.model.yield_fn.grad_eps == 1e-8
    assert sc.model.direction.c0 == 0.2
    assert sc.model.direction.c1 == 0.4


def test_unknown_keys_carry_path():
    data = scenario_data()
    data["bogus"] = 1
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "<root>.bogus" in str(err.value)

    data = scenario_data()
    data["model"]["elastic"]["nu"] = 0.3
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "model.elastic.nu" in str(err.value)


def test_missing_required_key():
    data = scenario_data()
    del data["motion"]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "motion" in str(err.value)
    assert "missing" in str(err.value)


def test_axiom_checked_at_parse():
    data = scenario_data()
    data["initial_state"] = {
        "stress": [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        "hardening": 0.5,
    }
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    msg = str(err.value)
    assert "initial_state" in msg
    assert "axiom" in msg


def test_empty_motion_program():
    data = scenario_data(motion=[])
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "no segments" in str(err.value)


def test_motion_validation_errors():
    data = scenario_data()
    data["motion"] = [{"type": "simple_shear", "rate": 1.0, "duration": -1.0}]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "motion[0].duration" in str(err.value)

    data["motion"] = [{"type": "warp_drive", "duration": 1.0}]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "motion[0].type" in str(err.value)

    data["motion"] = [{"type": "rigid_rotation", "axis": [0.0, 0.0, 0.0],
                       "rate": 1.0, "duration": 1.0}]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "motion[0].axis" in str(err.value)


def test_stress_shape_and_finiteness():
    data = scenario_data()
    data["initial_state"]["stress"] = [0.0, 0.0, 0.0]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "initial_state.stress" in str(err.value)

    data["initial_state"]["stress"] = [0.0, 0.0, 0.0, 0.0, 0.0, math.inf]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "finite" in str(err.value)


def test_bool_is_not_a_number():
    data = scenario_data()
    data["initial_state"]["hardening"] = True
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "initial_state.hardening" in str(err.value)


def test_nonzero_start_time_rejected():
    data = scenario_data()
    data["initial_state"]["time"] = 0.5
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert "initial_state.time" in str(err.value)
    data["initial_state"]["time"] = 0.0
    parse_scenario(data)


def test_integration_options():
    data = scenario_data(integration={"dt_max": 1e-4, "tol_yield": 1e-8,
                                      "event_bisection_iters": 40})
    sc = parse_scenario(data)
    assert sc.options.dt_max == 1e-4
    assert sc.options.tol_yield == 1e-8
    assert sc.options.event_bisection_iters == 40

    with pytest.raises(ScenarioError) as err:
        parse_scenario(scenario_data(integration={"dt_max": 0.0}))
    assert "integration" in str(err.value)
    with pytest.raises(ScenarioError):
        parse_scenario(scenario_data(integration={"case3_probe_depth": 1.5}))


def test_output_section():
    data = scenario_data(output={"stride": 5, "path": "out.csv"})
    sc = parse_scenario(data)
    assert sc.stride == 5
    assert sc.out_path == "out.csv"

    with pytest.raises(ScenarioError) as err:
        parse_scenario(scenario_data(output={"stride": 0}))
    assert "output.stride" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        parse_scenario(scenario_data(output={"path": 3}))
    assert "output.path" in str(err.value)


def test_portrait_section():
    data = scenario_data(portrait={
        "basis_a": [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        "basis_b": [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        "a_range": [-2.0, 2.0, 5],
        "b_range": [0.0, 0.0, 1],
    })
    sc = parse_scenario(data)
    assert np.allclose(sc.portrait.a_values, np.linspace(-2.0, 2.0, 5))
    assert list(sc.portrait.b_values) == [0.0]

    bad = scenario_data(portrait={
        "basis_a": [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        "basis_b": [2.0, -2.0, 0.0, 0.0, 0.0, 0.0],
        "a_range": [-1.0, 1.0, 3],
        "b_range": [-1.0, 1.0, 3],
    })
    with pytest.raises(ScenarioError) as err:
        parse_scenario(bad)
    assert "linearly independent" in str(err.value)


def test_portrait_range_validation():
    base = {
        "basis_a": [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        "basis_b": [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        "a_range": [-1.0, 1.0, 3],
        "b_range": [-1.0, 1.0, 3],
    }
    p = dict(base, a_range=[-1.0, 1.0, 0])
    with pytest.raises(ScenarioError) as err:
        parse_scenario(scenario_data(portrait=p))
    assert "a_range" in str(err.value)
    p = dict(base, b_range=[1.0, -1.0, 3])
    with pytest.raises(ScenarioError) as err:
        parse_scenario(scenario_data(portrait=p))
    assert "increasing" in str(err.value)
    p = dict(base, a_range=[-1.0, 1.0, 2.5])
    with pytest.raises(ScenarioError):
        parse_scenario(scenario_data(portrait=p))


def test_t_end_accumulates_durations():
    data = scenario_data(motion=[
        {"type": "simple_shear", "rate": 1.0, "duration": 0.4},
        {"type": "constant_velocity_gradient",
         "L": [[0.1, 0.0, 0.0], [0.0, -0.1, 0.0], [0.0, 0.0, 0.0]],
         "duration": 0.6},
        {"type": "rigid_rotation", "axis": [0.0, 0.0, 1.0], "rate": 2.0,
         "duration": 0.5},
    ])
    sc = parse_scenario(data)
    assert abs(sc.t_end - 1.5) < 1e-15
    assert sc.motion.breakpoints() == [0.4, 1.0]


def test_superposed_rotation_segment():
    data = scenario_data(motion=[{
        "type": "superposed_rotation",
        "spin_rate": 1.5,
        "axis": [0.0, 0.0, 1.0],
        "base": [
            {"type": "simple_shear", "rate": 1.0, "duration": 0.3},
            {"type": "simple_shear", "rate": -1.0, "duration": 0.2},
        ],
    }])
    sc = parse_scenario(data)
    assert abs(sc.t_end - 0.5) < 1e-15


def test_load_scenario_from_file(tmp_path):
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(scenario_data()), encoding="utf-8")
    sc = load_scenario(str(p))
    assert sc.t_end == 1.0

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ScenarioError) as err:
        load_scenario(str(broken))
    assert "invalid JSON" in str(err.value)

    with pytest.raises(ScenarioError) as err:
        load_scenario(str(tmp_path / "missing.json"))
    assert "cannot read" in str(err.value)


def test_root_must_be_object():
    with pytest.raises(ScenarioError) as err:
        parse_scenario([1, 2, 3])
    assert "<root>" in str(err.value)

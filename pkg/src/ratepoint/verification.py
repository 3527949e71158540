"""Verification suites.

Randomized and constructed checks of the structural properties of the
response: objectivity under superposed rotations, exclusivity of the loading
cases, stationarity on the limit surface, stretching blow-up near it, the
hardening rate law, flow normality and plastic work, perfect plasticity, the
elastic closed form in simple shear, and integrator convergence order. The
CLI `verify` command and the acceptance tests share these implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import (
    equilibrium_stretching,
    hardening_rate_check,
    limit_ratio_rhs,
    limit_surface_scan,
    locate_limit_radius,
    normality_check,
    plastic_work,
    radial_limit_path,
    stress_driven_stretching,
    stress_drift,
    verify_equilibrium,
)
from .constitutive import (
    DruckerPragerLike,
    default_model,
    p_tensor,
)
from .engine import (
    CaseLabel,
    IntegrationOptions,
    MaterialState,
    ResponseMode,
    classify,
    integrate,
    resolve_case_iii,
    rhs,
)
from .motions import (
    ConstantVelocityGradient,
    PiecewiseMotion,
    SimpleShear,
    SuperposedRotation,
    rotation_about,
)
from .tensors import (
    Skw3,
    Sym3,
    deviator,
    inner,
    norm,
    random_symmetric,
    trace,
)

__all__ = [
    "CheckResult",
    "check_objectivity",
    "check_case_exclusivity",
    "check_limit_equilibria",
    "check_stretching_blowup",
    "check_hardening_rule",
    "check_normality_and_work",
    "check_perfect_plasticity",
    "check_shear_closed_form",
    "check_convergence_order",
    "VERIFY_SUITES",
    "ACCEPTANCE_CRITERIA",
    "run_suite",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    op: str
    passed: bool

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: measured {self.measured:.6e} "
                f"(required {self.op} {self.threshold:g})")


def _result(name, measured, op, threshold) -> CheckResult:
    measured = float(measured)
    if math.isnan(measured):
        passed = False
    elif op == "<=":
        passed = measured <= threshold
    elif op == ">=":
        passed = measured >= threshold
    elif op == ">":
        passed = measured > threshold
    elif op == "<":
        passed = measured < threshold
    else:
        raise ValueError(f"unknown comparison {op!r}")
    return CheckResult(name=name, measured=measured, threshold=float(threshold),
                       op=op, passed=passed)


_W6 = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


def _vnorm(v6) -> float:
    return math.sqrt(float(np.dot(_W6 * v6, v6)))


def _mat_of(v6):
    xx, yy, zz, yz, xz, xy = v6
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def _voigt_of(m):
    return np.array(
        [m[0, 0], m[1, 1], m[2, 2],
         0.5 * (m[1, 2] + m[2, 1]),
         0.5 * (m[0, 2] + m[2, 0]),
         0.5 * (m[0, 1] + m[1, 0])]
    )


def _random_unit_deviator(rng) -> Sym3:
    while True:
        candidate = deviator(random_symmetric(rng))
        n = norm(candidate)
        if n > 0.3:
            return candidate / n


# ---------------------------------------------------------------------------
# criterion 1: objectivity under a superposed rigid rotation
# ---------------------------------------------------------------------------

def check_objectivity(seed=0, dt_max=1e-3, n_scenarios=20):
    rng = np.random.default_rng(seed)
    opts = IntegrationOptions(dt_max=dt_max)
    model = default_model()
    worst_stress = 0.0
    worst_hardening = 0.0
    min_paired = 1.0
    for i in range(n_scenarios):
        stress0 = _random_unit_deviator(rng) * rng.uniform(0.3, 1.2)
        f0 = model.yield_fn.value(stress0)
        hardening0 = f0 if i % 3 == 0 else f0 + rng.uniform(0.05, 0.8)
        base = PiecewiseMotion([
            (0.4, SimpleShear(rate=rng.uniform(0.5, 1.5))),
            (0.4, ConstantVelocityGradient(rng.standard_normal((3, 3)) * 0.5)),
        ])
        axis = rng.standard_normal(3)
        axis = axis / math.sqrt(float(axis @ axis))
        spin_rate = rng.uniform(0.5, 2.0)
        superposed = SuperposedRotation(base, spin_rate, axis)
        state = MaterialState(t=0.0, stress=stress0, hardening=hardening0)
        plain = integrate(model, base, state, 0.8, opts)
        rotated = integrate(model, superposed, state, 0.8, opts)
        ta, sa, ka = plain.times, plain.stresses, plain.hardenings
        tb, sb, kb = rotated.times, rotated.stresses, rotated.hardenings
        ia = ib = 0
        paired = 0
        while ia < len(ta) and ib < len(tb):
            if abs(ta[ia] - tb[ib]) <= 1e-9:
                q = rotation_about(axis, spin_rate * ta[ia])
                conjugated = _voigt_of(q @ _mat_of(sa[ia]) @ q.T)
                worst_stress = max(worst_stress, _vnorm(sb[ib] - conjugated))
                worst_hardening = max(worst_hardening, abs(kb[ib] - ka[ia]))
                paired += 1
                ia += 1
                ib += 1
            elif ta[ia] < tb[ib]:
                ia += 1
            else:
                ib += 1
        min_paired = min(min_paired, paired / max(len(ta), len(tb)))
    return [
        _result("objectivity/stress-mismatch-max", worst_stress, "<=", 1e-6),
        _result("objectivity/hardening-mismatch-max", worst_hardening, "<=", 1e-6),
        _result("objectivity/paired-sample-fraction", min_paired, ">=", 0.95),
    ]


# ---------------------------------------------------------------------------
# criterion 2: the four loading cases partition admissible states
# ---------------------------------------------------------------------------

def check_case_exclusivity(seed=0, dt_max=1e-3, n_states=1000, n_tangent=100):
    rng = np.random.default_rng(seed)
    opts = IntegrationOptions(dt_max=dt_max)
    model = default_model()
    partition_violations = 0
    for _ in range(n_states):
        stress0 = random_symmetric(rng)
        while norm(deviator(stress0)) < 1e-3:
            stress0 = random_symmetric(rng)
        f0 = model.yield_fn.value(stress0)
        hardening0 = f0 if rng.random() < 0.5 else f0 + rng.uniform(0.01, 1.0)
        d0 = random_symmetric(rng)
        label = classify(model, stress0, hardening0, d0, opts)
        # recompute the case predicates through an independent route
        on_surface = hardening0 - f0 <= opts.tol_yield
        if not on_surface:
            expected = [CaseLabel.I]
        else:
            loading = inner(d0, p_tensor(model, stress0))
            if loading < -opts.tol_psi:
                expected = [CaseLabel.II]
            elif loading > opts.tol_psi:
                expected = [CaseLabel.IV]
            else:
                expected = [CaseLabel.III]
        if [label] != expected:
            partition_violations += 1

    rhs_gap_max = 0.0
    invalid_modes = 0
    for _ in range(n_tangent):
        unit = _random_unit_deviator(rng)
        stress0 = unit * rng.uniform(0.5, 1.8)
        hardening0 = model.yield_fn.value(stress0)
        raw = random_symmetric(rng)
        p = p_tensor(model, stress0)
        d0 = raw - (inner(raw, p) / inner(p, p)) * p
        label = classify(model, stress0, hardening0, d0, opts)
        if label is not CaseLabel.III:
            invalid_modes += 1
            continue
        elastic_rate = rhs(model, ResponseMode.ELASTIC, stress0, d0, Skw3.zero())
        plastic_rate = rhs(model, ResponseMode.PLASTIC, stress0, d0, Skw3.zero())
        rhs_gap_max = max(rhs_gap_max, norm(elastic_rate - plastic_rate))
        state = MaterialState(t=0.0, stress=stress0, hardening=hardening0)
        motion = ConstantVelocityGradient(d0.to_matrix())
        mode_a = resolve_case_iii(model, state, motion, opts)
        mode_b = resolve_case_iii(model, state, motion, opts)
        if mode_a is not mode_b or mode_a not in (ResponseMode.ELASTIC,
                                                  ResponseMode.PLASTIC):
            invalid_modes += 1
    return [
        _result("case-partition/violations", partition_violations, "<=", 0),
        _result("case-partition/tangent-rhs-gap-max", rhs_gap_max, "<=", 1e-12),
        _result("case-partition/tangent-resolution-failures", invalid_modes,
                "<=", 0),
    ]


# ---------------------------------------------------------------------------
# criterion 3: stationary stresses on the limit surface
# ---------------------------------------------------------------------------

def check_limit_equilibria(seed=0, dt_max=1e-3, n_points=10):
    rng = np.random.default_rng(seed)
    opts = IntegrationOptions(dt_max=dt_max)
    model = default_model()
    directions = [_random_unit_deviator(rng) for _ in range(n_points)]
    report = limit_surface_scan(model, directions, np.linspace(0.5, 3.5, 7))
    located = len(report.points)
    residual_max = max(abs(pt.mu_residual) for pt in report.points) \
        if report.points else math.inf
    drift_max = 0.0
    perturbed_min = math.inf
    for pt in report.points:
        for lam in (0.5, 1.0, 2.0):
            drift_max = max(drift_max,
                            verify_equilibrium(model, pt.stress, lam, 1.0, opts))
        held = equilibrium_stretching(model, pt.stress, 1.0)
        unit = held / norm(held)
        probe = _random_unit_deviator(rng)
        probe = probe - inner(probe, unit) * unit
        probe = probe / norm(probe)
        perturbed = held + 0.01 * norm(held) * probe
        perturbed_min = min(perturbed_min,
                            stress_drift(model, pt.stress, perturbed, 1.0, opts))
    return [
        _result("limit-equilibria/points-located", located, ">=", n_points),
        _result("limit-equilibria/surface-residual-max", residual_max, "<=", 1e-12),
        _result("limit-equilibria/drift-max", drift_max, "<=", 1e-7),
        _result("limit-equilibria/perturbed-drift-min", perturbed_min, ">=", 1e-3),
    ]


# ---------------------------------------------------------------------------
# criterion 4: stretching blow-up along stress paths reaching the surface
# ---------------------------------------------------------------------------

def check_stretching_blowup(seed=0, dt_max=1e-3):
    del seed, dt_max  # deterministic, path-based
    probe_orders = range(8, 15)
    direction = Sym3([0.8, -0.5, -0.3, 0.2, -0.1, 0.4])
    results = []

    model_vm = default_model()
    r_star = locate_limit_radius(model_vm, direction)
    path = radial_limit_path(model_vm, direction, 0.5 * r_star)
    norms = [norm(stress_driven_stretching(model_vm, path, 1.0 - 2.0 ** -n))
             for n in probe_orders]
    growth = min(norms[i + 1] / norms[i] for i in range(len(norms) - 1))
    results.append(_result("blowup/hardening-growth-min", growth, ">", 1.0))

    soft = radial_limit_path(model_vm, direction, 1.5 * r_star, softening=True)
    soft_norms = [norm(stress_driven_stretching(model_vm, soft, 1.0 - 2.0 ** -n))
                  for n in probe_orders]
    soft_growth = min(soft_norms[i + 1] / soft_norms[i]
                      for i in range(len(soft_norms) - 1))
    results.append(_result("blowup/softening-growth-min", soft_growth, ">", 1.0))

    d_probe = stress_driven_stretching(model_vm, path, 1.0 - 2.0 ** -12)
    trace_fraction = abs(trace(d_probe)) / norm(d_probe)
    results.append(_result("blowup/isochoric-trace-fraction", trace_fraction,
                           "<=", 1e-6))

    model_dp = default_model(yield_fn=DruckerPragerLike(alpha=0.3))
    r_star_dp = locate_limit_radius(model_dp, direction)
    path_dp = radial_limit_path(model_dp, direction, 0.5 * r_star_dp)
    d_dp = stress_driven_stretching(model_dp, path_dp, 1.0 - 2.0 ** -12)
    ratio = norm(deviator(d_dp)) / abs(trace(d_dp))
    limit = limit_ratio_rhs(model_dp, path_dp.value(1.0))
    rel_err = abs(ratio - limit) / limit
    results.append(_result("blowup/pressure-sensitive-ratio-rel-err", rel_err,
                           "<=", 1e-2))
    return results


# ---------------------------------------------------------------------------
# criterion 5: hardening rate law along plastic segments
# ---------------------------------------------------------------------------

def _hardening_run(opts):
    model = default_model()
    motion = ConstantVelocityGradient(np.diag([1.0, -0.5, -0.5]))
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=0.5)
    return model, integrate(model, motion, state, 1.0, opts)


def _softening_run(opts):
    model = default_model()
    unit = deviator(Sym3([1.0, -0.7, -0.3, 0.25, 0.0, 0.4]))
    unit = unit / norm(unit)
    stress0 = unit * 3.0
    state = MaterialState(t=0.0, stress=stress0,
                          hardening=model.yield_fn.value(stress0))
    held = equilibrium_stretching(model, stress0, 1.0)
    motion = ConstantVelocityGradient(held.to_matrix())
    return model, integrate(model, motion, state, 1.0, opts)


def _fd_hardening_rates(segment, dt_max):
    """Five-point centered derivative of k(t) at uniformly spaced interior
    samples; returns (indices, rates)."""
    t = segment.times
    k = segment.hardenings
    idx = []
    rates = []
    for i in range(2, len(t) - 2):
        steps = np.diff(t[i - 2:i + 3])
        if np.abs(steps - dt_max).max() > 1e-9 * dt_max:
            continue
        rate = (k[i - 2] - 8.0 * k[i - 1] + 8.0 * k[i + 1] - k[i + 2]) / (12.0 * dt_max)
        idx.append(i)
        rates.append(rate)
    return idx, np.array(rates)


def check_hardening_rule(seed=0, dt_max=1e-3):
    del seed
    opts = IntegrationOptions(dt_max=dt_max)
    eq5_rel_max = 0.0
    eq10_rel_max = 0.0
    eq5_vs_eq10_max = 0.0
    sign_mismatches = 0
    fd_points = 0
    for model, trajectory in (_hardening_run(opts), _softening_run(opts)):
        for segment in trajectory.segments:
            if segment.mode is not ResponseMode.PLASTIC:
                continue
            idx, fd_rates = _fd_hardening_rates(segment, dt_max)
            if not idx:
                continue
            fd_points += len(idx)
            eq5 = segment.psis[np.array(idx)] * segment.mus[np.array(idx)]
            scale = np.abs(eq5).max()
            for j, i in enumerate(idx):
                stress = segment.stress_at(i)
                flow_line = model.elastic.apply_inverse(
                    stress, model.direction.value(stress))
                d_plastic = Sym3.wrap(-segment.psis[i] * flow_line.v)
                eq10 = hardening_rate_check(model, stress, d_plastic)
                eq5_vs_eq10_max = max(eq5_vs_eq10_max, abs(eq5[j] - eq10))
                if abs(eq5[j]) >= 1e-6 * scale:
                    eq5_rel_max = max(eq5_rel_max,
                                      abs(fd_rates[j] - eq5[j]) / abs(eq5[j]))
                    eq10_rel_max = max(eq10_rel_max,
                                       abs(fd_rates[j] - eq10) / abs(eq10))
                if math.copysign(1.0, fd_rates[j]) != math.copysign(
                        1.0, segment.mus[i]):
                    sign_mismatches += 1
    return [
        _result("hardening-rule/fd-points", fd_points, ">=", 100),
        _result("hardening-rule/rate-law-rel-err-max", eq5_rel_max, "<=", 1e-6),
        _result("hardening-rule/magnitude-form-rel-err-max", eq10_rel_max,
                "<=", 1e-4),
        _result("hardening-rule/two-forms-gap-max", eq5_vs_eq10_max, "<=", 1e-10),
        _result("hardening-rule/sign-mismatches", sign_mismatches, "<=", 0),
    ]


# ---------------------------------------------------------------------------
# criterion 7: normality, stressing power, plastic work
# ---------------------------------------------------------------------------

def check_normality_and_work(seed=0, dt_max=1e-3):
    del seed
    opts = IntegrationOptions(dt_max=dt_max)
    alignment_max = 0.0
    power_min_hardening = math.inf
    power_max_softening = -math.inf
    nonpositive_projections = 0
    runs = {"hardening": _hardening_run(opts), "softening": _softening_run(opts)}
    for label, (model, trajectory) in runs.items():
        for segment in trajectory.segments:
            if segment.mode is not ResponseMode.PLASTIC:
                continue
            for i in range(segment.n_samples):
                loading = segment.psis[i]
                if not loading > 1e-6:
                    continue
                stress = segment.stress_at(i)
                flow_line = model.elastic.apply_inverse(
                    stress, model.direction.value(stress))
                d_plastic = Sym3.wrap(-loading * flow_line.v)
                alignment_max = max(alignment_max,
                                    normality_check(model, stress, d_plastic))
                grad = model.yield_fn.gradient(stress)
                if not inner(d_plastic, grad) > 0.0:
                    nonpositive_projections += 1
                stress_rate = rhs(model, ResponseMode.PLASTIC, stress,
                                  segment.stretching_at(i), segment.spin_at(i))
                power = inner(stress_rate, d_plastic)
                if label == "hardening":
                    power_min_hardening = min(power_min_hardening, power)
                else:
                    power_max_softening = max(power_max_softening, power)
    model_h, trajectory_h = runs["hardening"]
    work = plastic_work(trajectory_h, model_h)
    return [
        _result("normality/alignment-max", alignment_max, "<=", 1e-10),
        _result("normality/nonpositive-projections", nonpositive_projections,
                "<=", 0),
        _result("normality/power-min-hardening", power_min_hardening, ">", 0.0),
        _result("normality/power-max-softening", power_max_softening, "<", 0.0),
        _result("normality/plastic-work", work, ">", 0.0),
    ]


# ---------------------------------------------------------------------------
# criterion 8: perfect plasticity on the limit surface
# ---------------------------------------------------------------------------

def check_perfect_plasticity(seed=0, dt_max=1e-3):
    del seed
    opts = IntegrationOptions(dt_max=dt_max)
    model = default_model()
    unit = deviator(Sym3([1.0, -1.0, 0.0, 0.3, -0.2, 0.1]))
    unit = unit / norm(unit)
    r_star = locate_limit_radius(model, unit)
    stress0 = unit * r_star
    hardening0 = model.yield_fn.value(stress0)
    state = MaterialState(t=0.0, stress=stress0, hardening=hardening0)
    held = equilibrium_stretching(model, stress0, 1.0)
    motion = ConstantVelocityGradient(held.to_matrix())
    trajectory = integrate(model, motion, state, 1.0, opts)
    f_values = np.array([model.yield_fn.value(Sym3.wrap(row.copy()))
                         for row in trajectory.stresses])
    f_drift = float(np.abs(f_values - hardening0).max())
    kdot_max = 0.0
    for segment in trajectory.segments:
        _, fd_rates = _fd_hardening_rates(segment, dt_max)
        if len(fd_rates):
            kdot_max = max(kdot_max, float(np.abs(fd_rates).max()))
    elastic_segments = sum(1 for s in trajectory.segments
                           if s.mode is ResponseMode.ELASTIC)
    return [
        _result("perfect-plasticity/f-drift-max", f_drift, "<=", 1e-7),
        _result("perfect-plasticity/kdot-max", kdot_max, "<=", 1e-8),
        _result("perfect-plasticity/elastic-segments", elastic_segments, "<=", 0),
    ]


# ---------------------------------------------------------------------------
# criterion 6: elastic closed form in simple shear
# ---------------------------------------------------------------------------

def check_shear_closed_form(seed=0, dt_max=1e-3):
    del seed
    opts = IntegrationOptions(dt_max=dt_max)
    model = default_model()
    rate = 1.0
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=100.0)
    trajectory = integrate(model, SimpleShear(rate), state, 2.0 * math.pi, opts)
    shear_modulus = model.elastic.mu_e
    err_max = 0.0
    for t, row in zip(trajectory.times, trajectory.stresses):
        angle = rate * t
        exact = np.array([
            shear_modulus * (1.0 - math.cos(angle)),
            -shear_modulus * (1.0 - math.cos(angle)),
            0.0, 0.0, 0.0,
            shear_modulus * math.sin(angle),
        ])
        err_max = max(err_max, _vnorm(row - exact))
    plastic_segments = sum(1 for s in trajectory.segments
                           if s.mode is ResponseMode.PLASTIC)
    return [
        _result("shear-closed-form/stress-err-max", err_max, "<=", 1e-6),
        _result("shear-closed-form/plastic-segments", plastic_segments, "<=", 0),
    ]


# ---------------------------------------------------------------------------
# criterion 9: integrator order under step halving
# ---------------------------------------------------------------------------

def check_convergence_order(seed=0, dt_max=1e-3):
    del seed, dt_max
    model = default_model()
    unit = deviator(Sym3([1.0, -0.6, -0.4, 0.2, 0.1, -0.3]))
    unit = unit / norm(unit)
    stress0 = unit * 1.0
    state = MaterialState(t=0.0, stress=stress0,
                          hardening=model.yield_fn.value(stress0))
    # a brisk radial plastic flow; gentle runs leave the coarse-step
    # truncation error below the reference run's roundoff floor
    motion = ConstantVelocityGradient((unit * 20.0).to_matrix())

    def final_stress(dt):
        opts = IntegrationOptions(dt_max=dt)
        return integrate(model, motion, state, 0.5, opts).final_state().stress

    reference = final_stress(1e-5)
    err_coarse = norm(final_stress(1e-3) - reference)
    err_fine = norm(final_stress(5e-4) - reference)
    plastic_ratio = err_coarse / err_fine if err_fine > 0.0 else math.inf

    shear_state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=100.0)
    shear_rate = 4.0

    def shear_error(dt):
        opts = IntegrationOptions(dt_max=dt)
        final = integrate(model, SimpleShear(shear_rate), shear_state, 1.0,
                          opts).final_state()
        g = model.elastic.mu_e
        angle = shear_rate * final.t
        exact = np.array([g * (1.0 - math.cos(angle)),
                          -g * (1.0 - math.cos(angle)),
                          0.0, 0.0, 0.0, g * math.sin(angle)])
        return _vnorm(final.stress.v - exact)

    e_coarse = shear_error(1e-3)
    e_fine = shear_error(5e-4)
    elastic_ratio = e_coarse / e_fine if e_fine > 0.0 else math.inf
    return [
        _result("convergence/plastic-halving-ratio", plastic_ratio, ">=", 8.0),
        _result("convergence/elastic-halving-ratio", elastic_ratio, ">=", 8.0),
    ]


# ---------------------------------------------------------------------------
# suite registry
# ---------------------------------------------------------------------------

VERIFY_SUITES = {
    "objectivity": check_objectivity,
    "prop1": check_case_exclusivity,
    "prop2": check_limit_equilibria,
    "prop3": check_stretching_blowup,
    "hardening-rule": check_hardening_rule,
    "normality": check_normality_and_work,
    "perfect-plasticity": check_perfect_plasticity,
}

ACCEPTANCE_CRITERIA = [
    ("1 objectivity", check_objectivity),
    ("2 loading-case exclusivity", check_case_exclusivity),
    ("3 limit-surface equilibria", check_limit_equilibria),
    ("4 stretching blow-up", check_stretching_blowup),
    ("5 hardening rate law", check_hardening_rule),
    ("6 elastic shear closed form", check_shear_closed_form),
    ("7 normality and plastic work", check_normality_and_work),
    ("8 perfect plasticity", check_perfect_plasticity),
    ("9 integrator convergence", check_convergence_order),
]


def run_suite(name, seed=0, dt_max=1e-3):
    """Run one named suite (or 'all') and return its CheckResults."""
    if name == "all":
        results = []
        for suite in VERIFY_SUITES.values():
            results.extend(suite(seed=seed, dt_max=dt_max))
        return results
    if name not in VERIFY_SUITES:
        raise KeyError(name)
    return VERIFY_SUITES[name](seed=seed, dt_max=dt_max)

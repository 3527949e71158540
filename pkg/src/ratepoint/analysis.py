"""Derived quantities and structural checks on top of the engine.

Covers the elastic/plastic split of the stretching, hardening-rate
cross-checks, equilibrium stretchings and their drift verification, the
stretching blow-up along stress paths that approach the limit surface, flow
normality, and plastic work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constitutive import MaterialModel, mu as _mu, psi as _psi
from .engine import (
    IntegrationOptions,
    MaterialState,
    ResponseMode,
    integrate,
)
from .errors import OnLimitSurface
from .motions import ConstantVelocityGradient
from .tensors import Sym3, _spin_commutator, deviator, inner, norm, trace

__all__ = [
    "StressPath",
    "LimitSurfacePoint",
    "LimitSurfaceReport",
    "decompose_stretching",
    "hardening_rate_check",
    "equilibrium_stretching",
    "stress_drift",
    "verify_equilibrium",
    "limit_ratio_rhs",
    "stress_driven_stretching",
    "normality_check",
    "plastic_work",
    "stressing_power_sign",
    "locate_limit_radius",
    "limit_surface_scan",
    "radial_limit_path",
]

# |mu| at or below this is treated as "on the limit surface" by operations
# that divide by mu
MU_SINGULAR = 1e-10


def decompose_stretching(model, stress, stress_rate, spin, mode):
    """Split D into elastic and plastic parts from a known stress rate.

    De = A^{-1}[Tcirc] with Tcirc = Tdot - (W T - T W); in plastic mode
    Dp = -(grad_f : Tdot / mu) A^{-1}[B], which requires mu(T) != 0.
    Returns (De, Dp); Dp is zero in elastic mode.
    """
    corotational = Sym3.wrap(stress_rate.v - _spin_commutator(spin, stress).v)
    d_elastic = model.elastic.apply_inverse(stress, corotational)
    if mode is ResponseMode.ELASTIC:
        return d_elastic, Sym3.zero()
    grad = model.yield_fn.gradient(stress)
    hard_factor = 1.0 + inner(grad, model.direction.value(stress))
    if abs(hard_factor) <= MU_SINGULAR:
        raise OnLimitSurface(
            f"mu(T) = {hard_factor:.3e}; the plastic split is singular on the limit surface"
        )
    coeff = inner(grad, stress_rate) / hard_factor
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    d_plastic = Sym3.wrap(-coeff * flow_line.v)
    return d_elastic, d_plastic


def hardening_rate_check(model, stress, d_plastic) -> float:
    """Hardening rate recovered from the plastic stretching magnitude:
    kdot = |Dp| / |A^{-1}[B]| * mu(T)."""
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    return norm(d_plastic) / norm(flow_line) * _mu(model, stress)


def equilibrium_stretching(model, stress, lam) -> Sym3:
    """Stretching D = -lambda A^{-1}[B(T)], lambda > 0.

    On the limit surface these are exactly the stretchings that hold the
    stress fixed under the plastic law, with loading index psi(T, D) = lambda;
    away from it the general identity is psi(T, D) = lambda (1 - mu(T)).
    """
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError("lambda must be positive")
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    return Sym3.wrap(-lam * flow_line.v)


def stress_drift(model, stress, stretching, duration, opts=None) -> float:
    """Integrate from (T, k = f(T)) under constant spin-free stretching and
    return the largest |T(t) - T(0)| over the sampled trajectory."""
    opts = opts or IntegrationOptions()
    motion = ConstantVelocityGradient(stretching.to_matrix())
    state = MaterialState(t=0.0, stress=stress,
                          hardening=model.yield_fn.value(stress))
    trajectory = integrate(model, motion, state, float(duration), opts)
    deltas = trajectory.stresses - stress.v
    weighted = deltas * np.sqrt(np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0]))
    return float(np.sqrt((weighted * weighted).sum(axis=1)).max())


def verify_equilibrium(model, stress, lam, duration=1.0, opts=None) -> float:
    """Drift of the stress under the equilibrium stretching at a point of the
    limit surface. Requires mu(T) = 0 within 1e-8."""
    hard_factor = _mu(model, stress)
    if abs(hard_factor) > 1e-8:
        raise ValueError(
            f"stress is not on the limit surface: mu(T) = {hard_factor:.3e}"
        )
    stretching = equilibrium_stretching(model, stress, lam)
    return stress_drift(model, stress, stretching, duration, opts)


def limit_ratio_rhs(model, stress) -> float:
    """Limiting |dev D| / |tr D| along paths that reach the limit surface:
    sqrt(|X|^2 / (tr X)^2 - 1/3) with X = A^{-1}[B(T)].

    Returns math.inf (deliberately, never via overflow) when |tr X| <= 1e-12,
    the critical-state situation of an isochoric flow line.
    """
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    tr = trace(flow_line)
    if abs(tr) <= 1e-12:
        return math.inf
    ratio_sq = inner(flow_line, flow_line) / (tr * tr) - 1.0 / 3.0
    return math.sqrt(max(ratio_sq, 0.0))


@dataclass(frozen=True)
class StressPath:
    """Continuously differentiable stress curve on [0, 1], given by callables."""

    value: Callable[[float], Sym3]
    derivative: Callable[[float], Sym3]


def stress_driven_stretching(model, path: StressPath, t) -> Sym3:
    """Stretching required to realize a spin-free stress path:
    D = A^{-1}[Tdot] - (grad_f : Tdot / mu) A^{-1}[B]."""
    stress = path.value(t)
    stress_rate = path.derivative(t)
    grad = model.yield_fn.gradient(stress)
    hard_factor = 1.0 + inner(grad, model.direction.value(stress))
    if abs(hard_factor) <= MU_SINGULAR:
        raise OnLimitSurface(
            f"mu(T(t)) = {hard_factor:.3e} at t = {t}; stretching blows up on the limit surface"
        )
    d_elastic = model.elastic.apply_inverse(stress, stress_rate)
    coeff = inner(grad, stress_rate) / hard_factor
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    return Sym3.wrap(d_elastic.v - coeff * flow_line.v)


def normality_check(model, stress, d_plastic) -> float:
    """Misalignment 1 - (Dp : grad_f) / (|Dp| |grad_f|); zero for associative
    flow with Dp along grad_f."""
    grad = model.yield_fn.gradient(stress)
    denom = norm(d_plastic) * norm(grad)
    if denom == 0.0:
        raise ValueError("plastic stretching or gradient has zero norm")
    return 1.0 - inner(d_plastic, grad) / denom


def plastic_work(trajectory, model) -> float:
    """Trapezoid quadrature of (det F) T : Dp over the plastic samples,
    with Dp = -psi A^{-1}[B] reconstructed at each sample."""
    total = 0.0
    for segment in trajectory.segments:
        if segment.mode is not ResponseMode.PLASTIC or segment.n_samples < 2:
            continue
        integrand = np.empty(segment.n_samples)
        for i in range(segment.n_samples):
            stress = segment.stress_at(i)
            flow_line = model.elastic.apply_inverse(
                stress, model.direction.value(stress)
            )
            d_plastic = Sym3.wrap(-segment.psis[i] * flow_line.v)
            det = trajectory.motion.det_F(float(segment.times[i]))
            integrand[i] = det * inner(stress, d_plastic)
        total += float(np.trapezoid(integrand, segment.times))
    return total


def stressing_power_sign(model, stress, stretching, stress_rate) -> float:
    """Plastic stressing power Tdot : Dp with Dp = -psi(T, D) A^{-1}[B]."""
    loading = _psi(model, stress, stretching)
    flow_line = model.elastic.apply_inverse(stress, model.direction.value(stress))
    d_plastic = Sym3.wrap(-loading * flow_line.v)
    return inner(stress_rate, d_plastic)


def locate_limit_radius(model, direction, r_lo=0.05, r_hi=20.0, tol=1e-12) -> float:
    """Bisect mu(r N) = 0 along the deviatoric ray through `direction`.

    N is the unit deviator of `direction`. Requires a sign change of mu over
    [r_lo, r_hi]; the returned radius satisfies |mu| <= tol there.
    """
    dev = deviator(direction)
    n = norm(dev)
    if n == 0.0:
        raise ValueError("direction must have a nonzero deviator")
    unit = dev / n
    lo, hi = float(r_lo), float(r_hi)
    mu_lo = _mu(model, unit * lo)
    mu_hi = _mu(model, unit * hi)
    if mu_lo * mu_hi > 0.0:
        raise ValueError(
            f"mu does not change sign on [{lo}, {hi}]: {mu_lo:.3e}, {mu_hi:.3e}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mu_mid = _mu(model, unit * mid)
        if abs(mu_mid) <= tol:
            return mid
        if mu_mid * mu_lo > 0.0:
            lo, mu_lo = mid, mu_mid
        else:
            hi = mid
    raise RuntimeError("limit-radius bisection did not converge")


@dataclass
class LimitSurfacePoint:
    stress: Sym3
    mu_residual: float
    bracket: tuple
    flow_line: Sym3  # unit equilibrium stretching direction at the point


@dataclass
class LimitSurfaceReport:
    directions: list = field(default_factory=list)
    radii: np.ndarray = None
    mu_values: list = field(default_factory=list)
    points: list = field(default_factory=list)


def limit_surface_scan(model, directions, radii) -> LimitSurfaceReport:
    """Sample mu along deviatoric rays, bracket its sign changes, and locate
    the limit surface on each ray."""
    radii = np.asarray(radii, dtype=float)
    report = LimitSurfaceReport(directions=list(directions), radii=radii)

    def _append(unit, r_star, bracket):
        stress = unit * r_star
        d_eq = equilibrium_stretching(model, stress, 1.0)
        report.points.append(
            LimitSurfacePoint(
                stress=stress,
                mu_residual=_mu(model, stress),
                bracket=bracket,
                flow_line=d_eq / norm(d_eq),
            )
        )

    for direction in directions:
        unit = deviator(direction)
        unit = unit / norm(unit)
        values = np.array([_mu(model, unit * float(r)) for r in radii])
        report.mu_values.append(values)
        for i, r in enumerate(radii):
            # a grid radius landing exactly on the surface is already a point;
            # the strict sign-change test below would skip it
            if values[i] == 0.0:
                _append(unit, float(r), (float(r), float(r)))
        for i in range(len(radii) - 1):
            if values[i] * values[i + 1] < 0.0:
                r_star = locate_limit_radius(
                    model, unit, r_lo=float(radii[i]), r_hi=float(radii[i + 1])
                )
                _append(unit, r_star, (float(radii[i]), float(radii[i + 1])))
    return report


def radial_limit_path(model, direction, start_radius, softening=False) -> StressPath:
    """Radial deviatoric stress path reaching the limit surface at t = 1.

    T(t) = r(t) N with N the unit deviator of `direction` and r linear from
    start_radius to the located limit radius r*. With start_radius < r* the
    path stays in the hardening region with grad_f : Tdot > 0 (condition a);
    with start_radius > r* it approaches from the softening side with
    grad_f : Tdot < 0 (condition b).
    """
    dev = deviator(direction)
    unit = dev / norm(dev)
    r_star = locate_limit_radius(model, unit)
    r0 = float(start_radius)
    if softening and not r0 > r_star:
        raise ValueError("softening path needs start_radius above the limit radius")
    if not softening and not r0 < r_star:
        raise ValueError("hardening path needs start_radius below the limit radius")
    rate = r_star - r0

    def value(t):
        return unit * (r0 + rate * float(t))

    def derivative(t):
        return unit * rate

    return StressPath(value=value, derivative=derivative)

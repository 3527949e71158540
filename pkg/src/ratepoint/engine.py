"""Strain-driven response engine.

Given a material model, a motion, and an admissible initial state
(f(T0) <= k0), the engine advances the stress with a fixed-step classical
RK4 scheme, switching between two smooth laws:

* elastic: Tdot = A(T)[D] + W T - T W, hardening k frozen;
* plastic: Tdot = A(T)[D] + psi(T, D) B(T) + W T - T W, with k(t) = f(T(t)).

Segment boundaries are located by bisection on the event functions
f(T) - k (yield onset) and psi(T, D) (plastic unloading); events are
resolved to tolerance on the event-function value, not on time. At motion
breakpoints and after every event the state is re-classified into one of
the four loading cases using the right-hand stretching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constitutive import MaterialModel, psi as _loading_index
from .errors import AxiomViolated, OutOfDomain, SingularGradient
from .motions import Motion, kinematics
from .tensors import Skw3, Sym3, inner, jaumann_to_material

__all__ = [
    "ResponseMode",
    "CaseLabel",
    "MaterialState",
    "IntegrationOptions",
    "Segment",
    "Trajectory",
    "in_elastic_domain",
    "classify",
    "resolve_case_iii",
    "rhs",
    "integrate",
]


class ResponseMode(Enum):
    ELASTIC = "elastic"
    PLASTIC = "plastic"


class CaseLabel(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class MaterialState:
    """Stress point at an instant: time, stress, hardening parameter."""

    t: float
    stress: Sym3
    hardening: float


@dataclass(frozen=True)
class IntegrationOptions:
    dt_max: float = 1e-3
    tol_yield: float = 1e-9
    tol_psi: float = 1e-9
    event_bisection_iters: int = 80
    case3_probe_depth: int = 2

    def __post_init__(self):
        if not self.dt_max > 0.0:
            raise ValueError("dt_max must be positive")
        if not self.tol_yield > 0.0 or not self.tol_psi > 0.0:
            raise ValueError("event tolerances must be positive")
        if self.event_bisection_iters < 1:
            raise ValueError("event_bisection_iters must be at least 1")
        if self.case3_probe_depth < 1:
            raise ValueError("case3_probe_depth must be at least 1")


_DEFAULT_OPTS = IntegrationOptions()


def _snap(t_ref: float) -> float:
    return 1e-12 * max(1.0, abs(t_ref))


def _kin(motion, t, seg_end):
    # inside a segment use the right-hand limit; exactly at the segment end
    # (a breakpoint or t_end) use the left-hand limit
    if math.isfinite(seg_end) and t >= seg_end - _snap(seg_end):
        side = "left"
    else:
        side = "right"
    return kinematics(motion, t, side)


def in_elastic_domain(model: MaterialModel, stress: Sym3, hardening: float,
                      tol: float = 1e-9) -> bool:
    """True when f(T) <= k + tol."""
    return model.yield_fn.value(stress) <= hardening + tol


def classify(model, stress, hardening, stretching, opts=None) -> CaseLabel:
    """Loading-case analysis at a state with stretching D.

    Case I: strictly inside the elastic domain. On the yield surface the sign
    of psi decides: II (< 0, unloading), III (= 0, tangential), IV (> 0,
    loading). States with f(T) > k + tol_yield are inadmissible.
    """
    opts = opts or _DEFAULT_OPTS
    f_value = model.yield_fn.value(stress)
    if f_value > hardening + opts.tol_yield:
        raise AxiomViolated(
            f"f(T) = {f_value!r} exceeds the hardening parameter k = {hardening!r}"
        )
    if hardening - f_value > opts.tol_yield:
        return CaseLabel.I
    loading = _loading_index(model, stress, stretching)
    if loading < -opts.tol_psi:
        return CaseLabel.II
    if loading > opts.tol_psi:
        return CaseLabel.IV
    return CaseLabel.III


def rhs(model, mode, stress, stretching, spin) -> Sym3:
    """Material stress rate for the given response mode."""
    if mode is ResponseMode.PLASTIC:
        grad = model.yield_fn.gradient(stress)
        a_d = model.elastic.apply(stress, stretching)
        loading = inner(a_d, grad)
        corotational = Sym3.wrap(a_d.v + loading * model.direction.value(stress).v)
    else:
        corotational = model.elastic.apply(stress, stretching)
    return jaumann_to_material(corotational, stress, spin)


def _rk4_step(model, motion, mode, t, stress, h, seg_end):
    d1, w1 = _kin(motion, t, seg_end)
    k1 = rhs(model, mode, stress, d1, w1)
    tm = t + 0.5 * h
    d2, w2 = _kin(motion, tm, seg_end)
    k2 = rhs(model, mode, Sym3.wrap(stress.v + (0.5 * h) * k1.v), d2, w2)
    k3 = rhs(model, mode, Sym3.wrap(stress.v + (0.5 * h) * k2.v), d2, w2)
    t4 = t + h
    d4, w4 = _kin(motion, t4, seg_end)
    k4 = rhs(model, mode, Sym3.wrap(stress.v + h * k3.v), d4, w4)
    return Sym3.wrap(stress.v + (h / 6.0) * (k1.v + 2.0 * (k2.v + k3.v) + k4.v))


def resolve_case_iii(model, state, motion, opts=None, t_max=None) -> ResponseMode:
    """Decide the mode at a tangency point (f = k, psi = 0).

    Both laws produce the same stress rate while psi = 0, so the elastic law
    is integrated over a short trial window and one-sided forward differences
    of t -> psi are inspected up to case3_probe_depth. The first difference
    whose contribution over a probe step exceeds tol_psi decides the mode
    (positive: Plastic, negative: Elastic); if all examined derivatives vanish
    at that scale the response is Elastic. The probe never reads kinematics
    past t_max (the next breakpoint).
    """
    opts = opts or _DEFAULT_OPTS
    depth = opts.case3_probe_depth
    h = opts.dt_max
    if t_max is not None:
        h = min(h, (float(t_max) - state.t) / depth)
    if h <= 0.0:
        return ResponseMode.ELASTIC
    seg_end = float(t_max) if t_max is not None else math.inf
    t = state.t
    stress = state.stress
    d0, _ = _kin(motion, t, seg_end)
    values = [_loading_index(model, stress, d0)]
    for _ in range(depth):
        stress = _rk4_step(model, motion, ResponseMode.ELASTIC, t, stress, h, seg_end)
        t += h
        d, _ = _kin(motion, t, seg_end)
        values.append(_loading_index(model, stress, d))
    factorial = 1.0
    for order in range(1, depth + 1):
        factorial *= order
        delta = 0.0
        for j in range(order + 1):
            delta += (-1.0) ** (order - j) * math.comb(order, j) * values[j]
        if abs(delta) > opts.tol_psi * factorial:
            return ResponseMode.PLASTIC if delta > 0.0 else ResponseMode.ELASTIC
    return ResponseMode.ELASTIC


@dataclass
class Segment:
    """One maximal interval integrated under a single response mode."""

    mode: ResponseMode
    entry_case: CaseLabel
    times: np.ndarray
    stresses: np.ndarray
    hardenings: np.ndarray
    fs: np.ndarray
    stretchings: np.ndarray
    spins: np.ndarray
    psis: np.ndarray
    mus: np.ndarray

    @property
    def t_start(self):
        return float(self.times[0])

    @property
    def t_end(self):
        return float(self.times[-1])

    @property
    def n_samples(self):
        return len(self.times)

    def stress_at(self, i):
        return Sym3.wrap(self.stresses[i].copy())

    def stretching_at(self, i):
        return Sym3.wrap(self.stretchings[i].copy())

    def spin_at(self, i):
        return Skw3.wrap(self.spins[i].copy())


class Trajectory:
    """Dense sampled response history over contiguous mode segments."""

    def __init__(self, segments, motion):
        self.segments = list(segments)
        self.motion = motion

    @property
    def times(self):
        return np.concatenate([s.times for s in self.segments])

    @property
    def stresses(self):
        return np.vstack([s.stresses for s in self.segments])

    @property
    def hardenings(self):
        return np.concatenate([s.hardenings for s in self.segments])

    @property
    def fs(self):
        return np.concatenate([s.fs for s in self.segments])

    @property
    def psis(self):
        return np.concatenate([s.psis for s in self.segments])

    @property
    def mus(self):
        return np.concatenate([s.mus for s in self.segments])

    def final_state(self) -> MaterialState:
        last = self.segments[-1]
        return MaterialState(
            t=float(last.times[-1]),
            stress=Sym3.wrap(last.stresses[-1].copy()),
            hardening=float(last.hardenings[-1]),
        )


class _Recorder:
    def __init__(self, model, motion, mode, entry_case, seg_end):
        self.model = model
        self.motion = motion
        self.mode = mode
        self.entry_case = entry_case
        self.seg_end = seg_end
        self.times = []
        self.stresses = []
        self.hardenings = []
        self.fs = []
        self.stretchings = []
        self.spins = []
        self.psis = []
        self.mus = []

    def add(self, t, stress, hardening):
        d, w = _kin(self.motion, t, self.seg_end)
        try:
            grad = self.model.yield_fn.gradient(stress)
        except SingularGradient:
            loading = math.nan
            hard_factor = math.nan
        else:
            loading = inner(self.model.elastic.apply(stress, d), grad)
            hard_factor = 1.0 + inner(grad, self.model.direction.value(stress))
        self.times.append(t)
        self.stresses.append(stress.v)
        self.hardenings.append(hardening)
        self.fs.append(self.model.yield_fn.value(stress))
        self.stretchings.append(d.v)
        self.spins.append(w.w)
        self.psis.append(loading)
        self.mus.append(hard_factor)

    def finalize(self) -> Segment:
        return Segment(
            mode=self.mode,
            entry_case=self.entry_case,
            times=np.array(self.times),
            stresses=np.array(self.stresses),
            hardenings=np.array(self.hardenings),
            fs=np.array(self.fs),
            stretchings=np.array(self.stretchings),
            spins=np.array(self.spins),
            psis=np.array(self.psis),
            mus=np.array(self.mus),
        )


def _locate_event(model, motion, mode, t0, stress0, h, seg_end, opts,
                  event_value, tol, direction):
    """Bisect the step (t0, t0 + h] for a sign change of the event function.

    `direction` is +1 when the event fires as the value rises through the
    tolerance band, -1 when it falls. The bracket is refined until it
    collapses to float resolution (or the iteration budget runs out), and
    the pre-event end is returned, so the admissible side of the event is
    never overshot and the event-function value there is within tolerance.
    """
    a = t0
    stress_a = stress0
    b = t0 + h
    for _ in range(opts.event_bisection_iters):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        stress_mid = _rk4_step(model, motion, mode, t0, stress0, mid - t0, seg_end)
        value = event_value(stress_mid, mid)
        if value * direction > 0.0 and abs(value) > tol:
            b = mid
        else:
            a = mid
            stress_a = stress_mid
    return a, stress_a


def _run_segment(model, motion, state, stop, mode, entry_case, opts):
    recorder = _Recorder(model, motion, mode, entry_case, stop)
    t = state.t
    stress = state.stress
    if mode is ResponseMode.PLASTIC:
        hardening = model.yield_fn.value(stress)  # k = f(T) while flowing
    else:
        hardening = state.hardening
    recorder.add(t, stress, hardening)
    while t < stop - _snap(stop):
        h = min(opts.dt_max, stop - t)
        new_stress = _rk4_step(model, motion, mode, t, stress, h, stop)
        t_new = t + h
        if mode is ResponseMode.ELASTIC:
            gap = model.yield_fn.value(new_stress) - hardening
            if gap > opts.tol_yield:
                t, stress = _locate_event(
                    model, motion, mode, t, stress, h, stop, opts,
                    lambda s, tt: model.yield_fn.value(s) - hardening,
                    opts.tol_yield, +1.0,
                )
                recorder.add(t, stress, hardening)
                break
            t, stress = t_new, new_stress
            recorder.add(t, stress, hardening)
        else:
            d_new, _ = _kin(motion, t_new, stop)
            loading_new = _loading_index(model, new_stress, d_new)
            if loading_new < -opts.tol_psi:
                def unload(s, tt):
                    d, _ = _kin(motion, tt, stop)
                    return _loading_index(model, s, d)

                t, stress = _locate_event(
                    model, motion, mode, t, stress, h, stop, opts,
                    unload, opts.tol_psi, -1.0,
                )
                hardening = model.yield_fn.value(stress)
                recorder.add(t, stress, hardening)
                break
            t, stress = t_new, new_stress
            hardening = model.yield_fn.value(stress)
            recorder.add(t, stress, hardening)
    return recorder.finalize(), MaterialState(t=t, stress=stress, hardening=hardening)


def integrate(model, motion, state, t_end, opts=None) -> Trajectory:
    """Advance the state to t_end, producing a segmented trajectory.

    The interval is cut at motion breakpoints; within each piece the engine
    classifies the state (right-hand stretching), integrates the selected law
    until an event or the piece ends, then re-classifies. Elastic steps keep
    f(T) <= k + tol_yield by construction of the yield event, and plastic
    steps set k = f(T), so the axiom holds at every accepted sample.
    """
    opts = opts or _DEFAULT_OPTS
    t_end = float(t_end)
    if not t_end > state.t:
        raise ValueError("t_end must exceed the initial time")
    lo, hi = motion.domain
    if state.t < lo - _snap(lo) or t_end > hi + (_snap(hi) if math.isfinite(hi) else 0.0):
        raise OutOfDomain(
            f"integration window [{state.t}, {t_end}] outside motion domain [{lo}, {hi}]"
        )
    f0 = model.yield_fn.value(state.stress)
    if f0 > state.hardening + opts.tol_yield:
        raise AxiomViolated(
            f"initial state violates f(T0) <= k0: f = {f0!r}, k = {state.hardening!r}"
        )
    stops = [b for b in sorted(motion.breakpoints())
             if state.t + _snap(state.t) < b < t_end - _snap(t_end)]
    stops.append(t_end)
    segments = []
    current = state
    for stop in stops:
        stall = 0
        while current.t < stop - _snap(stop):
            d0, _ = kinematics(motion, current.t, "right")
            entry_case = classify(model, current.stress, current.hardening, d0, opts)
            if entry_case in (CaseLabel.I, CaseLabel.II):
                mode = ResponseMode.ELASTIC
            elif entry_case is CaseLabel.IV:
                mode = ResponseMode.PLASTIC
            else:
                mode = resolve_case_iii(model, current, motion, opts, t_max=stop)
            previous_t = current.t
            segment, current = _run_segment(
                model, motion, current, stop, mode, entry_case, opts
            )
            segments.append(segment)
            if current.t <= previous_t + _snap(previous_t):
                stall += 1
                if stall > 3:
                    raise RuntimeError(
                        f"integration stalled at t = {current.t!r}; "
                        "event location made no progress"
                    )
            else:
                stall = 0
    return Trajectory(segments, motion)

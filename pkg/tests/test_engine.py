import math

import numpy as np
import pytest

from ratepoint.constitutive import default_model, mu, p_tensor, psi
from ratepoint.engine import (
    CaseLabel,
    IntegrationOptions,
    MaterialState,
    ResponseMode,
    classify,
    in_elastic_domain,
    integrate,
    resolve_case_iii,
    rhs,
)
from ratepoint.errors import AxiomViolated, OutOfDomain
from ratepoint.motions import (
    ConstantVelocityGradient,
    Motion,
    PiecewiseMotion,
    RigidRotation,
    SimpleShear,
    rotation_about,
)
from ratepoint.tensors import (
    Mat3,
    Skw3,
    Sym3,
    inner,
    jaumann_to_material,
    norm,
    random_symmetric,
    rotate,
)

UNIT_DEV = Sym3.diag(1.0, -1.0, 0.0) / math.sqrt(2.0)


def test_in_elastic_domain():
    model = default_model()
    s = UNIT_DEV * 0.5
    assert in_elastic_domain(model, s, 1.0, 1e-9)
    assert in_elastic_domain(model, s, 0.5, 1e-9)
    assert not in_elastic_domain(model, s, 0.5 - 1e-8, 1e-9)


def test_classify_cases():
    model = default_model()
    opts = IntegrationOptions()
    interior = UNIT_DEV * 0.5
    d = Sym3.diag(1.0, 0.0, 0.0)
    assert classify(model, interior, 1.0, d, opts) is CaseLabel.I

    on_yield = UNIT_DEV * 1.0
    k = model.f(on_yield)
    p = p_tensor(model, on_yield)
    assert classify(model, on_yield, k, -p, opts) is CaseLabel.II
    assert classify(model, on_yield, k, p, opts) is CaseLabel.IV
    # tangential stretching: psi = 0
    tangent = Sym3([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    assert abs(psi(model, on_yield, tangent)) < 1e-14
    assert classify(model, on_yield, k, tangent, opts) is CaseLabel.III


def test_classify_rejects_inadmissible_state():
    model = default_model()
    opts = IntegrationOptions()
    s = UNIT_DEV * 1.0
    with pytest.raises(AxiomViolated):
        classify(model, s, 1.0 - 10e-9, Sym3.zero(), opts)


def test_rhs_elastic_formula():
    model = default_model(lambda_e=2.0, mu_e=3.0)
    d = Sym3([0.4, -0.1, 0.3, 0.2, 0.0, -0.5])
    out = rhs(model, ResponseMode.ELASTIC, UNIT_DEV, d, Skw3.zero())
    tr_d = 0.4 - 0.1 + 0.3
    expect = Sym3.identity() * (2.0 * tr_d) + d * 6.0
    assert norm(out - expect) < 1e-14


def test_rhs_spin_term():
    model = default_model()
    s = Sym3.diag(2.0, -1.0, 0.5)
    d = Sym3.zero()
    w = Skw3([0.3, -0.2, 0.6])
    out = rhs(model, ResponseMode.ELASTIC, s, d, w)
    assert norm(out - jaumann_to_material(Sym3.zero(), s, w)) < 1e-14


def test_rhs_plastic_matches_elastic_at_tangency():
    model = default_model()
    s = UNIT_DEV * 1.3
    p = p_tensor(model, s)
    raw = Sym3([0.7, -0.2, -0.5, 0.4, 0.1, -0.3])
    tangent = raw - p * (inner(raw, p) / inner(p, p))
    w = Skw3([0.1, 0.0, -0.4])
    a = rhs(model, ResponseMode.ELASTIC, s, tangent, w)
    b = rhs(model, ResponseMode.PLASTIC, s, tangent, w)
    assert norm(a - b) < 1e-12


def test_rhs_plastic_vanishes_at_limit_equilibrium():
    # on the limit surface (mu = 0) the stretching along -A^-1[B] freezes T
    model = default_model()
    s = UNIT_DEV * 2.0
    assert abs(mu(model, s)) < 1e-14
    b = model.direction.value(s)
    d = -model.elastic.apply_inverse(s, b)
    out = rhs(model, ResponseMode.PLASTIC, s, d, Skw3.zero())
    assert norm(out) < 1e-12


def make_tangent_motion(spin_z):
    # D has only an xy component, orthogonal to grad_f(diag(a,-a,0));
    # the spin tilts dpsi/dt through D : (W T - T W)
    d = 0.1
    l0 = np.array([[0.0, d, 0.0], [d, 0.0, 0.0], [0.0, 0.0, 0.0]])
    w = spin_z * np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return ConstantVelocityGradient(l0 + w)


def test_resolve_case_iii_plastic_without_spin():
    model = default_model()
    s = Sym3.diag(1.0, -1.0, 0.0)
    state = MaterialState(t=0.0, stress=s, hardening=model.f(s))
    motion = make_tangent_motion(0.0)
    d0 = motion.L(0.0).sym()
    assert abs(psi(model, s, d0)) < 1e-14
    # elastic trial keeps growing psi: dpsi/dt = 4 mu_e^2 |dev D|^2 / |dev T|
    assert resolve_case_iii(model, state, motion) is ResponseMode.PLASTIC


def test_resolve_case_iii_elastic_with_adverse_spin():
    model = default_model()
    s = Sym3.diag(1.0, -1.0, 0.0)
    state = MaterialState(t=0.0, stress=s, hardening=model.f(s))
    motion = make_tangent_motion(-1.0)
    assert resolve_case_iii(model, state, motion) is ResponseMode.ELASTIC
    # forward-difference cross-check of the probed sign, elastic Heun steps
    h = 1e-6
    t, stress = 0.0, s
    vals = []
    for _ in range(3):
        d, w = motion.L(t).sym(), motion.L(t).skw()
        vals.append(psi(model, stress, d))
        k1 = rhs(model, ResponseMode.ELASTIC, stress, d, w)
        mid = Sym3.wrap(stress.v + h * k1.v)
        d2, w2 = motion.L(t + h).sym(), motion.L(t + h).skw()
        k2 = rhs(model, ResponseMode.ELASTIC, mid, d2, w2)
        stress = Sym3.wrap(stress.v + 0.5 * h * (k1.v + k2.v))
        t += h
    assert (vals[1] - vals[0]) / h < -0.1


def test_resolve_case_iii_rigid_rotation_is_elastic():
    model = default_model()
    s = Sym3.diag(1.0, -1.0, 0.0)
    state = MaterialState(t=0.0, stress=s, hardening=model.f(s))
    motion = RigidRotation(axis=[0.0, 0.0, 1.0], rate=1.0)
    assert resolve_case_iii(model, state, motion) is ResponseMode.ELASTIC


def test_integrate_simple_shear_closed_form():
    model = default_model()
    rate = 1.0
    motion = SimpleShear(rate=rate)
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=100.0)
    traj = integrate(model, motion, state, 1.5)
    assert len(traj.segments) == 1
    seg = traj.segments[0]
    assert seg.mode is ResponseMode.ELASTIC
    assert seg.entry_case is CaseLabel.I
    g = model.elastic.mu_e
    for i in range(0, seg.n_samples, 100):
        t = seg.times[i]
        s = seg.stress_at(i)
        angle = rate * t
        assert abs(s.xy - g * math.sin(angle)) < 1e-6
        assert abs(s.xx - g * (1.0 - math.cos(angle))) < 1e-6
        assert abs(s.yy + g * (1.0 - math.cos(angle))) < 1e-6
        assert abs(s.zz) < 1e-9 and abs(s.yz) < 1e-9 and abs(s.xz) < 1e-9
    # k untouched over the whole elastic run
    assert np.all(seg.hardenings == 100.0)


def test_integrate_yield_onset_and_hardening():
    model = default_model()
    l0 = np.diag([1.0, -0.5, -0.5])
    motion = ConstantVelocityGradient(l0)
    k0 = 0.5
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=k0)
    traj = integrate(model, motion, state, 1.0)
    assert [s.mode for s in traj.segments] == [ResponseMode.ELASTIC,
                                               ResponseMode.PLASTIC]
    el, pl = traj.segments
    # elastic phase: T = 2 t D (deviatoric D, mu_e = 1), so f = 2 t |D|
    t_yield = k0 / (2.0 * math.sqrt(1.5))
    assert abs(el.t_end - t_yield) < 1e-9
    assert np.all(el.hardenings == k0)
    assert pl.entry_case is CaseLabel.IV
    # plastic branch keeps k glued to f and strictly hardening (mu > 0 here)
    assert np.abs(pl.hardenings - pl.fs).max() <= 1e-10
    assert np.all(np.diff(pl.hardenings) > 0.0)
    assert np.all(pl.mus[:-1] > 0.0)
    assert np.all(pl.psis[:-1] > 0.0)


def test_integrate_hardening_rate_equation():
    # independently integrate kdot = psi mu over the plastic samples
    model = default_model()
    motion = ConstantVelocityGradient(np.diag([1.0, -0.5, -0.5]))
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=0.5)
    traj = integrate(model, motion, state, 1.0)
    pl = traj.segments[-1]
    assert pl.mode is ResponseMode.PLASTIC
    rate = pl.psis * pl.mus
    k_rebuilt = pl.hardenings[0] + np.concatenate(
        ([0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(pl.times))))
    gain = pl.hardenings[-1] - pl.hardenings[0]
    assert abs(k_rebuilt[-1] - pl.hardenings[-1]) < 1e-6 * max(1.0, gain)


def test_integrate_loading_direction_sign():
    # d/dt f = psi mu: the sign of the stress-rate projection on grad_f
    # follows the sign of mu at plastic samples
    model = default_model()
    motion = ConstantVelocityGradient(np.diag([1.0, -0.5, -0.5]))
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=0.5)
    traj = integrate(model, motion, state, 1.0)
    pl = traj.segments[-1]
    df = np.diff(pl.fs)
    dt = np.diff(pl.times)
    mid_mu = 0.5 * (pl.mus[1:] + pl.mus[:-1])
    mid_psi = 0.5 * (pl.psis[1:] + pl.psis[:-1])
    mask = (mid_psi > 1e-3) & (np.abs(mid_mu) > 0.05) & (dt > 1e-6)
    assert mask.sum() > 50
    assert np.all(np.sign(df[mask] / dt[mask]) == np.sign(mid_mu[mask]))


def test_integrate_rigid_rotation_rotates_stress():
    model = default_model()
    axis = [0.0, 0.0, 1.0]
    rate = 1.3
    motion = RigidRotation(axis=axis, rate=rate)
    t0_stress = Sym3([0.6, -0.2, -0.4, 0.1, 0.0, 0.3])
    state = MaterialState(t=0.0, stress=t0_stress, hardening=5.0)
    traj = integrate(model, motion, state, 2.0)
    assert len(traj.segments) == 1
    seg = traj.segments[0]
    assert seg.mode is ResponseMode.ELASTIC
    for i in range(0, seg.n_samples, 137):
        q = rotation_about(axis, rate * seg.times[i])
        expect = rotate(q, t0_stress)
        assert norm(seg.stress_at(i) - expect) < 1e-8
    assert np.all(seg.hardenings == 5.0)


class PulsedStretch(Motion):
    """L(t) = L0 cos(w t) for diagonal traceless L0 = c diag(1,-1,0)."""

    def __init__(self, c, w, t_total):
        self.c = c
        self.w = w
        self.t_total = t_total

    @property
    def domain(self):
        return (0.0, self.t_total)

    def F(self, t):
        self._check_domain(t)
        s = self.c * math.sin(self.w * t) / self.w
        return Mat3(np.diag([math.exp(s), math.exp(-s), 1.0]))

    def L(self, t, side="right"):
        self._check_domain(t)
        g = self.c * math.cos(self.w * t)
        return Mat3(np.diag([g, -g, 0.0]))


def test_integrate_unloading_event():
    # plastic from the start; psi crosses zero at t = pi/2 where the
    # stretching direction reverses, after which the response is elastic
    model = default_model()
    motion = PulsedStretch(c=1.0, w=1.0, t_total=2.5)
    s0 = UNIT_DEV * 1.0
    state = MaterialState(t=0.0, stress=s0, hardening=model.f(s0))
    traj = integrate(model, motion, state, 2.5)
    modes = [s.mode for s in traj.segments]
    assert modes == [ResponseMode.PLASTIC, ResponseMode.ELASTIC]
    pl, el = traj.segments
    assert abs(pl.t_end - math.pi / 2.0) < 1e-6
    # radial plastic flow: the stress stays on the UNIT_DEV ray with radius
    # r(t) = 2 - (2 - 1) exp(-0.8 sqrt(2) sin t); sqrt(2) = |diag(1,-1,0)|
    r_end = 2.0 - math.exp(-0.8 * math.sqrt(2.0))
    assert abs(pl.fs[-1] - r_end) < 1e-7
    assert abs(pl.hardenings[-1] - r_end) < 1e-7
    assert np.all(el.hardenings == el.hardenings[0])
    assert el.fs[-1] < el.hardenings[0] - 0.1


def test_integrate_breakpoint_reclassification():
    # shear to yield, keep shearing plastically, then reverse: the reversal
    # breakpoint flips psi negative so the last piece is elastic
    model = default_model()
    motion = PiecewiseMotion([(1.2, SimpleShear(rate=1.0)),
                              (0.6, SimpleShear(rate=-1.0))])
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=0.5)
    traj = integrate(model, motion, state, 1.8)
    modes = [s.mode for s in traj.segments]
    assert modes[0] is ResponseMode.ELASTIC
    assert ResponseMode.PLASTIC in modes
    assert modes[-1] is ResponseMode.ELASTIC
    assert traj.segments[-1].t_start == 1.2
    # unloading keeps k at its plastic peak
    peak = traj.segments[-2].hardenings[-1]
    assert np.all(traj.segments[-1].hardenings == peak)


def test_integrate_axiom_and_segment_contiguity():
    rng = np.random.default_rng(42)
    model = default_model()
    opts = IntegrationOptions()
    for _ in range(10):
        raw = random_symmetric(rng)
        s0 = raw * (0.6 / max(norm(raw), 1e-12))
        f0 = model.f(s0)
        k0 = f0 + float(rng.uniform(0.0, 0.3))
        if rng.integers(0, 3) == 0:
            k0 = f0
        motion = ConstantVelocityGradient(rng.standard_normal((3, 3)) * 0.8)
        state = MaterialState(t=0.0, stress=s0, hardening=k0)
        traj = integrate(model, motion, state, 0.3, opts)
        assert np.max(traj.fs - traj.hardenings) <= opts.tol_yield
        for a, b in zip(traj.segments[:-1], traj.segments[1:]):
            assert abs(a.t_end - b.t_start) < 1e-12
        assert abs(traj.segments[0].t_start - 0.0) < 1e-15
        assert abs(traj.segments[-1].t_end - 0.3) < 1e-12
        for seg in traj.segments:
            if seg.mode is ResponseMode.ELASTIC:
                assert np.all(seg.hardenings == seg.hardenings[0])


def test_integrate_validation_errors():
    model = default_model()
    motion = SimpleShear(rate=1.0)
    good = MaterialState(t=0.0, stress=Sym3.zero(), hardening=1.0)
    with pytest.raises(ValueError):
        integrate(model, motion, good, 0.0)
    bad = MaterialState(t=0.0, stress=UNIT_DEV * 2.0, hardening=1.0)
    with pytest.raises(AxiomViolated):
        integrate(model, motion, bad, 1.0)
    bounded = PiecewiseMotion([(1.0, SimpleShear(rate=1.0))])
    with pytest.raises(OutOfDomain):
        integrate(model, bounded, good, 2.0)


def test_integration_options_validation():
    with pytest.raises(ValueError):
        IntegrationOptions(dt_max=0.0)
    with pytest.raises(ValueError):
        IntegrationOptions(tol_yield=-1e-9)
    with pytest.raises(ValueError):
        IntegrationOptions(tol_psi=0.0)
    with pytest.raises(ValueError):
        IntegrationOptions(event_bisection_iters=0)
    with pytest.raises(ValueError):
        IntegrationOptions(case3_probe_depth=0)


def test_final_state_round_trip():
    model = default_model()
    motion = SimpleShear(rate=1.0)
    state = MaterialState(t=0.0, stress=Sym3.zero(), hardening=100.0)
    traj = integrate(model, motion, state, 0.5)
    fin = traj.final_state()
    assert abs(fin.t - 0.5) < 1e-12
    assert fin.hardening == 100.0
    # resuming from the final state continues the same elastic curve
    motion2 = PiecewiseMotion([(1.0, SimpleShear(rate=1.0))])
    full = integrate(model, motion2, state, 1.0)
    assert norm(full.final_state().stress - integrate(
        model, motion2, fin, 1.0).final_state().stress) < 1e-9

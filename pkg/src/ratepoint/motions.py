"""Deformation histories and their velocity-gradient fields.

A motion supplies the deformation gradient F(t) and the velocity gradient
L(t) = Fdot F^{-1}; stretching D = sym L and spin W = skw L drive the
response. Piecewise programs compose multiplicatively and expose their
junction times as breakpoints, where one-sided derivatives apply: `side`
selects the left or right limit of L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import OutOfDomain
from .tensors import Mat3, Skw3, Sym3

__all__ = [
    "Motion",
    "ConstantVelocityGradient",
    "SimpleShear",
    "RigidRotation",
    "PiecewiseMotion",
    "SuperposedRotation",
    "MotionReport",
    "kinematics",
    "validate",
    "rotation_about",
]


def rotation_about(axis, angle) -> np.ndarray:
    """Rodrigues rotation matrix about a (not necessarily unit) axis."""
    a = np.asarray(axis, dtype=float).reshape(3)
    n = math.sqrt(float(a @ a))
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    a = a / n
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


class Motion:
    """Base class; concrete motions override F and L."""

    def F(self, t: float) -> Mat3:
        raise NotImplementedError

    def L(self, t: float, side: str = "right") -> Mat3:
        raise NotImplementedError

    def breakpoints(self) -> list:
        return []

    @property
    def domain(self):
        return (-math.inf, math.inf)

    def det_F(self, t: float) -> float:
        return self.F(t).det()

    def _check_domain(self, t):
        lo, hi = self.domain
        slack = 1e-9 * max(1.0, abs(lo) if math.isfinite(lo) else 0.0,
                           abs(hi) if math.isfinite(hi) else 0.0)
        if t < lo - slack or t > hi + slack:
            raise OutOfDomain(f"time {t} outside motion domain [{lo}, {hi}]")


class ConstantVelocityGradient(Motion):
    """F(t) = expm(t L0) for a fixed velocity gradient L0."""

    def __init__(self, velocity_gradient):
        self._L = velocity_gradient if isinstance(velocity_gradient, Mat3) \
            else Mat3(velocity_gradient)

    def F(self, t):
        return Mat3.wrap(expm(float(t) * self._L.m))

    def L(self, t, side="right"):
        return self._L

    def det_F(self, t):
        # det expm(t L0) = exp(t tr L0)
        return math.exp(float(t) * self._L.trace())


class SimpleShear(Motion):
    """F(t) = I + rate * t * e1 (x) e2; L is exactly rate * e1 (x) e2."""

    def __init__(self, rate):
        self.rate = float(rate)
        m = np.zeros((3, 3))
        m[0, 1] = self.rate
        self._L = Mat3(m)

    def F(self, t):
        m = np.eye(3)
        m[0, 1] = self.rate * float(t)
        return Mat3.wrap(m)

    def L(self, t, side="right"):
        return self._L

    def det_F(self, t):
        return 1.0


class RigidRotation(Motion):
    """Rotation about a fixed axis at constant angular rate; D = 0."""

    def __init__(self, axis, rate):
        a = np.asarray(axis, dtype=float).reshape(3)
        n = math.sqrt(float(a @ a))
        if n == 0.0:
            raise ValueError("rotation axis must be nonzero")
        self.axis = a / n
        self.rate = float(rate)
        ax, ay, az = self.axis
        k = np.array([[0.0, -az, ay], [az, 0.0, -ax], [-ay, ax, 0.0]])
        self._L = Mat3(self.rate * k)

    def F(self, t):
        return Mat3.wrap(rotation_about(self.axis, self.rate * float(t)))

    def L(self, t, side="right"):
        return self._L

    def det_F(self, t):
        return 1.0


class PiecewiseMotion(Motion):
    """Ordered segments (duration, motion) composed multiplicatively.

    Each segment motion runs on its own local clock starting at F = I; the
    global deformation is F_seg(t - t_j) applied after everything accumulated
    so far. Junction times are the motion's breakpoints.
    """

    def __init__(self, segments):
        segments = list(segments)
        if not segments:
            raise ValueError("piecewise motion needs at least one segment")
        self._durations = []
        self._motions = []
        for i, (duration, motion) in enumerate(segments):
            duration = float(duration)
            if not duration > 0.0:
                raise ValueError(f"segment {i} duration must be positive")
            self._durations.append(duration)
            self._motions.append(motion)
        self._cum = np.concatenate([[0.0], np.cumsum(self._durations)])
        # accumulated deformation entering each segment
        self._accum = [Mat3.identity()]
        self._accum_det = [1.0]
        for duration, motion in zip(self._durations, self._motions):
            self._accum.append(motion.F(duration) @ self._accum[-1])
            self._accum_det.append(motion.det_F(duration) * self._accum_det[-1])

    @property
    def domain(self):
        return (0.0, float(self._cum[-1]))

    def breakpoints(self):
        return [float(c) for c in self._cum[1:-1]]

    def _locate(self, t, side):
        self._check_domain(t)
        total = float(self._cum[-1])
        t = min(max(float(t), 0.0), total)
        snap = 1e-12 * max(1.0, total)
        # snap to the nearest junction when within rounding distance
        j = int(np.argmin(np.abs(self._cum - t)))
        if abs(float(self._cum[j]) - t) <= snap:
            if j == 0:
                return 0, 0.0
            if j == len(self._cum) - 1:
                return len(self._motions) - 1, self._durations[-1]
            if side == "left":
                return j - 1, self._durations[j - 1]
            return j, 0.0
        i = int(np.searchsorted(self._cum, t, side="right")) - 1
        return i, t - float(self._cum[i])

    def F(self, t):
        i, local = self._locate(t, "right")
        return self._motions[i].F(local) @ self._accum[i]

    def L(self, t, side="right"):
        i, local = self._locate(t, side)
        return self._motions[i].L(local, side)

    def det_F(self, t):
        i, local = self._locate(t, "right")
        return self._motions[i].det_F(local) * self._accum_det[i]


class SuperposedRotation(Motion):
    """Base motion observed in a frame rotating at constant spin.

    F*(t) = Q(t) F(t) with Q(t) the rotation by spin_rate * t about axis.
    The stretching transforms as D* = Q D Q^T and the spin picks up the frame
    contribution: W* = Q W Q^T + Qdot Q^T.
    """

    def __init__(self, base: Motion, spin_rate, axis):
        a = np.asarray(axis, dtype=float).reshape(3)
        n = math.sqrt(float(a @ a))
        if n == 0.0:
            raise ValueError("rotation axis must be nonzero")
        self.base = base
        self.spin_rate = float(spin_rate)
        self.axis = a / n
        ax, ay, az = self.axis
        k = np.array([[0.0, -az, ay], [az, 0.0, -ax], [-ay, ax, 0.0]])
        self._spin = self.spin_rate * k

    @property
    def domain(self):
        return self.base.domain

    def breakpoints(self):
        return self.base.breakpoints()

    def _Q(self, t):
        return rotation_about(self.axis, self.spin_rate * float(t))

    def F(self, t):
        return Mat3.wrap(self._Q(t) @ self.base.F(t).m)

    def L(self, t, side="right"):
        q = self._Q(t)
        return Mat3.wrap(self._spin + q @ self.base.L(t, side).m @ q.T)

    def det_F(self, t):
        return self.base.det_F(t)


def kinematics(motion: Motion, t: float, side: str = "right"):
    """Stretching and spin (D, W) of the motion at time t."""
    velocity_gradient = motion.L(t, side)
    return velocity_gradient.sym(), velocity_gradient.skw()


@dataclass
class MotionReport:
    ok: bool
    violations: list = field(default_factory=list)
    breakpoints: list = field(default_factory=list)


def validate(motion: Motion, t_grid) -> MotionReport:
    """Check det F > 0 on the grid and continuity of F across breakpoints.

    Continuity is tested to 1e-10 by reconstructing F at each breakpoint from
    both one-sided expansions F(b) ~ (I + delta L) F(b -/+ delta).
    """
    violations = []
    for t in np.asarray(t_grid, dtype=float).reshape(-1):
        try:
            det = motion.det_F(float(t))
        except OutOfDomain as exc:
            violations.append((float(t), str(exc)))
            continue
        if not det > 0.0:
            violations.append((float(t), f"det F = {det:.6e} is not positive"))
    bps = [float(b) for b in motion.breakpoints()]
    for b in bps:
        delta = 1e-6 * max(1.0, abs(b))
        f_b = motion.F(b).m
        left = (np.eye(3) + delta * motion.L(b, "left").m) @ motion.F(b - delta).m
        right = (np.eye(3) - delta * motion.L(b, "right").m) @ motion.F(b + delta).m
        gap = float(np.abs(left - right).max())
        if gap > 1e-10 * max(1.0, float(np.abs(f_b).max())):
            violations.append((b, f"deformation gradient jump {gap:.6e} at breakpoint"))
    return MotionReport(ok=not violations, violations=violations, breakpoints=bps)

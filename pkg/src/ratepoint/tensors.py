"""Fixed-size tensor algebra on 3-space.

Symmetric tensors carry six components in Voigt order (xx, yy, zz, yz, xz,
xy); the inner product puts factor-2 weights on the off-diagonal slots so it
agrees with the full 3x3 double contraction. Skew tensors are stored by their
axial vector w, with W x = w cross x. All containers are immutable.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Sym3",
    "Skw3",
    "Mat3",
    "Orth3",
    "trace",
    "deviator",
    "inner",
    "norm",
    "rotate",
    "jaumann_to_material",
    "random_rotation",
    "random_symmetric",
]

VOIGT_WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


def _frozen(a):
    a.flags.writeable = False
    return a


class Sym3:
    """Symmetric second-order tensor on 3-space."""

    __slots__ = ("v",)

    def __init__(self, components):
        v = np.array(components, dtype=float).reshape(-1)
        if v.shape != (6,):
            raise ValueError("Sym3 takes six components (xx, yy, zz, yz, xz, xy)")
        if not np.all(np.isfinite(v)):
            raise ValueError("Sym3 components must be finite")
        self.v = _frozen(v)

    @classmethod
    def wrap(cls, v):
        # trusted fast path for freshly computed float64 (6,) arrays
        obj = object.__new__(cls)
        obj.v = _frozen(v)
        return obj

    @classmethod
    def zero(cls):
        return cls.wrap(np.zeros(6))

    @classmethod
    def identity(cls):
        return cls.wrap(np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def diag(cls, a, b, c):
        return cls([a, b, c, 0.0, 0.0, 0.0])

    @classmethod
    def from_matrix(cls, m, asym_tol=1e-9):
        m = m.m if isinstance(m, Mat3) else np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > asym_tol * scale:
            raise ValueError("matrix is not symmetric within tolerance")
        return cls.wrap(
            np.array(
                [
                    m[0, 0],
                    m[1, 1],
                    m[2, 2],
                    0.5 * (m[1, 2] + m[2, 1]),
                    0.5 * (m[0, 2] + m[2, 0]),
                    0.5 * (m[0, 1] + m[1, 0]),
                ]
            )
        )

    def to_matrix(self):
        xx, yy, zz, yz, xz, xy = self.v
        return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])

    @property
    def xx(self):
        return float(self.v[0])

    @property
    def yy(self):
        return float(self.v[1])

    @property
    def zz(self):
        return float(self.v[2])

    @property
    def yz(self):
        return float(self.v[3])

    @property
    def xz(self):
        return float(self.v[4])

    @property
    def xy(self):
        return float(self.v[5])

    def __add__(self, other):
        return Sym3.wrap(self.v + other.v)

    def __sub__(self, other):
        return Sym3.wrap(self.v - other.v)

    def __mul__(self, s):
        return Sym3.wrap(self.v * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Sym3.wrap(self.v / float(s))

    def __neg__(self):
        return Sym3.wrap(-self.v)

    def __repr__(self):
        return "Sym3(%s)" % np.array2string(self.v, precision=6, separator=", ")


class Skw3:
    """Skew second-order tensor stored by its axial vector."""

    __slots__ = ("w",)

    def __init__(self, axial):
        w = np.array(axial, dtype=float).reshape(-1)
        if w.shape != (3,):
            raise ValueError("Skw3 takes a 3-component axial vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("Skw3 components must be finite")
        self.w = _frozen(w)

    @classmethod
    def wrap(cls, w):
        obj = object.__new__(cls)
        obj.w = _frozen(w)
        return obj

    @classmethod
    def zero(cls):
        return cls.wrap(np.zeros(3))

    @classmethod
    def from_matrix(cls, m, skew_tol=1e-9):
        m = m.m if isinstance(m, Mat3) else np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("expected a 3x3 matrix")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m + m.T).max() > skew_tol * scale:
            raise ValueError("matrix is not skew within tolerance")
        return cls.wrap(np.array([m[2, 1], m[0, 2], m[1, 0]]))

    def to_matrix(self):
        a, b, c = self.w
        return np.array([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]])

    def norm(self):
        return math.sqrt(2.0 * float(self.w @ self.w))

    def __add__(self, other):
        return Skw3.wrap(self.w + other.w)

    def __sub__(self, other):
        return Skw3.wrap(self.w - other.w)

    def __mul__(self, s):
        return Skw3.wrap(self.w * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return Skw3.wrap(-self.w)

    def __repr__(self):
        return "Skw3(axial=%s)" % np.array2string(self.w, precision=6, separator=", ")


class Mat3:
    """General second-order tensor (full 3x3 storage)."""

    __slots__ = ("m",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("Mat3 takes a 3x3 matrix")
        if not np.all(np.isfinite(m)):
            raise ValueError("Mat3 entries must be finite")
        self.m = _frozen(m)

    @classmethod
    def wrap(cls, m):
        obj = object.__new__(cls)
        obj.m = _frozen(m)
        return obj

    @classmethod
    def identity(cls):
        return cls.wrap(np.eye(3))

    @classmethod
    def zero(cls):
        return cls.wrap(np.zeros((3, 3)))

    def transpose(self):
        return Mat3.wrap(self.m.T.copy())

    def det(self):
        return float(np.linalg.det(self.m))

    def inv(self):
        return Mat3.wrap(np.linalg.inv(self.m))

    def trace(self):
        return float(self.m[0, 0] + self.m[1, 1] + self.m[2, 2])

    def sym(self):
        return Sym3.from_matrix(0.5 * (self.m + self.m.T))

    def skw(self):
        s = 0.5 * (self.m - self.m.T)
        return Skw3.wrap(np.array([s[2, 1], s[0, 2], s[1, 0]]))

    def norm(self):
        return float(np.sqrt((self.m * self.m).sum()))

    def __matmul__(self, other):
        return Mat3.wrap(self.m @ other.m)

    def __add__(self, other):
        return Mat3.wrap(self.m + other.m)

    def __sub__(self, other):
        return Mat3.wrap(self.m - other.m)

    def __mul__(self, s):
        return Mat3.wrap(self.m * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return Mat3.wrap(-self.m)

    def __repr__(self):
        return "Mat3(%s)" % np.array2string(self.m, precision=6, separator=", ")


class Orth3:
    """Orthogonal tensor; construction verifies Q^T Q = I and |det Q| = 1."""

    __slots__ = ("m",)

    ORTHO_TOL = 1e-12

    def __init__(self, matrix):
        m = matrix.m if isinstance(matrix, Mat3) else np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("Orth3 takes a 3x3 matrix")
        r = m.T @ m - np.eye(3)
        if math.sqrt(float((r * r).sum())) > self.ORTHO_TOL:
            raise ValueError("matrix is not orthogonal within 1e-12")
        d = float(np.linalg.det(m))
        if abs(abs(d) - 1.0) > self.ORTHO_TOL:
            raise ValueError("orthogonal matrix must have determinant +-1")
        self.m = _frozen(np.array(m, dtype=float))

    def transpose(self):
        obj = object.__new__(Orth3)
        obj.m = _frozen(self.m.T.copy())
        return obj

    def det(self):
        return float(np.linalg.det(self.m))

    def to_mat3(self):
        return Mat3(self.m)

    def __matmul__(self, other):
        om = other.m if isinstance(other, (Orth3, Mat3)) else np.asarray(other, float)
        return Orth3(self.m @ om)

    def __repr__(self):
        return "Orth3(%s)" % np.array2string(self.m, precision=6, separator=", ")


def trace(s: Sym3) -> float:
    v = s.v
    return float(v[0] + v[1] + v[2])


def deviator(s: Sym3) -> Sym3:
    v = s.v.copy()
    mean = (v[0] + v[1] + v[2]) / 3.0
    v[0] -= mean
    v[1] -= mean
    v[2] -= mean
    return Sym3.wrap(v)


def inner(a: Sym3, b: Sym3) -> float:
    """Double contraction a : b, off-diagonal slots weighted by 2."""
    return float(np.dot(VOIGT_WEIGHTS * a.v, b.v))


def norm(s: Sym3) -> float:
    return math.sqrt(max(inner(s, s), 0.0))


def rotate(q, s: Sym3) -> Sym3:
    """Conjugation Q S Q^T; rejects a non-orthogonal Q."""
    if not isinstance(q, Orth3):
        q = Orth3(q)
    m = q.m @ s.to_matrix() @ q.m.T
    return Sym3.wrap(
        np.array(
            [
                m[0, 0],
                m[1, 1],
                m[2, 2],
                0.5 * (m[1, 2] + m[2, 1]),
                0.5 * (m[0, 2] + m[2, 0]),
                0.5 * (m[0, 1] + m[1, 0]),
            ]
        )
    )


def _spin_commutator(w: Skw3, s: Sym3) -> Sym3:
    # closed-form W S - S W for skew W (axial a,b,c) and symmetric S
    a, b, c = w.w
    xx, yy, zz, yz, xz, xy = s.v
    return Sym3.wrap(
        np.array(
            [
                2.0 * (b * xz - c * xy),
                2.0 * (c * xy - a * yz),
                2.0 * (a * yz - b * xz),
                a * (yy - zz) + c * xz - b * xy,
                b * (zz - xx) + a * xy - c * yz,
                c * (xx - yy) + b * yz - a * xz,
            ]
        )
    )


def jaumann_to_material(t_jaumann: Sym3, stress: Sym3, spin: Skw3) -> Sym3:
    """Material stress rate from a corotational (Jaumann) rate.

    Tdot = Tcirc + W T - T W; the commutator of a skew and a symmetric
    tensor is symmetric, so the result stays in Sym3.
    """
    return Sym3.wrap(t_jaumann.v + _spin_commutator(spin, stress).v)


def random_rotation(rng) -> Orth3:
    """Random proper rotation via QR orthogonalization (determinant +1)."""
    a = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    q = q * np.where(np.diag(r) >= 0.0, 1.0, -1.0)
    if np.linalg.det(q) < 0.0:
        q = q.copy()
        q[:, 0] = -q[:, 0]
    return Orth3(q)


def random_symmetric(rng, scale=1.0) -> Sym3:
    m = rng.standard_normal((3, 3)) * scale
    return Sym3.from_matrix(0.5 * (m + m.T))

"""Constitutive ingredients of the rate-type material model.

A model bundles three functions of the current stress T:

* an elastic tangent A(T), a linear map on symmetric tensors,
* a scalar yield measure f(T) with gradient grad_f(T),
* a plastic flow direction B(T).

Derived scalars: the loading index psi(T, D) = A(T)[D] : grad_f(T) and the
hardening factor mu(T) = 1 + grad_f(T) : B(T). The locus mu = 0 is the limit
surface; mu > 0 is the hardening region, mu < 0 the softening region.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import SingularGradient
from .tensors import Sym3, deviator, inner, norm, trace

__all__ = [
    "ElasticTangent",
    "GradeZeroIsotropic",
    "YieldFunction",
    "VonMises",
    "DruckerPragerLike",
    "PlasticDirection",
    "NormalityDirection",
    "MaterialModel",
    "default_model",
    "psi",
    "mu",
    "p_tensor",
    "c_apply",
]


class ElasticTangent(ABC):
    """Stress-dependent linear map A(T) on symmetric tensors."""

    @abstractmethod
    def apply(self, stress: Sym3, d: Sym3) -> Sym3:
        """A(T)[D]."""

    @abstractmethod
    def apply_transpose(self, stress: Sym3, s: Sym3) -> Sym3:
        """A(T)^T[S] with respect to the weighted inner product."""

    @abstractmethod
    def apply_inverse(self, stress: Sym3, s: Sym3) -> Sym3:
        """A(T)^{-1}[S]; the tangent is assumed invertible."""


class GradeZeroIsotropic(ElasticTangent):
    """Stress-independent isotropic tangent A[D] = lambda_e tr(D) I + 2 mu_e D.

    Invertibility needs mu_e > 0 and 3 lambda_e + 2 mu_e > 0; the closed-form
    inverse is A^{-1}[S] = (S - lambda_e/(3 lambda_e + 2 mu_e) tr(S) I) / (2 mu_e).
    """

    def __init__(self, lambda_e=1.0, mu_e=1.0):
        lambda_e = float(lambda_e)
        mu_e = float(mu_e)
        if mu_e <= 0.0:
            raise ValueError("mu_e must be positive")
        if 3.0 * lambda_e + 2.0 * mu_e <= 0.0:
            raise ValueError("3*lambda_e + 2*mu_e must be positive")
        self.lambda_e = lambda_e
        self.mu_e = mu_e

    def apply(self, stress, d):
        v = (2.0 * self.mu_e) * d.v
        lam_tr = self.lambda_e * (d.v[0] + d.v[1] + d.v[2])
        v[0] += lam_tr
        v[1] += lam_tr
        v[2] += lam_tr
        return Sym3.wrap(v)

    def apply_transpose(self, stress, s):
        # the isotropic tangent is self-adjoint
        return self.apply(stress, s)

    def apply_inverse(self, stress, s):
        c = self.lambda_e / (3.0 * self.lambda_e + 2.0 * self.mu_e)
        v = s.v.copy()
        c_tr = c * (v[0] + v[1] + v[2])
        v[0] -= c_tr
        v[1] -= c_tr
        v[2] -= c_tr
        return Sym3.wrap(v / (2.0 * self.mu_e))

    def __repr__(self):
        return f"GradeZeroIsotropic(lambda_e={self.lambda_e}, mu_e={self.mu_e})"


class YieldFunction(ABC):
    """Scalar yield measure with a gradient defined away from singular loci."""

    grad_eps: float

    @abstractmethod
    def value(self, stress: Sym3) -> float:
        ...

    @abstractmethod
    def gradient(self, stress: Sym3) -> Sym3:
        """Raises SingularGradient where the gradient is undefined."""


class VonMises(YieldFunction):
    """f(T) = norm of the stress deviator.

    The gradient dev(T)/|dev(T)| is undefined on the hydrostatic axis; stresses
    with |dev(T)| < grad_eps are treated as outside the admissible domain and
    rejected, never regularized.
    """

    def __init__(self, grad_eps=1e-9):
        if grad_eps <= 0.0:
            raise ValueError("grad_eps must be positive")
        self.grad_eps = float(grad_eps)

    def value(self, stress):
        return norm(deviator(stress))

    def gradient(self, stress):
        dev = deviator(stress)
        n = norm(dev)
        if n < self.grad_eps:
            raise SingularGradient(
                f"deviator norm {n:.3e} below grad_eps {self.grad_eps:.3e}"
            )
        return dev / n

    def __repr__(self):
        return f"VonMises(grad_eps={self.grad_eps})"


class DruckerPragerLike(YieldFunction):
    """f(T) = |dev(T)| + alpha tr(T), pressure-sensitive variant."""

    def __init__(self, alpha, grad_eps=1e-9):
        if grad_eps <= 0.0:
            raise ValueError("grad_eps must be positive")
        self.alpha = float(alpha)
        self.grad_eps = float(grad_eps)

    def value(self, stress):
        return norm(deviator(stress)) + self.alpha * trace(stress)

    def gradient(self, stress):
        dev = deviator(stress)
        n = norm(dev)
        if n < self.grad_eps:
            raise SingularGradient(
                f"deviator norm {n:.3e} below grad_eps {self.grad_eps:.3e}"
            )
        v = dev.v / n
        v = v.copy()
        v[0] += self.alpha
        v[1] += self.alpha
        v[2] += self.alpha
        return Sym3.wrap(v)

    def __repr__(self):
        return f"DruckerPragerLike(alpha={self.alpha}, grad_eps={self.grad_eps})"


class PlasticDirection(ABC):
    """Stress-dependent flow direction B(T)."""

    @abstractmethod
    def value(self, stress: Sym3) -> Sym3:
        ...


class NormalityDirection(PlasticDirection):
    """B(T) = beta(T) A(T)[grad_f(T)] with beta(T) = -(c0 + c1 f(T)) < 0.

    This makes the plastic stretching parallel to grad_f (associative flow) and
    puts the limit surface at 1 + beta * grad_f : A[grad_f] = 0.
    """

    def __init__(self, c0, c1, elastic: ElasticTangent, yield_fn: YieldFunction):
        c0 = float(c0)
        c1 = float(c1)
        if c0 <= 0.0 or c1 <= 0.0:
            raise ValueError("c0 and c1 must be positive")
        self.c0 = c0
        self.c1 = c1
        self.elastic = elastic
        self.yield_fn = yield_fn

    def beta(self, stress) -> float:
        return -(self.c0 + self.c1 * self.yield_fn.value(stress))

    def value(self, stress):
        grad = self.yield_fn.gradient(stress)
        return self.beta(stress) * self.elastic.apply(stress, grad)

    def __repr__(self):
        return f"NormalityDirection(c0={self.c0}, c1={self.c1})"


@dataclass(frozen=True)
class MaterialModel:
    """Bundle of elastic tangent, yield function and flow direction."""

    elastic: ElasticTangent
    yield_fn: YieldFunction
    direction: PlasticDirection

    @property
    def grad_eps(self) -> float:
        return self.yield_fn.grad_eps

    def f(self, stress: Sym3) -> float:
        return self.yield_fn.value(stress)

    def grad_f(self, stress: Sym3) -> Sym3:
        return self.yield_fn.gradient(stress)


def default_model(lambda_e=1.0, mu_e=1.0, c0=0.1, c1=0.2, yield_fn=None,
                  grad_eps=1e-9) -> MaterialModel:
    """Dimensionless reference model; with the defaults and the deviatoric
    yield measure the limit surface sits at f = (1 - 2 mu_e c0)/(2 mu_e c1) = 2."""
    elastic = GradeZeroIsotropic(lambda_e=lambda_e, mu_e=mu_e)
    if yield_fn is None:
        yield_fn = VonMises(grad_eps=grad_eps)
    direction = NormalityDirection(c0=c0, c1=c1, elastic=elastic, yield_fn=yield_fn)
    return MaterialModel(elastic=elastic, yield_fn=yield_fn, direction=direction)


def psi(model: MaterialModel, stress: Sym3, d: Sym3) -> float:
    """Loading index psi(T, D) = A(T)[D] : grad_f(T)."""
    grad = model.yield_fn.gradient(stress)
    return inner(model.elastic.apply(stress, d), grad)


def mu(model: MaterialModel, stress: Sym3) -> float:
    """Hardening factor mu(T) = 1 + grad_f(T) : B(T)."""
    grad = model.yield_fn.gradient(stress)
    return 1.0 + inner(grad, model.direction.value(stress))


def p_tensor(model: MaterialModel, stress: Sym3) -> Sym3:
    """Loading direction P(T) = A(T)^T[grad_f(T)], so psi(T, D) = D : P(T)."""
    grad = model.yield_fn.gradient(stress)
    return model.elastic.apply_transpose(stress, grad)


def c_apply(model: MaterialModel, stress: Sym3, d: Sym3) -> Sym3:
    """Plastic tangent C(T)[D] = A(T)[D] + psi(T, D) B(T)."""
    grad = model.yield_fn.gradient(stress)
    a_d = model.elastic.apply(stress, d)
    loading = inner(a_d, grad)
    return Sym3.wrap(a_d.v + loading * model.direction.value(stress).v)

"""Functional data of the generalised rational SU(2) model.

The model is specified by the vacuum eigenvalues ``a(v)`` and ``d(v)`` of the
diagonal monodromy entries, the twist ``kappa`` and the shift ``epsilon``.
Everything downstream only sees the combination ``f = kappa * d / a`` and the
rapidities, so this module also hosts the Baxter polynomial, the weight
function ``Q(z) = f(z) Q_w(z + i eps) / Q_w(z)`` and the pseudo-momentum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateRoots, PoleHit, ZeroDenominator

# two rapidities closer than this (relative to 1 + max|w|) are coincident
DEGENERACY_RTOL = 1e-12
# distance to a zero of a(v) / Q_w(z) below which evaluation is refused
POLE_RTOL = 1e-13


def as_roots(values) -> np.ndarray:
    """Coerce a RapiditySet, list of [re, im] pairs or numbers to a 1-D complex array."""
    if isinstance(values, RapiditySet):
        return values.roots
    arr = np.asarray(values)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    return np.atleast_1d(arr).astype(complex).ravel()


def _scale(points) -> float:
    points = np.asarray(points)
    return 1.0 + (float(np.max(np.abs(points))) if points.size else 0.0)


@dataclass(frozen=True)
class RapiditySet:
    """Unordered multiset of complex rapidities."""

    roots: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        roots = np.array(as_roots(self.roots), dtype=complex)
        roots.setflags(write=False)
        object.__setattr__(self, "roots", roots)

    def __len__(self):
        return self.roots.size

    def __iter__(self):
        return iter(self.roots)

    @property
    def M(self) -> int:
        return self.roots.size

    def baxter(self, v):
        return baxter_eval(self.roots, v)

    def union(self, other) -> "RapiditySet":
        return RapiditySet(np.concatenate([self.roots, as_roots(other)]))


def baxter_eval(roots, v):
    """Product form of the Baxter polynomial ``prod_i (v - u_i)``.

    Vectorized in ``v``; an empty root set gives 1.
    """
    roots = as_roots(roots)
    v = np.asarray(v, dtype=complex)
    if roots.size == 0:
        return np.ones_like(v) if v.ndim else complex(1.0)
    out = np.prod(v[..., None] - roots, axis=-1)
    return out if out.ndim else complex(out)


def check_distinct(w, epsilon: float) -> None:
    """Reject sets where ``w_j - w_k`` or ``w_j - w_k + i eps`` vanish for j != k."""
    w = as_roots(w)
    if w.size < 2:
        return
    tol = DEGENERACY_RTOL * _scale(w)
    diff = w[:, None] - w[None, :]
    off = ~np.eye(w.size, dtype=bool)
    if np.any(np.abs(diff[off]) < tol):
        j, k = np.argwhere((np.abs(diff) < tol) & off)[0]
        raise DegenerateRoots(f"rapidities {j} and {k} coincide: {w[j]!r}")
    if np.any(np.abs(diff[off] + 1j * epsilon) < tol):
        j, k = np.argwhere((np.abs(diff + 1j * epsilon) < tol) & off)[0]
        raise DegenerateRoots(f"rapidities {j} and {k} differ by -i*eps")


@dataclass(frozen=True)
class RationalFunction:
    """``(scale * prod(v - zeros) / prod(v - poles)) ** exponent``, evaluated in product form.

    ``exponent`` lets a homogeneous chain of ``L`` sites be stored as one
    factor raised to ``L``; logs are taken per base factor and multiplied,
    which equals the per-site principal branch.
    """

    zeros: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    scale: complex = 1.0
    exponent: int = 1

    def __post_init__(self):
        object.__setattr__(self, "zeros", as_roots(self.zeros))
        object.__setattr__(self, "poles", as_roots(self.poles))
        object.__setattr__(self, "scale", complex(self.scale))
        if int(self.exponent) < 1:
            raise ValueError("exponent must be a positive integer")
        object.__setattr__(self, "exponent", int(self.exponent))

    def __call__(self, v):
        base = self.scale * _paired_ratio(self.zeros, self.poles, v)
        return base if self.exponent == 1 else base ** self.exponent

    def expanded(self) -> "RationalFunction":
        """Same function with ``exponent == 1`` (repeated zeros and poles)."""
        if self.exponent == 1:
            return self
        k = self.exponent
        return RationalFunction(np.repeat(self.zeros, k), np.repeat(self.poles, k), self.scale ** k)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        num, den = self, other
        if num.exponent != den.exponent:
            num, den = num.expanded(), den.expanded()
        return RationalFunction(
            np.concatenate([num.zeros, den.poles]),
            np.concatenate([num.poles, den.zeros]),
            num.scale / den.scale,
            num.exponent,
        )

    def log(self, v):
        """Sum of principal logs of the paired factors (times ``exponent``)."""
        out = np.log(self.scale) + _paired_log_ratio(self.zeros, self.poles, v)
        return self.exponent * out

    def log_derivative(self, v):
        v = np.asarray(v, dtype=complex)[..., None]
        out = (np.sum(1.0 / (v - self.zeros), axis=-1)
               - np.sum(1.0 / (v - self.poles), axis=-1))
        return self.exponent * out

    def min_distance(self, v, which="zeros"):
        pts = self.zeros if which == "zeros" else self.poles
        v = np.asarray(v, dtype=complex)
        if pts.size == 0:
            return np.full(v.shape, np.inf)
        return np.min(np.abs(v[..., None] - pts), axis=-1)

    def to_json(self) -> dict:
        out = {
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "poles": [[p.real, p.imag] for p in self.poles],
            "scale": [self.scale.real, self.scale.imag],
        }
        if self.exponent != 1:
            out["exponent"] = self.exponent
        return out


def _paired_ratio(zeros, poles, v):
    # interleave numerator and denominator factors to keep partial products O(1)
    v = np.asarray(v, dtype=complex)
    n = min(zeros.size, poles.size)
    out = np.ones(v.shape, dtype=complex)
    if n:
        out = out * np.prod((v[..., None] - zeros[:n]) / (v[..., None] - poles[:n]), axis=-1)
    if zeros.size > n:
        out = out * np.prod(v[..., None] - zeros[n:], axis=-1)
    if poles.size > n:
        out = out / np.prod(v[..., None] - poles[n:], axis=-1)
    return out if out.ndim else complex(out)


def _paired_log_ratio(zeros, poles, v):
    """Sum of principal logs of paired factors (v - z_i)/(v - p_i)."""
    v = np.asarray(v, dtype=complex)
    n = min(zeros.size, poles.size)
    out = np.zeros(v.shape, dtype=complex)
    if n:
        out = out + np.sum(np.log((v[..., None] - zeros[:n]) / (v[..., None] - poles[:n])), axis=-1)
    if zeros.size > n:
        out = out + np.sum(np.log(v[..., None] - zeros[n:]), axis=-1)
    if poles.size > n:
        out = out - np.sum(np.log(v[..., None] - poles[n:]), axis=-1)
    return out


@dataclass(frozen=True)
class ModelFunctions:
    """Vacuum eigenvalues ``a``, ``d``, twist ``kappa`` and shift ``epsilon``.

    ``a`` and ``d`` are callables; when both are :class:`RationalFunction`
    the ratio ``d/a`` is evaluated factor by factor, which stays finite for
    chains with hundreds of sites.
    """

    a: Callable
    d: Callable
    kappa: complex = 1.0
    epsilon: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        object.__setattr__(self, "kappa", complex(self.kappa))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.a, RationalFunction) and isinstance(self.d, RationalFunction)

    def d_over_a(self) -> Callable:
        if self.is_rational:
            return self.d / self.a
        return lambda v: self.d(v) / self.a(v)

    def f_poles(self) -> np.ndarray:
        """Poles of ``f`` (zeros of ``a`` not cancelled by zeros of ``d``); rational models only."""
        if not self.is_rational:
            return np.zeros(0, complex)
        ratio = self.d / self.a
        return np.repeat(_cancel(ratio.poles, ratio.zeros), ratio.exponent)

    def f_zeros(self) -> np.ndarray:
        if not self.is_rational:
            return np.zeros(0, complex)
        ratio = self.d / self.a
        return np.repeat(_cancel(ratio.zeros, ratio.poles), ratio.exponent)

    def check_a_nonzero(self, v) -> None:
        v = np.asarray(v, dtype=complex)
        if isinstance(self.a, RationalFunction):
            dist = self.a.min_distance(v, "zeros")
            if np.any(dist < POLE_RTOL * _scale(np.append(self.a.zeros, v.ravel()))):
                raise ZeroDenominator("a(v) vanishes at a requested point")
            return
        vals = np.asarray(self.a(v))
        if np.any(vals == 0) or not np.all(np.isfinite(vals)):
            raise ZeroDenominator("a(v) vanishes or is not finite at a requested point")


def _cancel(keep, remove, tol=1e-14):
    keep = list(keep)
    for r in remove:
        for i, k in enumerate(keep):
            if abs(k - r) <= tol * (1 + abs(r)):
                del keep[i]
                break
    return np.asarray(keep, dtype=complex)


@dataclass(frozen=True)
class InhomogeneousXXXModel:
    """Twisted inhomogeneous XXX_1/2 chain: ``a(v) = Q_theta(v + i eps/2)``, ``d(v) = Q_theta(v - i eps/2)``."""

    theta: np.ndarray
    kappa: complex = 1.0
    epsilon: float = 1.0

    def __post_init__(self):
        theta = as_roots(self.theta)
        if theta.size == 0:
            raise ValueError("chain needs at least one site")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "kappa", complex(self.kappa))

    @property
    def L(self) -> int:
        return self.theta.size

    def functions(self) -> ModelFunctions:
        half = 0.5j * self.epsilon
        theta, power = self.theta, 1
        if np.all(theta == theta[0]):
            theta, power = theta[:1], theta.size
        a = RationalFunction(zeros=theta - half, exponent=power)
        d = RationalFunction(zeros=theta + half, exponent=power)
        return ModelFunctions(a=a, d=d, kappa=self.kappa, epsilon=self.epsilon,
                              name="inhomogeneous_xxx")


def _model(model) -> ModelFunctions:
    return model.functions() if isinstance(model, InhomogeneousXXXModel) else model


def f_eval(model, v):
    """Functional argument ``f(v) = kappa d(v) / a(v)``."""
    model = _model(model)
    model.check_a_nonzero(v)
    return model.kappa * model.d_over_a()(v)


def weight_function(model, w, z):
    """``Q(z) = f(z) Q_w(z + i eps) / Q_w(z)``; its residues at ``w`` are the Fredholm weights."""
    model = _model(model)
    w = as_roots(w)
    z = np.asarray(z, dtype=complex)
    if w.size:
        dist = np.min(np.abs(z[..., None] - w), axis=-1)
        if np.any(dist < POLE_RTOL * _scale(np.append(w, z.ravel()))):
            raise PoleHit("weight function evaluated on a rapidity")
    # Q_w(z + i eps) / Q_w(z) = prod (z - (w - i eps)) / (z - w)
    ratio = _paired_ratio(w - 1j * model.epsilon, w, z)
    return f_eval(model, z) * ratio


def log_weight_derivative(model, w, z):
    """``d/dz log Q(z)`` for rational models."""
    model = _model(model)
    w = as_roots(w)
    z = np.asarray(z, dtype=complex)
    out = (model.d / model.a).log_derivative(z)
    zz = z[..., None]
    return out + np.sum(1.0 / (zz - w + 1j * model.epsilon) - 1.0 / (zz - w), axis=-1)


def _log_a_over_d(model: ModelFunctions, v):
    if model.is_rational:
        return (model.a / model.d).log(v)
    return np.log(np.asarray(model.a(v)) / np.asarray(model.d(v)))


def twice_i_momentum(model, u, v):
    """``2 i p(v)`` with the principal branch taken factor by factor.

    The factors are ``(v - u_k + i eps)/(v - u_k - i eps)``, the paired
    factors of ``a/d`` and ``kappa``.
    """
    model = _model(model)
    u = as_roots(u)
    v = np.asarray(v, dtype=complex)
    eps = model.epsilon
    if u.size:
        near = np.min(np.minimum(np.abs(v[..., None] - u + 1j * eps),
                                 np.abs(v[..., None] - u - 1j * eps)), axis=-1)
        if np.any(near < POLE_RTOL * _scale(np.append(u, v.ravel()))):
            raise PoleHit("pseudo-momentum evaluated at u +- i eps")
    model.check_a_nonzero(v)
    if isinstance(model.d, RationalFunction):
        if np.any(model.d.min_distance(v, "zeros") < POLE_RTOL * _scale(v)):
            raise ZeroDenominator("d(v) vanishes at a requested point")
    log_q = _paired_log_ratio(u - 1j * eps, u + 1j * eps, v)
    return log_q - _log_a_over_d(model, v) + np.log(model.kappa)


def pseudo_momentum(model, u, v):
    """Pseudo-momentum ``p(v)`` on the principal branch of each factor.

    ``2 i p(v) = log[Q_u(v + i eps)/Q_u(v - i eps)] - log[a(v)/d(v)] + log kappa``.
    Only ``exp(2 i p)`` is branch independent; use :func:`pseudo_momentum_tracked`
    for values that are continuous along a path.
    """
    out = twice_i_momentum(model, u, v) / 2j
    return out if np.ndim(out) else complex(out)


def pseudo_momentum_tracked(model, u, path, reference=None):
    """Pseudo-momentum sampled along ``path`` with branch jumps removed.

    The branch is anchored at ``reference`` (default: the first path point),
    which should sit far from the rapidities and the zeros of ``a`` and ``d``.
    """
    path = np.asarray(path, dtype=complex)
    if reference is not None:
        path = np.concatenate([[complex(reference)], path])
    x = twice_i_momentum(model, u, path)
    phase = np.unwrap(x.imag)
    out = (x.real + 1j * phase) / 2j
    return out[1:] if reference is not None else out

"""Leading and subleading coefficients of ``log A = F0/eps + F1 + O(eps)`` by contour quadrature.

    F0 = contour integral dx/2pi Li2(Q(x))
    F1 = -1/2 double contour integral dx du/(2pi)^2 g(x) g(u) / (x - u)^2,   g = log(1 - Q)

The double pole in ``F1`` is a principal value.  Writing
``g(x) g(u) = [g(x)^2 + g(u)^2]/2 - [g(x) - g(u)]^2/2``, the squared terms
integrate against the finite part of ``contour integral du/(u - x)^2``, which
is zero on any closed curve (``1/(u - x)`` is single valued), so

    F1 = 1/4 double contour integral dx du/(2pi)^2 [g(x) - g(u)]^2 / (x - u)^2

with the regular diagonal value ``g'(x)^2``, obtained by FFT differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bethe import BetheState, one_cut_state
from .contour import Contour, default_contour
from .dilog import dilog
from .errors import BetheError, BranchCutCrossing, LogSingularity
from .exact import log_a
from .model import ModelFunctions, _model, as_roots, weight_function

LOG_SINGULAR_TOL = 1e-6


def _q_on(contour: Contour, model, w):
    model = _model(model)
    w = as_roots(w)
    contour.validate(w, model.f_poles())
    return weight_function(model, w, contour.nodes)


def check_branch(q: np.ndarray) -> None:
    """Raise :class:`BranchCutCrossing` when ``Q`` crosses ``[1, inf)`` between neighbouring nodes.

    That ray is the cut of ``Li2(Q)`` and of ``log(1 - Q)`` alike.
    """
    im = q.imag
    nxt = np.roll(q, -1)
    change = np.sign(im) != np.sign(nxt.imag)
    idx = np.flatnonzero(change)
    if idx.size == 0:
        return
    a, b = q[idx], nxt[idx]
    denom = a.imag - b.imag
    frac = np.where(denom != 0, a.imag / np.where(denom != 0, denom, 1.0), 0.0)
    re_cross = a.real + frac * (b.real - a.real)
    hit = idx[re_cross > 1]
    if hit.size:
        raise BranchCutCrossing(f"Q crosses [1, inf) between nodes {hit[0]} and {hit[0] + 1}",
                                segment=int(hit[0]))


def _f0(contour: Contour, q):
    return contour.integrate(dilog(q))


def _f1(contour: Contour, q):
    if np.min(np.abs(1 - q)) < LOG_SINGULAR_TOL:
        raise LogSingularity(f"|1 - Q| = {np.min(np.abs(1 - q)):.2e} on the contour")
    g = np.log(1 - q)
    n = q.size
    k = np.fft.fftfreq(n, 1.0 / n)
    dg = np.fft.ifft(2j * np.pi * k * np.fft.fft(g)) / contour.dz_dt
    x = contour.nodes
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    kern = (g[:, None] - g[None, :]) ** 2 / diff ** 2
    np.fill_diagonal(kern, dg ** 2)
    wts = contour.weights
    return complex(0.25 * wts @ kern @ wts)


def f0(contour: Contour, model, w) -> complex:
    """Leading coefficient ``F0`` by the trapezoid rule on ``contour``."""
    q = _q_on(contour, model, w)
    check_branch(q)
    return _f0(contour, q)


def f1(contour: Contour, model, w) -> complex:
    """Subleading coefficient ``F1`` (principal value, see the module docstring)."""
    q = _q_on(contour, model, w)
    check_branch(q)
    return _f1(contour, q)


@dataclass(frozen=True)
class Coefficients:
    f0: complex
    f1: complex
    quadrature_error: float


def coefficients(contour: Contour, model, w) -> Coefficients:
    """``F0`` and ``F1`` with an error estimate from the rule on every other node."""
    q = _q_on(contour, model, w)
    check_branch(q)
    a0, a1 = _f0(contour, q), _f1(contour, q)
    half = contour.with_nodes(contour.n_nodes // 2)
    q_half = q[::2] if contour.n_nodes % 2 == 0 else _q_on(half, model, w)
    err = max(abs(_f0(half, q_half) - a0), abs(_f1(half, q_half) - a1))
    return Coefficients(a0, a1, float(err))


@dataclass(frozen=True)
class FamilyMember:
    """One instance of an expansion family: the model and the full rapidity set ``w``."""

    model: ModelFunctions
    w: np.ndarray
    M: int
    label: str = ""

    @classmethod
    def from_pair(cls, u_state: BetheState, v, label: str = "") -> "FamilyMember":
        w = np.concatenate([u_state.u, as_roots(v)])
        return cls(u_state.model, w, u_state.M, label)

    @property
    def epsilon(self) -> float:
        return self.model.epsilon


@dataclass(frozen=True)
class ExpansionReport:
    """Residuals are taken modulo ``2 pi i`` since ``log A`` is defined only up to that."""

    M: int
    epsilon: float
    log_a_exact: complex
    f0: complex
    f1: complex
    residual_leading: float
    residual_subleading: float
    quadrature_error: float
    error: str | None = None

    def to_row(self) -> dict:
        return {
            "M": self.M,
            "epsilon": self.epsilon,
            "log_a_exact_re": self.log_a_exact.real,
            "log_a_exact_im": self.log_a_exact.imag,
            "f0_re": self.f0.real,
            "f0_im": self.f0.imag,
            "f1_re": self.f1.real,
            "f1_im": self.f1.imag,
            "residual_leading": self.residual_leading,
            "residual_subleading": self.residual_subleading,
            "quadrature_error_estimate": self.quadrature_error,
            "error": self.error or "",
        }


def wrap_log(z: complex) -> complex:
    """Representative of ``z`` modulo ``2 pi i`` with imaginary part in ``[-pi, pi)``."""
    return complex(z.real, (z.imag + math.pi) % (2 * math.pi) - math.pi)


ContourFactory = Callable[[ModelFunctions, np.ndarray, int], Contour]


def _member(item) -> FamilyMember:
    if isinstance(item, FamilyMember):
        return item
    u_state, v = item
    return FamilyMember.from_pair(u_state, v)


def expansion_report(family: Sequence, contour_factory: ContourFactory = default_contour,
                     n_nodes: int = 512) -> list[ExpansionReport]:
    """Exact ``log A`` against ``F0/eps`` and ``F0/eps + F1`` for every family member.

    Members are ``(u_state, v)`` pairs or :class:`FamilyMember`.  A failing
    member yields a row with NaN entries and the error code; the rest of the
    family is still evaluated.
    """
    rows = []
    nan = complex(math.nan, math.nan)
    for item in family:
        member = _member(item)
        eps = member.epsilon
        exact, coef, error = nan, None, None
        try:
            exact = log_a(member.model, member.w)
            contour = contour_factory(member.model, member.w, n_nodes)
            coef = coefficients(contour, member.model, member.w)
        except BetheError as exc:
            error = exc.code
        if coef is None:
            rows.append(ExpansionReport(member.M, eps, exact, nan, nan, math.nan, math.nan,
                                        math.nan, error))
            continue
        lead = abs(wrap_log(exact - coef.f0 / eps))
        sub = abs(wrap_log(exact - coef.f0 / eps - coef.f1))
        rows.append(ExpansionReport(member.M, eps, exact, coef.f0, coef.f1, lead, sub,
                                    coef.quadrature_error))
    return rows


def fit_log_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(~np.isfinite(y)) or np.any(y <= 0):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


EXAMPLE_SIZES = (8, 16, 32, 64)
EXAMPLE_SHIFT = 0.15


def one_cut_family(sizes=EXAMPLE_SIZES, shift: complex = EXAMPLE_SHIFT, mode: int = -1,
                   kappa: complex = 1.0, length_ratio: int = 8) -> list[FamilyMember]:
    """One-cut states of the homogeneous chain with ``L = length_ratio * M``, ``eps = 1/(2M)``.

    ``v`` is the same root set translated by ``shift`` (off shell).
    """
    out = []
    for M in sizes:
        u = one_cut_state(M, length_ratio * M, mode=mode, kappa=kappa)
        out.append(FamilyMember.from_pair(u, u.u + shift, label=f"one_cut_M{M}"))
    return out

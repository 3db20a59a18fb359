"""Closed quadrature contours in the rapidity plane.

Nodes are equally spaced in the curve parameter ``t`` in ``[0, 1)``, so the
trapezoid rule is spectrally accurate for integrands analytic near the curve.
Weights carry ``dz / 2 pi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContourInvalid
from .model import _model, as_roots

CLOSURE_RTOL = 1e-14


@dataclass(frozen=True)
class Contour:
    """Closed curve ``parametrization(t)``, ``t`` in ``[0, 1)``, counterclockwise.

    ``derivative`` is ``dz/dt``; when omitted it is obtained by FFT
    differentiation of the node samples.
    """

    parametrization: Callable[[np.ndarray], np.ndarray]
    n_nodes: int = 512
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n_nodes)
        if n < 4:
            raise ContourInvalid("a contour needs at least 4 nodes")
        ends = np.asarray(self.parametrization(np.array([0.0, 1.0])), dtype=complex)
        t = np.arange(n) / n
        z = np.asarray(self.parametrization(t), dtype=complex)
        if not np.all(np.isfinite(z)):
            raise ContourInvalid("parametrization is not finite on [0, 1)")
        size = np.max(np.abs(z)) + np.ptp(z.real) + np.ptp(z.imag)
        if abs(ends[1] - ends[0]) > CLOSURE_RTOL * max(size, 1.0) * 10:
            raise ContourInvalid(f"curve is not closed: gap {abs(ends[1] - ends[0]):.3e}")
        if self.derivative is not None:
            dz = np.asarray(self.derivative(t), dtype=complex)
        else:
            k = np.fft.fftfreq(n, 1.0 / n)
            dz = np.fft.ifft(2j * np.pi * k * np.fft.fft(z))
        object.__setattr__(self, "n_nodes", n)
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "weights", dz / n / (2 * np.pi))

    @property
    def dz_dt(self) -> np.ndarray:
        return self.weights * self.n_nodes * 2 * np.pi

    def with_nodes(self, n_nodes: int) -> "Contour":
        return Contour(self.parametrization, n_nodes, self.derivative)

    def integrate(self, values) -> complex:
        """``(1/2 pi) * contour integral`` of samples taken at the nodes."""
        return complex(np.sum(np.asarray(values) * self.weights))

    def winding_number(self, points) -> np.ndarray:
        """Winding number of the node polygon around each point."""
        p = as_roots(points)
        if p.size == 0:
            return np.zeros(0, dtype=int)
        rel = self.nodes[None, :] - p[:, None]
        turn = np.angle(np.roll(rel, -1, axis=1) / rel)
        return np.rint(turn.sum(axis=1) / (2 * np.pi)).astype(int)

    def min_distance(self, points) -> float:
        p = as_roots(points)
        if p.size == 0:
            return np.inf
        return float(np.min(np.abs(self.nodes[None, :] - p[:, None])))

    def validate(self, inside=(), outside=()) -> None:
        """Require winding number 1 around ``inside`` and 0 around ``outside``."""
        wind_in = self.winding_number(inside)
        if np.any(wind_in != 1):
            bad = int(np.flatnonzero(wind_in != 1)[0])
            raise ContourInvalid(f"point {bad} of the enclosed set has winding number {wind_in[bad]}")
        wind_out = self.winding_number(outside)
        if np.any(wind_out != 0):
            bad = int(np.flatnonzero(wind_out != 0)[0])
            raise ContourInvalid(f"excluded point {bad} has winding number {wind_out[bad]}")


def ellipse(center: complex, a: float, b: float, n_nodes: int = 512, angle: float = 0.0) -> Contour:
    """Ellipse with semi-axes ``a`` (along ``angle``) and ``b``."""
    if a <= 0 or b <= 0:
        raise ContourInvalid("ellipse semi-axes must be positive")
    rot = np.exp(1j * angle)
    tau = 2 * np.pi

    def z(t):
        s = tau * np.asarray(t)
        return center + rot * (a * np.cos(s) + 1j * b * np.sin(s))

    def dz(t):
        s = tau * np.asarray(t)
        return tau * rot * (-a * np.sin(s) + 1j * b * np.cos(s))

    return Contour(z, n_nodes, dz)


def from_points(points, n_nodes: int = 512) -> Contour:
    """Contour through user points (counterclockwise, not repeating the first) by Fourier interpolation."""
    p = as_roots(points)
    m = p.size
    if m < 4:
        raise ContourInvalid("need at least 4 points to define a contour")
    coef = np.fft.fft(p) / m
    k = np.fft.fftfreq(m, 1.0 / m)
    if m % 2 == 0:
        # split the Nyquist mode symmetrically so the interpolant is smooth
        coef = np.append(coef, coef[m // 2] / 2)
        coef[m // 2] /= 2
        k = np.append(k, m // 2)
        k[m // 2] = -m // 2

    def z(t):
        t = np.asarray(t, dtype=float)
        return np.exp(2j * np.pi * t[..., None] * k) @ coef

    def dz(t):
        t = np.asarray(t, dtype=float)
        return np.exp(2j * np.pi * t[..., None] * k) @ (2j * np.pi * k * coef)

    return Contour(z, n_nodes, dz)


def default_contour(model, w, n_nodes: int = 512, margin: float | None = None) -> Contour:
    """Ellipse around the bounding box of ``w`` that excludes the poles of ``f``.

    The margin starts at ``5 eps`` and is never smaller.  The ellipse through
    the box corners is tried first, then the inscribed one; a
    :class:`ContourInvalid` is raised when both enclose a pole of ``f``.
    """
    model = _model(model)
    w = as_roots(w)
    if w.size == 0:
        raise ContourInvalid("no rapidities to enclose")
    margin = 5 * model.epsilon if margin is None else margin
    if margin < 5 * model.epsilon:
        raise ContourInvalid("margin must be at least 5 eps")
    center = 0.5 * (w.real.max() + w.real.min()) + 0.5j * (w.imag.max() + w.imag.min())
    hw = 0.5 * np.ptp(w.real)
    hh = 0.5 * np.ptp(w.imag)
    poles = model.f_poles()
    for stretch in (np.sqrt(2.0), 1.0):
        c = ellipse(center, stretch * hw + margin, stretch * hh + margin, n_nodes)
        try:
            c.validate(w, poles)
        except ContourInvalid:
            continue
        return c
    raise ContourInvalid("no default ellipse separates the rapidities from the poles of f")

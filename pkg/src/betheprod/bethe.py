"""Bethe equations: residuals, a damped Newton solver and the transfer eigenvalue.

On-shell rapidities make the transfer eigenvalue
``t(v) = Q_u(v - i eps)/Q_u(v) + kappa d(v)/a(v) Q_u(v + i eps)/Q_u(v)``
regular at every ``u_j``, which is the condition

    a(u_j)/d(u_j) + kappa Q_u(u_j + i eps)/Q_u(u_j - i eps) = 0.

The solver works on the logarithm of this equation.  With the counting
function ``2 i p(v) = log[Q_u(v+i eps)/Q_u(v-i eps)] - log[a/d] + log kappa``
the equation reads ``exp(2 i p(u_j)) = -1``; the coincident factor of
``Q_u(u_j + i eps)/Q_u(u_j - i eps)`` equals -1 and is taken as ``-i pi``, so that

    G_j = sum_{k != j} log[(u_jk + i eps)/(u_jk - i eps)] - log[a/d](u_j) + log kappa - 2 pi i n_j

vanishes, i.e. ``2 p(u_j) = 2 pi n_j - pi``.  Every log is principal, factor
by factor.  With this choice reflecting the roots flips the mode numbers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermroots

from .errors import JacobianSingular, NoConvergence, PoleHit, ZeroDenominator
from .model import (
    POLE_RTOL,
    InhomogeneousXXXModel,
    ModelFunctions,
    RapiditySet,
    _log_a_over_d,
    _model,
    _scale,
    as_roots,
    f_eval,
)

ON_SHELL_TOL = 1e-10
MAX_HALVINGS = 40
STALL_FACTOR = 1e3
# roots closer than this (in units of eps), or to an exact i*eps string, count as collapsed
SEPARATION = 1e-6
# Jacobians with a condition number above this are treated as singular
JACOBIAN_COND_MAX = 1e14


@dataclass(frozen=True)
class BetheState:
    """Rapidities with their mode numbers and the on-shell residual.

    ``history`` holds ``max_j |G_j|`` after every Newton iterate, starting
    with the initial guess.
    """

    roots: RapiditySet
    mode_numbers: tuple
    residual: float
    model: ModelFunctions
    iterations: int = 0
    history: tuple = field(default_factory=tuple)
    converged: bool = True

    def __post_init__(self):
        if not isinstance(self.roots, RapiditySet):
            object.__setattr__(self, "roots", RapiditySet(self.roots))
        object.__setattr__(self, "model", _model(self.model))
        object.__setattr__(self, "mode_numbers", tuple(int(n) for n in self.mode_numbers))
        if len(self.mode_numbers) != self.roots.M:
            raise ValueError("one mode number per rapidity is required")

    @property
    def M(self) -> int:
        return self.roots.M

    @property
    def u(self) -> np.ndarray:
        return self.roots.roots

    @property
    def on_shell(self) -> bool:
        return self.residual <= ON_SHELL_TOL

    @classmethod
    def from_roots(cls, model, roots, mode_numbers=None) -> "BetheState":
        """Wrap given rapidities (on- or off-shell); mode numbers are inferred when omitted."""
        model = _model(model)
        roots = as_roots(roots)
        if mode_numbers is None:
            mode_numbers = infer_mode_numbers(model, roots)
        return cls(RapiditySet(roots), tuple(mode_numbers),
                   equation_residuals(model, roots).max(initial=0.0), model)


def _pair_matrix(u, eps):
    d = u[:, None] - u[None, :]
    off = ~np.eye(u.size, dtype=bool)
    tol = POLE_RTOL * _scale(u)
    if np.any(np.abs(d[off] - 1j * eps) < tol) or np.any(np.abs(d[off]) < tol):
        raise PoleHit("two rapidities coincide or differ by i*eps")
    return d, off


def equation_residuals(model, roots) -> np.ndarray:
    """``|1 + kappa (d/a)(u_j) Q_u(u_j + i eps)/Q_u(u_j - i eps)|`` for every root."""
    model = _model(model)
    u = as_roots(roots)
    if u.size == 0:
        return np.zeros(0)
    d, off = _pair_matrix(u, model.epsilon)
    eps = model.epsilon
    ratio = np.where(off, (d + 1j * eps) / np.where(off, d - 1j * eps, 1.0), 1.0)
    # the coincident factor (i eps)/(-i eps) = -1 is written out explicitly
    return np.abs(1.0 - f_eval(model, u) * np.prod(ratio, axis=1))


def bethe_residual(state: BetheState) -> float:
    """Largest residual of the Bethe equations over the roots of ``state``."""
    return float(equation_residuals(state.model, state.u).max(initial=0.0))


def _log_ratio_derivative(model: ModelFunctions, u):
    if model.is_rational:
        return (model.a / model.d).log_derivative(u)
    h = 1e-6 * _scale(u)
    return (_log_a_over_d(model, u + h) - _log_a_over_d(model, u - h)) / (2 * h)


def _log_system(model: ModelFunctions, u, modes):
    """Counting-function residuals ``G`` and their analytic Jacobian."""
    eps = model.epsilon
    d, off = _pair_matrix(u, eps)
    model.check_a_nonzero(u)
    if model.is_rational and np.any(model.d.min_distance(u, "zeros") < POLE_RTOL * _scale(u)):
        raise ZeroDenominator("d vanishes at a rapidity")
    safe_minus = np.where(off, d - 1j * eps, 1.0)
    pair = np.where(off, np.log((d + 1j * eps) / safe_minus), 0.0)
    g = (pair.sum(axis=1) - _log_a_over_d(model, u) + np.log(model.kappa)
         - 2j * np.pi * np.asarray(modes))
    kernel = np.where(off, 1.0 / np.where(off, d + 1j * eps, 1.0) - 1.0 / safe_minus, 0.0)
    jac = -kernel
    np.fill_diagonal(jac, kernel.sum(axis=1) - _log_ratio_derivative(model, u))
    return g, jac


def infer_mode_numbers(model, roots) -> tuple:
    """Mode numbers that make ``|G_j|`` smallest at the given rapidities."""
    model = _model(model)
    u = as_roots(roots)
    if u.size == 0:
        return ()
    g, _ = _log_system(model, u, np.zeros(u.size))
    return tuple(int(n) for n in np.round(g.imag / (2 * np.pi)))


def _one_magnon_roots(model: ModelFunctions) -> np.ndarray:
    """All solutions of the single-magnon equation ``a(v)/d(v) = kappa`` (rational models)."""
    ratio = model.a / model.d
    e = ratio.exponent
    # base(v)**e = kappa splits into e equations base(v) = c_k
    targets = np.exp((np.log(model.kappa) + 2j * np.pi * np.arange(e)) / e)
    num = ratio.scale * np.poly(ratio.zeros) if ratio.zeros.size else np.array([ratio.scale])
    den = np.poly(ratio.poles) if ratio.poles.size else np.array([1.0 + 0j])
    out = []
    for c in targets:
        poly = np.polysub(num, c * den)
        nz = np.flatnonzero(np.abs(poly) > 1e-14 * np.max(np.abs(poly)))
        if nz.size and nz[0] < poly.size - 1:
            out.extend(np.roots(poly[nz[0]:]))
    return np.asarray(out, dtype=complex)


def _one_magnon_center(model: ModelFunctions, n: int) -> complex:
    """Single-magnon root with mode number ``n``, or the closest available mode."""
    if model.is_rational:
        roots = _one_magnon_roots(model)
        roots = roots[np.isfinite(roots)]
        if roots.size:
            g = -_log_a_over_d(model, roots) + np.log(model.kappa)
            modes = np.round(g.imag / (2 * np.pi))
            gap = np.abs(modes - n)
            best = roots[gap == gap.min()]
            return complex(best[np.argmin(np.abs(best))])
    return 1.0 + 0.0j


def string_seeds(model, mode_numbers) -> np.ndarray:
    """Default initial guess: one vertical string per distinct mode number.

    Each string sits at the single-magnon root of its mode number; members
    are spaced by ``1.1 i eps`` with a small alternating real offset, since an
    exact ``i eps`` spacing is a singular point of the counting function.
    """
    model = _model(model)
    eps = model.epsilon
    groups = defaultdict(list)
    for j, n in enumerate(mode_numbers):
        groups[int(n)].append(j)
    seeds = np.zeros(len(mode_numbers), dtype=complex)
    for n, idx in groups.items():
        center = _one_magnon_center(model, n)
        m = len(idx)
        for k, j in enumerate(idx):
            seeds[j] = center + 1.1j * eps * (k - (m - 1) / 2) + 0.05 * eps * (-1) ** k
    return seeds


def _state(model, u, modes, iterations, history, converged=True):
    residual = float(equation_residuals(model, u).max(initial=0.0))
    return BetheState(RapiditySet(u), tuple(modes), residual, model,
                      iterations, tuple(history), converged)


def rounding_floor(model, M: int) -> float:
    """Attainable ``max |G|``: ``G_j`` sums ``M`` pair logs and one log per distinct factor of ``a/d``."""
    model = _model(model)
    # repeated factors are evaluated as exponent * log, so only distinct ones add rounding
    n_factors = (model.a / model.d).zeros.size if model.is_rational else 1
    return 64 * np.finfo(float).eps * (M + n_factors)


def solve(model, mode_numbers=None, initial_guess=None, tol: float = 1e-13,
          max_iter: int = 100) -> BetheState:
    """Damped Newton iteration on the counting-function form of the Bethe equations.

    Either ``mode_numbers`` or ``initial_guess`` must be given.  Missing mode
    numbers are read off the guess; a missing guess defaults to
    :func:`string_seeds`.  Steps are halved up to ``MAX_HALVINGS`` times until
    ``max |G|`` decreases.  ``tol`` is clipped from below at the rounding floor
    of ``G``, which grows with the number of factors summed; a stall within
    ``STALL_FACTOR`` of that floor also counts as converged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    model = _model(model)
    if initial_guess is None:
        if mode_numbers is None:
            raise ValueError("need mode numbers or an initial guess")
        u = string_seeds(model, mode_numbers)
    else:
        u = as_roots(initial_guess).copy()
    if mode_numbers is None:
        mode_numbers = infer_mode_numbers(model, u)
    modes = np.asarray(mode_numbers, dtype=float)
    if modes.size != u.size:
        raise ValueError("initial guess and mode numbers differ in length")
    if u.size == 0:
        return BetheState(RapiditySet(u), (), 0.0, model)

    floor = rounding_floor(model, u.size)
    g, jac = _log_system(model, u, modes)
    r = float(np.max(np.abs(g)))
    history = [r]
    it = 0
    target = max(tol, floor)
    while r > target:
        if it >= max_iter:
            raise NoConvergence(f"no convergence after {max_iter} iterations (max|G|={r:.3e})",
                                _state(model, u, mode_numbers, it, history, False))
        if not np.all(np.isfinite(jac)) or np.linalg.cond(jac) > JACOBIAN_COND_MAX:
            raise JacobianSingular(f"Jacobian singular at iteration {it}")
        step = np.linalg.solve(jac, -g)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + lam * step
            try:
                g_t, jac_t = _log_system(model, trial, modes)
                r_t = float(np.max(np.abs(g_t)))
            except (PoleHit, ZeroDenominator):
                r_t = np.inf
            if np.isfinite(r_t) and r_t < r:
                break
            lam /= 2
        else:
            if r <= STALL_FACTOR * floor:
                # stalled at rounding level: no direction improves G any more
                break
            raise NoConvergence(f"step halving failed at iteration {it} (max|G|={r:.3e})",
                                _state(model, u, mode_numbers, it, history, False))
        u, g, jac, r = trial, g_t, jac_t, r_t
        it += 1
        history.append(r)
    if _collapsed(u, model.epsilon):
        raise NoConvergence("roots collapsed onto each other or onto an exact i*eps string "
                            "(spurious solution of the logarithmic equations)",
                            _state(model, u, mode_numbers, it, history, False))
    return _state(model, u, mode_numbers, it, history)


def _collapsed(u, eps) -> bool:
    if u.size < 2:
        return False
    d = u[:, None] - u[None, :]
    off = ~np.eye(u.size, dtype=bool)
    gaps = np.abs(d[None, :, :] + 1j * eps * np.array([-1, 0, 1])[:, None, None])
    return bool(gaps[:, off].min() <= SEPARATION * eps)


def transfer_eigenvalue(state: BetheState, v):
    """``t(v) = Q_u(v - i eps)/Q_u(v) + kappa (d/a)(v) Q_u(v + i eps)/Q_u(v)``.

    This is the eigenvalue of ``(A + kappa D)(v) / a(v)`` on an on-shell state.
    """
    model = state.model
    u = state.u
    v = np.asarray(v, dtype=complex)
    eps = model.epsilon
    if u.size:
        dist = np.min(np.abs(v[..., None] - u), axis=-1)
        if np.any(dist < POLE_RTOL * _scale(np.append(u, v.ravel()))):
            raise PoleHit("transfer eigenvalue evaluated at a rapidity")
    vv = v[..., None]
    minus = np.prod((vv - u - 1j * eps) / (vv - u), axis=-1)
    plus = np.prod((vv - u + 1j * eps) / (vv - u), axis=-1)
    out = minus + f_eval(model, v) * plus
    return out if out.ndim else complex(out)


def converges_quadratically(history, threshold: float = 1e-3, floor: float = 1e-13):
    """Return ``(ok, C)``: monotone decrease and ``r_{k+1} <= C r_k**2`` once ``r_k < threshold``.

    Steps that end below ``floor`` are excluded from the constant since
    rounding dominates there.  ``C`` is the largest observed ratio.
    """
    h = np.asarray(history, dtype=float)
    if h.size < 2:
        return True, 0.0
    monotone = bool(np.all(np.diff(h) < 0))
    # pairs that start outside the quadratic regime or end in rounding noise say nothing
    ratios = [h[k + 1] / h[k] ** 2 for k in range(h.size - 1)
              if h[k] < threshold and h[k + 1] > floor]
    const = float(max(ratios, default=0.0))
    return monotone and const < 1e6, const


def one_cut_state(M: int, L: int | None = None, mode: int = -1, kappa: complex = 1.0,
                  epsilon: float | None = None, continuation: float = 40.0,
                  steps: int = 60, tol: float = 1e-13) -> BetheState:
    """One-cut solution of the homogeneous chain (all ``theta = 0``) with ``M`` equal mode numbers.

    Defaults follow the semiclassical scaling ``epsilon = 1/(2M)``, ``L = 8M``.
    The roots are continued from a chain ``continuation`` times longer, where
    they sit close to the scaled Hermite zeros around
    ``u0 = -L eps / (2 pi mode)``, down to ``L`` in ``steps`` geometric steps.
    """
    if mode == 0:
        raise ValueError("one-cut states need a nonzero mode number")
    epsilon = 1.0 / (2 * M) if epsilon is None else epsilon
    L = 8 * M if L is None else L
    if M == 0:
        model = InhomogeneousXXXModel(np.zeros(L), kappa, epsilon)
        return BetheState(RapiditySet([]), (), 0.0, model.functions())
    h = np.sort(hermroots([0] * M + [1]).real)
    lengths = np.unique(np.round(np.geomspace(L * continuation, L, steps)).astype(int))[::-1]
    u = None
    prev = None
    for Lc in lengths:
        model = InhomogeneousXXXModel(np.zeros(Lc), kappa, epsilon)
        if u is None:
            u0 = -Lc * epsilon / (2 * np.pi * mode)
            guess = u0 * (1 + 1j * np.sqrt(2.0 / Lc) * h)
        else:
            guess = u * Lc / prev
        # intermediate chains only need to seed the next one
        state = solve(model, [mode] * M, guess, tol=tol if Lc == lengths[-1] else 1e-9)
        u, prev = state.u, Lc
    return state


def find_state(model, M: int, rng=None, attempts: int = 50, box: float = 1.0,
               tol: float = 1e-13) -> BetheState:
    """Some on-shell state with ``M`` distinct finite roots.

    Tries string seeds for the mode numbers ``-(M//2), ..., M - M//2 - 1``
    first, then Newton from random guesses in a box of half-width ``box``
    (scaled by ``epsilon``) around the origin, letting the mode numbers follow
    the guess.  Mainly for generating test instances.
    """
    model = _model(model)
    rng = np.random.default_rng(rng)
    modes = list(range(-(M // 2), M - M // 2))
    guesses = [None] + [
        box * model.epsilon * (rng.uniform(-1, 1, M) + 1j * rng.uniform(-1, 1, M))
        for _ in range(attempts)
    ]
    last = None
    for guess in guesses:
        try:
            state = solve(model, modes if guess is None else None, guess, tol=tol)
        except (NoConvergence, JacobianSingular, PoleHit, ZeroDenominator) as exc:
            last = exc
            continue
        if np.all(np.isfinite(state.u)) and np.max(np.abs(state.u), initial=0.0) < 1e6 * (1 + box):
            return state
    raise NoConvergence(f"no on-shell state found in {attempts} attempts ({last})")

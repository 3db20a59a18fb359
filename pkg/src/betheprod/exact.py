"""Exact evaluators of the functional ``A_w[f]`` and the scalar product built on it.

For a set ``w`` of ``N`` rapidities the functional is

    A_w[f] = det(w_j^(k-1) - f(w_j) (w_j + i eps)^(k-1)) / det(w_j^(k-1)) = det(1 - K),
    K_jk = q_j / (w_j - w_k + i eps),  q_j = i eps f(w_j) prod_{k != j} (w_jk + i eps) / w_jk.

The diagonal of ``K`` is ``q_j / (i eps)``, which we call the reduced weight
(for ``N = 1`` it equals ``f(w_1)``).  Expanding ``det(1 - K)`` in principal
minors and using the Cauchy determinant gives the subset sum

    sum_S (-1)^|S| prod_{j in S} reduced_j prod_{j<k in S} w_jk^2 / (w_jk^2 + eps^2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .bethe import ON_SHELL_TOL, BetheState
from .errors import (
    IllConditioned,
    OffShell,
    OffShellWarning,
    SeriesDiverges,
    TooLarge,
)
from .model import (
    DEGENERACY_RTOL,
    _model,
    _scale,
    as_roots,
    check_distinct,
    f_eval,
)

RATIO_MAX_N = 64
COULOMB_MAX_N = 16
UNTRUSTED_COND = 1e12
# beyond this the LU factors carry no correct digits at all
SINGULAR_COND = 1e15

METHODS = ("RatioDet", "FredholmDet", "CoulombSum", "LogSeries")


@dataclass(frozen=True)
class ResidueWeights:
    """Residues ``q_j`` of ``Q`` at ``w_j`` and the reduced weights ``q_j / (i eps)``."""

    q: np.ndarray
    reduced: np.ndarray


@dataclass(frozen=True)
class AFunctionalResult:
    value: complex
    method: str
    condition_estimate: float = 1.0
    n_terms: int = 0
    log_value: complex | None = None
    truncation: float = 0.0

    @property
    def trusted(self) -> bool:
        return self.condition_estimate <= UNTRUSTED_COND

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "value": self.value,
            "condition_estimate": self.condition_estimate,
            "trusted": self.trusted,
            "n_terms": self.n_terms,
        }
        if self.log_value is not None:
            out["log_value"] = self.log_value
        if self.method == "LogSeries":
            out["truncation"] = self.truncation
        return out


def _points(model, w):
    model = _model(model)
    w = as_roots(w)
    check_distinct(w, model.epsilon)
    return model, w


def residue_weights(model, w) -> ResidueWeights:
    model, w = _points(model, w)
    eps = model.epsilon
    if w.size == 0:
        return ResidueWeights(np.zeros(0, complex), np.zeros(0, complex))
    d = w[:, None] - w[None, :]
    np.fill_diagonal(d, 1.0)
    ratio = (d + 1j * eps) / d
    np.fill_diagonal(ratio, 1.0)
    reduced = f_eval(model, w) * np.prod(ratio, axis=1)
    return ResidueWeights(1j * eps * reduced, reduced)


def kernel_matrix(model, w) -> np.ndarray:
    """``K_jk = q_j / (w_j - w_k + i eps)``."""
    model, w = _points(model, w)
    q = residue_weights(model, w).q
    return q[:, None] / (w[:, None] - w[None, :] + 1j * model.epsilon)


def _rcond(lu, anorm):
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    return float(rcond) if info == 0 else 0.0


def _lu_det(mat):
    """Determinant, its log and the 1-norm condition estimate of ``mat`` via pivoted LU."""
    n = mat.shape[0]
    if n == 0:
        return 1.0 + 0j, 0j, 1.0
    lu, piv = sla.lu_factor(mat, check_finite=True)
    diag = np.diag(lu)
    sign = (-1) ** int(np.sum(piv != np.arange(n)))
    if np.any(diag == 0):
        return 0j, complex(-np.inf), np.inf
    logdet = complex(np.sum(np.log(diag))) + (0 if sign > 0 else 1j * np.pi)
    det = complex(sign * np.prod(diag))
    rcond = _rcond(lu, np.linalg.norm(mat, 1))
    cond = np.inf if rcond == 0 else 1.0 / rcond
    return det, logdet, cond


def _basis(points, center, scale, k):
    return ((points[:, None] - center) / scale) ** np.arange(k)


def _ratio_matrices(model, w, fw, dw=None, dfw=None):
    """Numerator and Vandermonde matrices in a centred, scaled monomial basis.

    The ratio of determinants is unchanged by any affine change of the
    monomial basis.  Rows listed in ``dw`` (indices) are replaced by their
    derivative in ``w_j``, which gives the confluent limit for doubled points.
    """
    n = w.size
    eps = model.epsilon
    center = np.mean(w) + 0.5j * eps
    scale = max(np.max(np.abs(w - center)), eps)
    shifted = w + 1j * eps
    vand = _basis(w, center, scale, n)
    num = vand - fw[:, None] * _basis(shifted, center, scale, n)
    if dw is not None and len(dw):
        k = np.arange(n)
        for j, fp in zip(dw, dfw):
            x = (w[j] - center) / scale
            xs = (shifted[j] - center) / scale
            dx = np.where(k > 0, k * x ** np.maximum(k - 1, 0), 0) / scale
            dxs = np.where(k > 0, k * xs ** np.maximum(k - 1, 0), 0) / scale
            vand[j] = dx
            num[j] = dx - fp * xs ** k - fw[j] * dxs
    return num, vand


def _ratio_result(num, vand, method="RatioDet"):
    det_n, log_n, cond_n = _lu_det(num)
    det_v, log_v, cond_v = _lu_det(vand)
    cond = max(cond_n, cond_v)
    if cond > SINGULAR_COND:
        raise IllConditioned(f"determinant ratio is numerically singular (cond ~ {cond:.2e})")
    return AFunctionalResult(det_n / det_v, method, cond, log_value=log_n - log_v)


def a_ratio_det(model, w, max_n: int = RATIO_MAX_N) -> AFunctionalResult:
    """Ratio of the deformed and plain Vandermonde determinants.

    ``condition_estimate`` is the larger of the two LU condition estimates.
    """
    model, w = _points(model, w)
    if w.size > max_n:
        raise TooLarge(f"N={w.size} exceeds the ratio-determinant limit {max_n}")
    if w.size == 0:
        return AFunctionalResult(1.0 + 0j, "RatioDet", log_value=0j)
    return _ratio_result(*_ratio_matrices(model, w, f_eval(model, w)))


def a_fredholm_det(model, w) -> AFunctionalResult:
    """``det(1 - K)`` by pivoted LU with a LAPACK condition estimate."""
    model, w = _points(model, w)
    if w.size == 0:
        return AFunctionalResult(1.0 + 0j, "FredholmDet", log_value=0j)
    mat = np.eye(w.size) - kernel_matrix(model, w)
    det, logdet, cond = _lu_det(mat)
    return AFunctionalResult(det, "FredholmDet", cond, log_value=logdet)


def log_a(model, w) -> complex:
    """``log A_w[f]`` as the sum of logs of the LU pivots (branch set by the pivots)."""
    return a_fredholm_det(model, w).log_value


def a_coulomb_sum(model, w, max_n: int = COULOMB_MAX_N) -> AFunctionalResult:
    """Sum over all ``2**N`` subsets of the Coulomb-gas weights."""
    model, w = _points(model, w)
    n = w.size
    if n > max_n:
        raise TooLarge(f"N={n} exceeds the subset-sum limit {max_n}")
    reduced = residue_weights(model, w).reduced
    eps2 = model.epsilon ** 2
    # terms[s] is the signed weight of subset s (bit j set means w_j in S);
    # pair[s] accumulates the pair factor of w_j with every member of s
    terms = np.ones(1, dtype=complex)
    for j in range(n):
        d2 = (w[j] - w[:j]) ** 2
        factor = d2 / (d2 + eps2)
        pair = np.ones(1, dtype=complex)
        for k in range(j):
            pair = np.concatenate([pair, pair * factor[k]])
        terms = np.concatenate([terms, -reduced[j] * pair * terms])
    return AFunctionalResult(complex(terms.sum()), "CoulombSum", n_terms=terms.size)


def a_log_series(model, w, n_max: int = 8) -> AFunctionalResult:
    """``exp(-sum_{n <= n_max} tr(K^n) / n)``; requires spectral radius of ``K`` below 1."""
    model, w = _points(model, w)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if w.size == 0:
        return AFunctionalResult(1.0 + 0j, "LogSeries", n_terms=n_max, log_value=0j)
    kmat = kernel_matrix(model, w)
    radius = float(np.max(np.abs(np.linalg.eigvals(kmat))))
    if radius >= 1:
        raise SeriesDiverges(f"spectral radius of K is {radius:.3g} >= 1")
    total = 0j
    power = np.eye(w.size, dtype=complex)
    last = 0.0
    for n in range(1, n_max + 1):
        power = power @ kmat
        term = -np.trace(power) / n
        total += term
        last = abs(term)
    return AFunctionalResult(complex(np.exp(total)), "LogSeries", n_terms=n_max,
                             log_value=complex(total), truncation=last)


EVALUATORS = {
    "ratio": a_ratio_det,
    "fredholm": a_fredholm_det,
    "coulomb": a_coulomb_sum,
}


def _f_derivative(model, v):
    # f = kappa d/a, so f'/f = -(log a/d)'
    from .bethe import _log_ratio_derivative

    return -f_eval(model, v) * _log_ratio_derivative(model, np.atleast_1d(v))


def _confluent_a(model, u, v):
    """``A`` on ``u`` union ``v`` when some ``v_k`` coincide with some ``u_j``.

    Each coincident pair is resolved by replacing one of the two rows with its
    derivative, the first-order limit of both determinants.
    """
    tol = DEGENERACY_RTOL * (1 + _scale(np.concatenate([u, v])))
    dist = np.abs(v[:, None] - u[None, :])
    matched = dist.min(axis=1) < tol
    rest = v[~matched]
    w = np.concatenate([u, rest])
    check_distinct(w, model.epsilon)
    # the doubled points occupy rows appended after w
    twins = u[np.argmin(dist[matched], axis=1)] if matched.any() else np.zeros(0, complex)
    full = np.concatenate([w, twins])
    fw = f_eval(model, full)
    dw = np.arange(w.size, full.size)
    dfw = _f_derivative(model, twins) if twins.size else []
    return _ratio_result(*_ratio_matrices(model, full, fw, dw, dfw), method="RatioDetConfluent")


def scalar_product(model, u_state, v, method: str = "fredholm", strict: bool = False,
                   tol: float = ON_SHELL_TOL) -> complex:
    """Bilinear form ``<Omega| prod C(v_j) prod B(u_j) |Omega>`` for on-shell ``u``.

    Equals ``(-1)^M prod a(v_j) d(u_j) A_{u U v}[f]``; the sign comes from
    writing ``A`` with the kernel ``1/(w_j - w_k + i eps)``.  An off-shell
    ``u`` gives a :class:`OffShellWarning` (or :class:`OffShell` when
    ``strict``) and the formula value is returned anyway.  Rapidities of ``v``
    that coincide with rapidities of ``u`` are handled by the confluent limit
    of the determinant ratio, whatever ``method`` says.
    """
    model = _model(model)
    if not isinstance(u_state, BetheState):
        u_state = BetheState.from_roots(model, u_state)
    u = u_state.u
    v = as_roots(v)
    if u.size != v.size:
        raise ValueError("u and v must contain the same number of rapidities")
    if u_state.residual > tol:
        msg = f"u is off shell (residual {u_state.residual:.3e}); the result is not a scalar product"
        if strict:
            raise OffShell(msg)
        warnings.warn(msg, OffShellWarning, stacklevel=2)
    if u.size == 0:
        return 1.0 + 0j
    prefactor = (-1) ** u.size * np.prod(model.a(v)) * np.prod(model.d(u))
    tol_pts = DEGENERACY_RTOL * (1 + _scale(np.concatenate([u, v])))
    if np.min(np.abs(v[:, None] - u[None, :])) < tol_pts:
        value = _confluent_a(model, u, v).value
    else:
        value = EVALUATORS[method](model, np.concatenate([u, v])).value
    return complex(prefactor * value)


def to_hermitian(bilinear: complex, M: int) -> complex:
    """``(-1)^M`` times the bilinear form: the complex-Hermitian pairing convention."""
    return (-1) ** M * bilinear


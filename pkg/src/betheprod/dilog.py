"""Complex dilogarithm ``Li2(z) = sum z^n / n^2``, vectorized over numpy arrays.

Principal branch with the cut along ``[1, inf)``.  Exactly on the cut the
value continuous from below is returned, ``Im Li2(x) = -pi log x``.

Regions:
  ``|z| <= 1/2``                   power series
  ``|z| > 1``                      inversion onto the unit disk
  ``|1 - z| < 1/2``                reflection onto ``|z| < 1/2``
  rest of the unit disk            Bernoulli series in ``-log(1 - z)``
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

PI2_6 = math.pi ** 2 / 6

_N_POWER = 56
_POWER_COEF = 1.0 / np.arange(1, _N_POWER + 1) ** 2

# Li2 = u - u^2/4 + sum_k B_2k u^(2k+1) / (2k+1)!  with  u = -log(1 - z);
# on the region where it is used |u| < 1.8, far inside the radius 2 pi
_N_BERN = 24
_B = bernoulli(2 * _N_BERN)
_BERN_COEF = np.array([_B[2 * k] / math.factorial(2 * k + 1) for k in range(1, _N_BERN + 1)])


def _power_series(z):
    out = np.zeros_like(z)
    term = np.ones_like(z)
    for c in _POWER_COEF:
        term = term * z
        out += c * term
    return out


def _bernoulli_series(z):
    u = -np.log(1 - z)
    u2 = u * u
    acc = np.zeros_like(u)
    for c in _BERN_COEF[::-1]:
        acc = acc * u2 + c
    return u - u2 / 4 + acc * u2 * u


def _disk(z):
    """Li2 on ``|z| <= 1``."""
    out = np.empty_like(z)
    small = np.abs(z) <= 0.5
    near_one = ~small & (np.abs(1 - z) < 0.5)
    rest = ~small & ~near_one
    out[small] = _power_series(z[small])
    out[rest] = _bernoulli_series(z[rest])
    if near_one.any():
        zz = z[near_one]
        with np.errstate(divide="ignore", invalid="ignore"):
            prod = np.log(zz) * np.log(1 - zz)
        prod[zz == 1] = 0.0
        out[near_one] = PI2_6 - _power_series(1 - zz) - prod
    return out


def dilog(z):
    """``Li2(z)`` on the principal branch; scalars in, scalars out."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    out = np.empty_like(z)
    outer = np.abs(z) > 1
    out[~outer] = _disk(z[~outer])
    if outer.any():
        zo = z[outer]
        minus = -zo
        # put points of the cut on the upper lip of the log cut of -z, which is
        # the lower lip of the Li2 cut
        minus = np.where(minus.imag == 0, minus.real + 0j, minus)
        out[outer] = -_disk(1 / zo) - PI2_6 - 0.5 * np.log(minus) ** 2
    return complex(out[0]) if scalar else out

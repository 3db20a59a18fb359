import math

import mpmath
import numpy as np
import pytest

from betheprod.dilog import dilog


def reference(z):
    return complex(mpmath.polylog(2, mpmath.mpc(z.real, z.imag)))


def test_special_values():
    assert dilog(0) == 0
    assert dilog(1) == pytest.approx(math.pi ** 2 / 6, rel=1e-15)
    assert dilog(-1) == pytest.approx(-math.pi ** 2 / 12, rel=1e-15)
    assert dilog(0.5) == pytest.approx(math.pi ** 2 / 12 - math.log(2) ** 2 / 2, rel=1e-15)


def test_against_mpmath(rng):
    radii = np.concatenate([rng.uniform(0, 0.5, 100), rng.uniform(0.5, 1.5, 200),
                            rng.uniform(1.5, 50, 100)])
    z = radii * np.exp(2j * np.pi * rng.uniform(size=radii.size))
    values = dilog(z)
    for zi, vi in zip(z, values):
        ref = reference(zi)
        assert abs(vi - ref) < 1e-13 * max(1.0, abs(ref)), zi


def test_near_one(rng):
    z = 1 + 1e-3 * (rng.normal(size=20) + 1j * rng.normal(size=20))
    for zi, vi in zip(z, dilog(z)):
        assert abs(vi - reference(zi)) < 1e-13


def test_cut_value_from_below():
    x = np.array([1.5, 2.0, 7.0])
    below = np.array([reference(complex(xi, -1e-30)) for xi in x])
    np.testing.assert_allclose(dilog(x + 0j), below, rtol=1e-13)
    np.testing.assert_allclose(dilog(x).imag, -np.pi * np.log(x), rtol=1e-13)


def test_reflection_and_inversion(rng):
    z = rng.normal(size=30) + 1j * rng.normal(size=30)
    z = z[np.abs(z.imag) > 1e-3]
    refl = dilog(z) + dilog(1 - z) - (math.pi ** 2 / 6 - np.log(z) * np.log(1 - z))
    assert np.max(np.abs(refl)) < 1e-12
    inv = dilog(z) + dilog(1 / z) + math.pi ** 2 / 6 + 0.5 * np.log(-z) ** 2
    assert np.max(np.abs(inv)) < 1e-12


def test_shape_preserved():
    z = np.ones((3, 4)) * 0.3j
    assert dilog(z).shape == (3, 4)
    assert isinstance(dilog(0.3j), complex)

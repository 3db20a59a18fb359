import numpy as np
import pytest

from betheprod import InhomogeneousXXXModel, ModelFunctions, RationalFunction

# (criterion number, passed, detail) filled in by test_acceptance.py
ACCEPTANCE = []


def record(number: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((number, title, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d} {title}: {detail}")


def constant_model(a=1.0, d=1.0, kappa=1.0, epsilon=1.0):
    return ModelFunctions(RationalFunction(scale=a), RationalFunction(scale=d), kappa, epsilon)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def xxx6():
    theta = [0.1 + 0.02j, -0.2, 0.05 - 0.03j, 0.3 + 0.01j, -0.15, 0.05j]
    return InhomogeneousXXXModel(theta, kappa=0.8 + 0.5j, epsilon=1.0)


def arc_member(N, kappa=0.3, theta=3.0, ell=1.0):
    """Homogeneous chain with all sites at ``theta``, ``L = ell / eps`` and ``eps = 1/N``;
    the ``N`` rapidities sit on a fixed arc inside the unit disk."""
    from betheprod.semiclassical import FamilyMember

    eps = 1.0 / N
    t = (np.arange(N) + 0.5) / N
    w = 0.8 * np.cos(np.pi * t) + 0.3j * np.sin(np.pi * t)
    model = InhomogeneousXXXModel(np.full(int(round(ell / eps)), theta), kappa, eps).functions()
    return FamilyMember(model, w, N // 2, label=f"arc_N{N}")

import numpy as np
import pytest
from conftest import arc_member, constant_model

from betheprod.contour import ellipse
from betheprod.errors import BranchCutCrossing, ContourInvalid, LogSingularity
from betheprod.semiclassical import (
    check_branch,
    coefficients,
    expansion_report,
    f0,
    f1,
    fit_log_slope,
    one_cut_family,
    wrap_log,
)

ARC_CONTOUR = ellipse(0, 1.3, 0.8, 512)


def test_vanishing_f():
    c = ellipse(0, 2, 2, 128)
    model = constant_model(kappa=0)
    assert f0(c, model, [0.1, -0.3j]) == 0
    assert f1(c, model, [0.1, -0.3j]) == 0


def test_constant_weight():
    # with no rapidities Q is the constant kappa: both integrals vanish
    c = ellipse(0, 2, 2, 128)
    model = constant_model(kappa=0.4 - 0.2j)
    assert abs(f0(c, model, [])) < 1e-15
    assert abs(f1(c, model, [])) < 1e-15


def test_log_singularity():
    with pytest.raises(LogSingularity):
        f1(ellipse(0, 2, 2, 64), constant_model(), [])


def test_enclosed_pole_rejected():
    member = arc_member(16)
    with pytest.raises(ContourInvalid):
        f0(ellipse(0, 4, 4, 256), member.model, member.w)


def test_check_branch():
    t = np.linspace(0, 1, 64, endpoint=False)
    # crosses the real axis at 0.7 and -0.3 only
    check_branch(0.2 + 0.5 * np.exp(2j * np.pi * t))
    with pytest.raises(BranchCutCrossing) as info:
        check_branch(2.0 + 0.5 * np.exp(2j * np.pi * t))
    assert info.value.segment is not None


def test_one_cut_member_crosses_the_cut():
    member = one_cut_family([8])[0]
    rows = expansion_report([member])
    assert rows[0].error == "branch_cut_crossing"
    assert np.isnan(rows[0].residual_leading)


def test_quadrature_converges():
    member = arc_member(32)
    coef = coefficients(ARC_CONTOUR, member.model, member.w)
    assert coef.quadrature_error < 1e-10
    fine = coefficients(ellipse(0, 1.3, 0.8, 1024), member.model, member.w)
    assert abs(fine.f0 - coef.f0) < 1e-10 and abs(fine.f1 - coef.f1) < 1e-10


def test_contour_independence():
    member = arc_member(32)
    a = coefficients(ARC_CONTOUR, member.model, member.w)
    b = coefficients(ellipse(0.05, 1.6, 1.0, 512), member.model, member.w)
    assert abs(a.f0 - b.f0) < 1e-8 and abs(a.f1 - b.f1) < 1e-8


def test_arc_family_expansion():
    sizes = [8, 16, 32, 64, 128]
    rows = expansion_report([arc_member(n) for n in sizes], lambda m, w, n: ARC_CONTOUR.with_nodes(n),
                            n_nodes=1024)
    assert all(r.error is None for r in rows)
    lead = [r.residual_leading for r in rows]
    sub = [r.residual_subleading for r in rows]
    assert all(s < l for s, l in zip(sub, lead))
    assert abs(fit_log_slope(sizes, sub) + 1) < 0.3
    assert abs(fit_log_slope(sizes, lead)) < 0.2


def test_report_row_layout():
    rows = expansion_report([arc_member(8)], lambda m, w, n: ARC_CONTOUR.with_nodes(n), n_nodes=256)
    row = rows[0].to_row()
    assert row["M"] == 4 and row["error"] == ""
    assert np.isfinite(row["residual_subleading"])


def test_wrap_log():
    assert wrap_log(1 + 3.5j).imag == pytest.approx(3.5 - 2 * np.pi)
    assert wrap_log(1 - 0.5j) == 1 - 0.5j


def test_fit_log_slope():
    x = np.array([8, 16, 32])
    assert fit_log_slope(x, 3.0 / x) == pytest.approx(-1)
    assert np.isnan(fit_log_slope(x, [1.0, np.nan, 2.0]))

import numpy as np
import pytest

import qprolate as qp
from _oracles import transform_point, translate_point
from conftest import supported_function


def _measured(window):
    exps = window.exponents()
    return (exps >= -3) & (exps <= 10)


def test_plan_table_matches_jv(plan_half, p_half):
    for s in (-20, -5, 0, 7, 40):
        assert plan_half.kernel_at(s) == pytest.approx(
            qp.jv(p_half.q ** float(s), p_half).value, rel=1e-12, abs=1e-300
        )
    # out-of-table lookups fall back to direct evaluation
    assert plan_half.kernel_at(500) == pytest.approx(1.0, rel=1e-10)


def test_transform_zero(plan_half):
    f = qp.LatticeFunction.zeros(plan_half.in_window)
    g = qp.fqv_transform(f, plan_half)
    assert (g.values == 0).all()


def test_transform_window_mismatch(plan_half):
    f = qp.LatticeFunction.zeros(qp.LatticeWindow(0, 3))
    with pytest.raises(ValueError):
        qp.fqv_transform(f, plan_half)


def test_transform_delta_is_kernel_column(plan_v0, p_v0):
    # F e_0 (q^m) = c (1-q) j_v(q^m, q^2)
    f = qp.LatticeFunction.delta(plan_v0.in_window, 0)
    g = qp.fqv_transform(f, plan_v0)
    for m in (-4, 0, 3, 12):
        want = p_v0.c_qv * (1 - p_v0.q) * qp.jv_at_exponent(m, p_v0)
        assert g.value_at_exp(m) == pytest.approx(want, rel=1e-13, abs=1e-250)


def test_transform_vs_mp_oracle(plan_half, p_half, window):
    rng = np.random.default_rng(41)
    f = supported_function(window, -3, 10, rng)
    g = qp.fqv_transform(f, plan_half)
    sel = (window.exponents() >= -3) & (window.exponents() <= 10)
    exps = window.exponents()[sel]
    vals = f.values[sel]
    for m in (-5, 0, 7, 20):
        want = float(transform_point(exps, vals, m, p_half.q, p_half.v, dps=50))
        assert g.value_at_exp(m) == pytest.approx(want, rel=1e-11, abs=1e-250)


@pytest.mark.parametrize("which", ["half", "v0"])
def test_involution(which, plan_half, plan_v0, window):
    plan = plan_half if which == "half" else plan_v0
    rng = np.random.default_rng(43)
    f = supported_function(window, -3, 10, rng)
    ff = qp.fqv_transform(qp.fqv_transform(f, plan), plan)
    sup = np.abs((ff.values - f.values)[_measured(window)]).max()
    assert sup <= 1e-8


@pytest.mark.parametrize("which", ["half", "v0"])
def test_self_adjoint(which, plan_half, plan_v0, window):
    plan = plan_half if which == "half" else plan_v0
    p = plan.params
    rng = np.random.default_rng(47)
    f = supported_function(window, -3, 10, rng)
    g = supported_function(window, -3, 10, rng)
    lhs = qp.inner_product(qp.fqv_transform(f, plan), g, p)
    rhs = qp.inner_product(f, qp.fqv_transform(g, plan), p)
    assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(rhs))


@pytest.mark.parametrize("which", ["half", "v0"])
def test_plancherel(which, plan_half, plan_v0, window):
    plan = plan_half if which == "half" else plan_v0
    p = plan.params
    rng = np.random.default_rng(53)
    f = supported_function(window, -3, 10, rng)
    nf = qp.norm_lqpv(f, 2.0, p)
    ng = qp.norm_lqpv(qp.fqv_transform(f, plan), 2.0, p)
    assert abs(nf - ng) <= 1e-8 * nf


def test_linearity(plan_half, window):
    rng = np.random.default_rng(59)
    f = supported_function(window, -3, 10, rng)
    g = supported_function(window, -3, 10, rng)
    alpha = 1.37
    lhs = qp.fqv_transform(alpha * f + g, plan_half)
    rhs = alpha * qp.fqv_transform(f, plan_half) + qp.fqv_transform(g, plan_half)
    scale = np.abs(rhs.values).max()
    assert np.abs(lhs.values - rhs.values).max() <= 1e-12 * scale


def test_translate_zero(plan_half):
    f = qp.LatticeFunction.zeros(plan_half.in_window)
    t = qp.translate(0, f, plan_half)
    assert (t.values == 0).all()


def test_translate_symmetry(plan_half, window):
    rng = np.random.default_rng(61)
    f = supported_function(window, -3, 10, rng)
    t2 = qp.translate(2, f, plan_half)
    t5 = qp.translate(5, f, plan_half)
    scale = max(abs(t2.value_at_exp(5)), abs(t5.value_at_exp(2)), 1e-30)
    assert abs(t2.value_at_exp(5) - t5.value_at_exp(2)) <= 1e-12 * scale


def test_translate_delta_vs_mp_oracle(plan_v0, p_v0, window):
    f = qp.LatticeFunction.delta(window, 0)
    spectrum = qp.fqv_transform(f, plan_v0)
    got = qp.translate(2, f, plan_v0)
    exps = window.exponents()
    for y in (0, 3, 6):
        want = float(
            translate_point(exps, spectrum.values, 2, y, p_v0.q, p_v0.v, dps=40)
        )
        # the sum cancels O(1) terms down to ~1e-7, so the meaningful
        # agreement is absolute at roundoff-of-the-terms level
        assert got.value_at_exp(y) == pytest.approx(want, rel=1e-10, abs=1e-13)


def test_convolve_zero(plan_half, window):
    rng = np.random.default_rng(67)
    f = supported_function(window, -3, 10, rng)
    z = qp.LatticeFunction.zeros(window)
    out = qp.convolve(f, z, plan_half)
    assert np.abs(out.values).max() <= 1e-12


def test_convolution_theorem(plan_half, window):
    rng = np.random.default_rng(71)
    f = supported_function(window, -3, 10, rng)
    g = supported_function(window, -3, 10, rng)
    conv = qp.convolve(f, g, plan_half)
    lhs = qp.fqv_transform(conv, plan_half)
    ff = qp.fqv_transform(f, plan_half)
    fg = qp.fqv_transform(g, plan_half)
    sel = _measured(window)
    assert np.abs((lhs.values - ff.values * fg.values)[sel]).max() <= 1e-8


def test_convolve_routes_agree(plan_half, window):
    rng = np.random.default_rng(73)
    f = supported_function(window, -3, 10, rng)
    g = supported_function(window, -3, 10, rng)
    spectrum = qp.convolve(f, g, plan_half)
    direct = qp.convolve_direct(f, g, plan_half)
    sel = _measured(window)
    assert np.abs((spectrum.values - direct.values)[sel]).max() <= 1e-8


def test_convolve_needs_square_plan(p_half):
    plan = qp.make_plan(qp.LatticeWindow(0, 5), p_half, qp.LatticeWindow(0, 6))
    f = qp.LatticeFunction.zeros(qp.LatticeWindow(0, 5))
    with pytest.raises(ValueError):
        qp.convolve(f, f, plan)

import numpy as np
import pytest

import qprolate as qp
from conftest import supported_function


@pytest.fixture(scope="module")
def grid():
    return qp.SamplingGrid(-10, 40)


@pytest.fixture(scope="module")
def psi0_samples(basis12, psi_tabs, grid):
    return np.array([psi_tabs[0].value_at_exp(int(k)) for k in grid.exponents()])


def test_grid_validation():
    with pytest.raises(ValueError):
        qp.SamplingGrid(3, 1)
    g = qp.SamplingGrid(-2, 2)
    assert (g.exponents() == [-2, -1, 0, 1, 2]).all()


def test_sampling_kernel_at_zero(bandlimit, p_half):
    # z = 0 kills the z^2 numerator term and j_v(0) = 1
    from qprolate.qbessel import _jv_order

    p = p_half
    a = 1.0
    for n in (0, 2, 5):
        want = (
            (1 - p.q)
            * p.c_qv**2
            / (1 - p.q ** (2 * p.v + 2))
            * _jv_order(a * p.q**n, p, p.v + 1.0)
        )
        assert qp.sampling_kernel(0.0, n, bandlimit, p_half) == pytest.approx(
            want, rel=1e-12
        )


def test_sampling_kernel_degenerate_fallback(bandlimit, p_half):
    # z = q^n takes the direct-sum branch and must agree with the
    # direct-sum reproducing kernel
    ed = qp.KernelEvaluator(bandlimit, p_half, "direct_sum")
    for n in (0, 3, 7):
        z = p_half.q ** float(n)
        got = qp.sampling_kernel(z, n, bandlimit, p_half)
        assert got == pytest.approx(qp.kernel(ed, z, z), rel=1e-12)


def test_sampling_kernel_vs_pswf_kernel(bandlimit, p_half):
    # two independent code paths: closed form vs Jackson sum
    ed = qp.KernelEvaluator(bandlimit, p_half, "direct_sum")
    for m in (-1, 0, 2):
        for n in (1, 4, 8):
            if m == n:
                continue
            z = p_half.q ** float(m)
            got = qp.sampling_kernel(z, n, bandlimit, p_half)
            want = qp.kernel(ed, z, p_half.q ** float(n))
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_reconstruct_zero(bandlimit, p_half, grid):
    samples = np.zeros(grid.k_max - grid.k_min + 1)
    assert qp.reconstruct(samples, 0.3, grid, bandlimit, p_half) == 0.0


def test_reconstruct_shape_check(bandlimit, p_half, grid):
    with pytest.raises(ValueError):
        qp.reconstruct(np.zeros(3), 0.3, grid, bandlimit, p_half)


def test_reconstruct_linear_in_samples(bandlimit, p_half, grid):
    rng = np.random.default_rng(31)
    n = grid.k_max - grid.k_min + 1
    s1 = rng.standard_normal(n)
    s2 = rng.standard_normal(n)
    alpha = 0.731
    z = 0.42
    lhs = qp.reconstruct(alpha * s1 + s2, z, grid, bandlimit, p_half)
    rhs = alpha * qp.reconstruct(s1, z, grid, bandlimit, p_half) + qp.reconstruct(
        s2, z, grid, bandlimit, p_half
    )
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_reconstruct_psi0_matches_extension(basis12, bandlimit, p_half, grid, psi0_samples):
    # the analytic extension is the independent oracle
    for z in (0.3, 0.7, 1.3):
        got = qp.reconstruct(psi0_samples, z, grid, bandlimit, p_half)
        want = qp.eval_pswf_at(basis12, 0, z)
        assert abs(got - want) <= 1e-7, z


def test_reconstruct_lattice_self_consistency(bandlimit, p_half, grid, psi0_samples):
    for j in (-5, 0, 4, 12):
        z = p_half.q ** float(j)
        got = qp.reconstruct(psi0_samples, z, grid, bandlimit, p_half)
        assert abs(got - psi0_samples[j - grid.k_min]) <= 1e-7, j


def test_reconstruct_kernel_section(bandlimit, p_half, grid):
    # f = k_{x0} is itself bandlimited; reconstructing it at z must give
    # the kernel value k(x0, z)
    ed = qp.KernelEvaluator(bandlimit, p_half, "direct_sum")
    x0 = p_half.q**2
    samples = np.array(
        [qp.kernel(ed, x0, p_half.q ** float(k)) for k in grid.exponents()]
    )
    z = p_half.q**5
    got = qp.reconstruct(samples, z, grid, bandlimit, p_half)
    assert abs(got - qp.kernel(ed, x0, z)) <= 1e-7


def test_project_zero(bandlimit, plan_half, window):
    fa = qp.project(qp.LatticeFunction.zeros(window), bandlimit, plan_half)
    assert np.abs(fa.values).max() == 0.0


def test_project_fixes_bandlimited(bandlimit, plan_half, window):
    rng = np.random.default_rng(37)
    u = supported_function(window, 0, 59, rng)
    f = qp.fqv_transform(u, plan_half)
    fa = qp.project(f, bandlimit, plan_half)
    assert np.abs(fa.values - f.values).max() <= 1e-8


def test_project_idempotent(bandlimit, plan_half, window, p_half):
    f = qp.LatticeFunction.from_callable(window, lambda x: 1 / (1 + x * x), p_half.q)
    f1 = qp.project(f, bandlimit, plan_half)
    f2 = qp.project(f1, bandlimit, plan_half)
    assert np.abs(f2.values - f1.values).max() <= 1e-8


def test_project_spectrum_vanishes(bandlimit, plan_half, window, p_half):
    f = qp.LatticeFunction.from_callable(window, lambda x: 1 / (1 + x * x), p_half.q)
    fa = qp.project(f, bandlimit, plan_half)
    spectrum = qp.fqv_transform(fa, plan_half)
    outside = spectrum.values[window.exponents() < bandlimit.a_exp]
    assert np.abs(outside).max() <= 1e-8


def test_project_matches_kernel_inner_product(bandlimit, plan_half, window, p_half):
    # f_a(x) = <f, k_x> evaluated directly through the direct-sum kernel
    f = qp.LatticeFunction.from_callable(window, lambda x: 1 / (1 + x * x), p_half.q)
    fa = qp.project(f, bandlimit, plan_half)
    ed = qp.KernelEvaluator(bandlimit, p_half, "direct_sum")
    w = qp.lattice_weights(window, p_half)
    for n in (-2, 0, 3, 8):
        kx = np.array(
            [qp.kernel(ed, p_half.q ** float(n), p_half.q ** float(k)) for k in window.exponents()]
        )
        want = float(np.dot(w, f.values * kx))
        assert fa.value_at_exp(n) == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_project_needs_square_plan(bandlimit, p_half):
    plan = qp.make_plan(qp.LatticeWindow(0, 5), p_half, qp.LatticeWindow(0, 6))
    f = qp.LatticeFunction.zeros(qp.LatticeWindow(0, 5))
    with pytest.raises(ValueError):
        qp.project(f, bandlimit, plan)


def test_convergence_study_zero(plan_half, window):
    out = qp.convergence_study(qp.LatticeFunction.zeros(window), [0, -1, -2], 10, plan_half)
    assert [e for _, e in out] == [0.0, 0.0, 0.0]


def test_convergence_study_bandlimited(bandlimit, plan_half, window):
    # already bandlimited at a = 1: every wider band reproduces it
    rng = np.random.default_rng(41)
    u = supported_function(window, 0, 59, rng)
    f = qp.fqv_transform(u, plan_half)
    out = qp.convergence_study(f, [0, -1, -2], 10, plan_half)
    assert all(err <= 1e-8 for _, err in out)


def test_convergence_study_runge_decreasing(plan_half, window, p_half):
    f = qp.LatticeFunction.from_callable(window, lambda x: 1 / (1 + x * x), p_half.q)
    out = qp.convergence_study(f, [0, -1, -2], 10, plan_half)
    errs = [e for _, e in out]
    assert errs[0] > errs[1] > errs[2] > 0


def test_convergence_study_ordering_enforced(plan_half, window):
    f = qp.LatticeFunction.zeros(window)
    with pytest.raises(ValueError):
        qp.convergence_study(f, [-2, -1, 0], 10, plan_half)

import pytest

import qprolate as qp


@pytest.fixture(scope="session")
def p_half():
    """Application parameters q = 0.5, v = -1/2."""
    return qp.QParams(0.5, -0.5)


@pytest.fixture(scope="session")
def p_v0():
    return qp.QParams(0.5, 0.0)


@pytest.fixture(scope="session")
def window():
    return qp.LatticeWindow(-15, 60)


@pytest.fixture(scope="session")
def plan_half(window, p_half):
    return qp.make_plan(window, p_half)


@pytest.fixture(scope="session")
def plan_v0(window, p_v0):
    return qp.make_plan(window, p_v0)


@pytest.fixture(scope="session")
def bandlimit():
    return qp.Bandlimit(0, 60)


@pytest.fixture(scope="session")
def basis12(bandlimit, p_half):
    return qp.compute_basis(bandlimit, p_half, keep=12)


@pytest.fixture(scope="session")
def basis25(bandlimit, p_half):
    """keep=25 request; retention caps at the float64 representability floor."""
    return qp.compute_basis(bandlimit, p_half, keep=25)


@pytest.fixture(scope="session")
def psi_tabs(basis12, window):
    """All retained eigenfunctions tabulated over the default window."""
    return [qp.pswf_on_window(basis12, i, window) for i in range(basis12.count)]


def supported_function(window, lo, hi, rng, scale=1.0):
    """Random lattice function supported on exponents [lo, hi]."""
    f = qp.LatticeFunction.zeros(window)
    sel = (window.exponents() >= lo) & (window.exponents() <= hi)
    f.values[sel] = scale * rng.standard_normal(sel.sum())
    return f

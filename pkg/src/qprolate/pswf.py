"""Concentration operator T_a^v, its eigenfunctions (the q-prolate
spheroidal wave functions), the reproducing kernel and the concentration
index.

T_a^v u(x) = c_qv int_0^a u(t) j_v(xt, q^2) t^{2v+1} d_q t is an exact
weighted sum over the lattice points a q^m, so truncating at depth M is
the only discretization.  In the weighted coordinates y_m = sqrt(w_m) u_m
the operator matrix B_km = c_qv sqrt(w_k w_m) j_v(a^2 q^{k+m}, q^2) is
symmetric, and its eigenvalues fall off so fast (roughly like q^{3 i^2}
at q = 1/2) that everything past the fourth pair drowns in float64
roundoff of B itself.  The eigensolver therefore escalates to mpmath,
rebuilding the matrix at enough digits to resolve every retained pair;
results are returned in float64.

Stored eigenfunction samples follow the convention ||psi_i||_{q,2,v} = 1
on the full lattice, which by Plancherel pins the samples on [0, a]_q to
lambda_i times the unit-norm eigenvector; the sign is fixed by making the
first significant sample positive.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .qbessel import DegenerateArguments, jv_array, jv_at_exponent, product_integral_closed
from .qcalc import LatticeFunction, LatticeWindow, QParams, inner_product

# |lambda| below sqrt(1e-300) cannot carry the lambda^2 spectral data in
# float64, so deeper pairs are never retained.
_LAMBDA_FLOOR = 1e-150
_MAX_DPS = 3000


class SolverNoConvergence(RuntimeError):
    """Eigensolver exhausted its precision budget without resolving the spectrum."""


class ZeroFunction(ValueError):
    """Concentration index requested for a function with vanishing norm."""


@dataclass(frozen=True)
class Bandlimit:
    """Band [0, a]_q with a = q^{a_exp}, truncated to its first ``depth`` points."""

    a_exp: int
    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    def weights(self, p: QParams) -> np.ndarray:
        """Jackson weights w_m = (1-q) a^{2v+2} q^{m(2v+2)}, strictly decreasing."""
        ms = np.arange(self.depth, dtype=float)
        a = p.q ** float(self.a_exp)
        return (1.0 - p.q) * a ** (2.0 * p.v + 2.0) * p.q ** (ms * (2.0 * p.v + 2.0))

    def point_exponents(self) -> np.ndarray:
        """Exponents of the retained points a q^m = q^{a_exp + m}."""
        return self.a_exp + np.arange(self.depth)


@dataclass(eq=False)
class PswfBasis:
    """Retained eigenpairs of T_a^v.

    ``eigenvalues[i]`` carries its true sign; ordering is by descending
    magnitude.  ``eigenfunctions[i, m]`` holds psi_i(a q^m) under the
    full-lattice unit-norm convention, and ``unit_samples[i]`` the same
    eigenvector normalized to unit norm on [0, a]_q (used internally to
    evaluate the analytic extension without dividing by tiny lambdas).
    """

    bandlimit: Bandlimit
    params: QParams
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    unit_samples: np.ndarray
    count: int = field(init=False)

    def __post_init__(self):
        self.count = len(self.eigenvalues)


def build_operator_matrix(b: Bandlimit, p: QParams) -> np.ndarray:
    """Weight-symmetrized matrix B of T_a^v at depth M.

    B_km = c_qv sqrt(w_k w_m) j_v(a^2 q^{k+m}, q^2); entries depend on
    k+m only (up to the weight factors), so each kernel value is computed
    once per anti-diagonal and the matrix is exactly symmetric.
    """
    m = b.depth
    diag = np.array(
        [jv_at_exponent(2 * b.a_exp + s, p) for s in range(0, 2 * m - 1)]
    )
    sq = np.sqrt(b.weights(p))
    idx = np.arange(m)
    return p.c_qv * np.outer(sq, sq) * diag[idx[:, None] + idx[None, :]]


def _mp_qpoch_inf(z, q, dps):
    out = mp.mpf(1)
    term = z
    floor = mp.mpf(10) ** (-dps - 5)
    while abs(term) > floor:
        out *= 1 - term
        term *= q
    return out


def _mp_jv_lattice(s: int, q, v, dps: int):
    """j_v(q^s, q^2) rebuilt at working precision; escalates further when
    the alternating series cancels (possible for band edges above 1)."""
    local = dps
    while True:
        with mp.workdps(local):
            z2 = q ** (2 * s)
            term = mp.mpf(1)
            total = mp.mpf(0)
            max_term = mp.mpf(0)
            floor = mp.mpf(10) ** (-local)
            n = 0
            while True:
                total += term
                at = abs(term)
                if at > max_term:
                    max_term = at
                ratio = (
                    q ** (2 * (n + 1))
                    * z2
                    / ((1 - q ** (2 * (n + 1))) * (1 - q ** (2 * v + 2) * q ** (2 * n)))
                )
                term = -term * ratio
                n += 1
                if abs(term) < floor * max(1, max_term):
                    break
        # tolerate ~15 cancelled digits within the dps budget; escalate past that
        if total == 0 or max_term * mp.mpf(10) ** (dps - 15 - local) <= abs(total):
            return total
        local *= 2


def _mp_eigensystem(b: Bandlimit, p: QParams, dps: int):
    """All eigenpairs of the operator matrix rebuilt at ``dps`` digits."""
    with mp.workdps(dps):
        q = mp.mpf(p.q)
        v = mp.mpf(p.v)
        c = _mp_qpoch_inf(q ** (2 * v + 2), q * q, dps) / _mp_qpoch_inf(q * q, q * q, dps) / (1 - q)
        mdim = b.depth
        jtab = [_mp_jv_lattice(2 * b.a_exp + s, q, v, dps) for s in range(0, 2 * mdim - 1)]
        a = q ** b.a_exp
        w = [(1 - q) * a ** (2 * v + 2) * q ** (mm * (2 * v + 2)) for mm in range(mdim)]
        sq = [mp.sqrt(x) for x in w]
        bm = mp.matrix(mdim, mdim)
        for k in range(mdim):
            for mm in range(k, mdim):
                val = c * sq[k] * sq[mm] * jtab[k + mm]
                bm[k, mm] = val
                bm[mm, k] = val
        evals, evecs = mp.eigsy(bm)
        return evals, evecs, sq


def _sample_sign(samples: np.ndarray) -> float:
    """Sign factor making the first sample of significant magnitude positive.

    The cutoff is relative (1e-12 of the largest magnitude) so the
    convention stays meaningful for eigenfunctions whose samples are all
    tiny in absolute terms.
    """
    peak = np.max(np.abs(samples))
    if peak == 0.0:
        return 1.0
    for s in samples:
        if abs(s) > 1e-12 * peak:
            return 1.0 if s > 0 else -1.0
    return 1.0


def _basis_from_mp(b: Bandlimit, p: QParams, keep: int, dps: int):
    """One extended-precision solve; returns (basis, resolved) where
    ``resolved`` is False when deeper retained pairs need more digits."""
    evals, evecs, sq = _mp_eigensystem(b, p, dps)
    mdim = b.depth
    order = sorted(range(mdim), key=lambda i: -abs(evals[i]))
    top = abs(evals[order[0]])
    floor = top * mp.mpf(10) ** (-(dps - 25))
    lams = []
    funcs = []
    units = []
    with mp.workdps(dps):
        for i in order:
            if len(lams) >= keep:
                break
            lam = evals[i]
            if abs(lam) < _LAMBDA_FLOOR:
                break  # lambda^2 would underflow float64
            if abs(lam) < floor:
                return None, False
            unit = np.array([float(evecs[mm, i] / sq[mm]) for mm in range(mdim)])
            smp = np.array([float(lam * evecs[mm, i] / sq[mm]) for mm in range(mdim)])
            sgn = _sample_sign(smp)
            lams.append(float(lam))
            funcs.append(sgn * smp)
            units.append(sgn * unit)
    basis = PswfBasis(b, p, np.array(lams), np.array(funcs), np.array(units))
    return basis, True


def _predict_dps(log_lams: list[float], keep: int) -> int:
    """Digits needed to resolve lambda_{keep-1}, extrapolating the decay of
    the already-resolved |eigenvalues| (their log10 falls off roughly
    quadratically in the index, so increments grow linearly)."""
    if len(log_lams) < 3:
        return 60
    d = [log_lams[i - 1] - log_lams[i] for i in range(1, len(log_lams))]
    growth = [d[i] - d[i - 1] for i in range(1, len(d))]
    step = max(0.0, sum(growth[-3:]) / len(growth[-3:]))
    level = log_lams[-1]
    inc = d[-1]
    for _ in range(len(log_lams), keep):
        inc += step
        level -= inc
        if level < math.log10(_LAMBDA_FLOOR):
            break  # retention will cap at the float64 representability floor
    return int(-level) + 40


def eigendecompose(
    B: np.ndarray, b: Bandlimit, p: QParams, keep: int = 15
) -> PswfBasis:
    """Eigenpairs of the concentration operator, largest |lambda| first.

    The float64 matrix B resolves eigenvalues down to roughly 1e-13 of
    the spectral radius; retained pairs below that level are re-derived
    from (b, p) at extended precision, since the information is absent
    from B itself.  Raises SolverNoConvergence if the precision budget is
    exhausted.
    """
    if keep < 1:
        raise ValueError("keep must be >= 1")
    if keep > b.depth:
        raise ValueError("keep must not exceed the bandlimit depth")
    try:
        evals, evecs = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise SolverNoConvergence(str(exc)) from exc
    order = np.argsort(-np.abs(evals))
    top = abs(evals[order[0]])
    resolvable = np.abs(evals[order]) > 1e-11 * top
    if resolvable[:keep].all():
        sqw = np.sqrt(b.weights(p))
        lams, funcs, units = [], [], []
        for i in order[:keep]:
            lam = float(evals[i])
            if abs(lam) < _LAMBDA_FLOOR:
                break
            unit = evecs[:, i] / sqw
            sgn = _sample_sign(lam * unit)
            lams.append(lam)
            funcs.append(sgn * lam * unit)
            units.append(sgn * unit)
        return PswfBasis(b, p, np.array(lams), np.array(funcs), np.array(units))

    prefix = [math.log10(abs(evals[i]) / top) for i in order[: int(resolvable.sum())]]
    dps = _predict_dps(prefix, keep)
    while dps <= _MAX_DPS:
        basis, ok = _basis_from_mp(b, p, keep, dps)
        if ok:
            return basis
        dps = max(int(dps * 1.6), dps + 60)
    raise SolverNoConvergence(
        f"spectrum unresolved at the {_MAX_DPS}-digit budget (keep={keep})"
    )


def compute_basis(b: Bandlimit, p: QParams, keep: int = 15) -> PswfBasis:
    """Build the operator matrix and eigendecompose it in one step."""
    return eigendecompose(build_operator_matrix(b, p), b, p, keep)


def eval_pswf_at(basis: PswfBasis, i: int, z: float) -> float:
    """Analytic extension psi_i(z) for real z >= 0, through the eigen-relation

    psi_i(z) = (1/lambda_i) c_qv int_0^a psi_i(t) j_v(zt, q^2) t^{2v+1} d_q t,

    evaluated as the truncated Jackson sum over the stored samples.
    """
    if not 0 <= i < basis.count:
        raise IndexError(f"eigenpair index {i} out of range")
    b = basis.bandlimit
    p = basis.params
    a = p.q ** float(b.a_exp)
    args = z * a * p.q ** np.arange(b.depth, dtype=float)
    jvals = jv_array(args, p)
    return float(p.c_qv * np.dot(b.weights(p) * basis.unit_samples[i], jvals))


def pswf_on_window(basis: PswfBasis, i: int, window: LatticeWindow) -> LatticeFunction:
    """Tabulate psi_i on a window: stored samples on [0, a]_q, the analytic
    extension elsewhere (kernel values come from the lattice-exponent cache)."""
    if not 0 <= i < basis.count:
        raise IndexError(f"eigenpair index {i} out of range")
    b = basis.bandlimit
    p = basis.params
    w = b.weights(p)
    h = p.c_qv * w * basis.unit_samples[i]
    vals = np.empty(window.size)
    for j, n in enumerate(window.exponents()):
        m = n - b.a_exp
        if 0 <= m < b.depth:
            vals[j] = basis.eigenfunctions[i, m]
        else:
            jrow = np.array(
                [jv_at_exponent(int(n) + b.a_exp + mm, p) for mm in range(b.depth)]
            )
            vals[j] = np.dot(h, jrow)
    return LatticeFunction(window, vals)


@dataclass(eq=False)
class KernelEvaluator:
    """Reproducing kernel k(x, y) of the projection onto the bandlimited space.

    Modes: ``closed_form`` (two-term difference-quotient expression, fails
    on nearly equal arguments), ``direct_sum`` (universal Jackson-sum
    fallback), ``eigen_series`` (truncated sum psi_i(x) psi_i(y), needs an
    attached basis).
    """

    bandlimit: Bandlimit
    params: QParams
    mode: str = "direct_sum"
    basis: PswfBasis | None = None
    series_terms: int | None = None

    def __post_init__(self):
        if self.mode not in ("closed_form", "direct_sum", "eigen_series"):
            raise ValueError(f"unknown kernel mode {self.mode!r}")
        if self.mode == "eigen_series" and self.basis is None:
            raise ValueError("eigen_series mode needs an attached PswfBasis")


def kernel(e: KernelEvaluator, x: float, y: float) -> float:
    """Evaluate the reproducing kernel k(x, y) for real x, y >= 0.

    ``closed_form`` raises DegenerateArguments when x^2 ~ y^2; callers
    fall back to ``direct_sum``.
    """
    p = e.params
    b = e.bandlimit
    if e.mode == "closed_form":
        return p.c_qv**2 * product_integral_closed(x, y, b.a_exp, p)
    if e.mode == "eigen_series":
        terms = e.basis.count if e.series_terms is None else min(e.series_terms, e.basis.count)
        return float(
            sum(eval_pswf_at(e.basis, i, x) * eval_pswf_at(e.basis, i, y) for i in range(terms))
        )
    a = p.q ** float(b.a_exp)
    ms = np.arange(b.depth, dtype=float)
    prod = jv_array(x * a * p.q**ms, p) * jv_array(y * a * p.q**ms, p)
    weights = p.q ** (ms * (2.0 * p.v + 2.0))
    return float(
        p.c_qv**2 * (1.0 - p.q) * a ** (2.0 * p.v + 2.0) * np.dot(weights, prod)
    )


def kernel_auto(e: KernelEvaluator, x: float, y: float) -> float:
    """Closed form where conditioned, direct sum otherwise."""
    if e.mode == "closed_form":
        try:
            return kernel(e, x, y)
        except DegenerateArguments:
            fallback = KernelEvaluator(e.bandlimit, e.params, "direct_sum")
            return kernel(fallback, x, y)
    return kernel(e, x, y)


def concentration_index(f: LatticeFunction, b: Bandlimit, p: QParams) -> float:
    """Fraction of the weighted energy of f inside [0, a]_q, in [0, 1]."""
    den = inner_product(f, f, p)
    if den <= 1e-300:
        raise ZeroFunction("concentration index undefined for the zero function")
    w = b.weights(p)
    samples = np.array([f.value_at_exp(int(k)) for k in b.point_exponents()])
    num = float(np.dot(w, samples * samples))
    return num / den


def eigen_report_json(basis: PswfBasis) -> str:
    """JSON eigen-report {q, v, a_exp, M, eigenvalues, samples}."""
    payload = {
        "q": basis.params.q,
        "v": basis.params.v,
        "a_exp": basis.bandlimit.a_exp,
        "M": basis.bandlimit.depth,
        "eigenvalues": [float(x) for x in basis.eigenvalues],
        "samples": [[float(x) for x in row] for row in basis.eigenfunctions],
    }
    return json.dumps(payload, indent=2)


def eigen_report_csv(basis: PswfBasis) -> str:
    """CSV eigen-report: one row per lattice point, one column per psi_i."""
    header = "point," + ",".join(f"psi_{i}" for i in range(basis.count))
    lines = [header]
    p = basis.params
    for m, k in enumerate(basis.bandlimit.point_exponents()):
        point = p.q ** float(k)
        row = [f"{point:.12e}"] + [f"{basis.eigenfunctions[i, m]:.12e}" for i in range(basis.count)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"

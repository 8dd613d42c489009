"""Normalized Hahn-Exton q-Bessel function j_v(z, q^2) and related identities.

The series sum_n (-1)^n q^{n(n+1)} z^{2n} / ((q^2;q^2)_n (q^{2v+2};q^2)_n)
is entire, but for large z its terms grow to a huge peak before the
q^{n(n+1)} decay wins, so the alternating sum cancels catastrophically in
double precision.  Evaluation therefore runs a fast float pass first and
transparently reruns in mpmath with enough digits whenever the peak term
dwarfs the result.  Also implements the closed-form product integral
(with its brute-force Jackson-sum twin) and the lattice growth bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .qcalc import QParams, qpochhammer

# Above this peak-to-value ratio the float series has lost ~6 digits to
# cancellation and the mpmath path takes over.
_REFINE_RATIO = 1e6
_MAX_TERMS = 2000


class DegenerateArguments(ValueError):
    """Closed-form product integral called with y^2 too close to z^2."""


@dataclass
class BesselEvalReport:
    """Series evaluation result with cancellation diagnostics.

    ``cancellation_flag`` is set when the largest term encountered
    exceeds 1e12 |value|, i.e. more than ~12 digits cancelled.
    """

    value: float
    terms_used: int
    max_term_magnitude: float
    cancellation_flag: bool


def _series_float(z2: float, q: float, v: float, eps: float):
    """One float pass of the series in z^2; returns (sum, terms, max_term).

    Termination needs both a term below eps * max(1, peak) and monotone
    decay, so the loop cannot exit before the term peak at large z.
    """
    q2 = q * q
    qv = q ** (2.0 * v + 2.0)
    term = 1.0
    total = 0.0
    max_term = 0.0
    n = 0
    while n < _MAX_TERMS:
        total += term
        at = abs(term)
        if at > max_term:
            max_term = at
        ratio = q2 ** (n + 1) * z2 / ((1.0 - q2 ** (n + 1)) * (1.0 - qv * q2**n))
        nxt = -term * ratio
        n += 1
        if not math.isfinite(nxt):
            return total, n, math.inf
        if abs(nxt) < eps * max(1.0, max_term) and abs(nxt) <= at:
            return total, n, max_term
        term = nxt
    return total, n, max_term


def _series_mp(z, q, v, dps: int):
    """Series at working precision dps; z may be mpf or float. Returns (sum, max_term)."""
    with mp.workdps(dps):
        qm = mp.mpf(q)
        vm = mp.mpf(v)
        zm = mp.mpf(z)
        z2 = zm * zm
        q2 = qm * qm
        qv = qm ** (2 * vm + 2)
        term = mp.mpf(1)
        total = mp.mpf(0)
        max_term = mp.mpf(0)
        floor = mp.mpf(10) ** (-dps)
        n = 0
        while True:
            total += term
            at = abs(term)
            if at > max_term:
                max_term = at
            ratio = q2 ** (n + 1) * z2 / ((1 - q2 ** (n + 1)) * (1 - qv * q2**n))
            nxt = -term * ratio
            n += 1
            if abs(nxt) < floor * max(1, max_term) and abs(nxt) <= at:
                return total, max_term
            term = nxt


def _series_refined(z, q: float, v: float, max_term_hint: float) -> float:
    """mpmath evaluation with digits escalated until the sum is resolved."""
    if math.isfinite(max_term_hint) and max_term_hint > 0:
        dps = 40 + int(math.log10(max_term_hint))
    else:
        dps = 200
    while True:
        total, max_term = _series_mp(z, q, v, dps)
        if total == 0 or max_term * mp.mpf(10) ** (-(dps - 18)) < abs(total):
            return float(total)
        dps *= 2
        if dps > 40000:  # pragma: no cover - series is entire, never reached
            raise ArithmeticError("q-Bessel series failed to resolve")


def jv(z: float, p: QParams) -> BesselEvalReport:
    """Normalized Hahn-Exton q-Bessel function j_v(z, q^2) for real z >= 0.

    Returns a BesselEvalReport; ``value`` is accurate even in the severe
    cancellation regime (the report still describes the float-series
    behaviour that triggered refinement).
    """
    val, terms, max_term = _series_float(z * z, p.q, p.v, p.eps)
    if max_term > _REFINE_RATIO * max(abs(val), 1e-300):
        val = _series_refined(z, p.q, p.v, max_term)
    flag = max_term > 1e12 * abs(val) if val != 0.0 else max_term > 0.0
    return BesselEvalReport(val, terms, max_term, flag)


def _jv_order(z: float, p: QParams, v: float) -> float:
    """j at an explicit order v (used for the v+1 factors of closed forms)."""
    val, _, max_term = _series_float(z * z, p.q, v, p.eps)
    if max_term > _REFINE_RATIO * max(abs(val), 1e-300):
        val = _series_refined(z, p.q, v, max_term)
    return val


@lru_cache(maxsize=1 << 18)
def _jv_exp_cached(q: float, v: float, eps: float, s: int) -> float:
    """j_v(q^s, q^2) at the lattice exponent s, with the mp argument formed
    as an exact power so deep negative exponents stay consistent."""
    z = q ** float(s)
    val, _, max_term = _series_float(z * z, q, v, eps)
    if max_term > _REFINE_RATIO * max(abs(val), 1e-300):
        if math.isfinite(max_term) and max_term > 0:
            dps = 40 + int(math.log10(max_term))
        else:
            dps = 200
        while True:
            with mp.workdps(dps):
                zm = mp.mpf(q) ** s
            total, mt = _series_mp(zm, q, v, dps)
            if total == 0 or mt * mp.mpf(10) ** (-(dps - 18)) < abs(total):
                return float(total)
            dps *= 2
    return val


def jv_at_exponent(s: int, p: QParams) -> float:
    """j_v(q^s, q^2) for integer s, cached across the whole process."""
    return _jv_exp_cached(p.q, p.v, p.eps, int(s))


def jv_array(z: np.ndarray, p: QParams, v: float | None = None) -> np.ndarray:
    """Vectorized j_v(z_i, q^2); per-element mp refinement where needed."""
    if v is None:
        v = p.v
    z = np.asarray(z, dtype=float)
    z2 = z * z
    q2 = p.q * p.q
    qv = p.q ** (2.0 * v + 2.0)
    term = np.ones_like(z2)
    total = np.zeros_like(z2)
    max_term = np.zeros_like(z2)
    n = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while n < _MAX_TERMS:
            total += term
            np.maximum(max_term, np.abs(term), out=max_term)
            ratio = q2 ** (n + 1) * z2 / ((1.0 - q2 ** (n + 1)) * (1.0 - qv * q2**n))
            nxt = -term * ratio
            n += 1
            bad = ~np.isfinite(nxt)
            if bad.any():
                max_term[bad] = np.inf
                nxt[bad] = 0.0
            done = (np.abs(nxt) < p.eps * np.maximum(1.0, max_term)) & (
                np.abs(nxt) <= np.abs(term)
            )
            if done.all():
                break
            term = nxt
    refine = max_term > _REFINE_RATIO * np.maximum(np.abs(total), 1e-300)
    if refine.any():
        flat = total.reshape(-1)
        mf = max_term.reshape(-1)
        for i in np.flatnonzero(refine.reshape(-1)):
            flat[i] = _series_refined(float(z.reshape(-1)[i]), p.q, v, float(mf[i]))
    return total


def jv_bound(n: int, p: QParams) -> float:
    """Upper bound for |j_v(q^n, q^2)|: constant for n >= 0, times
    q^{n^2 + (2v+1)n} for n < 0."""
    q2 = p.q * p.q
    c = (
        qpochhammer(-q2, q2, math.inf, p.eps)
        * qpochhammer(-p.q ** (2.0 * p.v + 2.0), q2, math.inf, p.eps)
        / qpochhammer(p.q ** (2.0 * p.v + 2.0), q2, math.inf, p.eps)
    )
    if n >= 0:
        return c
    return c * p.q ** (n * n + (2.0 * p.v + 1.0) * n)


def product_integral_direct(
    y: float, z: float, a_exp: int, p: QParams, depth: int
) -> float:
    """Jackson-sum evaluation of int_0^a j_v(yt) j_v(zt) t^{2v+1} d_q t.

    The brute-force twin of ``product_integral_closed``; ``depth`` is the
    number of lattice points of [0, a]_q retained.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    a = p.q ** float(a_exp)
    ms = np.arange(depth, dtype=float)
    args_y = y * a * p.q**ms
    args_z = z * a * p.q**ms
    prod = jv_array(args_y, p) * jv_array(args_z, p)
    weights = p.q ** (ms * (2.0 * p.v + 2.0))
    return float((1.0 - p.q) * a ** (2.0 * p.v + 2.0) * np.dot(weights, prod))


def product_integral_closed(y: float, z: float, a_exp: int, p: QParams) -> float:
    """Closed form of int_0^a j_v(yt) j_v(zt) t^{2v+1} d_q t for y, z > 0.

    Valid away from y^2 ~ z^2; the difference quotient loses ~9 digits at
    separation 1e-9, so closer arguments raise DegenerateArguments and the
    caller should fall back to ``product_integral_direct``.
    """
    y2 = y * y
    z2 = z * z
    if abs(y2 - z2) <= 1e-9 * max(y2, z2):
        raise DegenerateArguments(f"y^2={y2} and z^2={z2} too close for the closed form")
    a = p.q ** float(a_exp)
    pref = (1.0 - p.q) / (1.0 - p.q ** (2.0 * p.v + 2.0)) * a ** (2.0 * p.v + 2.0)
    v1 = p.v + 1.0
    num = y2 * _jv_order(a * y, p, v1) * _jv_order(a * z / p.q, p, p.v) - z2 * _jv_order(
        a * z, p, v1
    ) * _jv_order(a * y / p.q, p, p.v)
    return pref * num / (y2 - z2)

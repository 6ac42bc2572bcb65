"""Adaptive Simpson quadrature for the smooth 1-D integrals of this package.

Kept deliberately independent of scipy.integrate so tests can cross-check
the two routes against each other.
"""
from __future__ import annotations

__all__ = ["adaptive_simpson"]

_MAX_DEPTH = 60


def _simpson(f, a, fa, b, fb, m, fm):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _recurse(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, m, fm, lm, flm)
    right = _simpson(f, m, fm, b, fb, rm, frm)
    err = left + right - whole
    if depth >= _MAX_DEPTH or abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    return _recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth + 1) + _recurse(
        f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth + 1
    )


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, breakpoints=()) -> float:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    ``breakpoints`` lists interior points where the integrand is only
    piecewise smooth (e.g. ramp/plateau joints); the interval is split there
    so the recursion converges quickly.
    """
    if b < a:
        return -adaptive_simpson(f, b, a, tol, breakpoints)
    pts = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = 0.5 * (lo + hi)
        flo, fhi, fm = f(lo), f(hi), f(m)
        whole = _simpson(f, lo, flo, hi, fhi, m, fm)
        total += _recurse(f, lo, flo, hi, fhi, m, fm, whole, tol / max(1, len(pts) - 1), 0)
    return total

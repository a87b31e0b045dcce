"""Bracketed one-dimensional root finding.

Newton (or secant, without a derivative) steps are taken while they stay
inside the current sign-change bracket and make progress; otherwise the
step falls back to bisection.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence

GRID_POINTS = 32


def find_brackets(f, lo, hi, n=GRID_POINTS):
    """Sign-change intervals of ``f`` on ``n`` uniformly spaced points of ``[lo, hi]``.

    Points where ``f`` is not finite are skipped, so ``f`` may return NaN
    outside its domain.
    """
    xs = np.linspace(lo, hi, n)
    vals = [f(x) for x in xs]
    brackets = []
    for i in range(n - 1):
        fa, fb = vals[i], vals[i + 1]
        if not (math.isfinite(fa) and math.isfinite(fb)):
            continue
        if fa == 0.0:
            brackets.append((xs[i], xs[i]))
        elif fa * fb < 0:
            brackets.append((xs[i], xs[i + 1]))
    if math.isfinite(vals[-1]) and vals[-1] == 0.0:
        brackets.append((xs[-1], xs[-1]))
    return brackets


def newton_bisect(f, lo, hi, fprime=None, xtol=1e-15, maxiter=200):
    """Root of ``f`` in ``[lo, hi]`` where ``f(lo)`` and ``f(hi)`` differ in sign."""
    if lo == hi:
        return lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoConvergence(f"no sign change on [{lo}, {hi}]")
    if lo > hi:
        lo, hi, flo, fhi = hi, lo, fhi, flo

    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    prev_x, prev_f = (hi, fhi) if x == lo else (lo, flo)
    for _ in range(maxiter):
        if fprime is not None:
            d = fprime(x)
            cand = x - fx / d if d != 0 and math.isfinite(d) else math.nan
        else:
            denom = fx - prev_f
            cand = x - fx * (x - prev_x) / denom if denom != 0 else math.nan
        if not (lo <= cand <= hi) or not math.isfinite(cand):
            cand = 0.5 * (lo + hi)
        step = abs(cand - x)
        fc = f(cand)
        if fc == 0.0:
            return cand
        if fc * flo < 0:
            hi, fhi = cand, fc
        else:
            lo, flo = cand, fc
        if step <= xtol * max(1.0, abs(cand)) or hi - lo <= xtol * max(1.0, abs(cand)):
            return cand
        if abs(fc) > 0.5 * abs(fx):
            # insufficient progress: continue from the bracket midpoint
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0:
                return mid
            if fm * flo < 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            prev_x, prev_f = cand, fc
            x, fx = mid, fm
        else:
            prev_x, prev_f = x, fx
            x, fx = cand, fc
    raise NoConvergence(f"root not converged after {maxiter} iterations")

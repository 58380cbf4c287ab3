"""Quadrature, grid convolution and empirical-tail primitives.

Integrands passed to the quadrature routines must be vectorised: they receive
a 1-D float array of abscissae and return an array of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, QuadratureError

# below this length np.convolve beats the FFT and is exact to rounding
_DIRECT_CONVOLVE_MAX = 4096
_MAX_EXTENSIONS = 64


@dataclass(frozen=True)
class Quadrature:
    """Tolerances and truncation settings for semi-infinite integrals."""

    atol: float = 1e-10
    rtol: float = 1e-8
    max_subdivisions: int = 2**20
    truncation_quantile: float = 1.0 - 1e-10

    def __post_init__(self):
        if not (self.atol > 0 and self.rtol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if not 0.0 < self.truncation_quantile < 1.0:
            raise DomainError("truncation quantile must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = Quadrature()


def _evaluate(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    if not np.all(np.isfinite(y)):
        raise DomainError("integrand returned non-finite values")
    return y


def adaptive_simpson(f, a, b, atol=1e-10, rtol=1e-8, max_subdivisions=2**20,
                     initial_panels=16):
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson bisection.

    All active intervals are refined together, so ``f`` is called once per
    bisection level with every new abscissa. The per-interval error estimate
    is the Richardson difference ``|S_left + S_right - S_whole| / 15`` and
    accepted intervals receive the Richardson-corrected value.

    Returns:
        tuple: ``(value, error_estimate)``.

    Raises:
        QuadratureError: when more than ``max_subdivisions`` intervals are
            needed. The exception carries the best estimate so far.
    """
    a = float(a)
    b = float(b)
    if b <= a:
        return 0.0, 0.0
    width = b - a
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    fx = _evaluate(f, np.concatenate([edges, mid]))
    fa, fb, fm = fx[:initial_panels], fx[1:initial_panels + 1], fx[initial_panels + 1:]
    whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
    tol = max(atol, rtol * abs(whole.sum()))

    value = 0.0
    error = 0.0
    used = initial_panels
    while lo.size:
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        fnew = _evaluate(f, np.concatenate([lmid, rmid]))
        flm, frm = fnew[:lo.size], fnew[lo.size:]
        left = (mid - lo) / 6.0 * (fa + 4.0 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        local_tol = tol * (hi - lo) / width
        # intervals at floating-point resolution cannot be split further
        tiny = (hi - lo) <= 64 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))
        done = (np.abs(delta) <= 15.0 * local_tol) | tiny
        value += float(np.sum(left[done] + right[done] + delta[done] / 15.0))
        error += float(np.sum(np.abs(delta[done]))) / 15.0

        keep = ~done
        n_keep = int(keep.sum())
        if not n_keep:
            break
        used += 2 * n_keep
        if used > max_subdivisions:
            best = value + float(np.sum(left[keep] + right[keep]))
            err = error + float(np.sum(np.abs(delta[keep]))) / 15.0
            raise QuadratureError("subdivision limit exceeded", best, err)
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        flm, frm = flm[keep], frm[keep]
        left, right = left[keep], right[keep]
        lo, mid, hi = (np.concatenate([lo, mid]), np.concatenate([lmid[keep], rmid[keep]]),
                       np.concatenate([mid, hi]))
        fa, fm, fb = (np.concatenate([fa, fm]), np.concatenate([flm, frm]),
                      np.concatenate([fm, fb]))
        whole = np.concatenate([left, right])
    return value, error


def integrate_interval(f, a, b, quad=DEFAULT_QUADRATURE, breakpoints=()):
    """Integrate over ``[a, b]``, splitting at any breakpoints inside it."""
    pts = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    segments = list(zip(pts[:-1], pts[1:]))
    atol = quad.atol / max(1, len(segments))
    total = 0.0
    error = 0.0
    for lo, hi in segments:
        v, e = adaptive_simpson(f, lo, hi, atol=atol, rtol=quad.rtol,
                                max_subdivisions=quad.max_subdivisions)
        total += v
        error += e
    return total, error


def integrate_semiinfinite(f, d, quad=DEFAULT_QUADRATURE, breakpoints=(), full_output=False):
    """Integrate ``f`` over ``[0, inf)``.

    The bulk of the domain is ``[0, T]`` with ``T`` the truncation quantile
    of ``d``. Atoms of ``d`` and any extra ``breakpoints`` split the domain
    so that step discontinuities at those points are integrated exactly by
    the piecewise rule. Beyond ``T`` the integral is extended over doubling
    segments ``[T, 2T], [2T, 4T], ...`` until a segment contributes less than
    ``quad.atol``; the magnitude of that last segment is reported as the
    truncated-tail bound.

    Returns:
        float, or ``(value, info)`` when ``full_output`` is true, where
        ``info`` holds ``error``, ``truncation`` and ``tail_bound``.
    """
    upper = float(d.quantile(quad.truncation_quantile))
    atoms = [float(x) for x in getattr(d, "atoms", ())]
    cuts = [p for p in (*atoms, *breakpoints) if p > 0]
    if upper <= 0:
        upper = max(cuts, default=1.0)
    value, error = integrate_interval(f, 0.0, upper, quad, cuts)

    lo = upper
    tail = 0.0
    for _ in range(_MAX_EXTENSIONS):
        hi = 2.0 * lo
        seg, seg_err = integrate_interval(f, lo, hi, quad, cuts)
        value += seg
        error += seg_err
        tail = abs(seg)
        lo = hi
        if tail <= quad.atol:
            break
    else:
        raise QuadratureError("integrand does not decay beyond truncation", value, error + tail)
    if full_output:
        return value, {"error": error, "truncation": upper, "tail_bound": tail}
    return value


def _check_uniform(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("grid must be a 1-D array with at least two points")
    steps = np.diff(grid)
    h = steps[0]
    if h <= 0 or not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise DomainError("grid must be uniform and increasing")
    if abs(grid[0]) > 1e-12 * max(1.0, abs(h)):
        raise DomainError("convolution grid must start at 0")
    return grid, float(h)


def trapezoid_mass(values, h):
    values = np.asarray(values, dtype=float)
    return float(h * (values.sum() - 0.5 * (values[0] + values[-1])))


def grid_convolve(f, g, grid, full_output=False):
    """Trapezoid-rule convolution of two densities sampled on ``grid``.

    ``(f * g)(x_n) = h * [sum_i f_i g_{n-i} - (f_0 g_n + f_n g_0) / 2]`` for
    ``n >= 1``; at ``x_0`` the value ``h f_0 g_0 / 2`` is used instead of 0 so
    that total trapezoid mass is the product of the input masses. Mass carried
    beyond the last grid point is dropped and reported as ``mass_loss`` when
    ``full_output`` is set.
    """
    grid, h = _check_uniform(grid)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != grid.shape or g.shape != grid.shape:
        raise DomainError("density arrays must match the grid length")
    n = grid.size
    if n <= _DIRECT_CONVOLVE_MAX:
        full = np.convolve(f, g)[:n]
    else:
        full = fftconvolve(f, g)[:n]
        full[np.abs(full) < 1e-300] = 0.0
    out = h * (full - 0.5 * (f[0] * g + f * g[0]))
    # the pure trapezoid value at x=0 is 0 and drops h^2 f_0 g_0 / 4 of mass;
    # this value restores it (every other point is the plain trapezoid rule)
    out[0] = 0.5 * h * f[0] * g[0]
    out = np.maximum(out, 0.0)
    if full_output:
        loss = trapezoid_mass(f, h) * trapezoid_mass(g, h) - trapezoid_mass(out, h)
        return out, {"mass_loss": loss}
    return out


def empirical_tail(samples, grid):
    """Fraction of ``samples`` strictly greater than each grid point."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise DomainError("empirical_tail needs at least one sample")
    ordered = np.sort(samples)
    grid = np.asarray(grid, dtype=float)
    above = samples.size - np.searchsorted(ordered, grid, side="right")
    return above / samples.size


def dkw_halfwidth(n, delta):
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band at confidence 1 - delta."""
    if n < 1:
        raise DomainError("sample count must be positive")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    return float(np.sqrt(np.log(2.0 / delta) / (2.0 * n)))

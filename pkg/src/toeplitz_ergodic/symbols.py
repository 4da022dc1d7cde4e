"""Generating symbols on [-pi, pi] and their Fourier coefficients.

A :class:`Symbol` couples a vectorised evaluator ``theta -> f(theta)`` with
a provider of Fourier coefficients

    f_k = (1/2pi) * int_{-pi}^{pi} f(x) exp(-i k x) dx.

Coefficients are either known in closed form (``coeff_kind="analytic"``) or
obtained once, at construction, from the trapezoid rule on a uniform grid of
``2**14`` points (``coeff_kind="fft_derived"``).  For periodic integrands the
trapezoid rule is spectrally accurate, and a single FFT yields every
coefficient with ``|k| < grid/2``.

Essential suprema and essential ranges are approximated by sampling on a
dense uniform grid, so every quantity derived here is exact only for
piecewise-continuous symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import spence

from .errors import EvaluationDomainError, InputError, RegistryError

DEFAULT_COEFF_GRID = 2**14
DEFAULT_SUP_GRID = 2**16
DEFAULT_VERTIII_K = 4096

#: Symbols used by the acceptance suite and ``list``.
BUILTIN_SYMBOLS = ("const:3", "mode:1", "cos2", "cos2shift:4", "zeta2")


def uniform_grid(grid: int) -> np.ndarray:
    """``grid`` equispaced points ``-pi + 2 pi j / grid`` (left endpoint kept)."""
    return -np.pi + 2.0 * np.pi * np.arange(grid) / grid


def fourier_coefficients(func: Callable, grid: int = DEFAULT_COEFF_GRID,
                         real_valued: bool = False):
    """Trapezoid-rule Fourier coefficients of ``func`` on ``grid`` points.

    Returns ``(table, error)`` where ``table[k % grid]`` holds f_k for
    ``|k| < grid/2`` and ``error`` estimates the quadrature error as the
    largest change against the half-size grid over ``|k| < grid/4``.
    """
    if grid < 8 or grid & (grid - 1):
        raise InputError(f"coefficient grid must be a power of two >= 8, got {grid}")

    def table_for(npts):
        theta = uniform_grid(npts)
        vals = _checked(func(theta), "symbol")
        if real_valued:
            vals = vals.real
        # shift from theta_0 = -pi to the FFT's origin: factor exp(i k pi)
        c = np.fft.fft(vals) / npts
        k = np.fft.fftfreq(npts, 1.0 / npts)
        c = c * np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
        if real_valued:
            c = 0.5 * (c + np.conj(c[(-np.arange(npts)) % npts]))
        return c

    table = table_for(grid)
    coarse = table_for(grid // 2)
    quarter = grid // 4
    ks = np.arange(-quarter + 1, quarter)
    error = float(np.max(np.abs(table[ks % grid] - coarse[ks % (grid // 2)])))
    return table, error


def _checked(values, what):
    values = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise EvaluationDomainError(f"non-finite values while sampling {what}")
    return values


@dataclass(frozen=True, eq=False)
class Symbol:
    """A bounded function on [-pi, pi] with its Fourier coefficients.

    Instances are immutable; the coefficient table of an fft-derived symbol
    is computed eagerly so symbols can be shared between threads.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    coeff_func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    coeff_kind: str = "analytic"
    half_bandwidth: Optional[int] = None
    real_valued: bool = False
    coeff_grid: Optional[int] = None
    coeff_error: float = 0.0
    _table: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def analytic(cls, name, func, coeff_func, half_bandwidth=None, real_valued=False):
        return cls(name, func, coeff_func, "analytic", half_bandwidth, real_valued)

    @classmethod
    def from_function(cls, name, func, grid=DEFAULT_COEFF_GRID, real_valued=False):
        """Symbol whose coefficients come from the trapezoid rule."""
        table, err = fourier_coefficients(func, grid, real_valued)
        return cls(name, func, None, "fft_derived", None, real_valued, grid, err, table)

    def __call__(self, theta):
        vals = np.asarray(self.func(np.asarray(theta, dtype=float)), dtype=complex)
        return vals.real.astype(complex) if self.real_valued else vals

    def coeffs(self, ks) -> np.ndarray:
        """Vectorised f_k for an integer array ``ks``."""
        ks = np.asarray(ks, dtype=np.int64)
        if self._table is not None:
            n = self.coeff_grid
            if ks.size and np.max(np.abs(ks)) >= n // 2:
                raise InputError(
                    f"{self.name}: coefficient index beyond Nyquist limit {n // 2 - 1} "
                    f"of its {n}-point grid")
            return self._table[ks % n]
        out = np.asarray(self.coeff_func(ks), dtype=complex)
        out = np.broadcast_to(out, ks.shape).copy()
        if self.half_bandwidth is not None:
            out[np.abs(ks) > self.half_bandwidth] = 0.0
        return out

    def coeff(self, k: int) -> complex:
        return complex(self.coeffs(np.array([k]))[0])

    @property
    def max_index(self) -> Optional[int]:
        """Largest |k| for which coefficients are available (None: unlimited)."""
        if self._table is not None:
            return self.coeff_grid // 2 - 1
        return None

    def sample(self, grid: int):
        theta = uniform_grid(grid)
        return theta, _checked(self(theta), self.name)


def fourier_coefficient(f: Symbol, k: int) -> complex:
    return f.coeff(k)


# ---------------------------------------------------------------------------
# built-in symbols


def constant_symbol(c) -> Symbol:
    c = complex(c)
    return Symbol.analytic(
        f"const:{_fmt(c)}",
        lambda th: np.full(np.shape(th), c, dtype=complex),
        lambda k: np.where(k == 0, c, 0.0),
        half_bandwidth=0,
        real_valued=c.imag == 0,
    )


def mode_symbol(m: int) -> Symbol:
    """exp(i m theta)."""
    m = int(m)
    return Symbol.analytic(
        f"mode:{m}",
        lambda th: np.exp(1j * m * th),
        lambda k: np.where(k == m, 1.0, 0.0),
        half_bandwidth=abs(m),
        real_valued=m == 0,
    )


def cos_shift_symbol(a: float = 0.0) -> Symbol:
    """a + 2 cos(theta) = a + exp(i theta) + exp(-i theta)."""
    a = float(a)
    name = "cos2" if a == 0 else f"cos2shift:{_fmt(a)}"
    return Symbol.analytic(
        name,
        lambda th: a + 2.0 * np.cos(th),
        lambda k: np.where(np.abs(k) == 1, 1.0, np.where(k == 0, a, 0.0)),
        half_bandwidth=1,
        real_valued=True,
    )


def zeta2_symbol() -> Symbol:
    """sum_{k>=1} exp(i k theta) / k^2, i.e. the dilogarithm Li_2(exp(i theta))."""
    def coeff(k):
        kf = np.asarray(k, dtype=float)
        safe = np.where(kf >= 1, kf, 1.0)
        return np.where(kf >= 1, 1.0 / safe**2, 0.0)

    return Symbol.analytic(
        "zeta2",
        lambda th: spence(1.0 - np.exp(1j * np.asarray(th))),
        coeff,
    )


def sampled_symbol(path, grid=DEFAULT_COEFF_GRID) -> Symbol:
    """Symbol from a text file of ``theta re [im]`` rows.

    Values between samples are obtained by periodic linear interpolation;
    coefficients are fft-derived from the interpolant.
    """
    data = np.loadtxt(path, ndmin=2, comments="#", delimiter=None)
    if data.shape[1] not in (2, 3):
        raise InputError(f"{path}: expected 2 or 3 columns (theta, re[, im])")
    order = np.argsort(data[:, 0])
    theta = data[order, 0]
    re = data[order, 1]
    im = data[order, 2] if data.shape[1] == 3 else np.zeros_like(re)
    real_valued = not np.any(im)
    _checked(re + 1j * im, str(path))

    def func(th):
        th = np.asarray(th, dtype=float)
        r = np.interp(th, theta, re, period=2 * np.pi)
        i = np.interp(th, theta, im, period=2 * np.pi)
        return r + 1j * i

    return Symbol.from_function(f"file:{path}", func, grid, real_valued)


def parse_symbol(spec: str) -> Symbol:
    """Resolve a registry spec such as ``"cos2shift:4"`` or ``"file:f.txt"``."""
    head, _, arg = spec.strip().partition(":")
    try:
        if head == "const" and arg:
            return constant_symbol(complex(arg.replace(" ", "")))
        if head == "mode" and arg:
            return mode_symbol(int(arg))
        if head == "cos2" and not arg:
            return cos_shift_symbol(0.0)
        if head == "cos2shift" and arg:
            return cos_shift_symbol(float(arg))
        if head == "zeta2" and not arg:
            return zeta2_symbol()
        if head == "file" and arg:
            if not Path(arg).is_file():
                raise RegistryError(f"symbol file not found: {arg}")
            return sampled_symbol(arg)
    except ValueError as exc:
        raise RegistryError(f"bad symbol spec {spec!r}: {exc}") from None
    raise RegistryError(f"unknown symbol spec {spec!r}")


# ---------------------------------------------------------------------------
# derived symbols


def conj_symbol(f: Symbol) -> Symbol:
    """Complex conjugate; coefficients conj(f_{-k})."""
    return _with_coeffs(f"conj({f.name})", lambda th: np.conj(f(th)),
                        lambda k: np.conj(f.coeffs(-k)), f)


def reflect_symbol(f: Symbol) -> Symbol:
    """f(-theta); coefficients f_{-k}."""
    return _with_coeffs(f"reflect({f.name})", lambda th: f(-np.asarray(th)),
                        lambda k: f.coeffs(-k), f)


def _with_coeffs(name, func, coeff_func, parent):
    table = None
    if parent._table is not None:
        n = parent.coeff_grid
        ks = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
        ks[n // 2] = -(n // 2)  # Nyquist slot is never read
        table = np.zeros(n, dtype=complex)
        ok = np.abs(ks) < n // 2
        table[ok] = coeff_func(ks[ok])
    return Symbol(name, func, coeff_func, parent.coeff_kind, parent.half_bandwidth,
                  parent.real_valued, parent.coeff_grid, parent.coeff_error, table)


def product_symbol(f: Symbol, g: Symbol, grid: int = DEFAULT_COEFF_GRID) -> Symbol:
    """Pointwise product f*g.

    Two banded analytic symbols give an exact banded convolution, other
    analytic pairs a long truncated convolution; anything else falls back to
    fft-derived coefficients of the product evaluator.
    """
    name = f"({f.name})*({g.name})"
    func = lambda th: f(th) * g(th)  # noqa: E731
    real = f.real_valued and g.real_valued
    if (f.coeff_kind == g.coeff_kind == "analytic"
            and f.half_bandwidth is not None and g.half_bandwidth is not None):
        bf, bg = f.half_bandwidth, g.half_bandwidth
        cf = f.coeffs(np.arange(-bf, bf + 1))
        cg = g.coeffs(np.arange(-bg, bg + 1))
        conv = np.convolve(cf, cg)
        bw = bf + bg

        def coeff(k):
            k = np.asarray(k)
            idx = np.clip(k + bw, 0, 2 * bw)
            return np.where(np.abs(k) <= bw, conv[idx], 0.0)

        return Symbol.analytic(name, func, coeff, bw, real)
    if f.coeff_kind == g.coeff_kind == "analytic":
        return _convolution_product(name, func, f, g, real)
    return Symbol.from_function(name, func, grid, real)


CONVOLUTION_TERMS = 2**15


def _convolution_product(name, func, f, g, real, J=CONVOLUTION_TERMS):
    """Product coefficients sum_{|j|<=J} f_j g_{k-j}, tabulated for |k| < J/2.

    A neglected term has |j| > J and |k-j| > J/2, so it is bounded by
    (sum_{|j|>J} |f_j|) * max_{|i|>J/2} |g_i| plus the symmetric term; the
    outermost octave stands in for the unknown tail sums.
    """
    ks = np.arange(-J, J + 1)
    cf, cg = f.coeffs(ks), g.coeffs(ks)
    conv = fftconvolve(cf, cg)  # index i <-> k = i - 2J
    n = J
    table = np.zeros(n, dtype=complex)
    inner = np.arange(-n // 2 + 1, n // 2)
    table[inner % n] = conv[inner + 2 * J]
    outer = np.abs(ks) > J // 2
    err = float(np.sum(np.abs(cf[outer])) * np.max(np.abs(cg[outer]))
                + np.sum(np.abs(cg[outer])) * np.max(np.abs(cf[outer])))
    return Symbol(name, func, None, "analytic", None, real, n, err, table)


def abs_sq_symbol(f: Symbol, grid: int = DEFAULT_COEFF_GRID) -> Symbol:
    """|f|^2 (exact coefficients for banded analytic f)."""
    s = product_symbol(conj_symbol(f), f, grid)
    return Symbol(f"|{f.name}|^2", lambda th: np.abs(f(th)) ** 2, s.coeff_func,
                  s.coeff_kind, s.half_bandwidth, True, s.coeff_grid, s.coeff_error,
                  s._table)


def exp_abs_sq_symbol(f: Symbol, s: float, grid: int = DEFAULT_COEFF_GRID) -> Symbol:
    """exp(i s |f|^2)."""
    s = float(s)
    if not math.isfinite(s):
        raise InputError("exp_abs_sq needs a finite s")
    return Symbol.from_function(f"exp(i{_fmt(s)}|{f.name}|^2)",
                                lambda th: np.exp(1j * s * np.abs(f(th)) ** 2), grid)


def compose_symbol(f: Symbol, G, grid: int = DEFAULT_COEFF_GRID) -> Symbol:
    """G(|f|^2) for a real test function G."""
    return Symbol.from_function(f"{G.name}(|{f.name}|^2)",
                                lambda th: G(np.abs(f(th)) ** 2), grid, real_valued=True)


def derived_symbol(f: Symbol, kind: str, s: float = None, G=None,
                   grid: int = DEFAULT_COEFF_GRID) -> Symbol:
    if kind == "conj":
        return conj_symbol(f)
    if kind == "reflect":
        return reflect_symbol(f)
    if kind == "abs_sq":
        return abs_sq_symbol(f, grid)
    if kind == "exp_abs_sq":
        return exp_abs_sq_symbol(f, s, grid)
    if kind == "compose":
        return compose_symbol(f, G, grid)
    raise InputError(f"unknown derived symbol kind {kind!r}")


# ---------------------------------------------------------------------------
# scalar quantities


@dataclass(frozen=True)
class NormReport:
    vertiii_sq: float
    truncation_K: int
    tail_bound: float
    sup_norm: float
    grid_size: int
    reliable: bool = True
    note: str = ""

    @property
    def upper(self) -> float:
        """Partial sum plus tail bound: what a bound should consume."""
        return self.vertiii_sq + self.tail_bound


@dataclass(frozen=True)
class RangeBounds:
    m: float
    M: float


def sup_norm(f: Symbol, grid: int = DEFAULT_SUP_GRID) -> float:
    """max |f| over a uniform grid; a lower estimate of the essential sup."""
    if grid < 16:
        raise InputError(f"sup_norm grid must be >= 16, got {grid}")
    _, vals = f.sample(grid)
    return float(np.max(np.abs(vals)))


def vertiii_sq(f: Symbol, K: int = DEFAULT_VERTIII_K, tail_tol: float = 1e-6,
               grid: int = DEFAULT_SUP_GRID) -> NormReport:
    """Truncated sum_{|k|<=K} |k| |f_k|^2 with a tail estimate.

    Banded symbols with ``half_bandwidth <= K`` are exact (tail 0).  Otherwise
    |f_k| on each side is fitted by C k^-alpha over the last octave [K/2, K]
    and the tail is bounded by C^2 K^(2-2 alpha) / (2 alpha - 2).  The report
    is flagged unreliable when that tail exceeds ``tail_tol``.
    """
    if K < 1:
        raise InputError("vertiii_sq needs K >= 1")
    if f.max_index is not None:
        K = min(K, f.max_index)
    ks = np.arange(1, K + 1)
    pos = f.coeffs(ks)
    neg = f.coeffs(-ks)
    partial = float(np.sum(ks * (np.abs(pos) ** 2 + np.abs(neg) ** 2)))
    sup = sup_norm(f, grid)

    if f.half_bandwidth is not None and f.half_bandwidth <= K:
        return NormReport(partial, K, 0.0, sup, grid, True, "exact (banded)")

    floor = max(f.coeff_error, 1e-15 * max(sup, 1e-300))
    tail = 0.0
    notes = []
    for side, c in (("+", pos), ("-", neg)):
        t, note = _power_tail(ks, np.abs(c), floor)
        tail += t
        if note:
            notes.append(f"{side}: {note}")
    reliable = bool(math.isfinite(tail) and tail <= tail_tol)
    return NormReport(float(partial), K, float(tail), float(sup), grid, reliable,
                      "; ".join(notes))


def _power_tail(ks, mags, floor):
    K = int(ks[-1])
    window = ks >= max(1, K // 2)
    kw, aw = ks[window], mags[window]
    use = aw > 1e3 * floor
    if not np.any(aw > floor):
        return 0.0, ""
    if use.sum() < 4:
        return 0.0, "coefficients at roundoff floor"
    slope, intercept = np.polyfit(np.log(kw[use]), np.log(aw[use]), 1)
    alpha = -slope
    if alpha <= 1.0 + 1e-3:
        return math.inf, f"decay exponent {alpha:.3g} <= 1"
    c2 = math.exp(2 * intercept)
    # the fit may sit below the data; lift C to dominate every window point
    c2 = max(c2, float(np.max(aw[use] ** 2 * kw[use] ** (2 * alpha))))
    return c2 * K ** (2 - 2 * alpha) / (2 * alpha - 2), ""


def range_bounds(f: Symbol, grid: int = DEFAULT_SUP_GRID) -> RangeBounds:
    """m = dist(0, convex hull of sampled range), M = sampled sup |f|."""
    if grid < 16:
        raise InputError(f"range_bounds grid must be >= 16, got {grid}")
    _, vals = f.sample(grid)
    M = float(np.max(np.abs(vals)))
    if f.real_valued or np.all(vals.imag == 0):
        lo, hi = float(np.min(vals.real)), float(np.max(vals.real))
        m = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        return RangeBounds(m, M)
    hull = convex_hull(np.column_stack([vals.real, vals.imag]))
    return RangeBounds(min(origin_distance(hull), M), M)


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain; returns hull vertices counter-clockwise.

    Collinear points are dropped, so a degenerate input yields one or two
    vertices.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    pts = [tuple(p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def origin_distance(hull) -> float:
    """Euclidean distance from 0 to a convex polygon given CCW."""
    hull = np.atleast_2d(np.asarray(hull, dtype=float))
    if len(hull) == 1:
        return float(np.hypot(*hull[0]))
    a = hull
    b = np.roll(hull, -1, axis=0)
    if len(hull) >= 3:
        crosses = (b[:, 0] - a[:, 0]) * (-a[:, 1]) - (b[:, 1] - a[:, 1]) * (-a[:, 0])
        if np.all(crosses >= 0):
            return 0.0
    d = b - a
    t = np.clip(-np.einsum("ij,ij->i", a, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
    closest = a + t[:, None] * d
    return float(np.min(np.hypot(closest[:, 0], closest[:, 1])))


def _fmt(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0:
            x = x.real
        else:
            return repr(x).strip("()")
    return f"{x:g}"

"""Compactly supported C^3 test functions G with analytic derivatives.

Built-in registry specs:

``bump:center,halfwidth,amp``
    amp * psi((x - center)/halfwidth) with psi(u) = exp(-1/(1-u^2)) on (-1, 1).
``plateau:a,b,ramp``
    1 on [a, b], C-infinity smooth steps on [a-ramp, a] and [b, b+ramp].
``poly_bump:center,halfwidth,p0,p1,...``
    (p0 + p1 u + p2 u^2 + ...) * psi(u), u = (x - center)/halfwidth.

The Fourier transform convention is G^(t) = (1/2pi) int G(y) exp(-i t y) dy,
so that G(y) = int G^(t) exp(i t y) dt.
"""

from __future__ import annotations

import math
from math import comb

import numpy as np
from scipy.special import expit

from .errors import InputError, RegistryError, ToleranceError
from .quadrature import QuadResult, adaptive_gauss_legendre

#: Five registry entries used throughout the acceptance suite.
BUILTIN_TESTFUNCTIONS = (
    "bump:1,0.5,1",
    "bump:2,2.5,1",
    "plateau:0.5,1.5,0.25",
    "plateau:1,3,1",
    "poly_bump:16,20,1,0.5,-0.25",
)

# within this distance of a support endpoint every derivative is returned as 0
GUARD = 1e-8


class TestFunction:
    """G in C^3_c(R) together with G', G'', G'''.

    ``derivs(x, order)`` must be vectorised and vanish outside ``support``.
    """

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, name, support, derivs, breakpoints=None):
        self.name = name
        self.support = (float(support[0]), float(support[1]))
        self._derivs = derivs
        self.breakpoints = tuple(sorted(breakpoints or self.support))

    def __repr__(self):
        return f"TestFunction({self.name!r}, support={self.support})"

    def __call__(self, x):
        return self.eval_d(x, 0)

    def eval_d(self, x, order=0):
        if order not in (0, 1, 2, 3):
            raise InputError(f"derivative order must be 0..3, got {order}")
        x = np.asarray(x, dtype=float)
        a, b = self.support
        inside = (x > a) & (x < b)
        out = np.zeros(x.shape)
        if np.any(inside):
            out[inside] = self._derivs(x[inside], order)
        return out if out.ndim else float(out)

    def scaled(self, alpha):
        alpha = float(alpha)
        return TestFunction(f"{_g(alpha)}*{self.name}", self.support,
                            lambda x, r: alpha * self._derivs(x, r), self.breakpoints)

    def shifted(self, s):
        """x -> G(x - s)."""
        s = float(s)
        a, b = self.support
        return TestFunction(f"{self.name}>>{_g(s)}", (a + s, b + s),
                            lambda x, r: self._derivs(x - s, r),
                            [p + s for p in self.breakpoints])


# ---------------------------------------------------------------------------
# building blocks


def _psi_derivs(u, order):
    """Derivatives of psi(u) = exp(-1/(1-u^2)) on |u| < 1."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    ok = np.abs(u) < 1.0 - GUARD
    u = u[ok]
    s = 1.0 - u * u
    e = np.exp(-1.0 / s)
    if order == 0:
        val = e
    else:
        q1 = -2.0 * u / s**2
        if order == 1:
            val = q1 * e
        else:
            q2 = -(2.0 + 6.0 * u * u) / s**3
            if order == 2:
                val = (q2 + q1 * q1) * e
            else:
                q3 = -24.0 * u * (1.0 + u * u) / s**4
                val = (q3 + 3.0 * q1 * q2 + q1**3) * e
    out[ok] = val
    return out


def _step_derivs(u, order):
    """C-infinity step S(u) = 1/(1 + exp(1/u - 1/(1-u))), 0 below 0, 1 above 1."""
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    if order == 0:
        out[u >= 1.0 - GUARD] = 1.0
    ok = (u > GUARD) & (u < 1.0 - GUARD)
    v = u[ok]
    w = 1.0 - v
    h = 1.0 / v - 1.0 / w
    p = expit(-h)
    if order == 0:
        out[ok] = p
        return out
    pq = p * expit(h)  # p (1 - p) without cancellation
    L1 = -pq
    h1 = -1.0 / v**2 - 1.0 / w**2
    if order == 1:
        out[ok] = L1 * h1
        return out
    L2 = pq * (1.0 - 2.0 * p)
    h2 = 2.0 / v**3 - 2.0 / w**3
    if order == 2:
        out[ok] = L2 * h1**2 + L1 * h2
        return out
    L3 = -pq * (1.0 - 6.0 * p + 6.0 * p * p)
    h3 = -6.0 / v**4 - 6.0 / w**4
    out[ok] = L3 * h1**3 + 3.0 * L2 * h1 * h2 + L1 * h3
    return out


def bump(center, halfwidth, amp=1.0) -> TestFunction:
    c, hw, amp = float(center), float(halfwidth), float(amp)
    if hw <= 0:
        raise InputError("bump halfwidth must be positive")

    def derivs(x, r):
        return amp * _psi_derivs((x - c) / hw, r) / hw**r

    return TestFunction(f"bump:{_g(c)},{_g(hw)},{_g(amp)}", (c - hw, c + hw), derivs,
                        [c - hw, c, c + hw])


def plateau(a, b, ramp) -> TestFunction:
    a, b, ramp = float(a), float(b), float(ramp)
    if ramp <= 0 or b < a:
        raise InputError("plateau needs a <= b and ramp > 0")
    lo, hi = a - ramp, b + ramp

    def derivs(x, r):
        u1 = (x - lo) / ramp
        u2 = (hi - x) / ramp
        total = np.zeros(np.shape(x))
        for j in range(r + 1):
            up = _step_derivs(u1, j) / ramp**j
            down = _step_derivs(u2, r - j) * (-1.0 / ramp) ** (r - j)
            total += comb(r, j) * up * down
        return total

    return TestFunction(f"plateau:{_g(a)},{_g(b)},{_g(ramp)}", (lo, hi), derivs,
                        [lo, a, b, hi])


def poly_bump(center, halfwidth, coeffs) -> TestFunction:
    c, hw = float(center), float(halfwidth)
    if hw <= 0 or not len(coeffs):
        raise InputError("poly_bump needs halfwidth > 0 and at least one coefficient")
    poly = np.polynomial.Polynomial([float(p) for p in coeffs])
    dpolys = [poly.deriv(j) if j else poly for j in range(4)]

    def derivs(x, r):
        u = (x - c) / hw
        total = np.zeros(np.shape(x))
        for j in range(r + 1):
            total += comb(r, j) * dpolys[j](u) * _psi_derivs(u, r - j)
        return total / hw**r

    name = "poly_bump:" + ",".join(_g(v) for v in (c, hw, *coeffs))
    return TestFunction(name, (c - hw, c + hw), derivs, [c - hw, c, c + hw])


def builtin_testfunction(spec: str) -> TestFunction:
    head, _, arg = spec.strip().partition(":")
    try:
        args = [float(v) for v in arg.split(",")] if arg else []
    except ValueError:
        raise RegistryError(f"bad test-function spec {spec!r}") from None
    if head == "bump" and len(args) in (2, 3):
        return bump(*args)
    if head == "plateau" and len(args) == 3:
        return plateau(*args)
    if head == "poly_bump" and len(args) >= 3:
        return poly_bump(args[0], args[1], args[2:])
    raise RegistryError(f"unknown test-function spec {spec!r}")


# ---------------------------------------------------------------------------
# norms and constants


def derivative_norm_result(G: TestFunction, order: int, p: int, rtol=1e-8,
                           nodes=20) -> QuadResult:
    if order not in (1, 2, 3) or p not in (1, 2):
        raise InputError("derivative_norm needs order in 1..3 and p in {1, 2}")
    if p == 1:
        res = adaptive_gauss_legendre(lambda x: np.abs(G.eval_d(x, order)),
                                      G.breakpoints, rtol=rtol, nodes=nodes)
        return res
    res = adaptive_gauss_legendre(lambda x: G.eval_d(x, order) ** 2,
                                  G.breakpoints, rtol=rtol, nodes=nodes)
    root = math.sqrt(max(res.value, 0.0))
    err = res.error / (2 * root) if root > 0 else math.sqrt(res.error)
    return QuadResult(root, err, res.intervals)


def derivative_norm(G: TestFunction, order: int, p: int, rtol=1e-8, nodes=20) -> float:
    """||G^(order)||_p over the support."""
    return derivative_norm_result(G, order, p, rtol, nodes).value


def bound_constants(G: TestFunction, rtol=1e-8, nodes=20):
    """(c1, c2) = (2||G'||_1 + sqrt2 ||G''||_2, 2||G''||_1 + sqrt2 ||G'''||_2)."""
    n = lambda r, p: derivative_norm(G, r, p, rtol, nodes)  # noqa: E731
    c1 = 2.0 * n(1, 1) + math.sqrt(2.0) * n(2, 2)
    c2 = 2.0 * n(2, 1) + math.sqrt(2.0) * n(3, 2)
    return c1, c2


# ---------------------------------------------------------------------------
# Fourier transform moments

FT_TAIL_RTOL = 1e-6


def fourier_transform_samples(G: TestFunction, samples=512, pad=1024):
    """|G^(t)| on t_k = 2 pi k/(N h), k = 0..N/2, from a zero-padded FFT.

    ``samples`` points cover the support (spacing h); the sequence is padded
    to ``N = samples * pad`` points.  Only t >= 0 is returned: G is real, so
    |G^(-t)| = |G^(t)|.
    """
    a, b = G.support
    h = (b - a) / samples
    N = samples * pad
    y = a + h * np.arange(samples + 1)
    vals = np.zeros(N)
    vals[: samples + 1] = G(y)
    spec = np.abs(np.fft.rfft(vals)) * h / (2.0 * np.pi)
    t = 2.0 * np.pi * np.arange(spec.size) / (N * h)
    return t, spec


def _trapz(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def ft_moment(G: TestFunction, power: int, samples=512, pad=1024, max_samples=2**13) -> float:
    """||G^(t) t^power||_1 over the real line.

    The sampling density doubles until the upper half of the resolved
    frequency band contributes less than 1e-6 of the total.
    """
    if power not in (0, 1, 2):
        raise InputError("ft_moment power must be 0, 1 or 2")
    last = None
    while samples <= max_samples:
        t, mag = fourier_transform_samples(G, samples, pad)
        integrand = mag * t**power
        total = 2.0 * _trapz(integrand, t)
        if total == 0.0:
            return 0.0
        upper = t >= t[-1] / 2
        tail = 2.0 * _trapz(integrand[upper], t[upper])
        last = total
        if tail < FT_TAIL_RTOL * total:
            return total
        samples *= 2
    raise ToleranceError(f"ft_moment({G.name}, {power}): frequency tail did not decay",
                         estimate=last)


def ft_l2_norm(G: TestFunction, samples=512, pad=1024) -> float:
    """||G^||_2; equals ||G||_2 / sqrt(2 pi) under this transform convention."""
    t, mag = fourier_transform_samples(G, samples, pad)
    return math.sqrt(2.0 * _trapz(mag**2, t))


def _g(v):
    return f"{v:g}"

"""Numerical checks of the identities and inequalities behind the bound.

Every check returns an :class:`OracleResult`.  Identity checks compare a
residual against a tolerance; inequality checks pass when
``lhs <= rhs + tol`` with an additive tolerance, so cases whose right-hand
side is exactly zero (constant symbols) stay meaningful.

:func:`run_suite` evaluates the whole cross-product of built-in symbols and
sizes, optionally filtered by a substring of the check name.
"""

from __future__ import annotations

import math
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import InputError
from .matrices import (flip_matrix, hankel, hankel_product_stable, infinite_product_block,
                       toeplitz)
from .quadrature import gauss_legendre
from .spectral import hermitian_eig, schatten_norm, singular_values
from .symbols import (BUILTIN_SYMBOLS, Symbol, abs_sq_symbol, compose_symbol,
                      conj_symbol, exp_abs_sq_symbol, parse_symbol, product_symbol,
                      range_bounds, reflect_symbol, sup_norm, vertiii_sq)
from .testfunctions import BUILTIN_TESTFUNCTIONS, builtin_testfunction

BANDED_TOL = 1e-10
IDENTITY_TOL = 1e-8
INEQUALITY_TOL = 1e-6
LIPSCHITZ_GRID = 2**16


@dataclass
class OracleResult:
    name: str
    lhs: float
    rhs: float
    residual: float
    passed: bool
    tol: float = 0.0
    kind: str = "identity"
    context: dict = field(default_factory=dict)

    def line(self) -> str:
        params = ",".join(f"{k}={_short(v)}" for k, v in self.context.items())
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name} [{params}] lhs={self.lhs:.6e} rhs={self.rhs:.6e} "
                f"residual={self.residual:.3e} {status}")


def _short(v):
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def identity(name, lhs, rhs, residual, tol, **context) -> OracleResult:
    return OracleResult(name, float(lhs), float(rhs), float(residual),
                        bool(residual <= tol), tol, "identity", context)


def inequality(name, lhs, rhs, tol=INEQUALITY_TOL, **context) -> OracleResult:
    lhs, rhs = float(lhs), float(rhs)
    return OracleResult(name, lhs, rhs, lhs - rhs, bool(lhs <= rhs + tol), tol,
                        "inequality", context)


# Symbols hash by identity, so these caches share work across the suite's
# repeated use of one symbol object without ever conflating two symbols.
@lru_cache(maxsize=64)
def _norm_sq(f):
    return vertiii_sq(f).upper


@lru_cache(maxsize=64)
def _sup(f):
    return sup_norm(f)


@lru_cache(maxsize=64)
def _samples(f, grid):
    return f.sample(grid)[1]


@lru_cache(maxsize=64)
def _range(f, grid):
    return range_bounds(f, grid)


@lru_cache(maxsize=64)
def _abs_sq_fine(f):
    return abs_sq_symbol(f, grid=LIPSCHITZ_GRID)


def _banded(*symbols):
    return all(s.half_bandwidth is not None and s.coeff_kind == "analytic" for s in symbols)


# ---------------------------------------------------------------------------
# Toeplitz products and Hankel corrections


def product_identity_residual(f: Symbol, g: Symbol, n: int) -> OracleResult:
    """T_n(fg) - T_n(f)T_n(g) = P_n H(f)H(~g) P_n + Q_n H(~f)H(g) Q_n."""
    fg = product_symbol(f, g)
    lhs = toeplitz(fg, n) - toeplitz(f, n) @ toeplitz(g, n)
    Q = flip_matrix(n)
    first = hankel_product_stable(f, reflect_symbol(g), n).matrix
    second = hankel_product_stable(reflect_symbol(f), g, n).matrix
    rhs = first + Q @ second @ Q
    tol = BANDED_TOL if _banded(f, g) else IDENTITY_TOL
    return identity("product_identity", np.linalg.norm(lhs), np.linalg.norm(rhs),
                    np.linalg.norm(lhs - rhs), tol, f=f.name, g=g.name, n=n)


def product_identity_infinite(f: Symbol, g: Symbol, N: int) -> OracleResult:
    """P_N [T(fg) - T(f)T(g)] P_N = P_N H(f)H(~g) P_N."""
    fg = product_symbol(f, g)
    lhs = toeplitz(fg, N) - infinite_product_block(f, g, N).matrix
    rhs = hankel_product_stable(f, reflect_symbol(g), N).matrix
    tol = BANDED_TOL if _banded(f, g) else IDENTITY_TOL
    return identity("product_identity_infinite", np.linalg.norm(lhs), np.linalg.norm(rhs),
                    np.linalg.norm(lhs - rhs), tol, f=f.name, g=g.name, N=N)


def hankel_hs_check(g: Symbol, n: int) -> OracleResult:
    """||H(g)||_2^2, ||H(conj g)||_2^2, ||H(~g)||_2^2 <= |||g|||^2 on n x n sections."""
    bound = _norm_sq(g)
    values = {}
    for label, s in (("H(g)", g), ("H(conj g)", conj_symbol(g)), ("H(~g)", reflect_symbol(g))):
        values[label] = float(np.sum(np.abs(hankel(s, n)) ** 2))
    worst = max(values.values())
    return inequality("hankel_hs", worst, bound, g=g.name, n=n,
                      **{k: f"{v:.6g}" for k, v in values.items()})


def hermitian_transpose_check(f: Symbol, n: int) -> OracleResult:
    """T_n(f)^H = T_n(conj f)."""
    A = toeplitz(f, n)
    B = toeplitz(conj_symbol(f), n)
    res = float(np.max(np.abs(A.conj().T - B)))
    tol = 0.0 if f.coeff_kind == "analytic" else 1e-12
    return identity("hermitian_transpose", np.linalg.norm(A), np.linalg.norm(B), res, tol,
                    f=f.name, n=n)


# ---------------------------------------------------------------------------
# operator exponentials


def _exp_factory(A):
    eig = hermitian_eig(A)
    V, lam = eig.vectors, eig.values
    return lambda s: (V * np.exp(1j * s * lam)) @ V.conj().T, float(np.max(np.abs(lam)))


def _nodes_on(t, nodes):
    x, w = gauss_legendre(nodes)
    return 0.5 * t * (x + 1.0), 0.5 * t * w


def exp_difference_residual(A, B, t: float, nodes: int = 64) -> OracleResult:
    """exp(itA) - exp(itB) = i int_0^t exp(isA)(A - B)exp(i(t-s)B) ds."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise InputError("exp_difference_residual needs equally sized matrices")
    eA, _ = _exp_factory(A)
    eB, _ = _exp_factory(B)
    lhs = eA(t) - eB(t)
    rhs = np.zeros_like(lhs)
    D = A - B
    for s, w in zip(*_nodes_on(t, nodes)):
        rhs += w * (eA(s) @ D @ eB(t - s))
    rhs *= 1j
    return identity("exp_difference", np.linalg.norm(lhs), np.linalg.norm(rhs),
                    np.linalg.norm(lhs - rhs), IDENTITY_TOL, size=A.shape[0], t=t,
                    nodes=nodes)


def toeplitz_exp_residual(g: Symbol, n: int, t: float, nodes: int = 64) -> OracleResult:
    """T_n(e^{itg}) - e^{itT_n(g)} = i int_0^t [T_n(e^{isg}g) - T_n(e^{isg})T_n(g)]
    e^{i(t-s)T_n(g)} ds, for real g."""
    if not g.real_valued:
        raise InputError("toeplitz_exp_residual needs a real-valued symbol")
    Tg = toeplitz(g, n)
    eT, _ = _exp_factory(Tg)
    phase = lambda s: Symbol.from_function(  # noqa: E731
        "exp", lambda th: np.exp(1j * s * g(th).real))
    lhs = toeplitz(phase(t), n) - eT(t)
    rhs = np.zeros_like(lhs)
    for s, w in zip(*_nodes_on(t, nodes)):
        es = phase(s)
        esg = Symbol.from_function("exp*g", lambda th, s=s: np.exp(1j * s * g(th).real) * g(th))
        rhs += w * ((toeplitz(esg, n) - toeplitz(es, n) @ Tg) @ eT(t - s))
    rhs *= 1j
    return identity("toeplitz_exp", np.linalg.norm(lhs), np.linalg.norm(rhs),
                    np.linalg.norm(lhs - rhs), IDENTITY_TOL, g=g.name, n=n, t=t,
                    nodes=nodes)


def trace_piece_bounds(f: Symbol, n: int, t: float):
    """The two trace estimates behind the gap bound:

    |Tr(e^{itT_n(conj f)T_n(f)} - e^{itT_n(|f|^2)})|  <= 2|t| |||f|||^2
    |Tr(e^{itT_n(|f|^2)} - T_n(e^{it|f|^2}))|         <= 4t^2 ||f||_inf^2 |||f|||^2
    """
    v = _norm_sq(f)
    M = _sup(f)
    Tf = toeplitz(f, n)
    gram = Tf.conj().T @ Tf
    Tabs = toeplitz(abs_sq_symbol(f), n)
    e_gram, _ = _exp_factory(gram)
    e_abs, _ = _exp_factory(Tabs)
    first = abs(np.trace(e_gram(t) - e_abs(t)))
    second = abs(np.trace(e_abs(t) - toeplitz(exp_abs_sq_symbol(f, t), n)))
    ctx = dict(f=f.name, n=n, t=t)
    return (inequality("trace_piece_first", first, 2 * abs(t) * v, **ctx),
            inequality("trace_piece_second", second, 4 * t * t * M * M * v, **ctx))


# ---------------------------------------------------------------------------
# norms of composed symbols


def lipschitz_composition_check(f: Symbol, s: float):
    """|||e^{is|f|^2}||| <= 2M|s| |||f|||  and  ||| |f|^2 ||| <= 2M |||f|||."""
    vf = math.sqrt(_norm_sq(f))
    M = _sup(f)
    e = exp_abs_sq_symbol(f, s, grid=LIPSCHITZ_GRID)
    ve = math.sqrt(vertiii_sq(e).upper)
    va = math.sqrt(_norm_sq(_abs_sq_fine(f)))
    ctx = dict(f=f.name, s=s, M=M)
    return (inequality("lipschitz_exp", ve, 2 * M * abs(s) * vf, **ctx),
            inequality("lipschitz_abs_sq", va, 2 * M * vf, **ctx))


def lipschitz_testfunction_check(f: Symbol, G) -> OracleResult:
    """|||G(|f|^2)||| <= L ||| |f|^2 ||| with L = sup |G'| over the range of |f|^2."""
    a = _abs_sq_fine(f)
    vals = _samples(a, LIPSCHITZ_GRID)
    lo, hi = float(np.min(vals.real)), float(np.max(vals.real))
    x = np.linspace(lo, hi, 20001)
    L = float(np.max(np.abs(G.eval_d(x, 1)))) if hi > lo else 0.0
    comp = compose_symbol(f, G, grid=LIPSCHITZ_GRID)
    lhs = math.sqrt(vertiii_sq(comp).upper)
    rhs = L * math.sqrt(_norm_sq(a))
    return inequality("lipschitz_testfn", lhs, rhs, f=f.name, G=G.name, L=L)


def schatten_symbol_check(f: Symbol, n: int, p) -> OracleResult:
    """||T_n(f)||_p <= (n/2pi)^{1/p} ||f||_p."""
    lhs = schatten_norm(toeplitz(f, n), p)
    if math.isinf(p):
        rhs = _sup(f)
    else:
        vals = _samples(f, 2**16)
        fp = (2 * np.pi * np.mean(np.abs(vals) ** p)) ** (1.0 / p)
        rhs = (n / (2 * np.pi)) ** (1.0 / p) * fp
    r = inequality("schatten_symbol", lhs, rhs, f=f.name, n=n, p=p)
    r.context["equality"] = abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)
    return r


def sv_range_check(f: Symbol, n: int, grid: int = 2**16) -> OracleResult:
    """Every singular value of T_n(f) lies in [m, M]."""
    rb = _range(f, grid)
    vals = _samples(f, grid)
    # sampling can miss extremes by at most half a grid step of variation
    slack = 1e-8 + 0.5 * float(np.max(np.abs(np.diff(np.append(vals, vals[0])))))
    s = singular_values(toeplitz(f, n))
    below = max(0.0, rb.m - float(s.min()))
    above = max(0.0, float(s.max()) - rb.M)
    worst = max(below, above)
    return OracleResult("sv_range", float(s.min()), float(s.max()), worst,
                        worst <= slack, slack, "inequality",
                        dict(f=f.name, n=n, m=rb.m, M=rb.M))


def holder_check(seed: int, size: int, r, p, q) -> OracleResult:
    """||AB||_r <= ||A||_p ||B||_q on a seeded random complex pair."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    B = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return inequality("holder", schatten_norm(A @ B, r),
                      schatten_norm(A, p) * schatten_norm(B, q), tol=1e-9,
                      seed=seed, r=r, p=p, q=q)


def trace_holder_check(seed: int, size: int) -> OracleResult:
    """|Tr(AB)| <= ||A||_2 ||B||_2."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    B = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return inequality("trace_holder", abs(np.trace(A @ B)),
                      schatten_norm(A, 2) * schatten_norm(B, 2), tol=1e-9, seed=seed)


def exp_quadrature_stability(A, B, t: float, nodes: int) -> OracleResult:
    """Doubling the quadrature nodes moves the residual by < 10x tolerance."""
    r1 = exp_difference_residual(A, B, t, nodes).residual
    r2 = exp_difference_residual(A, B, t, 2 * nodes).residual
    r = identity("exp_quadrature_stability", r1, r2, abs(r1 - r2), 10 * IDENTITY_TOL,
                 size=A.shape[0], t=t, nodes=nodes)
    r.kind = "stability"
    return r


# ---------------------------------------------------------------------------
# suite

SUITE_SIZES = (1, 2, 3, 5, 8, 16, 32)
SUITE_TIMES = (0.5, 1.0, 2.0)


def _nodes_for(t, *mats):
    """Gauss-Legendre nodes enough for the phase swept by exp(isA) on [0, t]."""
    spread = sum(float(np.max(np.abs(np.linalg.eigvalsh(m)))) for m in mats)
    return max(64, int(math.ceil(1.5 * abs(t) * spread)) + 32)


def _exp_case(f, n, t, stability):
    # the pair exponentiated when deriving the bound: T_n(|f|^2) and T_n(conj f) T_n(f)
    A = toeplitz(abs_sq_symbol(f), n)
    Tf = toeplitz(f, n)
    B = Tf.conj().T @ Tf
    nodes = _nodes_for(t, A, B)
    if stability:
        return exp_quadrature_stability(A, B, t, nodes)
    return exp_difference_residual(A, B, t, nodes)


def _toeplitz_exp_case(g, n, t):
    return toeplitz_exp_residual(g, n, t, _nodes_for(t, toeplitz(g, n)))


def _cases(symbols, testfns):
    """Yield ``(name, thunk)``; each thunk returns a list of results."""
    syms = {s: parse_symbol(s) for s in symbols}
    real = [s for s in symbols if syms[s].real_valued]
    Gs = [builtin_testfunction(g) for g in testfns]

    def one(fn, *args):
        return lambda: [fn(*args)]

    def many(fn, *args):
        return lambda: list(fn(*args))

    for a in symbols:
        for b in symbols:
            for n in SUITE_SIZES:
                yield "product_identity", one(product_identity_residual, syms[a], syms[b], n)
                yield "product_identity_infinite", one(product_identity_infinite,
                                                       syms[a], syms[b], n)
    for a in symbols:
        fbar = conj_symbol(syms[a])
        for n in SUITE_SIZES:
            yield "product_identity", one(product_identity_residual, fbar, syms[a], n)
            yield "product_identity_infinite", one(product_identity_infinite,
                                                   fbar, syms[a], n)
    for a in symbols:
        f = syms[a]
        for n in SUITE_SIZES:
            yield "hankel_hs", one(hankel_hs_check, f, n)
            yield "hermitian_transpose", one(hermitian_transpose_check, f, n)
            yield "sv_range", one(sv_range_check, f, n)
            for p in (1, 2, math.inf):
                yield "schatten_symbol", one(schatten_symbol_check, f, n, p)
        for n in (4, 8, 16):
            for t in SUITE_TIMES:
                yield "trace_piece", many(trace_piece_bounds, f, n, t)
        for s in (0.0, 0.5, 1.0):
            yield "lipschitz_composition", many(lipschitz_composition_check, f, s)
        for G in Gs:
            yield "lipschitz_testfn", one(lipschitz_testfunction_check, f, G)
    for a in symbols:
        for n in (1, 4, 8, 16, 32):
            for t in (0.5, 1.0, 4.0):
                yield "exp_difference", one(_exp_case, syms[a], n, t, False)
                yield "exp_quadrature_stability", one(_exp_case, syms[a], n, t, True)
    for a in real:
        for n in (1, 4, 8, 16):
            for t in (0.5, 1.0, 2.0):
                yield "toeplitz_exp", one(_toeplitz_exp_case, syms[a], n, t)
    for seed in range(5):
        for r, p, q in ((1, 2, 2), (1, 1, math.inf), (2, 2, math.inf)):
            yield "holder", one(holder_check, seed, 5, r, p, q)
        yield "trace_holder", one(trace_holder_check, seed, 5)


def run_suite(pattern: str = "", symbols=BUILTIN_SYMBOLS, testfns=BUILTIN_TESTFUNCTIONS,
              jobs: int = 1) -> List[OracleResult]:
    """Run every check whose name contains ``pattern``; results in suite order."""
    thunks: List[Callable] = [th for name, th in _cases(symbols, testfns)
                              if pattern in name]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda th: th(), thunks))
    else:
        chunks = [th() for th in thunks]
    return [r for chunk in chunks for r in chunk]


def format_report(results) -> str:
    lines = [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} passed")
    return "\n".join(lines)

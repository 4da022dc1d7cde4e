"""Both sides of the ergodic formula for T_n(f), their gap, the explicit
n-independent bound on that gap, and the limiting trace it converges to.

For a test function G the unnormalised gap is

    sum_j G(sigma_j(T_n(f))^2)  -  n/(2pi) int G(|f|^2),

and for every n >= 1 its modulus is at most

    2 |||f|||^2 (c1 + 2 c2 ||f||_inf^2),

with c1, c2 from :func:`~toeplitz_ergodic.testfunctions.bound_constants`.
As n grows the signed gap tends to

    Tr[G(T(conj f) T(f)) + G(T(f) T(conj f)) - 2 T(G(|f|^2))].
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import InputError, ToleranceError, TruncationError
from .matrices import infinite_product_block, toeplitz
from .spectral import hermitian_eig, singular_values
from .symbols import (DEFAULT_SUP_GRID, DEFAULT_VERTIII_K, Symbol, conj_symbol,
                      sup_norm, vertiii_sq)
from .testfunctions import TestFunction, bound_constants

log = logging.getLogger(__name__)

RHS_GRID = 2**14
RHS_MAX_GRID = 2**22


@dataclass(frozen=True)
class BoundReport:
    vertiii_sq: float
    sup_norm: float
    c1: float
    c2: float
    annotations: tuple = ()
    reliable: bool = True
    bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "bound",
            2.0 * self.vertiii_sq * (self.c1 + 2.0 * self.c2 * self.sup_norm**2))


@dataclass(frozen=True)
class SweepRecord:
    n: int
    lhs: float
    rhs: float          # n times the symbol-side average
    gap: float          # |lhs - rhs|
    bound: float
    widom_estimate: Optional[float] = None

    @property
    def signed_gap(self) -> float:
        return self.lhs - self.rhs


class WidomResult(NamedTuple):
    value: float
    N: int
    history: list


def lhs_sum(f: Symbol, G: TestFunction, n: int) -> float:
    """sum_j G(sigma_j(T_n(f))^2)."""
    if n < 1:
        raise InputError("n must be >= 1")
    s = singular_values(toeplitz(f, n))
    return float(np.sum(G(s * s)))


def rhs_value(f: Symbol, G: TestFunction, grid: int = RHS_GRID, rtol: float = 1e-9,
              max_grid: int = RHS_MAX_GRID) -> float:
    """(1/2pi) int G(|f(theta)|^2) dtheta by the periodic trapezoid rule.

    The grid doubles until successive values differ by at most ``rtol``
    relative (absolute below 1e-15).
    """
    prev = None
    while grid <= max_grid:
        _, vals = f.sample(grid)
        cur = float(np.mean(G(np.abs(vals) ** 2)))
        if prev is not None and abs(cur - prev) <= max(rtol * abs(cur), 1e-15):
            return cur
        prev = cur
        grid *= 2
    raise ToleranceError(f"rhs_value({f.name}, {G.name}) not converged at grid {max_grid}",
                         estimate=prev)


def theorem1_bound(f: Symbol, G: TestFunction, K: int = DEFAULT_VERTIII_K,
                   tail_tol: float = 1e-6, grid: int = DEFAULT_SUP_GRID,
                   rtol: float = 1e-8, nodes: int = 20) -> BoundReport:
    """The explicit n-independent bound on the unnormalised gap.

    |||f|||^2 enters as partial sum plus tail bound; the sampled sup is a
    lower estimate of the essential sup.  Both approximations are recorded
    in ``annotations``; an unreliable tail raises a warning, not an error.
    """
    norm = vertiii_sq(f, K, tail_tol, grid)
    notes = [f"|||f|||^2 partial sum over |k|<={norm.truncation_K}: {norm.vertiii_sq!r}",
             f"tail bound: {norm.tail_bound!r}",
             f"sup |f| sampled on {grid} points"]
    if norm.note:
        notes.append(norm.note)
    if norm.vertiii_sq == 0.0 and norm.tail_bound == 0.0:
        c1 = c2 = 0.0  # the bound vanishes whatever G is
    else:
        c1, c2 = bound_constants(G, rtol, nodes)
        notes.append(f"c1, c2 by adaptive Gauss-Legendre, rtol {rtol:g}, {nodes} nodes")
    if not norm.reliable:
        msg = f"{f.name}: |||f|||^2 tail {norm.tail_bound:g} exceeds {tail_tol:g}"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append("WARNING " + msg)
    return BoundReport(norm.upper, norm.sup_norm, c1, c2, tuple(notes), norm.reliable)


def ergodic_gap(f: Symbol, G: TestFunction, n: int, rhs: float = None,
                bound: BoundReport = None) -> SweepRecord:
    """Record for one n; pass ``rhs``/``bound`` to reuse them across a sweep."""
    if rhs is None:
        rhs = rhs_value(f, G)
    if bound is None:
        bound = theorem1_bound(f, G)
    lhs = lhs_sum(f, G, n)
    right = n * rhs
    return SweepRecord(n, lhs, right, abs(lhs - right), bound.bound)


def ergodic_gap_sigma(f: Symbol, G: TestFunction, n: int, rhs: float = None) -> float:
    """|(1/n) sum F(sigma_j) - (1/2pi) int F(|f|)| with F(x) = G(x^2)."""
    if n < 1:
        raise InputError("n must be >= 1")
    if rhs is None:
        rhs = rhs_value(f, G)
    F = lambda x: G(np.asarray(x) ** 2)  # noqa: E731
    s = singular_values(toeplitz(f, n))
    return abs(float(np.sum(F(s))) / n - rhs)


def _widom_window(f, fbar, G, N, g0, top):
    """Trace of the N x N principal block of the limit operator.

    G is applied to 2N x 2N sections of T(conj f)T(f) and T(f)T(conj f);
    only the first N diagonal entries are kept, away from the artificial
    edge of the section.
    """
    K = 2 * N
    total = 0.0
    # for real f both operator products coincide
    pairs = ((fbar, f),) if f.real_valued else ((fbar, f), (f, fbar))
    for a, b in pairs:
        block = infinite_product_block(a, b, K).matrix
        eig = hermitian_eig(block, herm_tol=1e-8)
        total += float(np.sum(eig.diagonal(lambda lam: G(np.clip(lam, 0.0, top)), rows=N)))
    if f.real_valued:
        total *= 2.0
    return total - 2.0 * N * g0


def widom_trace(f: Symbol, G: TestFunction, N: int = 16, tol: float = 1e-6,
                N_max: int = 1024, rhs: float = None) -> WidomResult:
    """Limit of the signed gap as n -> infinity.

    N doubles until successive window traces differ by less than ``tol``.
    """
    if N < 8:
        raise InputError("widom_trace needs N >= 8")
    g0 = rhs_value(f, G) if rhs is None else rhs
    # sigma^2 lies in [m^2, M^2]; 10% margin absorbs section round-off
    top = 1.1 * sup_norm(f) ** 2
    fbar = conj_symbol(f)
    history = [_widom_window(f, fbar, G, N, g0, top)]
    while True:
        if 2 * N > N_max:
            raise TruncationError(
                f"widom_trace({f.name}, {G.name}) did not stabilise by N={N}",
                residual=abs(history[-1] - history[-2]) if len(history) > 1 else None,
                history=history)
        N *= 2
        history.append(_widom_window(f, fbar, G, N, g0, top))
        if abs(history[-1] - history[-2]) < tol:
            return WidomResult(history[-1], N, history)


def default_jobs() -> int:
    env = os.environ.get("ERGODIC_JOBS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity")
               else (os.cpu_count() or 1))


def sweep(f: Symbol, G: TestFunction, ns, widom: bool = False, widom_tol: float = 1e-6,
          jobs: int = 1):
    """SweepRecords for every n (ascending) plus a summary dict."""
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise InputError("n list must be nonempty with every n >= 1")
    rhs = rhs_value(f, G)
    bound = theorem1_bound(f, G)
    widom_value = None
    if widom:
        widom_value = widom_trace(f, G, tol=widom_tol, rhs=rhs).value

    def one(n):
        rec = ergodic_gap(f, G, n, rhs=rhs, bound=bound)
        if widom_value is not None:
            rec = SweepRecord(rec.n, rec.lhs, rec.rhs, rec.gap, rec.bound, widom_value)
        return rec

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(one, ns))
    else:
        records = [one(n) for n in ns]
    violations = [r.n for r in records if r.gap > r.bound + 1e-6]
    summary = {
        "symbol": f.name,
        "testfn": G.name,
        "max_gap": max(r.gap for r in records),
        "bound": bound.bound,
        "rate_constant": max(r.gap for r in records),
        "widom_estimate": widom_value,
        "violations": violations,
        "bound_reliable": bound.reliable,
        "annotations": list(bound.annotations),
    }
    log.info("sweep %s / %s: max gap %.3g, bound %.3g", f.name, G.name,
             summary["max_gap"], bound.bound)
    return records, summary


__all__ = [
    "BoundReport", "SweepRecord", "WidomResult", "lhs_sum", "rhs_value",
    "theorem1_bound", "ergodic_gap", "ergodic_gap_sigma", "widom_trace", "sweep",
    "default_jobs",
]


"""Finite Toeplitz and Hankel matrices built from symbol coefficients.

Index conventions follow the usual 1-based matrix notation:

    T_n(f)[i, j] = f_{i-j},      H(g)[i, j] = g_{i+j-1},      1 <= i, j <= n.

Internally arrays are 0-based, so ``H[i, j] = g_{i+j+1}``.  The infinite
operators T(f) and H(g) only ever appear through principal blocks; those of
products T(f)T(g) are computed from a larger finite section and are exact
for banded symbols.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionError, TruncationError
from .symbols import Symbol


def _check_size(n, what="n"):
    if int(n) != n or n < 1:
        raise DimensionError(f"{what} must be a positive integer, got {n!r}")
    return int(n)


def toeplitz(f: Symbol, n: int, cols: int = None) -> np.ndarray:
    """T_n(f), or its first ``n`` rows and ``cols`` columns."""
    n = _check_size(n)
    cols = n if cols is None else _check_size(cols, "cols")
    col = f.coeffs(np.arange(n))
    row = f.coeffs(-np.arange(cols))
    return scipy.linalg.toeplitz(col, row)


def hankel(g: Symbol, n: int, cols: int = None) -> np.ndarray:
    """``n x cols`` truncation of H(g) = [g_{i+j-1}] (square by default)."""
    n = _check_size(n)
    cols = n if cols is None else _check_size(cols, "cols")
    c = g.coeffs(np.arange(1, n + 1))
    r = g.coeffs(np.arange(n, n + cols))
    return scipy.linalg.hankel(c, r)


def projection(n: int, size: int) -> np.ndarray:
    """P_n as a ``size x size`` matrix (identity on the first n coordinates)."""
    n = _check_size(n)
    p = np.zeros((size, size))
    p[:n, :n] = np.eye(n)
    return p


def flip_matrix(n: int) -> np.ndarray:
    """Q_n restricted to its n x n support: the anti-identity."""
    n = _check_size(n)
    return np.fliplr(np.eye(n))


class ProductBlock(NamedTuple):
    matrix: np.ndarray
    inner_size: int
    residual: float


def hankel_product(f: Symbol, g: Symbol, n: int, inner: int = None) -> np.ndarray:
    """Principal n x n block of H(f) H(g), summing the first ``inner`` terms.

    With banded f (or g) the sum is exact once ``inner >= n + bandwidth``.
    """
    n = _check_size(n)
    if inner is None:
        inner = _exact_inner(f, g, n)
        if inner is None:
            raise DimensionError("hankel_product needs an explicit inner size "
                                 "for non-banded symbols")
    return hankel(f, n, inner) @ hankel(g, inner, n)


def hankel_product_stable(f: Symbol, g: Symbol, n: int, tol: float = 1e-11,
                          inner_max: int = 2**14) -> ProductBlock:
    """H(f) H(g) principal block; exact when banded, else inner size doubles
    until the block changes by less than ``tol`` (max-abs)."""
    n = _check_size(n)
    exact = _exact_inner(f, g, n)
    if exact is not None:
        return ProductBlock(hankel_product(f, g, n, exact), exact, 0.0)
    limit = inner_max
    for m in (f.max_index, g.max_index):
        if m is not None:
            limit = min(limit, m - n + 1)
    inner = max(2 * n, 64)
    prev = hankel_product(f, g, n, inner)
    history = []
    while True:
        nxt = 2 * inner
        if nxt > limit:
            raise TruncationError(
                f"H({f.name})H({g.name}) block did not stabilise by inner size {inner}",
                residual=history[-1] if history else None, history=history)
        cur = hankel_product(f, g, n, nxt)
        res = float(np.max(np.abs(cur - prev)))
        history.append(res)
        if res <= tol:
            return ProductBlock(cur, nxt, res)
        prev, inner = cur, nxt


def _exact_inner(f, g, n):
    bands = [b for b in (f.half_bandwidth, g.half_bandwidth) if b is not None]
    return n + min(bands) if bands else None


def infinite_product_block(f: Symbol, g: Symbol, N: int, K: int = None,
                           tol: float = 1e-11, K_max: int = 2**15) -> ProductBlock:
    """N x N principal block of T(f) T(g).

    Computed as the top-left block of T_K(f) T_K(g).  Banded inputs use the
    exact inner size N + bandwidth; otherwise K doubles until the block
    changes by less than ``tol`` (max-abs, relative to the block's scale).
    """
    N = _check_size(N)
    exact = _exact_inner(f, g, N)
    if exact is not None:
        K = max(exact, K or 0)
        return ProductBlock(toeplitz(f, N, K) @ toeplitz(g, K, N), K, 0.0)
    K = max(N, K or 2 * N)
    limit = K_max
    for m in (f.max_index, g.max_index):
        if m is not None:
            limit = min(limit, m + 1)
    prev = toeplitz(f, N, K) @ toeplitz(g, K, N)
    history = []
    while True:
        K2 = 2 * K
        if K2 > limit:
            raise TruncationError(
                f"T({f.name})T({g.name}) block did not stabilise by K={K}",
                residual=history[-1] if history else None, history=history)
        cur = toeplitz(f, N, K2) @ toeplitz(g, K2, N)
        res = float(np.max(np.abs(cur - prev)))
        history.append(res)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if res <= tol * scale:
            return ProductBlock(cur, K2, res)
        prev, K = cur, K2


# ---------------------------------------------------------------------------
# text dump format: header "rows cols", then one line per row of "re,im" pairs


def dump_matrix(A, path=None) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for row in A:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_matrix(source) -> np.ndarray:
    """Parse the dump format from a path or a string containing newlines."""
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows, cols = (int(x) for x in lines[0].split())
    A = np.empty((rows, cols), dtype=complex)
    if len(lines) - 1 != rows:
        raise DimensionError(f"dump declares {rows} rows, found {len(lines) - 1}")
    for i, ln in enumerate(lines[1:]):
        pairs = ln.split()
        if len(pairs) != cols:
            raise DimensionError(f"row {i + 1}: expected {cols} entries")
        for j, p in enumerate(pairs):
            re, im = p.split(",")
            A[i, j] = complex(float(re), float(im))
    return A

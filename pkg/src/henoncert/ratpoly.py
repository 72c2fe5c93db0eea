"""Exact rational polynomial arithmetic (dense, monomial basis).

Rigorous integrals in this package are computed without any rounding at all:
Galerkin coefficients are binary64 floats, hence exact binary rationals, and
the basis polynomials have exact rational coefficients, so residuals, norms
and weighted mass matrices are exact rationals that get outward-rounded once
at the very end.  This sidesteps the catastrophic conditioning of monomial
coefficients (they reach ~1e24 at degree 40) that would make any float path
through the monomial basis meaningless.

Polynomials are dense numpy object arrays of gmpy2.mpq (1D: power index,
2D: [x power, y power]).  gmpy2 is ~5x faster than fractions.Fraction here;
profile before swapping anything out.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .interval import Interval, next_after_down, next_after_up

__all__ = [
    "RAT",
    "rat",
    "rat_to_interval",
    "rat_array",
    "float_array",
    "interval_matrix",
    "conv1d",
    "conv2d",
    "poly_eval_1d",
    "poly_eval_2d",
    "deriv_1d",
    "deriv_2d",
    "integrate_box_1d",
    "integrate_box_2d",
    "inner_product_1d",
    "inner_product_2d",
    "rat_matmul",
]

RAT = mpq
_ZERO = mpq(0)


def rat(x) -> mpq:
    """Exact rational from int, float, Fraction or mpq."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def rat_to_interval(q) -> Interval:
    """Tightest interval with float endpoints containing an exact rational."""
    f = float(q)
    if math.isinf(f):
        raise OverflowError("rational outside float range")
    lo = f
    while mpq(lo) > q:
        lo = next_after_down(lo)
    hi = f
    while mpq(hi) < q:
        hi = next_after_up(hi)
    return Interval(lo, hi)


def rat_array(values, shape=None) -> np.ndarray:
    """Object array of mpq from any nested structure of scalars."""
    src = np.asarray(values, dtype=object)
    out = np.empty(src.shape, dtype=object)
    flat_in = src.ravel()
    flat_out = out.ravel()
    for k in range(flat_in.size):
        flat_out[k] = rat(flat_in[k])
    return out.reshape(shape) if shape is not None else out


def float_array(a: np.ndarray) -> np.ndarray:
    return np.asarray([float(v) for v in a.ravel()], dtype=np.float64).reshape(a.shape)


def interval_matrix(a: np.ndarray):
    """Elementwise tight interval enclosure of a rational object array."""
    from .ivarray import IvArray

    lo = np.empty(a.shape, dtype=np.float64)
    hi = np.empty(a.shape, dtype=np.float64)
    flat = a.ravel()
    flo = lo.ravel()
    fhi = hi.ravel()
    for k in range(flat.size):
        iv = rat_to_interval(flat[k])
        flo[k] = iv.lo
        fhi[k] = iv.hi
    return IvArray(lo, hi, _checked=True)


def _zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(_ZERO)
    return out


def conv1d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def conv2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    na, ma = a.shape
    nb, mb = b.shape
    out = _zeros((na + nb - 1, ma + mb - 1))
    for i in range(na):
        row = a[i]
        for j in range(ma):
            c = row[j]
            if c:
                out[i : i + nb, j : j + mb] += c * b
    return out


def poly_eval_1d(a: np.ndarray, x) -> mpq:
    acc = _ZERO
    xq = rat(x)
    for c in a[::-1]:
        acc = acc * xq + c
    return acc


def poly_eval_2d(a: np.ndarray, x, y) -> mpq:
    xq = rat(x)
    yq = rat(y)
    acc = _ZERO
    for row in a[::-1]:
        racc = _ZERO
        for c in row[::-1]:
            racc = racc * yq + c
        acc = acc * xq + racc
    return acc


def deriv_1d(a: np.ndarray) -> np.ndarray:
    if a.size <= 1:
        return _zeros(1)
    return np.array([k * a[k] for k in range(1, a.size)], dtype=object)


def deriv_2d(a: np.ndarray, axis: int) -> np.ndarray:
    if a.shape[axis] <= 1:
        return _zeros((a.shape[0] if axis == 1 else 1,
                       a.shape[1] if axis == 0 else 1))
    if axis == 0:
        return np.array([[k * c for c in a[k]] for k in range(1, a.shape[0])],
                        dtype=object)
    out = _zeros((a.shape[0], a.shape[1] - 1))
    for i in range(a.shape[0]):
        for k in range(1, a.shape[1]):
            out[i, k - 1] = k * a[i, k]
    return out


def integrate_box_1d(a: np.ndarray) -> mpq:
    """Exact integral over (0,1): x^k integrates to 1/(k+1)."""
    return sum((a[k] / (k + 1) for k in range(a.size)), _ZERO)


def integrate_box_2d(a: np.ndarray) -> mpq:
    total = _ZERO
    for i in range(a.shape[0]):
        row = a[i]
        s = sum((row[j] / (j + 1) for j in range(a.shape[1])), _ZERO)
        total += s / (i + 1)
    return total


def _hilbert(n: int, m: int) -> np.ndarray:
    out = np.empty((n, m), dtype=object)
    for i in range(n):
        for k in range(m):
            out[i, k] = mpq(1, i + k + 1)
    return out


def rat_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact matrix product of object arrays, accumulated by outer products."""
    m, k = a.shape
    k2, n = b.shape
    if k != k2:
        raise ValueError("shape mismatch")
    out = _zeros((m, n))
    for t in range(k):
        col = a[:, t]
        row = b[t]
        out += col[:, None] * row[None, :]
    return out


def inner_product_1d(a: np.ndarray, b: np.ndarray) -> mpq:
    """Exact int_0^1 a(x) b(x) dx without expanding the product."""
    H = _hilbert(a.size, b.size)
    return sum((a[i] * s for i, s in enumerate(np.dot(H, b))), _ZERO)


def inner_product_2d(a: np.ndarray, b: np.ndarray) -> mpq:
    """Exact int over (0,1)^2 of a*b via the Hilbert sandwich Hx b Hy^T."""
    Hx = _hilbert(a.shape[0], b.shape[0])
    Hy = _hilbert(a.shape[1], b.shape[1])
    mid = rat_matmul(rat_matmul(Hx, b), Hy.T)
    total = _ZERO
    for i in range(a.shape[0]):
        row_a = a[i]
        row_m = mid[i]
        for j in range(a.shape[1]):
            c = row_a[j]
            if c:
                total += c * row_m[j]
    return total

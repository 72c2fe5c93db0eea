"""Vectorized interval arrays over numpy float64 endpoint pairs.

The scalar :class:`~henoncert.interval.Interval` type is exact-rounding but
slow; matrix assembly, quadrature tables and residual evaluations need
millions of interval operations.  This module stores an array of intervals as
two float64 ndarrays ``lo``/``hi`` and rounds outward by one ulp after every
round-to-nearest elementwise operation (sound because RN is within half an
ulp of the exact result).

Matrix products use the midpoint-radius representation with a Higham-style
componentwise bound: for an inner dimension K, the floating product of the
midpoints differs from the exact product by at most gamma_K |Am||Bm| with
gamma_K = K u/(1-K u).  A factor-of-four margin on gamma and a tiny absolute
slack (covering underflow) are added, so the enclosure holds for any
summation order the underlying BLAS may use.
"""

from __future__ import annotations

import numpy as np

from .interval import Interval

__all__ = ["IvArray", "iv_matmul"]

_U = 2.0**-53
_TINY = 1e-280  # absolute slack absorbing underflow in error terms
_INF = np.inf


def _up(x):
    return np.nextafter(x, _INF)


def _down(x):
    return np.nextafter(x, -_INF)


def _gamma_fac(k: int) -> float:
    g = (4.0 * k + 16.0) * _U
    if g >= 1e-4:
        raise ValueError(f"inner dimension {k} too large for float error bound")
    return g


class IvArray:
    """Array of closed intervals, endpoints stored as float64 ndarrays."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None, _checked=False):
        lo = np.asarray(lo, dtype=np.float64)
        hi = lo.copy() if hi is None else np.asarray(hi, dtype=np.float64)
        if not _checked:
            if lo.shape != hi.shape:
                raise ValueError("endpoint shape mismatch")
            if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
                raise ValueError("non-finite endpoint")
            if (lo > hi).any():
                raise ValueError("inverted interval endpoints")
        self.lo = lo
        self.hi = hi

    # -- constructors --------------------------------------------------

    @classmethod
    def exact(cls, values) -> "IvArray":
        """Thin intervals around exactly-representable float values."""
        v = np.asarray(values, dtype=np.float64)
        return cls(v, v.copy(), _checked=True)

    @classmethod
    def zeros(cls, shape) -> "IvArray":
        return cls(np.zeros(shape), np.zeros(shape), _checked=True)

    @classmethod
    def from_scalars(cls, values, shape=None) -> "IvArray":
        """Build from a flat iterable of Interval/Fraction/float entries."""
        items = [Interval.coerce(v) for v in np.asarray(values, dtype=object).ravel()]
        lo = np.array([v.lo for v in items])
        hi = np.array([v.hi for v in items])
        if shape is None:
            shape = np.asarray(values, dtype=object).shape
        return cls(lo.reshape(shape), hi.reshape(shape), _checked=True)

    # -- inspection ------------------------------------------------------

    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def size(self):
        return self.lo.size

    @property
    def T(self) -> "IvArray":
        return IvArray(self.lo.T, self.hi.T, _checked=True)

    def reshape(self, *shape) -> "IvArray":
        return IvArray(self.lo.reshape(*shape), self.hi.reshape(*shape), _checked=True)

    def copy(self) -> "IvArray":
        return IvArray(self.lo.copy(), self.hi.copy(), _checked=True)

    def __getitem__(self, idx) -> "IvArray":
        lo = self.lo[idx]
        hi = self.hi[idx]
        if np.isscalar(lo) or lo.ndim == 0:
            return IvArray(np.atleast_1d(lo), np.atleast_1d(hi), _checked=True)
        return IvArray(lo, hi, _checked=True)

    def __setitem__(self, idx, value):
        if isinstance(value, Interval):
            self.lo[idx] = value.lo
            self.hi[idx] = value.hi
        else:
            self.lo[idx] = value.lo
            self.hi[idx] = value.hi

    def item(self, *idx) -> Interval:
        return Interval(float(self.lo[idx] if idx else self.lo.item()),
                        float(self.hi[idx] if idx else self.hi.item()))

    def to_intervals(self) -> list[Interval]:
        return [Interval(a, b) for a, b in zip(self.lo.ravel(), self.hi.ravel())]

    def mid(self) -> np.ndarray:
        return np.clip(0.5 * (self.lo + self.hi), self.lo, self.hi)

    def mid_rad(self):
        m = self.mid()
        r = _up(np.maximum(self.hi - m, m - self.lo))
        return m, r

    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self) -> np.ndarray:
        out = np.minimum(np.abs(self.lo), np.abs(self.hi))
        out[(self.lo <= 0.0) & (self.hi >= 0.0)] = 0.0
        return out

    def width(self) -> np.ndarray:
        return _up(self.hi - self.lo)

    def contains(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        return (self.lo <= v) & (v <= self.hi)

    # -- elementwise arithmetic -------------------------------------------

    def __neg__(self) -> "IvArray":
        return IvArray(-self.hi, -self.lo, _checked=True)

    def __add__(self, other) -> "IvArray":
        o = _coerce(other)
        return IvArray(_down(self.lo + o.lo), _up(self.hi + o.hi), _checked=True)

    __radd__ = __add__

    def __sub__(self, other) -> "IvArray":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "IvArray":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "IvArray":
        o = _coerce(other)
        p1 = self.lo * o.lo
        p2 = self.lo * o.hi
        p3 = self.hi * o.lo
        p4 = self.hi * o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return IvArray(_down(lo), _up(hi), _checked=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IvArray":
        o = _coerce(other)
        if ((o.lo <= 0.0) & (o.hi >= 0.0)).any():
            raise ZeroDivisionError("divisor interval contains zero")
        q1 = self.lo / o.lo
        q2 = self.lo / o.hi
        q3 = self.hi / o.lo
        q4 = self.hi / o.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        return IvArray(_down(lo), _up(hi), _checked=True)

    def sq(self) -> "IvArray":
        """Elementwise square with the even-power hull (tighter than x*x)."""
        m = self.mig()
        big = self.mag()
        return IvArray(np.maximum(_down(m * m), 0.0), _up(big * big), _checked=True)

    def pow_int(self, k: int) -> "IvArray":
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return IvArray.exact(np.ones(self.shape))
        if k == 1:
            return self.copy()
        if k % 2 == 0:
            m = self.mig()
            big = self.mag()
            lo = m.copy()
            hi = big.copy()
            for _ in range(k - 1):
                lo = _down(lo * m)
                hi = _up(hi * big)
            return IvArray(np.maximum(lo, 0.0), hi, _checked=True)
        # odd power: monotone, endpoints map through sign-aware magnitude chains
        lo = _signed_pow_down(self.lo, k)
        hi = _signed_pow_up(self.hi, k)
        return IvArray(lo, hi, _checked=True)

    def sqrt(self) -> "IvArray":
        if (self.lo < 0).any():
            raise ValueError("sqrt of negative interval")
        lo = np.maximum(_down(np.sqrt(self.lo)), 0.0)
        hi = _up(np.sqrt(self.hi))
        return IvArray(lo, hi, _checked=True)

    def abs(self) -> "IvArray":
        return IvArray(self.mig(), self.mag(), _checked=True)

    # -- reductions ------------------------------------------------------

    def sum(self, axis=None) -> "IvArray | Interval":
        n = self.size if axis is None else self.shape[axis]
        gam = _gamma_fac(n)
        slo = self.lo.sum(axis=axis)
        shi = self.hi.sum(axis=axis)
        corr = _up(gam * (np.abs(self.lo).sum(axis=axis)
                          + np.abs(self.hi).sum(axis=axis)) + _TINY)
        lo = _down(slo - corr)
        hi = _up(shi + corr)
        if axis is None:
            return Interval(float(lo), float(hi))
        return IvArray(lo, hi, _checked=True)

    def hull_scalar(self) -> Interval:
        return Interval(float(self.lo.min()), float(self.hi.max()))

    def intersect(self, other: "IvArray") -> "IvArray":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if (lo > hi).any():
            raise ValueError("empty intersection")
        return IvArray(lo, hi, _checked=True)

    def __matmul__(self, other) -> "IvArray":
        return iv_matmul(self, other)

    def __repr__(self):
        return f"IvArray(shape={self.shape}, maxwidth={float(self.width().max()) if self.size else 0.0:.3e})"


def _signed_pow_down(x: np.ndarray, k: int) -> np.ndarray:
    # x**k rounded toward -inf for odd k (x**k is increasing in x)
    m = np.abs(x)
    dn = m.copy()
    up = m.copy()
    for _ in range(k - 1):
        dn = _down(dn * m)
        up = _up(up * m)
    return np.where(x < 0, -up, dn)


def _signed_pow_up(x: np.ndarray, k: int) -> np.ndarray:
    m = np.abs(x)
    dn = m.copy()
    up = m.copy()
    for _ in range(k - 1):
        dn = _down(dn * m)
        up = _up(up * m)
    return np.where(x < 0, -dn, up)


def _coerce(v) -> IvArray:
    if isinstance(v, IvArray):
        return v
    if isinstance(v, Interval):
        return IvArray(np.asarray(v.lo), np.asarray(v.hi), _checked=True)
    arr = np.asarray(v, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ValueError("non-finite operand")
    return IvArray(arr, arr.copy(), _checked=True)


def iv_matmul(a, b) -> IvArray:
    """Rigorous interval matrix product via midpoint-radius arithmetic."""
    A = _coerce(a)
    B = _coerce(b)
    if A.ndim == 1:
        A = A.reshape(1, -1)
        squeeze_left = True
    else:
        squeeze_left = False
    if B.ndim == 1:
        B = B.reshape(-1, 1)
        squeeze_right = True
    else:
        squeeze_right = False
    k = A.shape[-1]
    if B.shape[0] != k:
        raise ValueError(f"matmul shape mismatch {A.shape} @ {B.shape}")
    gam = _gamma_fac(k)
    am, ar = A.mid_rad()
    bm, br = B.mid_rad()
    cm = am @ bm
    abs_am = np.abs(am)
    abs_bm = np.abs(bm)
    rad = gam * (abs_am @ abs_bm) + (abs_am + ar) @ br + ar @ abs_bm
    rad = _up(_up(rad * (1.0 + 2.0 * gam)) + _TINY)
    lo = _down(cm - rad)
    hi = _up(cm + rad)
    if squeeze_left and squeeze_right:
        return Interval(float(lo[0, 0]), float(hi[0, 0]))
    out = IvArray(lo, hi, _checked=True)
    if squeeze_left or squeeze_right:
        return out.reshape(-1)
    return out

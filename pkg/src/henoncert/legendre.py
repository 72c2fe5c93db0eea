"""Shifted Legendre polynomials and the polynomial Dirichlet basis.

Everything is built from the shifted Legendre family Q_n(x) = P_n(2x - 1) on
(0, 1), orthogonal with int_0^1 Q_i Q_j = delta_ij / (2i + 1).  The Dirichlet
basis is

    phi_n(x) = x (1 - x) Q_n'(x) / (n (n + 1)),   n = 1, 2, ...

which satisfies two exact identities that the whole package leans on:

    phi_n  = (Q_{n-1} - Q_{n+1}) / (2 (2n + 1)),
    phi_n' = -Q_n.

The first gives a two-term Legendre representation (so expansions of Galerkin
solutions into Legendre coefficients are exact rational maps), the second
makes the stiffness matrix diagonal: int phi_i' phi_j' = delta_ij / (2i + 1).

Monomial coefficients are kept as exact rationals; they grow like 4^n and are
numerically useless in binary64 beyond n ~ 25, so float work always goes
through value tables generated by the three-term recurrence (backward-stable
at points of [0, 1]), and rigorous work through exact rational arithmetic.
"""

from __future__ import annotations

import functools
from fractions import Fraction

import numpy as np
from numpy.polynomial import legendre as npleg

__all__ = [
    "shifted_legendre_monomial",
    "phi_monomial",
    "phi_legendre_coeff",
    "stiffness_entry",
    "mass_entry",
    "legendre_values",
    "phi_values",
    "gauss_nodes_01",
    "phi_coeffs_to_legendre_1d",
    "phi_coeffs_to_legendre_2d",
    "legendre_deriv_coeffs_rat",
]


# ---------------------------------------------------------------------------
# exact coefficient computations
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def shifted_legendre_monomial(n: int) -> tuple[Fraction, ...]:
    """Monomial coefficients of Q_n (index = power of x), exact."""
    if n == 0:
        return (Fraction(1),)
    if n == 1:
        return (Fraction(-1), Fraction(2))
    # n Q_n = (2n-1)(2x-1) Q_{n-1} - (n-1) Q_{n-2}
    qm1 = shifted_legendre_monomial(n - 1)
    qm2 = shifted_legendre_monomial(n - 2)
    out = [Fraction(0)] * (n + 1)
    for k, c in enumerate(qm1):
        out[k + 1] += 2 * (2 * n - 1) * c
        out[k] -= (2 * n - 1) * c
    for k, c in enumerate(qm2):
        out[k] -= (n - 1) * c
    return tuple(c / n for c in out)


@functools.lru_cache(maxsize=None)
def phi_monomial(n: int) -> tuple[Fraction, ...]:
    """Monomial coefficients of phi_n = x(1-x) Q_n'/(n(n+1)), exact."""
    if n < 1:
        raise ValueError("basis index must be >= 1")
    q = shifted_legendre_monomial(n)
    dq = [k * q[k] for k in range(1, len(q))]
    out = [Fraction(0)] * (n + 2)
    for k, c in enumerate(dq):
        out[k + 1] += c
        out[k + 2] -= c
    scale = Fraction(1, n * (n + 1))
    return tuple(c * scale for c in out)


def phi_legendre_coeff(n: int) -> Fraction:
    """phi_n = c (Q_{n-1} - Q_{n+1}) with c = 1/(2(2n+1))."""
    return Fraction(1, 2 * (2 * n + 1))


@functools.lru_cache(maxsize=None)
def stiffness_entry(i: int, j: int) -> Fraction:
    """int_0^1 phi_i' phi_j' dx = delta_ij / (2i+1)  (phi' = -Q)."""
    return Fraction(1, 2 * i + 1) if i == j else Fraction(0)


@functools.lru_cache(maxsize=None)
def mass_entry(i: int, j: int) -> Fraction:
    """int_0^1 phi_i phi_j dx from the two-term Legendre representations."""
    ci = phi_legendre_coeff(i)
    cj = phi_legendre_coeff(j)
    total = Fraction(0)
    for ki, si in ((i - 1, 1), (i + 1, -1)):
        for kj, sj in ((j - 1, 1), (j + 1, -1)):
            if ki == kj:
                total += si * sj * Fraction(1, 2 * ki + 1)
    return total * ci * cj


# ---------------------------------------------------------------------------
# float value tables and quadrature nodes (approximate path)
# ---------------------------------------------------------------------------

def legendre_values(x: np.ndarray, deg: int, order: int = 0) -> np.ndarray:
    """Table V[k, i] of d^order/dx^order Q_k(x_i), float path.

    The three-term recurrence runs in s = 2x - 1; each x-derivative level is
    generated by Q'_{k+1} = Q'_{k-1} + 2 (2k+1) Q_k applied to the previous
    level (the factor 2 is the chain rule).
    """
    x = np.asarray(x, dtype=np.float64)
    s = 2.0 * x - 1.0
    table = np.empty((deg + 1, x.size))
    table[0] = 1.0
    if deg >= 1:
        table[1] = s
    for k in range(1, deg):
        table[k + 1] = ((2 * k + 1) * s * table[k] - k * table[k - 1]) / (k + 1)
    for _ in range(order):
        cur = np.zeros_like(table)
        if deg >= 1:
            cur[1] = 2.0 * table[0]
        for k in range(1, deg):
            cur[k + 1] = cur[k - 1] + 2.0 * (2 * k + 1) * table[k]
        table = cur
    return table


def phi_values(x: np.ndarray, indices, order: int = 0) -> np.ndarray:
    """Float table F[a, i] = phi_{indices[a]}^(order)(x_i)."""
    indices = list(indices)
    if order == 0:
        Q = legendre_values(x, max(indices) + 1, 0)
        return np.stack([
            (Q[n - 1] - Q[n + 1]) / (2.0 * (2 * n + 1)) for n in indices
        ])
    Qd = legendre_values(x, max(indices), order - 1)
    return np.stack([-Qd[n] for n in indices])


@functools.lru_cache(maxsize=None)
def gauss_nodes_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to (0, 1), float path."""
    s, w = npleg.leggauss(n)
    return (s + 1.0) / 2.0, w / 2.0


# ---------------------------------------------------------------------------
# Legendre coefficient maps (exact rational)
# ---------------------------------------------------------------------------

def phi_coeffs_to_legendre_1d(indices, coeffs) -> list:
    """Exact Legendre coefficients of sum_k coeffs[k] phi_{indices[k]}.

    Accepts float or rational coefficients (floats are exact binary
    rationals); returns a list of Fractions of length max(indices) + 2.
    """
    indices = list(indices)
    out = [Fraction(0)] * (max(indices) + 2)
    for n, u in zip(indices, coeffs):
        c = phi_legendre_coeff(n) * Fraction(u)
        out[n - 1] += c
        out[n + 1] -= c
    return out


def phi_coeffs_to_legendre_2d(terms, size: int):
    """Exact Legendre coefficient matrix for a sum of tensor terms.

    ``terms`` iterates over (i, j, coeff) with the convention that the term
    is coeff * phi_i(x) phi_j(y); ``size`` is the matrix dimension (at least
    max index + 2).  Returns a nested list of Fractions.
    """
    out = [[Fraction(0)] * size for _ in range(size)]
    for i, j, u in terms:
        c = phi_legendre_coeff(i) * phi_legendre_coeff(j) * Fraction(u)
        for a, sa in ((i - 1, 1), (i + 1, -1)):
            for b, sb in ((j - 1, 1), (j + 1, -1)):
                out[a][b] += sa * sb * c
    return out


def legendre_deriv_coeffs_rat(c: list) -> list:
    """Exact Legendre coefficients of f' on (0,1) from those of f.

    b_k = 2 (2k+1) sum_{j >= k+1, j-k odd} c_j; the factor 2 is the chain
    rule from s = 2x - 1.
    """
    n = len(c)
    if n <= 1:
        return [Fraction(0)]
    out = []
    for k in range(n - 1):
        s = sum(c[j] for j in range(k + 1, n, 2))
        out.append(2 * (2 * k + 1) * s)
    return out

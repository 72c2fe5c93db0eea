"""Basis functions, symmetry-restricted index sets and polynomial carriers.

The Galerkin trial spaces are spanned by phi_n (N = 1) or tensor/symmetrized
products of phi_n (N = 2).  Five space tags are supported:

    full  all indices
    V1    symmetric about x = 1/2 (1D), or about the x-axis midline (2D):
          odd i only (phi_i with odd i is symmetric about 1/2)
    V2    symmetric about the diagonal y = x:    psi_{ij}, i <= j
    V3    symmetric about both diagonals:        psi_{ij}, i <= j, i = j mod 2
    V4    fully symmetric (both axes, both diagonals): psi_{ij}, i <= j odd

with psi_{ij}(x,y) = phi_i(x) phi_j(y) + phi_j(x) phi_i(y); psi_{ii} is kept
as 2 phi_i phi_i without renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .interval import Interval
from .legendre import phi_monomial
from .problem import ProblemSpec

__all__ = [
    "SymmetrySpace",
    "UnsupportedSpace",
    "BasisFunction",
    "PolySeries",
    "build_phi",
    "index_set",
    "space_dimension",
    "tensor_terms",
    "assemble_function",
    "integrate_poly",
    "weight_poly",
]

_TAGS = ("full", "V1", "V2", "V3", "V4")


class UnsupportedSpace(ValueError):
    pass


@dataclass(frozen=True)
class SymmetrySpace:
    """Symmetry tag plus truncation order M (basis indices run 1..M)."""

    tag: str
    M: int

    def __post_init__(self):
        tag = _normalize_tag(self.tag)
        object.__setattr__(self, "tag", tag)
        if self.M < 2:
            raise UnsupportedSpace("truncation order M must be >= 2")


def _normalize_tag(tag) -> str:
    if isinstance(tag, SymmetrySpace):
        return tag.tag
    t = str(tag).strip()
    tl = t.lower()
    if tl in ("full", "v", "none"):
        return "full"
    tu = t.upper()
    if tu in ("V1", "V2", "V3", "V4"):
        return tu
    raise UnsupportedSpace(f"unknown symmetry space {tag!r}")


@dataclass(frozen=True)
class BasisFunction:
    """phi_n with exact rational monomial coefficients (degree n + 1)."""

    n: int
    monomial: tuple

    def __call__(self, x: float) -> float:
        # Horner on exact coefficients; fine for tests and small n
        acc = Fraction(0)
        for c in reversed(self.monomial):
            acc = acc * Fraction(x) + c
        return float(acc)


def build_phi(n: int) -> BasisFunction:
    if n < 1:
        raise ValueError("basis index must be a positive integer")
    return BasisFunction(n=n, monomial=phi_monomial(n))


def index_set(space, N: int, M: int) -> list:
    """Ordered basis indices for a symmetry space (ints for N=1, pairs for
    N=2), lexicographic, with i <= j where applicable."""
    tag = _normalize_tag(space)
    if N == 1:
        if tag == "full":
            return list(range(1, M + 1))
        if tag == "V1":
            return list(range(1, M + 1, 2))
        raise UnsupportedSpace(f"{tag} needs a two-dimensional domain")
    if N != 2:
        raise UnsupportedSpace("only N = 1, 2 are supported")
    if tag == "full":
        return [(i, j) for i in range(1, M + 1) for j in range(1, M + 1)]
    if tag == "V1":
        return [(i, j) for i in range(1, M + 1, 2) for j in range(1, M + 1)]
    if tag == "V2":
        return [(i, j) for i in range(1, M + 1) for j in range(i, M + 1)]
    if tag == "V3":
        return [
            (i, j)
            for i in range(1, M + 1)
            for j in range(i, M + 1, 2)
        ]
    if tag == "V4":
        return [(i, j) for i in range(1, M + 1, 2) for j in range(i, M + 1, 2)]
    raise UnsupportedSpace(tag)


def space_dimension(space, N: int, M: int) -> int:
    return len(index_set(space, N, M))


def is_symmetrized(space, N: int) -> bool:
    """True when the basis consists of psi (diagonal-symmetrized) functions."""
    return N == 2 and _normalize_tag(space) in ("V2", "V3", "V4")


def tensor_terms(space, N: int, M: int):
    """Expansion of each basis function into plain tensor terms.

    Yields, per basis index, a list of (i, j, weight) meaning
    weight * phi_i(x) phi_j(y); for N = 1 the list is [(i, None, 1)].
    """
    idx = index_set(space, N, M)
    if N == 1:
        return [[(i, None, 1)] for i in idx]
    if is_symmetrized(space, N):
        return [[(i, j, 1), (j, i, 1)] for (i, j) in idx]
    return [[(i, j, 1)] for (i, j) in idx]


# ---------------------------------------------------------------------------
# PolySeries: monomial coefficient maps (exact or interval or float)
# ---------------------------------------------------------------------------

@dataclass
class PolySeries:
    """N-variate polynomial as {exponent tuple: coefficient}.

    Coefficients may be Fractions (exact path), Intervals (rigorous rounded
    path) or floats (fast path); a single series never mixes kinds.
    """

    N: int
    coeffs: dict

    @classmethod
    def zero(cls, N: int) -> "PolySeries":
        return cls(N=N, coeffs={})

    @classmethod
    def constant(cls, N: int, value) -> "PolySeries":
        if _is_zero(value):
            return cls.zero(N)
        return cls(N=N, coeffs={(0,) * N: value})

    @classmethod
    def from_1d_coeffs(cls, coeffs) -> "PolySeries":
        return cls(N=1, coeffs={(k,): c for k, c in enumerate(coeffs) if not _is_zero(c)})

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def __add__(self, other: "PolySeries") -> "PolySeries":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return PolySeries(self.N, {e: c for e, c in out.items() if not _is_zero(c)})

    def __sub__(self, other: "PolySeries") -> "PolySeries":
        return self + other.scale(-1)

    def scale(self, factor) -> "PolySeries":
        if _is_zero(factor):
            return PolySeries.zero(self.N)
        return PolySeries(self.N, {e: c * factor for e, c in self.coeffs.items()})

    def __mul__(self, other: "PolySeries") -> "PolySeries":
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                cur = out.get(e)
                out[e] = prod if cur is None else cur + prod
        return PolySeries(self.N, {e: c for e, c in out.items() if not _is_zero(c)})

    def pow(self, k: int) -> "PolySeries":
        out = PolySeries.constant(self.N, _one_like(next(iter(self.coeffs.values()), 1)))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def eval(self, point) -> float:
        total = None
        for e, c in self.coeffs.items():
            term = c
            for xi, ei in zip(point, e):
                term = term * (Fraction(xi) ** ei if isinstance(c, Fraction) else xi**ei)
            total = term if total is None else total + term
        if total is None:
            return 0.0
        return total

    def map_coeffs(self, fn) -> "PolySeries":
        return PolySeries(self.N, {e: fn(c) for e, c in self.coeffs.items()})


def _is_zero(c) -> bool:
    if isinstance(c, Interval):
        return c.lo == 0.0 and c.hi == 0.0
    return c == 0


def _one_like(c):
    if isinstance(c, Interval):
        return Interval(1.0)
    if isinstance(c, Fraction):
        return Fraction(1)
    return 1.0


def assemble_function(space, N: int, M: int, coeffs) -> PolySeries:
    """Expanded polynomial sum_k coeffs[k] basis_k, exact Fraction path."""
    terms = tensor_terms(space, N, M)
    if len(coeffs) != len(terms):
        raise ValueError(
            f"coefficient count {len(coeffs)} != space dimension {len(terms)}"
        )
    phis: dict[int, PolySeries] = {}

    def phi_series(n: int) -> PolySeries:
        if n not in phis:
            phis[n] = PolySeries.from_1d_coeffs(phi_monomial(n))
        return phis[n]

    total = PolySeries.zero(N)
    for u, term_list in zip(coeffs, terms):
        if u == 0:
            continue
        uq = Fraction(u)
        for (i, j, w) in term_list:
            if N == 1:
                part = phi_series(i).scale(uq * w)
            else:
                px = phi_series(i)
                py = phi_series(j)
                part = PolySeries(
                    2,
                    {
                        (ex[0], ey[0]): cx * cy * uq * w
                        for ex, cx in px.coeffs.items()
                        for ey, cy in py.coeffs.items()
                    },
                )
            total = total + part
    return total


def integrate_poly(p: PolySeries):
    """Integral over the unit box: x^a y^b integrates to 1/((a+1)(b+1)).

    Fraction coefficients give the exact rational integral as a tight
    Interval; Interval coefficients give a rigorous interval sum; float
    coefficients give the fast non-rigorous value.
    """
    if not p.coeffs:
        return Interval(0.0, 0.0)
    sample = next(iter(p.coeffs.values()))
    if isinstance(sample, Fraction):
        total = Fraction(0)
        for e, c in p.coeffs.items():
            den = 1
            for ei in e:
                den *= ei + 1
            total += c / den
        from .ratpoly import rat, rat_to_interval

        return rat_to_interval(rat(total))
    if isinstance(sample, Interval):
        total = Interval(0.0)
        for e, c in p.coeffs.items():
            den = 1
            for ei in e:
                den *= ei + 1
            total = total + c / den
        return total
    return float(sum(c / _den(e) for e, c in p.coeffs.items()))


def _den(e) -> float:
    d = 1
    for ei in e:
        d *= ei + 1
    return float(d)


def weight_poly(spec: ProblemSpec) -> PolySeries:
    """The weight |x - x0|^l as an exact polynomial (even integer l)."""
    if not spec.l_is_even_int:
        raise UnsupportedSpace(
            "polynomial weight requires an even integer l; the approximate "
            "path evaluates the weight pointwise instead"
        )
    half = int(spec.l) // 2
    if spec.N == 1:
        base = PolySeries(1, {(2,): Fraction(1), (1,): Fraction(-1), (0,): Fraction(1, 4)})
    else:
        base = PolySeries(
            2,
            {
                (2, 0): Fraction(1), (1, 0): Fraction(-1),
                (0, 2): Fraction(1), (0, 1): Fraction(-1),
                (0, 0): Fraction(1, 2),
            },
        )
    if half == 0:
        return PolySeries.constant(spec.N, Fraction(1))
    return base.pow(half)

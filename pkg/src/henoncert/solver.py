"""Floating-point Galerkin solver, continuation and eigenvalue diagnostics.

The discrete problem is: find coefficients u with

    (grad uh, grad b_k) = (w |uh|^(p-1) uh, b_k)   for every basis b_k,

solved by plain Newton iteration.  Stiffness and mass matrices come from the
exact rational gram entries; the nonlinear term is integrated by tensor
Gauss-Legendre quadrature, exact for the polynomial cases (even integer l,
odd integer p) and of order 2M + 8 otherwise.  Everything here is the fast,
non-rigorous path; certification re-derives every quantity it needs from the
coefficient vector through exact arithmetic.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import index_set, tensor_terms, is_symmetrized, _normalize_tag
from .legendre import (
    gauss_nodes_01,
    mass_entry,
    phi_values,
    stiffness_entry,
)
from .problem import ProblemSpec

__all__ = [
    "GalerkinSolution",
    "CurvePoint",
    "NewtonFailure",
    "assemble_newton_system",
    "newton_solve",
    "make_seed",
    "seed_from_preset",
    "SEED_PRESETS",
    "trace_curve",
    "approx_eigs",
    "count_peaks",
    "grid_values",
]


class NewtonFailure(RuntimeError):
    pass


@dataclass
class GalerkinSolution:
    """Galerkin approximation: coefficients over an ordered basis."""

    problem: ProblemSpec
    space: str
    M: int
    coeffs: np.ndarray
    converged: bool = False
    iterations: int = 0
    grad_norm: float = np.inf
    grad_history: list = field(default_factory=list)
    branch_id: str = ""

    def __post_init__(self):
        self.space = _normalize_tag(self.space)
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        expected = len(index_set(self.space, self.problem.N, self.M))
        if self.coeffs.shape != (expected,):
            raise ValueError(
                f"coefficient vector has shape {self.coeffs.shape}, "
                f"space dimension is {expected}"
            )

    @property
    def indices(self) -> list:
        return index_set(self.space, self.problem.N, self.M)

    def h10_seminorm(self) -> float:
        K = _stiffness_matrix(self.space, self.problem.N, self.M)
        return float(np.sqrt(self.coeffs @ K @ self.coeffs))

    def peak_estimate(self, n: int = 513) -> float:
        return float(np.max(grid_values(self, n)))


@dataclass
class CurvePoint:
    l: float
    branch_id: str
    h10_norm: float
    peak: float
    newton_iters: int
    converged: bool


# ---------------------------------------------------------------------------
# cached assembly pieces
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _stiffness_matrix(space: str, N: int, M: int) -> np.ndarray:
    """Float Dirichlet-energy gram matrix (exact rational entries)."""
    terms = tensor_terms(space, N, M)
    n = len(terms)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            val = 0.0
            for (i, j, wa) in terms[a]:
                for (k, l, wb) in terms[b]:
                    if N == 1:
                        v = stiffness_entry(i, k)
                    else:
                        v = (
                            stiffness_entry(i, k) * mass_entry(j, l)
                            + mass_entry(i, k) * stiffness_entry(j, l)
                        )
                    val += wa * wb * float(v)
            out[a, b] = out[b, a] = val
    return out


@functools.lru_cache(maxsize=64)
def _mass_matrix(space: str, N: int, M: int) -> np.ndarray:
    terms = tensor_terms(space, N, M)
    n = len(terms)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            val = 0.0
            for (i, j, wa) in terms[a]:
                for (k, l, wb) in terms[b]:
                    if N == 1:
                        v = mass_entry(i, k)
                    else:
                        v = mass_entry(i, k) * mass_entry(j, l)
                    val += wa * wb * float(v)
            out[a, b] = out[b, a] = val
    return out


def _quad_order(spec: ProblemSpec, M: int) -> int:
    nq = 2 * M + 8
    if spec.verified_eligible:
        deg = int(spec.l) + (int(spec.p) + 1) * (M + 1)
        nq = max(nq, deg // 2 + 2)
    return nq


@functools.lru_cache(maxsize=64)
def _basis_table(space: str, N: int, M: int, nq: int):
    """Basis values at tensor quadrature nodes: (Psi, node weight vector)."""
    x, w = gauss_nodes_01(nq)
    terms = tensor_terms(space, N, M)
    if N == 1:
        idx = [t[0][0] for t in terms]
        psi = phi_values(x, idx, 0)
        return psi, w, x
    needed = sorted({i for tl in terms for (i, j, _) in tl} |
                    {j for tl in terms for (i, j, _) in tl})
    pos = {n: a for a, n in enumerate(needed)}
    F = phi_values(x, needed, 0)
    psi = np.empty((len(terms), nq * nq))
    for a, tl in enumerate(terms):
        acc = np.zeros((nq, nq))
        for (i, j, wt) in tl:
            acc += wt * np.outer(F[pos[i]], F[pos[j]])
        psi[a] = acc.ravel()
    w2 = np.outer(w, w).ravel()
    return psi, w2, x


def _weight_values(spec: ProblemSpec, x: np.ndarray) -> np.ndarray:
    if spec.N == 1:
        r2 = (x - 0.5) ** 2
        return r2 ** (spec.l / 2.0)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    r2 = (xx - 0.5) ** 2 + (yy - 0.5) ** 2
    return (r2 ** (spec.l / 2.0)).ravel()


def _gradient(spec, space, M, coeffs):
    nq = _quad_order(spec, M)
    psi, w, x = _basis_table(space, spec.N, M, nq)
    wvals = _weight_values(spec, x)
    K = _stiffness_matrix(space, spec.N, M)
    uvals = coeffs @ psi
    p = spec.p
    fvals = wvals * np.abs(uvals) ** (p - 1.0) * uvals
    return K @ coeffs - psi @ (w * fvals)


def assemble_newton_system(sol: GalerkinSolution):
    """Gradient and Jacobian of the discrete Galerkin equation at sol."""
    spec = sol.problem
    nq = _quad_order(spec, sol.M)
    psi, w, x = _basis_table(sol.space, spec.N, sol.M, nq)
    wvals = _weight_values(spec, x)
    K = _stiffness_matrix(sol.space, spec.N, sol.M)
    uvals = sol.coeffs @ psi
    p = spec.p
    fvals = wvals * np.abs(uvals) ** (p - 1.0) * uvals
    grad = K @ sol.coeffs - psi @ (w * fvals)
    gvals = p * wvals * np.abs(uvals) ** (p - 1.0)
    jac = K - (psi * (w * gvals)) @ psi.T
    return grad, jac


def newton_solve(
    seed: GalerkinSolution,
    tol: float = 1e-13,
    max_iters: int = 50,
    damping: bool = True,
) -> GalerkinSolution:
    """Newton iteration on the discrete system; returns a new solution object
    flagged converged when the l2 gradient norm falls below tol.

    With damping, steps are halved (down to 2^-10) until the gradient norm
    decreases; near a root full steps always pass, so terminal convergence
    stays quadratic.
    """
    u = seed.coeffs.copy()
    sol = replace(seed, coeffs=u, grad_history=[], converged=False)
    spec = seed.problem
    history = []
    for it in range(max_iters + 1):
        grad, jac = assemble_newton_system(sol)
        gnorm = float(np.linalg.norm(grad))
        history.append(gnorm)
        if not np.isfinite(gnorm):
            return replace(sol, converged=False, iterations=it,
                           grad_norm=gnorm, grad_history=history)
        if gnorm <= tol:
            # -u solves the same discrete system (odd nonlinearity); orient
            # the predominantly-negative twin positive for reproducibility
            v = grid_values(sol, 65)
            if v.max() + v.min() < 0.0:
                sol = replace(sol, coeffs=-sol.coeffs)
            return replace(sol, converged=True, iterations=it,
                           grad_norm=gnorm, grad_history=history)
        if it == max_iters:
            break
        try:
            step = np.linalg.solve(jac, grad)
        except np.linalg.LinAlgError as exc:
            raise NewtonFailure(f"jacobian-singular: {exc}") from exc
        if damping:
            lam = 1.0
            new = sol.coeffs - step
            while lam >= 2.0**-10:
                new = sol.coeffs - lam * step
                gn = float(np.linalg.norm(_gradient(spec, sol.space, sol.M, new)))
                if np.isfinite(gn) and gn < gnorm:
                    break
                lam *= 0.5
            sol = replace(sol, coeffs=new)
        else:
            sol = replace(sol, coeffs=sol.coeffs - step)
    return replace(sol, converged=False, iterations=max_iters,
                   grad_norm=history[-1], grad_history=history)


# ---------------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------------

def make_seed(
    spec: ProblemSpec,
    space,
    M: int,
    peaks,
    branch_id: str = "",
) -> GalerkinSolution:
    """L2 least-squares projection of a sum of smooth bumps onto the space.

    Each peak is (center, amplitude); the bump is amplitude times the product
    over dimensions of sin(pi t)^2 with t the coordinate rescaled so the bump
    support is the largest box around the center inside the domain.
    """
    space = _normalize_tag(space)
    dim = len(index_set(space, spec.N, M))
    if not peaks:
        return GalerkinSolution(spec, space, M, np.zeros(dim), branch_id=branch_id)
    nq = 2 * M + 24
    psi, w, x = _basis_table(space, spec.N, M, nq)
    vals = np.zeros(nq**spec.N)
    for center, amp in peaks:
        center = np.atleast_1d(np.asarray(center, dtype=np.float64))
        if center.size != spec.N:
            raise ValueError("peak center dimension mismatch")
        if np.any(center <= 0.0) or np.any(center >= 1.0):
            raise ValueError("peak centers must lie strictly inside the domain")
        bump = np.ones(nq**spec.N)
        grids = np.meshgrid(*([x] * spec.N), indexing="ij")
        for ci, g in zip(center, grids):
            sigma = 2.0 * min(ci, 1.0 - ci)
            t = np.clip((g.ravel() - ci) / sigma + 0.5, 0.0, 1.0)
            bump *= np.sin(np.pi * t) ** 2
        vals += amp * bump
    rhs = psi @ (w * vals)
    mass = _mass_matrix(space, spec.N, M)
    coeffs = np.linalg.solve(mass, rhs)
    return GalerkinSolution(spec, space, M, coeffs, branch_id=branch_id)


def _corner_dist(l: float) -> float:
    # peaks drift toward the corners as l grows
    return max(0.16, 0.30 - 0.025 * l)


def _amp_1d(l: float) -> float:
    return 3.8 * np.exp(0.74 * l) if l < 4.5 else 70.0 * np.exp(0.5 * (l - 4.0))

def _amp_2d(l: float) -> float:
    return 6.6 * np.exp(0.60 * l) if l < 4.5 else 65.0 * np.exp(0.45 * (l - 4.0))


SEED_PRESETS = {
    # 1D
    "center": lambda spec: [((0.5,) * spec.N,
                             _amp_1d(spec.l) if spec.N == 1 else _amp_2d(spec.l))],
    "offcenter": lambda spec: [((0.3,), _amp_1d(spec.l))],
    "sym-two": lambda spec: [
        ((_corner_dist(spec.l),), _amp_1d(spec.l)),
        ((1 - _corner_dist(spec.l),), _amp_1d(spec.l)),
    ],
    # 2D
    "corner-four": lambda spec: [
        ((a, b), _amp_2d(spec.l))
        for a in (_corner_dist(spec.l), 1 - _corner_dist(spec.l))
        for b in (_corner_dist(spec.l), 1 - _corner_dist(spec.l))
    ],
    "diag-one": lambda spec: [
        ((_corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l))
    ],
    "diag-two": lambda spec: [
        ((_corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l)),
        ((1 - _corner_dist(spec.l), 1 - _corner_dist(spec.l)), _amp_2d(spec.l)),
    ],
    "corner-three": lambda spec: [
        ((_corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l)),
        ((_corner_dist(spec.l), 1 - _corner_dist(spec.l)), _amp_2d(spec.l)),
        ((1 - _corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l)),
    ],
    "midline-one": lambda spec: [((0.5, _corner_dist(spec.l)), _amp_2d(spec.l))],
    "pair-sym": lambda spec: [
        ((_corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l)),
        ((1 - _corner_dist(spec.l), _corner_dist(spec.l)), _amp_2d(spec.l)),
    ],
}


def seed_from_preset(spec: ProblemSpec, space, M: int, name: str) -> GalerkinSolution:
    key = name.removeprefix("preset:")
    if key not in SEED_PRESETS:
        raise KeyError(
            f"unknown seed preset {name!r}; available: {sorted(SEED_PRESETS)}"
        )
    return make_seed(spec, space, M, SEED_PRESETS[key](spec), branch_id=key)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def trace_curve(
    spec_template: ProblemSpec,
    space,
    M: int,
    l_start: float,
    l_end: float,
    l_step: float,
    seed: GalerkinSolution,
    branch_id: str = "",
    tol: float = 1e-11,
    max_iters: int = 50,
    keep_solutions: bool = False,
):
    """Natural continuation in l: each converged solution seeds the next l.

    Returns the list of curve points; with keep_solutions also the converged
    solution objects.  The branch stops at the first Newton failure.
    """
    if l_step <= 0:
        raise ValueError("l_step must be positive")
    space = _normalize_tag(space)
    direction = 1.0 if l_end >= l_start else -1.0
    n_steps = int(np.floor(abs(l_end - l_start) / l_step + 1e-9)) + 1
    points: list[CurvePoint] = []
    solutions: list[GalerkinSolution] = []
    current = seed.coeffs.copy()
    bid = branch_id or seed.branch_id or "branch"
    for k in range(n_steps):
        l = l_start + direction * k * l_step
        spec = ProblemSpec(N=spec_template.N, l=float(l), p=spec_template.p)
        guess = GalerkinSolution(spec, space, M, current, branch_id=bid)
        try:
            sol = newton_solve(guess, tol=tol, max_iters=max_iters)
        except NewtonFailure:
            points.append(CurvePoint(float(l), bid, np.nan, np.nan, 0, False))
            break
        points.append(
            CurvePoint(
                l=float(l),
                branch_id=bid,
                h10_norm=sol.h10_seminorm(),
                peak=sol.peak_estimate(257),
                newton_iters=sol.iterations,
                converged=sol.converged,
            )
        )
        if not sol.converged:
            break
        if keep_solutions:
            solutions.append(sol)
        current = sol.coeffs.copy()
    if keep_solutions:
        return points, solutions
    return points


# ---------------------------------------------------------------------------
# eigenvalue diagnostics and grid helpers
# ---------------------------------------------------------------------------

def approx_eigs(sol: GalerkinSolution, k: int = 5, M_diag: int | None = None):
    """Approximate smallest eigenvalues mu of the linearization pencil.

    The eigenproblem (grad u, grad v) - (p w |uh|^(p-1) u, v)
    = mu [(grad u, grad v) + tau (u, v)] is discretized on the full tensor
    space of order M_diag (no symmetry restriction), tau taken as the
    smallest positive double.
    """
    import scipy.linalg

    spec = sol.problem
    if M_diag is None:
        M_diag = 40 if spec.N == 1 else 30
    nq = max(_quad_order(spec, M_diag), _quad_order(spec, sol.M))
    psi, w, x = _basis_table("full", spec.N, M_diag, nq)
    psi_u, _, _ = _basis_table(sol.space, spec.N, sol.M, nq)
    uvals = sol.coeffs @ psi_u
    wvals = _weight_values(spec, x)
    gvals = spec.p * wvals * np.abs(uvals) ** (spec.p - 1.0)
    K = _stiffness_matrix("full", spec.N, M_diag)
    W = (psi * (w * gvals)) @ psi.T
    T = K + 5e-324 * _mass_matrix("full", spec.N, M_diag)
    mu = scipy.linalg.eigh(K - W, T, eigvals_only=True)
    return mu[:k]


def grid_values(sol: GalerkinSolution, n: int = 257) -> np.ndarray:
    """Values of the solution on a regular grid (for plots and peak counts)."""
    x = np.linspace(0.0, 1.0, n)
    spec = sol.problem
    terms = tensor_terms(sol.space, spec.N, sol.M)
    needed = sorted({i for tl in terms for (i, _, _) in tl} |
                    ({j for tl in terms for (_, j, _) in tl} - {None}))
    F = phi_values(x, needed, 0)
    pos = {m: a for a, m in enumerate(needed)}
    if spec.N == 1:
        out = np.zeros(n)
        for u, tl in zip(sol.coeffs, terms):
            for (i, _, wt) in tl:
                out += u * wt * F[pos[i]]
        return out
    out = np.zeros((n, n))
    for u, tl in zip(sol.coeffs, terms):
        for (i, j, wt) in tl:
            out += u * wt * np.outer(F[pos[i]], F[pos[j]])
    return out


def count_peaks(sol: GalerkinSolution, n: int = 129, rel_threshold: float = 0.2):
    """Number of strict local maxima above rel_threshold * max (diagnostic)."""
    v = grid_values(sol, n)
    vmax = v.max()
    if vmax <= 0:
        return 0
    thresh = rel_threshold * vmax
    count = 0
    if sol.problem.N == 1:
        for i in range(1, n - 1):
            if v[i] > thresh and v[i] > v[i - 1] and v[i] > v[i + 1]:
                count += 1
        return count
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            c = v[i, j]
            if c <= thresh:
                continue
            patch = v[i - 1 : i + 2, j - 1 : j + 2]
            if c >= patch.max() and (patch < c).sum() == 8:
                count += 1
    return count

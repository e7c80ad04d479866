"""The two-point inequality, its infinitesimal form, and counterexample search.

The global inequality compares, for complex a, b and |z| <= 1,

    ((|a+zb|^q + |a-zb|^q)/2)^{1/q}   vs   ((|a+b|^p + |a-b|^p)/2)^{1/p},

and tensorizes to hypercontractivity of the damping operator on the cube.
Its second-order expansion at b -> 0 is the quadratic-form comparison

    (q-2) (Re wz)^2 + |wz|^2  <=  (p-2) (Re w)^2 + |w|^2,

a necessary condition; whether it is also sufficient is open in part of the
exponent range, so the scanner below only ever reports holds-on-grid or
fails-with-witness, never "verified".

Exponent pairs are carried by ExponentTriple.  Construction accepts any
p, q >= 1: the ordering p <= q is required only by the operations whose
derivations need it (the mixed norms and flows), and those enforce it
themselves.  Margin and ratio evaluations are well defined either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_Z_RADIUS_SLACK = 1e-12


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents p, q and damping parameter z with |z| <= 1."""

    p: float
    q: float
    z: complex

    def __post_init__(self):
        if self.p < 1.0 or self.q < 1.0:
            raise ValueError(f"exponents must be >= 1, got p = {self.p}, q = {self.q}")
        if abs(self.z) > 1.0 + _Z_RADIUS_SLACK:
            raise ValueError(f"|z| must be <= 1, got {abs(self.z)}")
        object.__setattr__(self, "z", complex(self.z))

    def require_ordered(self) -> None:
        """Raise unless p <= q (needed by the Minkowski step of the flows)."""
        if self.p > self.q:
            raise ValueError(f"operation requires p <= q, got p = {self.p} > q = {self.q}")


@dataclass(frozen=True)
class MarginRecord:
    """One margin evaluation: rhs - lhs, with the evaluation point attached."""

    point: tuple
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def two_point_margin(a: complex, b: complex, t: ExponentTriple) -> MarginRecord:
    """Global two-point margin at (a, b)."""
    a = complex(a)
    b = complex(b)
    lhs = (0.5 * (abs(a + t.z * b) ** t.q + abs(a - t.z * b) ** t.q)) ** (1.0 / t.q)
    rhs = (0.5 * (abs(a + b) ** t.p + abs(a - b) ** t.p)) ** (1.0 / t.p)
    return MarginRecord(point=(a, b), lhs=lhs, rhs=rhs)


def infinitesimal_margin(w: complex, t: ExponentTriple) -> MarginRecord:
    """Quadratic-form margin at direction w.

    Homogeneous of degree 2 in |w|, so scans only need w on the unit circle.
    """
    w = complex(w)
    wz = w * t.z
    lhs = (t.q - 2.0) * (wz.real) ** 2 + abs(wz) ** 2
    rhs = (t.p - 2.0) * (w.real) ** 2 + abs(w) ** 2
    return MarginRecord(point=(w,), lhs=lhs, rhs=rhs)


def infinitesimal_margin_min(t: ExponentTriple, angles: int = 256) -> float:
    """Worst quadratic-form margin over a uniform scan of unit directions."""
    theta = np.linspace(0.0, np.pi, angles, endpoint=False)  # w and -w agree
    w = np.exp(1j * theta)
    wz = w * t.z
    lhs = (t.q - 2.0) * wz.real**2 + np.abs(wz) ** 2
    rhs = (t.p - 2.0) * w.real**2 + np.abs(w) ** 2
    return float(np.min(rhs - lhs))


@dataclass(frozen=True)
class SearchBudget:
    """Grid and refinement budget for the extremal-ratio search."""

    grid_radius: float = 8.0
    grid_step: float = 0.05
    refine_tol: float = 1e-6
    max_evals: int = 2_000_000

    @classmethod
    def reduced(cls) -> "SearchBudget":
        """Cheaper preset used inside region scans."""
        return cls(grid_radius=4.0, grid_step=0.1, refine_tol=1e-6, max_evals=200_000)


@dataclass(frozen=True)
class ExtremalSearchResult:
    sup_ratio: float
    witness_a: complex
    witness_b: complex
    evaluations: int
    complete: bool


def _ratio_grid(t: ExponentTriple, b: np.ndarray) -> np.ndarray:
    """lhs/rhs at a = 1 for an array of complex b."""
    lhs = (0.5 * (np.abs(1.0 + t.z * b) ** t.q + np.abs(1.0 - t.z * b) ** t.q)) ** (1.0 / t.q)
    rhs = (0.5 * (np.abs(1.0 + b) ** t.p + np.abs(1.0 - b) ** t.p)) ** (1.0 / t.p)
    return lhs / rhs


def extremal_ratio(t: ExponentTriple, budget: SearchBudget | None = None) -> ExtremalSearchResult:
    """Maximize lhs/rhs over complex (a, b).

    Joint phase and scale invariance reduce the search to a in {0, 1}: the
    a = 0 ray has ratio |z| in closed form, and a = 1 is searched by a
    coarse complex grid followed by derivative-free compass refinement
    (|.|^p is not smooth at zeros of a +- zb, so no gradients).

    The square lattice is supplemented by a polar ladder of small radii with
    dense angles: violations barely past the equality threshold live in a
    thin annulus around the equality manifold b = 0 in one narrow direction,
    which a coarse lattice steps right over.  Ties are broken toward the
    smallest |b|, which keeps witnesses stable near b = 0.
    """
    if budget is None:
        budget = SearchBudget()
    half = int(round(budget.grid_radius / budget.grid_step))
    axis = budget.grid_step * np.arange(-half, half + 1)  # contains 0 exactly
    lattice = (axis[:, None] + 1j * axis[None, :]).ravel()
    angles = np.exp(1j * np.linspace(0.0, np.pi, 64, endpoint=False))  # b ~ -b
    radii = budget.grid_step * 2.0 ** -np.arange(0, 8)
    polar = (radii[:, None] * angles[None, :]).ravel()
    grid = np.concatenate((lattice, polar))
    complete = True
    if grid.size > budget.max_evals:
        grid = grid[: budget.max_evals]
        complete = False
    ratios = _ratio_grid(t, grid)
    evals = grid.size

    best = float(np.max(ratios))
    near = np.abs(ratios - best) <= 1e-12
    candidates = grid[near]
    b_best = complex(candidates[np.argmin(np.abs(candidates))])
    best = float(_ratio_grid(t, np.array([b_best]))[0])

    # a = 0 ray: ratio is exactly |z|.
    if abs(t.z) > best:
        return ExtremalSearchResult(abs(t.z), 0.0, 1.0 + 0.0j, evals, complete)

    h = budget.grid_step
    diag = (1.0 + 1.0j) / math.sqrt(2.0)
    directions = np.array([1.0, -1.0, 1j, -1j, diag, -diag, diag.conjugate(), -diag.conjugate()])
    while h > budget.refine_tol:
        if evals + 8 > budget.max_evals:
            complete = False
            break
        cand = b_best + h * directions
        vals = _ratio_grid(t, cand)
        evals += 8
        i = int(np.argmax(vals))
        if vals[i] > best + 1e-15:
            best = float(vals[i])
            b_best = complex(cand[i])
        else:
            h *= 0.5
    return ExtremalSearchResult(best, 1.0 + 0.0j, b_best, evals, complete)


def real_failure_threshold(
    p: float,
    q: float,
    z_tol: float = 1e-3,
    ratio_tol: float = 1e-9,
    budget: SearchBudget | None = None,
) -> float:
    """Largest real z in [0, 1] where the global inequality still holds, by bisection."""
    lo, hi = 0.0, 1.0
    while hi - lo > z_tol:
        mid = 0.5 * (lo + hi)
        res = extremal_ratio(ExponentTriple(p, q, mid), budget)
        if res.sup_ratio <= 1.0 + ratio_tol:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RegionScanRow:
    p: float
    q: float
    z: complex
    infinitesimal_margin_min: float
    sup_ratio: float
    witness_b: complex
    global_holds: bool
    infinitesimal_holds: bool


def disk_grid(resolution: float) -> np.ndarray:
    """Grid of complex points covering the closed unit disk; resolution >= 0.01."""
    if resolution < 0.01:
        raise ValueError("grid resolution below 0.01 rejected")
    axis = np.arange(-1.0, 1.0 + resolution / 2, resolution)
    grid = (axis[:, None] + 1j * axis[None, :]).ravel()
    return grid[np.abs(grid) <= 1.0 + 1e-12]


def region_scan(
    p: float,
    q: float,
    z_grid: Sequence[complex] | np.ndarray,
    angles: int = 256,
    budget: SearchBudget | None = None,
    ratio_tol: float = 1e-9,
    margin_tol: float = 1e-7,
    threads: int = 1,
) -> list[RegionScanRow]:
    """Evaluate both forms of the inequality on a grid of damping parameters.

    Each z gets a quadratic-form scan over `angles` directions and an
    extremal-ratio search (reduced budget by default).  Output vocabulary is
    holds-on-grid / fails-with-witness only.
    """
    if budget is None:
        budget = SearchBudget.reduced()

    def one(z: complex) -> RegionScanRow:
        t = ExponentTriple(p, q, z)
        inf_min = infinitesimal_margin_min(t, angles)
        res = extremal_ratio(t, budget)
        return RegionScanRow(
            p=p,
            q=q,
            z=complex(z),
            infinitesimal_margin_min=inf_min,
            sup_ratio=res.sup_ratio,
            witness_b=res.witness_b,
            global_holds=res.sup_ratio <= 1.0 + ratio_tol,
            infinitesimal_holds=inf_min >= -margin_tol,
        )

    zs = list(z_grid)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, zs))
    return [one(z) for z in zs]

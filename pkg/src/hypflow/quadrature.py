"""Gauss-Hermite quadrature for the standard Gaussian measure.

Everything in this package integrates against

    dgamma(x) = exp(-x^2/2) dx / sqrt(2*pi),

so the rules produced here are stated directly for that measure: nodes are
real, weights are positive and sum to 1, and an N-point rule integrates
polynomials up to degree 2N-1 exactly.

Construction is Golub-Welsch: the monic orthogonal polynomials for dgamma
satisfy p_{m+1} = x p_m - m p_{m-1}, so the Jacobi matrix is symmetric
tridiagonal with zero diagonal and off-diagonal sqrt(m).  Eigenvalues give
the nodes; a Newton polish on the orthonormal recurrence then restores full
float accuracy, and weights come from the Christoffel identity
w_i = 1 / sum_m phat_m(x_i)^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AccuracyError

# Node cap for the automatic refinement loop.  512 nodes resolve every
# integrand in this package; anything that fails to stabilize by then is
# reported as an accuracy failure rather than silently accepted.
MAX_NODES = 512


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for expectation against dgamma.

    Invariants: nodes symmetric about 0, weights positive and summing to 1,
    exact on polynomials of degree <= 2*node_count - 1.  Past ~300 nodes the
    extreme-node weights fall below float64 range and round to exact zeros.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def node_count(self) -> int:
        return self.nodes.size

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> complex:
        """E[f] against dgamma for a vectorized callable.

        Symmetric node pairs are summed together first, so the odd part of f
        integrates to exactly zero (the nodes are exactly mirrored); this is
        what makes huge odd moments come out as 0 rather than cancellation
        noise.
        """
        vals = np.asarray(f(self.nodes))
        half = self.node_count // 2
        total = np.dot(self.weights[:half], vals[:half] + vals[::-1][:half])
        if self.node_count % 2:
            total = total + self.weights[half] * vals[half]
        return complex(total)

    def integrate_values(self, values: np.ndarray) -> complex:
        """E against dgamma when f has already been sampled at the nodes."""
        return complex(np.dot(self.weights, values))


def _orthonormal_hermite_pair(x: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Values of (phat_{n-1}, phat_n) at x, up to a common positive factor.

    The pair is renormalized whenever it grows past 1e150: only the ratio
    reaches the Newton step, and the raw values overflow float64 near the
    extreme nodes of rules beyond ~500 points.
    """
    pm = np.zeros_like(x)
    pc = np.ones_like(x)
    for m in range(n):
        pm, pc = pc, (x * pc - np.sqrt(m) * pm) / np.sqrt(m + 1.0)
        scale = np.where(np.abs(pc) > 1e150, 1e-150, 1.0)
        pm = pm * scale
        pc = pc * scale
    return pm, pc


def gh_rule(n: int) -> QuadratureRule:
    """N-point Gauss rule for dgamma, exact through degree 2N-1.

    Raises ValueError for n < 1.  Rules are cached and immutable, so a rule
    may be shared freely across threads.
    """
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    return _gh_rule_cached(int(n))


@lru_cache(maxsize=None)
def _gh_rule_cached(n: int) -> QuadratureRule:
    if n == 1:
        nodes = np.array([0.0])
        weights = np.array([1.0])
    else:
        nodes, _ = eigh_tridiagonal(np.zeros(n), np.sqrt(np.arange(1.0, n)))
        # Newton polish on phat_n; phat_n'(x) = sqrt(n) * phat_{n-1}(x).
        for _ in range(2):
            pnm1, pn = _orthonormal_hermite_pair(nodes, n)
            nodes = nodes - pn / (np.sqrt(n) * pnm1)
        # Christoffel weights w_i = 1 / sum_m phat_m(x_i)^2.  The ladder is
        # renormalized per node with the log of the factor recorded, so the
        # sum stays in float range at any rule size; weights far below float
        # resolution come out as exact zeros.
        acc = np.zeros_like(nodes)
        pm = np.zeros_like(nodes)
        pc = np.ones_like(nodes)
        log_scale = np.zeros_like(nodes)
        for m in range(n):
            acc += pc * pc
            pm, pc = pc, (nodes * pc - np.sqrt(m) * pm) / np.sqrt(m + 1.0)
            big = np.abs(pc) > 1e100
            if big.any():
                factor = np.where(big, 1e-100, 1.0)
                pm = pm * factor
                pc = pc * factor
                acc = acc * factor * factor
                log_scale += np.where(big, np.log(1e-100), 0.0)
        weights = np.exp(2.0 * log_scale - np.log(acc))
        # Enforce the exact symmetry of the measure.
        nodes = 0.5 * (nodes - nodes[::-1])
        if n % 2 == 1:
            nodes[n // 2] = 0.0
        weights = 0.5 * (weights + weights[::-1])
        weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


def resolve_rule(rule: QuadratureRule | int | None, default_n: int = 64) -> QuadratureRule:
    """Accept a rule, a node count, or None (-> default size)."""
    if rule is None:
        return gh_rule(default_n)
    if isinstance(rule, int):
        return gh_rule(rule)
    return rule


def converged_value(
    evaluate: Callable[[QuadratureRule], complex],
    start: int = 32,
    cap: int = MAX_NODES,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    raise_on_failure: bool = False,
) -> tuple[complex, int, bool]:
    """Evaluate a rule-dependent quantity at N and 2N nodes until stable.

    Returns (value, nodes_used, converged).  The doubling stops as soon as
    two successive evaluations differ by less than atol + rtol*|value|.
    """
    n = start
    prev = evaluate(gh_rule(n))
    while n < cap:
        n *= 2
        cur = evaluate(gh_rule(n))
        if abs(cur - prev) <= atol + rtol * abs(cur):
            return cur, n, True
        prev = cur
    if raise_on_failure:
        raise AccuracyError(f"quadrature did not stabilize below {cap} nodes")
    return prev, n, False


def integrate_entire(
    f: Callable[[np.ndarray], np.ndarray],
    quad_coeff: complex,
    lin_coeff: complex,
    rule: QuadratureRule,
) -> complex:
    """integral over R of f(y) * exp(-a*y^2 + b*y) dy for complex a, b with Re a > 0.

    The integrand is recentred on the real Gaussian envelope
    exp(-Re(a)*(y - m)^2) with m = Re(b)/(2*Re(a)), and the residual complex
    exponent is combined analytically before exponentiation so nothing
    overflows.  f must be slowly growing (polynomial or exp-linear); the
    caller controls accuracy through the rule size.
    """
    a = complex(quad_coeff)
    b = complex(lin_coeff)
    ra = a.real
    if ra <= 0.0:
        raise ValueError("integrate_entire requires Re(quad_coeff) > 0")
    m = b.real / (2.0 * ra)
    scale = np.sqrt(2.0 * ra)
    y = m + rule.nodes / scale
    # Re part of the exponent is constant by construction of m.
    expo = -a * y * y + b * y + 0.5 * rule.nodes**2
    vals = f(y) * np.exp(expo)
    return complex(np.sqrt(2.0 * np.pi) / scale * np.dot(rule.weights, vals))

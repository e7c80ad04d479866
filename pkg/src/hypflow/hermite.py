"""Probabilists' Hermite polynomials, series algebra, Mehler and heat semigroups.

The Hermite normalization used everywhere is the probabilists' one,

    H_0 = 1,  H_1 = x,  H_{m+1} = x*H_m - m*H_{m-1},

which is the unique normalization matching the Gaussian-average definition
H_m(x) = E[(x + i*G)^m] for standard Gaussian G, with orthogonality
E[H_j H_k] = j! delta_{jk}.  The physicists' convention is deliberately not
exposed anywhere in the API.

Two coefficient containers are provided: PolySeries (monomial basis) and
HermiteSeries (Hermite basis).  Smoothing a polynomial against a Gaussian in
the imaginary direction, g~(x) = E[g(x + i*G)], turns monomial coefficients
into Hermite coefficients verbatim, so the two containers share their raw
storage layout and conversion between the bases is an exact triangular map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache as _lru_cache
from typing import Union

import numpy as np
from numpy.polynomial import hermite_e as _herme
from numpy.polynomial import polynomial as _poly

from .quadrature import QuadratureRule, integrate_entire

_MEHLER_RADIUS_SLACK = 1e-12


def hermite_eval(ell: int, x: complex | np.ndarray) -> complex | np.ndarray:
    """H_ell(x) by the three-term recurrence; x may be complex or an array."""
    if ell < 0:
        raise ValueError("Hermite degree must be nonnegative")
    x = np.asarray(x)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for m in range(ell):
        prev, cur = cur, x * cur - m * prev
    return cur if cur.ndim else cur[()]


def hermite_scaled_eval(ell: int, x: np.ndarray, sigma: complex) -> np.ndarray:
    """h_ell(x; sigma) = sigma^{ell/2} H_ell(x / sqrt(sigma)), branch-free.

    Evaluated through the recurrence h_{m+1} = x*h_m - m*sigma*h_{m-1}, which
    is a polynomial in (x, sigma): no square root is ever taken, so
    sigma = 0 (or any complex sigma) is regular.
    """
    if ell < 0:
        raise ValueError("Hermite degree must be nonnegative")
    x = np.asarray(x)
    prev = np.zeros_like(x, dtype=complex)
    cur = np.ones_like(x, dtype=complex)
    for m in range(ell):
        prev, cur = cur, x * cur - m * sigma * prev
    return cur


def hermite_scaled_sum(coeffs: np.ndarray, x: np.ndarray, sigma: complex) -> np.ndarray:
    """sum_ell c_ell h_ell(x; sigma), sharing one pass of the scaled recurrence."""
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for m, c in enumerate(coeffs):
        if c != 0:
            out = out + c * cur
        prev, cur = cur, x * cur - m * sigma * prev
    return out


def _as_coeff_array(coeffs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficient list must be one-dimensional and nonempty")
    return arr


@dataclass(frozen=True)
class PolySeries:
    """Complex polynomial in the monomial basis: sum_ell coeffs[ell] * x^ell."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return _poly.polyval(np.asarray(x, dtype=complex), self.coeffs)


@dataclass(frozen=True)
class HermiteSeries:
    """Complex series in the probabilists' Hermite basis: sum_ell coeffs[ell] * H_ell."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return _herme.hermeval(np.asarray(x, dtype=complex), self.coeffs)


Series = Union[PolySeries, HermiteSeries]


@_lru_cache(maxsize=None)
def _conversion_matrix(size: int, to_hermite: bool) -> np.ndarray:
    """Exact integer change-of-basis matrix, held in extended precision.

    x^n = sum_j n! / ((n-2j)! j! 2^j) H_{n-2j} and H_n carries the same
    coefficients with alternating sign, so both matrices are integer; they
    are applied in longdouble to keep the round trip at the 1e-14 level
    through degree ~20.
    """
    mat = np.zeros((size, size), dtype=np.longdouble)
    for n in range(size):
        for j in range(n // 2 + 1):
            coeff = math.factorial(n) // (math.factorial(n - 2 * j) * math.factorial(j) * 2**j)
            mat[n - 2 * j, n] = coeff if to_hermite else coeff * (-1) ** j
    return mat


def _apply_conversion(coeffs: np.ndarray, to_hermite: bool) -> np.ndarray:
    mat = _conversion_matrix(coeffs.size, to_hermite)
    real = mat @ coeffs.real.astype(np.longdouble)
    imag = mat @ coeffs.imag.astype(np.longdouble)
    return real.astype(float) + 1j * imag.astype(float)


def basis_convert(series: Series, direction: str | None = None) -> Series:
    """Exact change of basis between monomial and Hermite coefficients.

    direction is 'monomial_to_hermite' or 'hermite_to_monomial'; when omitted
    it is inferred from the input type.  The round trip is the identity.
    """
    if direction is None:
        direction = (
            "monomial_to_hermite" if isinstance(series, PolySeries) else "hermite_to_monomial"
        )
    if direction == "monomial_to_hermite":
        if not isinstance(series, PolySeries):
            raise ValueError("monomial_to_hermite expects a PolySeries")
        return HermiteSeries(_apply_conversion(series.coeffs, True))
    if direction == "hermite_to_monomial":
        if not isinstance(series, HermiteSeries):
            raise ValueError("hermite_to_monomial expects a HermiteSeries")
        return PolySeries(_apply_conversion(series.coeffs, False))
    raise ValueError(f"unknown conversion direction: {direction!r}")


def gaussian_smooth(g: PolySeries) -> HermiteSeries:
    """g~(x) = E[g(x + i*G)]: monomial coefficients become Hermite coefficients.

    Term by term, E[(x + i*G)^ell] = H_ell(x), so the coefficient table is
    reused unchanged.
    """
    return HermiteSeries(g.coeffs.copy())


def mehler_apply_series(w: complex, gt: HermiteSeries) -> HermiteSeries:
    """Mehler semigroup on coefficients: a_ell -> w^ell a_ell, for |w| <= 1."""
    w = complex(w)
    if abs(w) > 1.0 + _MEHLER_RADIUS_SLACK:
        raise ValueError(f"Mehler parameter must satisfy |w| <= 1, got |w| = {abs(w)}")
    powers = w ** np.arange(gt.coeffs.size)
    return HermiteSeries(gt.coeffs * powers)


def mehler_kernel_check(
    w: complex, gt: HermiteSeries, x: complex, rule: QuadratureRule
) -> tuple[complex, complex]:
    """(series value, kernel-integral value) of the Mehler action at x.

    The kernel form is int g~(y) exp(-(x*w - y)^2 / (2*(1-w^2))) dy
    normalized by sqrt(2*pi*(1-w^2)); it converges for |w| < 1 and is
    evaluated by recentred quadrature with the complex-variance Gaussian.
    The caller asserts agreement of the two returned values.
    """
    w = complex(w)
    if w * w == 1.0:
        raise ValueError("kernel form is singular at w^2 = 1; use the series form")
    series_val = complex(mehler_apply_series(w, gt)(x))
    a = 1.0 / (2.0 * (1.0 - w * w))
    b = 2.0 * a * x * w
    integral = integrate_entire(gt, a, b, rule)
    kernel_val = np.exp(-a * (x * w) ** 2) / np.sqrt(2.0 * np.pi * (1.0 - w * w)) * integral
    return series_val, complex(kernel_val)


def mehler_fourier_check(
    w: complex, h: HermiteSeries, x: float, rule: QuadratureRule
) -> tuple[complex, complex]:
    """Mehler action versus its Fourier-transform expression.

    With the transform convention fhat(xi) = int f(y) exp(-2*pi*i*xi*y) dy,
    the Mehler image satisfies

        M_w h(x) = exp(-x^2 w^2 / (2(1-w^2))) / sqrt(2*pi*(1-w^2))
                   * (h * exp(-y^2/(2(1-w^2))))^hat ( -x*w / (2*pi*i*(1-w^2)) ).

    The left value is the coefficient-map series; the right value evaluates
    the transform at the complex frequency by Gaussian-damped quadrature.
    """
    w = complex(w)
    if w * w == 1.0:
        raise ValueError("Fourier form is singular at w^2 = 1")
    lhs = complex(mehler_apply_series(w, h)(x))
    one_minus = 1.0 - w * w
    freq = -x * w / (2.0j * np.pi * one_minus)
    damped_transform = integrate_entire(h, 1.0 / (2.0 * one_minus), -2.0j * np.pi * freq, rule)
    rhs = np.exp(-(x**2) * w * w / (2.0 * one_minus)) / np.sqrt(2.0 * np.pi * one_minus)
    return lhs, complex(rhs * damped_transform)


def heat_poly_series(s: complex, h: PolySeries) -> PolySeries:
    """Heat flow at complex time s on a polynomial, as a polynomial.

    P_s(x^m) = E[(x + sqrt(s)*G)^m] expands through Gaussian moments
    (odd vanish, E G^{2j} = (2j-1)!!), giving

        P_s(x^m) = sum_j  binom(m, 2j) (2j-1)!! s^j x^{m-2j},

    a polynomial in s: no square-root branch is ever exercised.
    """
    s = complex(s)
    src = h.coeffs
    out = np.zeros_like(src)
    for m in range(src.size):
        c = src[m]
        if c == 0:
            continue
        sj = 1.0 + 0.0j
        for j in range(m // 2 + 1):
            out[m - 2 * j] += c * math.comb(m, 2 * j) * _double_factorial_odd(j) * sj
            sj *= s
    return PolySeries(out)


def _double_factorial_odd(j: int) -> int:
    """(2j-1)!! with the empty-product convention (j=0 -> 1)."""
    val = 1
    for i in range(1, j + 1):
        val *= 2 * i - 1
    return val


def heat_poly(s: complex, h: PolySeries, x: complex | np.ndarray):
    """P_s h (x) for complex time s and complex point x."""
    return heat_poly_series(s, h)(x)


def heat_quadrature(s: float, f, x: float, rule: QuadratureRule) -> complex:
    """P_s f (x) for real s > 0 by the substitution t = x + sqrt(s) u.

    Only the real-time numeric path lives here; complex times go through
    heat_poly.
    """
    if not (np.isreal(s) and float(np.real(s)) > 0.0):
        raise ValueError(f"heat_quadrature requires real s > 0, got {s}")
    s = float(np.real(s))
    vals = f(x + np.sqrt(s) * rule.nodes)
    return complex(np.dot(rule.weights, vals))


def gaussian_rotation_check(
    p: PolySeries, z1: complex, z2: complex, rule: QuadratureRule
) -> tuple[complex, complex]:
    """Two evaluations of E_u E_v P(z1*u + z2*v) that must agree.

    Left: double quadrature over independent Gaussians (exact when the rule
    covers deg P).  Right: moment expansion of E P(x*sqrt(z1^2+z2^2)), where
    only integer powers of z1^2 + z2^2 appear, so no square-root branch is
    involved; this equals the heat flow of P at time z1^2+z2^2 evaluated
    at 0.
    """
    u = rule.nodes[:, None]
    v = rule.nodes[None, :]
    grid = p(z1 * u + z2 * v)
    lhs = complex(rule.weights @ grid @ rule.weights)
    rhs = complex(heat_poly(z1 * z1 + z2 * z2, p, 0.0))
    return lhs, rhs

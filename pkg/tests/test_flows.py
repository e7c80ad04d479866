"""Discrete flow, the three continuous evaluators, and convergence."""
import math

import numpy as np
import pytest

from hypflow.cube import BlockCounts, SymmetricSpec, apply_Tzk
from hypflow.errors import EvaluatorMismatchError
from hypflow.flows import (
    convergence_experiment,
    discrete_flow,
    janson_flow,
    janson_heat,
    janson_mehler,
    janson_quadrature,
    mixed_moment_check,
)
from hypflow.hermite import HermiteSeries, PolySeries, gaussian_smooth
from hypflow.two_point import ExponentTriple, SearchBudget, extremal_ratio


def test_discrete_flow_constant_is_flat():
    t = ExponentTriple(1.5, 3.0, 0.3 + 0.4j)
    rep = discrete_flow(SymmetricSpec(n=5, a=[2.0 - 1.0j]), t)
    expected = abs(2.0 - 1.0j) ** 1.5
    assert all(abs(v - expected) <= 1e-13 for v in rep.values)
    assert rep.verdict().nondecreasing


def test_discrete_flow_endpoints():
    rng = np.random.default_rng(12)
    spec = SymmetricSpec(n=6, a=rng.normal(size=3) + 1j * rng.normal(size=3))
    t = ExponentTriple(1.8, 3.4, 0.45)
    rep = discrete_flow(spec, t)
    cube = spec.materialize()
    values = cube.values()
    # value(n) = E|f|^p
    assert abs(rep.values[-1] - np.mean(np.abs(values) ** t.p)) <= 1e-12
    # value(0) = (E|T_z f|^q)^{p/q}
    damped = apply_Tzk(cube, t.z, 0).values()
    want = np.mean(np.abs(damped) ** t.q) ** (t.p / t.q)
    assert abs(rep.values[0] - want) <= 1e-12


def test_discrete_flow_backends_agree_and_are_monotone():
    t = ExponentTriple(2.0, 4.0, 0.5)
    spec = SymmetricSpec(n=6, a=[0.0, 1.0, 1.0])
    collapsed = discrete_flow(spec, t)
    naive = discrete_flow(spec, t, backend="naive")
    assert collapsed.verdict().nondecreasing
    for a, b in zip(collapsed.values, naive.values):
        assert abs(a - b) <= 1e-12 * max(1.0, a)


def test_discrete_flow_validation():
    spec = SymmetricSpec(n=4, a=[1.0])
    with pytest.raises(ValueError):
        discrete_flow(spec, ExponentTriple(3.0, 2.0, 0.5))  # p > q
    with pytest.raises(ValueError):
        discrete_flow(spec, ExponentTriple(1.5, 2.0, 0.5), ks=[5])
    cube = spec.materialize()
    with pytest.raises(ValueError):
        discrete_flow(cube, ExponentTriple(1.5, 2.0, 0.5), backend="collapsed")


def test_janson_constant_input():
    t = ExponentTriple(1.5, 3.0, 0.6j)
    g = PolySeries([1.5 - 0.5j])
    for s in [0.0, 0.4, 1.0]:
        want = abs(1.5 - 0.5j) ** 1.5
        assert abs(janson_quadrature(g, t, s) - want) <= 1e-10
        assert abs(janson_mehler(g, t, s) - want) <= 1e-10


def test_janson_endpoints_reduce_to_gaussian_norms():
    # coefficients chosen so |g~| stays away from zero on the real line:
    # |.|^p is then smooth and a fixed dense rule is a trustworthy oracle
    g = PolySeries([2.0 + 1.0j, 1.0, 0.5 + 1.0j, 0.25j])
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    gt = gaussian_smooth(g)
    from hypflow.quadrature import gh_rule

    rule = gh_rule(256)
    assert np.min(np.abs(gt(rule.nodes))) > 0.5
    # s = 1: E |g~|^p
    want1 = rule.integrate(lambda u: np.abs(gt(u)) ** p).real
    assert abs(janson_mehler(g, t, 1.0) - want1) <= 1e-8 * want1
    # s = 0: (E |M_z g~|^q)^{p/q}
    from hypflow.hermite import mehler_apply_series

    damped = mehler_apply_series(t.z, gt)
    want0 = rule.integrate(lambda x: np.abs(damped(x)) ** t.q).real ** (p / t.q)
    assert abs(janson_mehler(g, t, 0.0) - want0) <= 1e-8 * want0


def test_three_evaluators_agree_spec_example():
    g = PolySeries([1.0, 2.0, 0.0, 1.0])
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    a = janson_quadrature(g, t, 0.37)
    b = janson_mehler(g, t, 0.37)
    c = janson_heat(gaussian_smooth(g), t, 0.37)
    assert abs(a - b) <= 1e-7 * abs(a)
    assert abs(b - c) <= 1e-7 * abs(b)


def test_janson_heat_matches_mehler_spec_points():
    gt = HermiteSeries([1.0, 1.0])
    p = 1.5
    t = ExponentTriple(p, 3.0, 1j * math.sqrt(p - 1))
    for s in [0.25, 0.5, 0.75]:
        heat_val = janson_heat(gt, t, s)
        mehler_val = janson_mehler(PolySeries(gt.coeffs), t, s)
        assert abs(heat_val - mehler_val) <= 1e-7 * abs(mehler_val)


def test_janson_heat_real_damping():
    rng = np.random.default_rng(14)
    gt = HermiteSeries(rng.normal(size=4) + 1j * rng.normal(size=4))
    t = ExponentTriple(2.0, 2.0, 0.5)
    for s in [0.3, 0.8]:
        heat_val = janson_heat(gt, t, s)
        quad_val = janson_quadrature(PolySeries(gt.coeffs), t, s)
        assert abs(heat_val - quad_val) <= 1e-7 * abs(quad_val)


def test_scaled_hermite_inner_evaluator_is_regular_at_sigma_zero():
    # sigma = s + (1-s) z^2 = 0 at z = i sqrt(s/(1-s)): nothing blows up
    s = 0.5
    t = ExponentTriple(1.5, 3.0, 1j * math.sqrt(s / (1 - s)))
    g = PolySeries([0.0, 0.0, 1.0])
    val = janson_mehler(g, t, s)
    assert np.isfinite(val) and val > 0
    ref = janson_quadrature(g, t, s)
    assert abs(val - ref) <= 1e-7 * abs(ref)


def test_janson_flow_report_and_mismatch_error():
    g = PolySeries([1.0, 2.0, 0.0, 1.0])
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    rep = janson_flow(g, t, s_grid=np.linspace(0, 1, 9))
    assert rep.verdict().nondecreasing
    assert rep.min_delta() > -1e-9
    # an impossible tolerance must surface as a mismatch error, not a report
    with pytest.raises(EvaluatorMismatchError):
        janson_flow(g, t, s_grid=[0.0, 0.5, 1.0], spot_tol=1e-18)


def test_mixed_moment_check_low_degrees():
    counts = BlockCounts(k=16, a=9, b=12)
    lhs, rhs, diff = mixed_moment_check(counts, 16, 40, 0.3 + 0.2j, 0)
    assert abs(lhs - 1.0) <= 1e-13 and rhs == 1.0 and diff <= 1e-13
    _, _, diff1 = mixed_moment_check(counts, 16, 40, 0.3 + 0.2j, 1)
    assert diff1 <= 1e-13


def test_mixed_moment_check_explicit_point():
    rng = np.random.default_rng(15)
    n, k = 12, 5
    x = rng.choice([-1, 1], size=n)
    counts = BlockCounts(k=k, a=int(np.sum(x[:k] == 1)), b=int(np.sum(x[k:] == 1)))
    via_point = mixed_moment_check(x, k, n, 0.4, 3)
    via_counts = mixed_moment_check(counts, k, n, 0.4, 3)
    assert via_point == via_counts


def test_mixed_moment_rate_balanced_case():
    # balanced counts, L = 4, k = n/2: the gap is exactly 2 |1 + z^4| / n
    z = 0.6
    for n in [256, 1024, 4096]:
        k = n // 2
        counts = BlockCounts(k=k, a=k // 2, b=(n - k) // 2)
        _, _, diff = mixed_moment_check(counts, k, n, z, 4)
        want = 2.0 * abs(1.0 + z**4) / n
        assert abs(diff - want) <= 1e-8 * want
    # the sqrt(n)-normalized constant therefore halves per 4x in n
    consts = []
    for n in [256, 1024, 4096]:
        k = n // 2
        counts = BlockCounts(k=k, a=k // 2, b=(n - k) // 2)
        _, _, diff = mixed_moment_check(counts, k, n, z, 4)
        consts.append(diff * math.sqrt(n))
    for c_prev, c_next in zip(consts, consts[1:]):
        assert 1.9 <= c_prev / c_next <= 2.1


def test_convergence_constant_coefficients():
    t = ExponentTriple(1.5, 3.0, 0.4)
    table = convergence_experiment([2.0], t, 0.5, [8, 16, 32])
    assert all(r.abs_error <= 1e-12 for r in table.rows)
    assert table.slope is None  # everything at the noise floor


def test_convergence_endpoint_s_one():
    # at s = 1 both sides are plain p-th moments and converge together
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    table = convergence_experiment([0.0, 1.0, 0.5], t, 1.0, [16, 64, 256])
    errs = [r.abs_error for r in table.rows]
    assert errs[0] > errs[-1]
    assert all(r.k == r.n for r in table.rows)


def test_convergence_spec_experiment_slope():
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    table = convergence_experiment([0.0, 1.0, 0.0, 1.0], t, 0.5, [64, 256, 1024])
    errs = [r.abs_error for r in table.rows]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert table.slope is not None and table.slope <= -0.4


def test_discrete_monotone_under_two_point_precondition():
    rng = np.random.default_rng(16)
    done = 0
    while done < 5:
        p = float(rng.uniform(1.2, 2.5))
        q = float(rng.uniform(p, 4.0))
        radius = 0.8 * math.sqrt((p - 1) / (q - 1)) if q > 1 else 0.5
        z = radius * complex(rng.normal(), rng.normal())
        z /= max(1.0, abs(z) / radius)
        t = ExponentTriple(p, q, z)
        if extremal_ratio(t, SearchBudget.reduced()).sup_ratio > 1.0 + 1e-9:
            continue
        spec = SymmetricSpec(n=10, a=rng.normal(size=3) + 1j * rng.normal(size=3))
        rep = discrete_flow(spec, t)
        assert rep.verdict().nondecreasing, (p, q, z)
        done += 1

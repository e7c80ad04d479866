"""Two-point inequality margins, extremal search, and region scans."""
import math

import numpy as np
import pytest

from hypflow.two_point import (
    ExponentTriple,
    SearchBudget,
    disk_grid,
    extremal_ratio,
    infinitesimal_margin,
    infinitesimal_margin_min,
    real_failure_threshold,
    region_scan,
    two_point_margin,
)


def test_exponent_triple_validation():
    with pytest.raises(ValueError):
        ExponentTriple(0.5, 2.0, 0.1)
    with pytest.raises(ValueError):
        ExponentTriple(2.0, 2.0, 1.2)
    # p > q is constructible (the quadratic form is defined either way) but
    # rejected by the flow-side operations
    t = ExponentTriple(3.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        t.require_ordered()


def test_two_point_margin_examples():
    r = two_point_margin(3.0 - 1.0j, 0.0, ExponentTriple(1.5, 2.5, 0.3 + 0.2j))
    assert abs(r.lhs - abs(3.0 - 1.0j)) <= 1e-14
    assert abs(r.margin) <= 1e-14
    r = two_point_margin(1.0, 1.0, ExponentTriple(2.0, 2.0, 1j))
    assert abs(r.lhs - math.sqrt(2)) <= 1e-14
    assert abs(r.rhs - math.sqrt(2)) <= 1e-14
    r = two_point_margin(1.0, 1.0, ExponentTriple(2.0, 4.0, 0.5))
    assert abs(r.lhs - 2.5625**0.25) <= 1e-14
    assert abs(r.rhs - math.sqrt(2)) <= 1e-14
    assert r.margin > 0


def test_infinitesimal_margin_examples():
    assert infinitesimal_margin(0.0, ExponentTriple(1.5, 3.0, 0.4)).margin == 0.0
    for w in [1.0, 0.3 - 0.8j, 1j]:
        r = infinitesimal_margin(w, ExponentTriple(2.5, 2.5, 1.0))
        assert abs(r.margin) <= 1e-14
    r = infinitesimal_margin(1.0, ExponentTriple(3.0, 2.0, 1j))
    assert r.rhs == 2.0 and r.lhs == 1.0 and r.margin == 1.0


def test_margin_scale_and_phase_invariance():
    rng = np.random.default_rng(9)
    t = ExponentTriple(1.7, 3.3, 0.4 - 0.5j)
    for _ in range(20):
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        lam = complex(rng.normal(), rng.normal())
        if abs(lam) < 1e-3:
            continue
        base = two_point_margin(a, b, t)
        scaled = two_point_margin(lam * a, lam * b, t)
        assert abs(scaled.lhs - abs(lam) * base.lhs) <= 1e-12 * max(1.0, abs(lam) * base.lhs)
        assert abs(scaled.rhs - abs(lam) * base.rhs) <= 1e-12 * max(1.0, abs(lam) * base.rhs)


def test_margin_symmetries():
    rng = np.random.default_rng(10)
    for _ in range(20):
        p, q = sorted(rng.uniform(1.0, 4.0, size=2))
        z = complex(rng.normal(), rng.normal()) * 0.4
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        base = two_point_margin(a, b, ExponentTriple(p, q, z))
        flip_z = two_point_margin(a, b, ExponentTriple(p, q, -z))
        flip_b = two_point_margin(a, -b, ExponentTriple(p, q, z))
        conj = two_point_margin(
            np.conj(a), np.conj(b), ExponentTriple(p, q, np.conj(z))
        )
        for other in (flip_z, flip_b, conj):
            assert abs(base.margin - other.margin) <= 1e-12 * max(1.0, abs(base.margin))


def test_extremal_ratio_z_zero():
    res = extremal_ratio(ExponentTriple(2.0, 4.0, 0.0))
    assert abs(res.sup_ratio - 1.0) <= 1e-12
    assert abs(res.witness_b) <= 1e-12
    assert res.complete


def test_extremal_ratio_identity_case():
    res = extremal_ratio(ExponentTriple(2.0, 2.0, 1.0))
    assert abs(res.sup_ratio - 1.0) <= 1e-12


def test_extremal_ratio_finds_classical_failure():
    res = extremal_ratio(ExponentTriple(2.0, 4.0, 0.62))
    assert res.sup_ratio > 1.0 + 1e-4
    # and the witness really achieves that ratio
    from hypflow.two_point import two_point_margin as tp

    rec = tp(1.0, res.witness_b, ExponentTriple(2.0, 4.0, 0.62))
    assert rec.lhs / rec.rhs > 1.0 + 1e-4


def test_extremal_ratio_budget_flag():
    tiny = SearchBudget(grid_radius=8.0, grid_step=0.05, refine_tol=1e-6, max_evals=100)
    res = extremal_ratio(ExponentTriple(2.0, 4.0, 0.3), tiny)
    assert not res.complete


def test_real_failure_threshold_classical_value():
    th = real_failure_threshold(2.0, 4.0, z_tol=2e-3)
    assert 0.567 <= th <= 0.587  # 1/sqrt(3) = 0.5774 classically


def test_region_scan():
    rows = region_scan(2.0, 4.0, [0.0, 0.3, 0.62, 0.4j], budget=SearchBudget.reduced())
    by_z = {r.z: r for r in rows}
    assert by_z[0.0].global_holds and by_z[0.0].infinitesimal_holds
    assert by_z[0.3].global_holds
    assert not by_z[0.62].global_holds
    assert not by_z[0.62].infinitesimal_holds
    # global holds always implies the quadratic form holds
    for r in rows:
        if r.global_holds:
            assert r.infinitesimal_margin_min >= -1e-7


def test_region_scan_threads_match_serial():
    grid = [0.1, 0.5, 0.2 + 0.4j]
    serial = region_scan(2.0, 3.0, grid, budget=SearchBudget.reduced())
    threaded = region_scan(2.0, 3.0, grid, budget=SearchBudget.reduced(), threads=3)
    for a, b in zip(serial, threaded):
        assert a == b


def test_disk_grid():
    grid = disk_grid(0.25)
    assert np.all(np.abs(grid) <= 1.0 + 1e-12)
    assert any(abs(z) <= 1e-12 for z in grid)
    with pytest.raises(ValueError):
        disk_grid(0.001)


def test_global_implies_infinitesimal_on_samples():
    rng = np.random.default_rng(11)
    tested = 0
    while tested < 15:
        p = float(rng.uniform(1.0, 3.5))
        q = float(rng.uniform(p, 4.0))
        z = complex(rng.normal(), rng.normal())
        if abs(z) > 1.0:
            z /= abs(z) * rng.uniform(1.0, 2.0)
        t = ExponentTriple(p, q, z)
        res = extremal_ratio(t, SearchBudget.reduced())
        if res.sup_ratio <= 1.0 + 1e-9:
            assert infinitesimal_margin_min(t) >= -1e-7, (p, q, z)
        tested += 1

"""Invariant suites runnable from the CLI, one per module.

Each suite re-derives its module's documented invariants from scratch with
an explicitly seeded generator (default 0xC0FFEE) so a release build can be
gated on `hypflow selftest`.  Randomness is drawn through numpy's
SeedSequence.spawn, a documented splittable scheme: every suite gets an
independent stream derived from the one root seed, so adding draws to one
suite never shifts another.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube import SymmetricSpec, apply_Tzk, beckner_expand, mixed_norm, walsh_analyze
from .flows import (
    convergence_experiment,
    discrete_flow,
    janson_heat,
    janson_mehler,
    janson_quadrature,
)
from .gaussian_atoms import GaussianAtom, mehler_apply_atom
from .hausdorff_young import (
    HYInput,
    conjugate_exponent,
    gaussian_extremizer_input,
    hy_endpoints,
    lemma_A_check,
    lemma_F_check,
    phi_flow,
)
from .hermite import (
    HermiteSeries,
    PolySeries,
    basis_convert,
    gaussian_smooth,
    heat_poly,
    heat_poly_series,
    hermite_eval,
    mehler_apply_series,
)
from .quadrature import gh_rule, integrate_entire
from .two_point import (
    ExponentTriple,
    SearchBudget,
    extremal_ratio,
    infinitesimal_margin_min,
    two_point_margin,
)

DEFAULT_SEED = 0xC0FFEE


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    worst: float
    failures: list[str] = field(default_factory=list)


class _Recorder:
    def __init__(self, name: str):
        self.result = SuiteResult(name=name, passed=True, checks=0, worst=0.0)

    def check(self, label: str, error: float, tol: float) -> None:
        self.result.checks += 1
        self.result.worst = max(self.result.worst, error / tol if tol else error)
        if not error <= tol:
            self.result.passed = False
            self.result.failures.append(f"{label}: error {error:.3e} > tol {tol:.1e}")

    def require(self, label: str, condition: bool) -> None:
        self.result.checks += 1
        if not condition:
            self.result.passed = False
            self.result.failures.append(label)


def _suite_gauss_hermite(rng: np.random.Generator, quick: bool) -> SuiteResult:
    rec = _Recorder("gauss_hermite")
    for n in (1, 2, 3, 8, 20):
        rule = gh_rule(n)
        for m in range(2 * n):
            exact = 0.0
            if m % 2 == 0:
                exact = 1.0
                for i in range(1, m, 2):
                    exact *= i  # (m-1)!! in float: int64 overflows past m = 34
            got = rule.integrate(lambda x, m=m: _pow(x, m))
            rec.check(f"moment N={n} m={m}", abs(got - exact), 1e-12 * max(1.0, exact))
    rule = gh_rule(16)
    for j in range(8):
        for k in range(8):
            got = rule.integrate(lambda x: hermite_eval(j, x) * hermite_eval(k, x))
            exact = math.factorial(j) if j == k else 0.0
            rec.check(f"orthogonality {j},{k}", abs(got - exact), 1e-10 * max(1.0, exact))
    coeffs = rng.normal(size=7) + 1j * rng.normal(size=7)
    w1 = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
    w2 = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
    lhs = mehler_apply_series(w1, mehler_apply_series(w2, HermiteSeries(coeffs))).coeffs
    rhs = mehler_apply_series(w1 * w2, HermiteSeries(coeffs)).coeffs
    rec.check("mehler semigroup", float(np.max(np.abs(lhs - rhs))), 1e-13 * float(np.max(np.abs(rhs)) + 1))
    s1 = complex(rng.normal(), rng.normal())
    s2 = complex(rng.normal(), rng.normal())
    poly = PolySeries(rng.normal(size=9) + 1j * rng.normal(size=9))
    twice = heat_poly_series(s1, heat_poly_series(s2, poly)).coeffs
    direct = heat_poly_series(s1 + s2, poly).coeffs
    rec.check("heat semigroup", float(np.max(np.abs(twice - direct))), 1e-12 * float(np.max(np.abs(direct)) + 1))
    for _ in range(20):
        m = int(rng.integers(0, 9))
        x = complex(rng.normal(), rng.normal())
        mono = PolySeries([0.0] * m + [1.0])
        want = hermite_eval(m, x)
        rec.check("heat(-1) = hermite", abs(heat_poly(-1.0, mono, x) - want), 1e-11 * max(1.0, abs(want)))
    for _ in range(5):
        coeffs = rng.normal(size=13) + 1j * rng.normal(size=13)
        mid = basis_convert(PolySeries(coeffs))
        back = basis_convert(mid).coeffs
        scale = max(float(np.max(np.abs(coeffs))), float(np.max(np.abs(mid.coeffs))))
        rec.check("basis round trip", float(np.max(np.abs(back - coeffs))), 1e-12 * scale)
    rule = gh_rule(192)
    done = 0
    while done < (10 if quick else 50):
        w = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7))
        atom = GaussianAtom(
            complex(rng.normal(), rng.normal()),
            complex(rng.uniform(0.1, 1.5), rng.uniform(-0.4, 0.4)),
            complex(rng.normal(), rng.normal()),
        )
        x = 0.8 * complex(rng.normal(), rng.normal())
        s_k = 1.0 / (2.0 * (1.0 - w * w))
        if (atom.quad + s_k).real <= 1e-3:
            continue
        closed = mehler_apply_atom(w, atom, x)
        integral = integrate_entire(atom, s_k, 2.0 * s_k * x * w, rule)
        oracle = np.exp(-s_k * (x * w) ** 2) / np.sqrt(2 * np.pi * (1 - w * w)) * integral
        rec.check("atom mehler vs quadrature", abs(closed - oracle), 1e-9 * max(1.0, abs(oracle)))
        done += 1
    return rec.result


def _pow(x: np.ndarray, m: int) -> np.ndarray:
    out = np.ones_like(x)
    for _ in range(m):
        out = out * x
    return out


def _suite_cube_walsh(rng: np.random.Generator, quick: bool) -> SuiteResult:
    rec = _Recorder("cube_walsh")
    values = rng.normal(size=512) + 1j * rng.normal(size=512)
    f = walsh_analyze(values)
    rec.check("walsh round trip", float(np.max(np.abs(f.values() - values))), 1e-13 * float(np.max(np.abs(values))))
    energy = float(np.mean(np.abs(values) ** 2))
    rec.check("parseval", abs(energy - float(np.sum(np.abs(f.coeffs) ** 2))), 1e-12 * energy)
    from .cube import BlockCounts, mixed_norm_collapsed, phi_block_eval, symmetric_tzk_table

    for _ in range(10 if quick else 50):
        n = int(rng.integers(3, 13))
        ell = int(rng.integers(1, 5))
        k = int(rng.integers(0, n + 1))
        z = 0.5 * complex(rng.normal(), rng.normal())
        spec = SymmetricSpec(n=n, a=[0.0] * ell + [1.0])
        damped = apply_Tzk(spec.materialize(), z, k).values()
        mask = int(rng.integers(0, 1 << n))
        x = np.array([-1 if mask >> j & 1 else 1 for j in range(n)])
        counts = BlockCounts(k=k, a=int(np.sum(x[:k] == 1)), b=int(np.sum(x[k:] == 1)))
        want = phi_block_eval(ell, n, counts, z)
        rec.check("damped symmetric identity", abs(damped[mask] - want), 1e-12 * max(1.0, abs(want)))
    for n in (4, 9, 12):
        spec = SymmetricSpec(n=n, a=rng.normal(size=4) + 1j * rng.normal(size=4))
        cube = spec.materialize()
        z = 0.5 * complex(rng.normal(), rng.normal())
        for k in range(n + 1):
            naive = mixed_norm(apply_Tzk(cube, z, k).values(), k, 1.5, 4.0)
            collapsed = mixed_norm_collapsed(symmetric_tzk_table(spec, z, k), n, k, 1.5, 4.0)
            rec.check(f"collapsed backend n={n} k={k}", abs(naive - collapsed), 1e-12 * max(1.0, naive))
    for ell in range(1, 7):
        products = []
        for n in (8, 16, 32, 64):
            exp_ = beckner_expand(n, ell)
            rec.check(f"beckner residual n={n} l={ell}", exp_.max_residual, 1e-11)
            rec.check(f"beckner top n={n} l={ell}", abs(exp_.coeffs[ell] - 1.0), 1e-11)
            wrong = max((abs(exp_.coeffs[m]) for m in range(ell + 1) if (ell - m) % 2), default=0.0)
            rec.check(f"beckner parity n={n} l={ell}", float(wrong), 1e-11)
            low = max((abs(exp_.coeffs[m]) for m in range(ell)), default=0.0)
            products.append(n * float(low))
        for first, second in zip(products, products[1:]):
            # low degrees have exactly-zero corrections; noise there is fine
            rec.require(f"beckner bounded l={ell}", second <= first * (1 + 1e-9) + 1e-9)
    return rec.result


def _disk_draw(rng: np.random.Generator, radius: float) -> complex:
    return radius * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


def _suite_two_point(rng: np.random.Generator, quick: bool) -> SuiteResult:
    rec = _Recorder("two_point")
    for _ in range(20):
        p, q = sorted(rng.uniform(1.0, 4.0, size=2))
        z = _disk_draw(rng, 0.9)
        t = ExponentTriple(p, q, z)
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        lam = complex(rng.normal(), rng.normal())
        if abs(lam) < 1e-3:
            continue
        base = two_point_margin(a, b, t)
        scaled = two_point_margin(lam * a, lam * b, t)
        rec.check("scale invariance", abs(scaled.lhs - abs(lam) * base.lhs), 1e-12 * max(1.0, abs(lam) * base.lhs))
        sym = two_point_margin(np.conj(a), np.conj(b), ExponentTriple(p, q, np.conj(z)))
        rec.check("conjugation symmetry", abs(base.margin - sym.margin), 1e-12 * max(1.0, abs(base.margin)))
        flip = two_point_margin(a, -b, ExponentTriple(p, q, -z))
        rec.check("sign symmetry", abs(base.margin - flip.margin), 1e-12 * max(1.0, abs(base.margin)))
    tested = 0
    while tested < (5 if quick else 15):
        p = float(rng.uniform(1.0, 3.5))
        q = float(rng.uniform(p, 4.0))
        z = _disk_draw(rng, 1.0)
        t = ExponentTriple(p, q, z)
        if extremal_ratio(t, SearchBudget.reduced()).sup_ratio <= 1.0 + 1e-9:
            rec.require("global implies infinitesimal", infinitesimal_margin_min(t) >= -1e-7)
        tested += 1
    return rec.result


def _suite_flows(rng: np.random.Generator, quick: bool) -> SuiteResult:
    rec = _Recorder("flows")
    for _ in range(6 if quick else 30):
        deg = int(rng.integers(0, 9))
        g = PolySeries(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        p = float(rng.uniform(1.0, 4.0))
        q = float(rng.uniform(p, 4.0))
        z = _disk_draw(rng, 0.95)
        s = float(rng.uniform(0.05, 0.95))
        t = ExponentTriple(p, q, z)
        a = janson_quadrature(g, t, s)
        b = janson_mehler(g, t, s)
        c = janson_heat(gaussian_smooth(g), t, s)
        rec.check("evaluator quad vs mehler", abs(a - b), 1e-6 * max(abs(a), 1e-30))
        rec.check("evaluator mehler vs heat", abs(b - c), 1e-6 * max(abs(b), 1e-30))
    done = 0
    while done < (2 if quick else 5):
        p = float(rng.uniform(1.2, 2.5))
        q = float(rng.uniform(p, 4.0))
        radius = 0.8 * math.sqrt((p - 1) / max(q - 1, 1e-9))
        z = _disk_draw(rng, radius)
        t = ExponentTriple(p, q, z)
        if extremal_ratio(t, SearchBudget.reduced()).sup_ratio > 1.0 + 1e-9:
            continue
        spec = SymmetricSpec(n=10, a=rng.normal(size=3) + 1j * rng.normal(size=3))
        rep = discrete_flow(spec, t)
        rec.require("discrete flow monotone under precondition", rep.verdict().nondecreasing)
        naive = discrete_flow(spec, t, backend="naive")
        worst = max(abs(x - y) for x, y in zip(rep.values, naive.values))
        rec.check("collapsed vs naive flow", worst, 1e-12 * max(1.0, max(rep.values)))
        done += 1
    p = 4 / 3
    t = ExponentTriple(p, 4.0, 1j * math.sqrt(p - 1))
    table = convergence_experiment([0.0, 1.0, 0.0, 1.0], t, 0.5, [64, 256, 1024])
    errs = [r.abs_error for r in table.rows]
    rec.require("endpoint bridge shrinks", all(x > y for x, y in zip(errs, errs[1:])))
    rec.require("convergence slope", table.slope is not None and table.slope <= -0.4)
    return rec.result


def _suite_hausdorff_young(rng: np.random.Generator, quick: bool) -> SuiteResult:
    rec = _Recorder("hausdorff_young")
    inp = gaussian_extremizer_input(4 / 3)
    rep = phi_flow(inp, s_grid=[0.0, 0.25, 0.5, 0.75, 1.0])
    rec.check("extremizer constant flow", max(rep.values) - min(rep.values), 1e-8)
    for _ in range(5 if quick else 10):
        deg = int(rng.integers(1, 5))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        p = float(rng.uniform(1.2, 2.0))
        q = conjugate_exponent(p)
        hin = HYInput(p=p, g_tilde=HermiteSeries(coeffs))
        s = float(rng.uniform(0.0, 1.0))
        phi_val = phi_flow(hin, s_grid=[s]).values[0]
        j_val = janson_quadrature(PolySeries(coeffs), ExponentTriple(p, q, hin.z), s)
        rec.check("bridge identity", abs(phi_val**p * q ** (p / (2 * q)) / math.sqrt(p) - j_val), 1e-7 * max(abs(j_val), 1e-30))
    for p in (1.01, 4 / 3, 1.5, 2.0):
        q = conjugate_exponent(p)
        rec.check("conjugacy", abs(1.0 / p + 1.0 / q - 1.0), 1e-12)
        rec.require("damping radius", abs(1j * math.sqrt(p - 1)) <= 1.0 and abs(1j * math.sqrt(p / q)) <= 1.0)
    for _ in range(10 if quick else 50):
        zeta = complex(rng.normal(), rng.normal())
        x = complex(rng.normal(), rng.normal())
        qv, cv = lemma_A_check(zeta, x)
        rec.check("tilted-exponential identity", abs(qv - cv), 1e-8 * max(1.0, abs(cv)))
        tt = 0.8 * complex(rng.normal(), rng.normal())
        pp = float(rng.uniform(1.05, 2.0))
        lv, rv = lemma_F_check(tt, pp, float(rng.normal()))
        rec.check("modulated-gaussian transform identity", abs(lv - rv), 1e-8 * max(1.0, abs(rv)))
    lhs, rhs = hy_endpoints(gaussian_extremizer_input(1.5))
    rec.check("extremizer endpoint equality", abs(lhs - rhs), 1e-8 * rhs)
    return rec.result


_SUITES = (
    _suite_gauss_hermite,
    _suite_cube_walsh,
    _suite_two_point,
    _suite_flows,
    _suite_hausdorff_young,
)


def run_selftest(seed: int = DEFAULT_SEED, quick: bool = False) -> list[SuiteResult]:
    """Run every invariant suite; one independent child stream per suite."""
    streams = np.random.SeedSequence(seed).spawn(len(_SUITES))
    results = []
    for suite, stream in zip(_SUITES, streams):
        rng = np.random.default_rng(stream)
        results.append(suite(rng, quick))
    return results

"""Command-line entry points with reproducible CSV/JSON reporting.

Subcommands: two-point-scan, discrete-flow, janson-flow, converge, hy-flow,
hy-exp, selftest.  Every run writes CSV output plus a manifest.json into the
output directory; identical configurations (including the seed) produce
byte-identical CSV files.

Exit codes: 0 when every asserted inequality and identity held within the
configured tolerances, 2 when a violation was detected (the witness lands in
the manifest), 1 for usage or configuration errors.

All randomness flows from the single 64-bit --seed through numpy's
SeedSequence spawning, so counterexample witnesses are reproducible; the
env var HYPFLOW_THREADS caps scan parallelism (default 1).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .cube import SymmetricSpec
from .errors import HypflowError, InequalityViolationError
from .flows import convergence_experiment, discrete_flow, janson_flow
from .hausdorff_young import (
    ExpFamily,
    HYInput,
    conjugate_exponent,
    exp_flow_phi,
    gaussian_extremizer_input,
    hy_endpoints,
    hy_verify,
    phi_flow,
    sharp_constant,
)
from .hermite import HermiteSeries, PolySeries
from .reporting import (
    FlowReport,
    write_convergence_csv,
    write_flow_csv,
    write_manifest,
    write_region_csv,
)
from .selftest import DEFAULT_SEED, run_selftest
from .two_point import ExponentTriple, SearchBudget, disk_grid, region_scan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


@dataclass
class RunConfig:
    """Fully serializable description of one run."""

    command: str
    params: dict[str, Any]
    out: str = "."
    seed: int = DEFAULT_SEED
    nodes: int | None = None
    tol: float | None = None

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _parse_complex_list(text: str) -> list[complex]:
    return [complex(part.strip().replace(" ", "")) for part in text.split(",") if part.strip()]


def _parse_atoms(text: str) -> list[tuple[complex, complex]]:
    atoms = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        c_str, _, t_str = chunk.partition(":")
        if not t_str:
            raise ValueError(f"atom {chunk!r} must look like amplitude:frequency")
        atoms.append((complex(c_str), complex(t_str)))
    return atoms


def _z_from_params(params: dict, p: float) -> complex:
    if params.get("z_re") is None and params.get("z_im") is None:
        return 1j * math.sqrt(p - 1.0)
    return complex(params.get("z_re") or 0.0, params.get("z_im") or 0.0)


def _retolerance(report: FlowReport, tol: float | None) -> FlowReport:
    """Apply a --tol override to the monotonicity verdict (tol = 0 flags noise)."""
    if tol is None:
        return report
    return FlowReport(
        parameter_name=report.parameter_name,
        samples=report.samples,
        tol_abs=tol,
        tol_rel=tol,
    )


def _monotone_verdicts(report: FlowReport) -> dict:
    verdict = report.verdict()
    return {
        "verdict": verdict.label,
        "nondecreasing": verdict.nondecreasing,
        "min_delta": report.min_delta(),
    }


def _cmd_two_point_scan(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p, q = float(params["p"]), float(params["q"])
    resolution = float(params.get("resolution", 0.05))
    budget = SearchBudget.reduced() if params.get("budget", "reduced") == "reduced" else SearchBudget()
    threads = int(os.environ.get("HYPFLOW_THREADS", "1"))
    rows = region_scan(p, q, disk_grid(resolution), budget=budget, threads=threads)
    write_region_csv(rows, out / "scan.csv")
    bad = [r for r in rows if r.global_holds and not r.infinitesimal_holds]
    manifest = {
        "grid_points": len(rows),
        "global_holds_count": sum(r.global_holds for r in rows),
        "worst_sup_ratio": max(r.sup_ratio for r in rows),
        "worst_infinitesimal_margin": min(r.infinitesimal_margin_min for r in rows),
        "implication_violations": [
            {"z": r.z, "sup_ratio": r.sup_ratio, "margin": r.infinitesimal_margin_min}
            for r in bad
        ],
        "verdict": "holds-on-grid" if not bad else "fails-with-witness",
    }
    return (EXIT_OK if not bad else EXIT_VIOLATION), manifest


def _cmd_discrete_flow(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p, q = float(params["p"]), float(params["q"])
    z = _z_from_params(params, p)
    n = int(params["n"])
    spec = SymmetricSpec(n=n, a=_parse_complex_list(params["coeffs"]))
    ks = [int(k) for k in str(params["ks"]).split(",")] if params.get("ks") else None
    report = _retolerance(discrete_flow(spec, ExponentTriple(p, q, z), ks=ks), config.tol)
    write_flow_csv(report, out / "flow.csv")
    manifest = {"n": n, "p": p, "q": q, "z": z, **_monotone_verdicts(report)}
    return (EXIT_OK if report.verdict().nondecreasing else EXIT_VIOLATION), manifest


def _cmd_janson_flow(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p = float(params["p"])
    q = float(params.get("q") or conjugate_exponent(p))
    z = _z_from_params(params, p)
    g = PolySeries(_parse_complex_list(params["coeffs"]))
    s_points = int(params.get("s_points", 21))
    report = _retolerance(
        janson_flow(
            g,
            ExponentTriple(p, q, z),
            s_grid=np.linspace(0.0, 1.0, s_points),
            rule=config.nodes,
        ),
        config.tol,
    )
    write_flow_csv(report, out / "flow.csv")
    manifest = {"p": p, "q": q, "z": z, **_monotone_verdicts(report)}
    return (EXIT_OK if report.verdict().nondecreasing else EXIT_VIOLATION), manifest


def _cmd_converge(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p, q = float(params["p"]), float(params["q"])
    z = _z_from_params(params, p)
    s = float(params.get("s", 0.5))
    n_list = [int(v) for v in str(params["n_list"]).split(",")]
    table = convergence_experiment(
        _parse_complex_list(params["coeffs"]), ExponentTriple(p, q, z), s, n_list, rule=config.nodes
    )
    write_convergence_csv(table, out / "convergence.csv")
    errs = [r.abs_error for r in table.rows]
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    manifest = {
        "p": p,
        "q": q,
        "z": z,
        "s": s,
        "slope": table.slope,
        "errors_strictly_decreasing": decreasing,
        "worst_error": max(errs) if errs else 0.0,
        "verdict": "converging" if decreasing else "not-decreasing",
    }
    return (EXIT_OK if decreasing else EXIT_VIOLATION), manifest


def _cmd_hy_flow(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p = float(params["p"])
    if params.get("gaussian"):
        inp = gaussian_extremizer_input(p)
    elif params.get("hermite_coeffs"):
        inp = HYInput(p=p, g_tilde=HermiteSeries(_parse_complex_list(params["hermite_coeffs"])))
    else:
        raise ValueError("hy-flow needs either gaussian=true or hermite_coeffs")
    s_points = int(params.get("s_points", 21))
    report = _retolerance(
        phi_flow(inp, s_grid=np.linspace(0.0, 1.0, s_points), rule=config.nodes), config.tol
    )
    write_flow_csv(report, out / "flow.csv")
    norm_fhat, scaled_norm = hy_endpoints(inp)
    manifest = {
        "p": p,
        "q": inp.q,
        "z": inp.z,
        "phi0": report.values[0],
        "phi1": report.values[-1],
        "constant": sharp_constant(p),
        "endpoint_norm_fhat_q": norm_fhat,
        "endpoint_scaled_norm_f_p": scaled_norm,
        **_monotone_verdicts(report),
    }
    ok = report.verdict().nondecreasing and norm_fhat <= scaled_norm + (config.tol or 1e-8)
    return (EXIT_OK if ok else EXIT_VIOLATION), manifest


def _cmd_hy_exp(config: RunConfig, out: Path) -> tuple[int, dict]:
    params = config.params
    p = float(params["p"])
    fam = ExpFamily(atoms=tuple(_parse_atoms(params["atoms"])))
    s_points = int(params.get("s_points", 21))
    report = _retolerance(
        exp_flow_phi(fam, p, s_grid=np.linspace(0.0, 1.0, s_points), rule=config.nodes),
        config.tol,
    )
    write_flow_csv(report, out / "flow.csv")
    manifest = {
        "p": p,
        "q": conjugate_exponent(p),
        "z": 1j * math.sqrt(p / conjugate_exponent(p)),
        "phi0": report.values[0],
        "phi1": report.values[-1],
        "constant": sharp_constant(p),
        "endpoint_gap": report.values[-1] - report.values[0],
        "nesting": "outer-x-inner-u",
        **_monotone_verdicts(report),
    }
    real_frequencies = all(abs(t.imag) <= 1e-12 for _, t in fam.atoms)
    ok = report.values[0] <= report.values[-1] + (config.tol or 1e-8)
    if real_frequencies and fam.atoms:
        lhs, rhs = hy_verify(fam, p, rule=config.nodes)
        manifest["final_form"] = {"lhs_norm_fhat_q": lhs, "rhs_scaled_norm_f_p": rhs}
        ok = ok and lhs <= rhs + (config.tol or 1e-8)
    manifest["verdict"] = "holds" if ok else "fails-with-witness"
    return (EXIT_OK if ok else EXIT_VIOLATION), manifest


def _cmd_selftest(config: RunConfig, out: Path) -> tuple[int, dict]:
    results = run_selftest(seed=config.seed, quick=bool(config.params.get("quick")))
    suites = {}
    all_ok = True
    for res in results:
        print(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}: {res.checks} checks")
        for failure in res.failures:
            print(f"       {failure}")
        suites[res.name] = {
            "passed": res.passed,
            "checks": res.checks,
            "worst_error_over_tol": res.worst,
            "failures": res.failures,
        }
        all_ok = all_ok and res.passed
    manifest = {"suites": suites, "verdict": "pass" if all_ok else "fail"}
    return (EXIT_OK if all_ok else EXIT_VIOLATION), manifest


_HANDLERS = {
    "two-point-scan": _cmd_two_point_scan,
    "discrete-flow": _cmd_discrete_flow,
    "janson-flow": _cmd_janson_flow,
    "converge": _cmd_converge,
    "hy-flow": _cmd_hy_flow,
    "hy-exp": _cmd_hy_exp,
    "selftest": _cmd_selftest,
}


def run_command(config: RunConfig) -> int:
    """Execute one configured run; returns the process exit code."""
    if config.command not in _HANDLERS:
        print(f"error: unknown command {config.command!r}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_USAGE
    started = time.monotonic()
    try:
        code, extra = _HANDLERS[config.command](config, out)
        witness = None
    except InequalityViolationError as exc:
        code = EXIT_VIOLATION
        extra = {"verdict": "fails-with-witness", "violation": str(exc)}
        witness = {"lhs": exc.lhs, "rhs": exc.rhs}
    except HypflowError as exc:
        code = EXIT_VIOLATION
        extra = {"verdict": "fails-with-witness", "violation": str(exc)}
        witness = None
    except (KeyError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest = {
        "command": config.command,
        "config": config.to_json(),
        "version": __version__,
        "wall_time_s": time.monotonic() - started,
        **extra,
    }
    if witness is not None:
        manifest["witness"] = witness
    try:
        write_manifest(manifest, out / "manifest.json")
    except OSError as exc:
        print(f"error: cannot write manifest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


def _common_flags(target: argparse.ArgumentParser, suppress: bool) -> None:
    # shared flags work both before and after the subcommand; the subparser
    # copies use SUPPRESS defaults so they never clobber earlier values
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    target.add_argument("--config", help="JSON file with a full RunConfig; flags override it", **kw)
    target.add_argument("--out", help="output directory (default: current directory)", **kw)
    target.add_argument("--seed", type=int, help="64-bit seed for all randomness", **kw)
    target.add_argument(
        "--nodes", type=int, help="fixed quadrature node count (default: adaptive)", **kw
    )
    target.add_argument(
        "--tol", type=float, help="override the command's violation tolerance", **kw
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypflow",
        description="Numerical flows for complex hypercontractivity and the sharp Hausdorff-Young constant.",
    )
    _common_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", parser_class=argparse.ArgumentParser)

    scan = sub.add_parser(
        "two-point-scan", parents=[common], help="scan the unit disk for both inequality forms"
    )
    scan.add_argument("--p", type=float, required=True)
    scan.add_argument("--q", type=float, required=True)
    scan.add_argument("--resolution", type=float, default=0.05)
    scan.add_argument("--budget", choices=["reduced", "full"], default="reduced")

    dflow = sub.add_parser("discrete-flow", parents=[common], help="the cube flow over split indices")
    dflow.add_argument("--n", type=int, required=True)
    dflow.add_argument("--p", type=float, required=True)
    dflow.add_argument("--q", type=float, required=True)
    dflow.add_argument("--z-re", type=float, dest="z_re")
    dflow.add_argument("--z-im", type=float, dest="z_im")
    dflow.add_argument("--coeffs", required=True, help="symmetric-function coefficients, comma-separated")
    dflow.add_argument("--ks", help="comma-separated split indices (default: all)")

    jflow = sub.add_parser("janson-flow", parents=[common], help="the continuous Gaussian flow over s")
    jflow.add_argument("--p", type=float, required=True)
    jflow.add_argument("--q", type=float, help="default: conjugate exponent of p")
    jflow.add_argument("--z-re", type=float, dest="z_re")
    jflow.add_argument("--z-im", type=float, dest="z_im")
    jflow.add_argument("--coeffs", required=True, help="polynomial coefficients, comma-separated")
    jflow.add_argument("--s-points", type=int, dest="s_points", default=21)

    conv = sub.add_parser("converge", parents=[common], help="discrete-to-continuous convergence experiment")
    conv.add_argument("--p", type=float, required=True)
    conv.add_argument("--q", type=float, required=True)
    conv.add_argument("--z-re", type=float, dest="z_re")
    conv.add_argument("--z-im", type=float, dest="z_im")
    conv.add_argument("--coeffs", required=True)
    conv.add_argument("--s", type=float, default=0.5)
    conv.add_argument("--n-list", dest="n_list", required=True, help="comma-separated dimensions")

    hy = sub.add_parser("hy-flow", parents=[common], help="the sharp-constant interpolation flow")
    hy.add_argument("--p", type=float, required=True)
    group = hy.add_mutually_exclusive_group(required=True)
    group.add_argument("--gaussian", action="store_true", help="use the Gaussian extremizer")
    group.add_argument("--hermite-coeffs", dest="hermite_coeffs", help="Hermite coefficients of g~")
    hy.add_argument("--s-points", type=int, dest="s_points", default=21)

    hyexp = sub.add_parser("hy-exp", parents=[common], help="exponential-family flow and final-form bound")
    hyexp.add_argument("--p", type=float, required=True)
    hyexp.add_argument("--atoms", required=True, help="amplitude:frequency pairs, comma-separated")
    hyexp.add_argument("--s-points", type=int, dest="s_points", default=21)

    st = sub.add_parser("selftest", parents=[common], help="run every module's invariant suite")
    st.add_argument("--quick", action="store_true", help="reduced draw counts")

    return parser


_COMMON = {"config", "out", "seed", "nodes", "tol", "command"}


def config_from_argv(argv: list[str]) -> RunConfig:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    file_cfg: dict[str, Any] = {}
    if args.get("config"):
        file_cfg = json.loads(Path(args["config"]).read_text(encoding="utf-8"))
    command = args.get("command") or file_cfg.get("command")
    if not command:
        parser.error("no command given (flag or config file)")
    params = dict(file_cfg.get("params", {}))
    params.update({k: v for k, v in args.items() if k not in _COMMON and v is not None})
    return RunConfig(
        command=command,
        params=params,
        out=args.get("out") or file_cfg.get("out") or ".",
        seed=args["seed"] if args.get("seed") is not None else file_cfg.get("seed", DEFAULT_SEED),
        nodes=args.get("nodes") if args.get("nodes") is not None else file_cfg.get("nodes"),
        tol=args.get("tol") if args.get("tol") is not None else file_cfg.get("tol"),
    )


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = config_from_argv(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())

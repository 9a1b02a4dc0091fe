"""Consolidated verification suite: twelve cross-route checks with evidence.

Each check compares a closed-form or asymptotic route against an exact
oracle or an independent second derivation, and returns the numbers it
judged alongside the verdict, so a failing check carries its own evidence.
The registry is shared by the command-line `report` subcommand and the
acceptance test suite; both see identical results.

Everything here is deterministic (no randomness anywhere in the package),
and the checks run sequentially: several lean on the arbitrary-precision
context, whose working precision is process-global state.
"""
from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import exactfiniten, freeenergy, geometry, ldp, opasymp, painleve
from .geometry import Regime

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CheckResult:
    key: str
    suite: str
    label: str
    passed: bool
    message: str
    details: dict
    elapsed_seconds: float = 0.0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _result(key: str, suite: str, label: str, passed: bool, message: str,
            details: dict) -> CheckResult:
    return CheckResult(key=key, suite=suite, label=label, passed=bool(passed),
                       message=message, details=details)


def check_duality() -> CheckResult:
    """Gap probability vs rescaled partition-function ratio, 256 bits."""
    rows = []
    worst = 0.0
    for n_gin, m in ((2, 2), (3, 3), (4, 4), (2, 4)):
        for x in (0.0, 0.3, 0.7, 1.1):
            res = float(exactfiniten.duality_residual(n_gin, m, x,
                                                      precision_bits=256))
            rows.append({"N": n_gin, "m": m, "x": x, "residual": res})
            worst = max(worst, res)
    return _result(
        "duality", "exact", "duality identity at 256 bits",
        worst < 1e-25,
        f"max residual {worst:.3e} over 16 points (tolerance 1e-25)",
        {"tolerance": 1e-25, "worst": worst, "rows": rows})


def check_expansion_post() -> CheckResult:
    """Annular-phase expansion against the determinant and reference routes."""
    a, c = 0.2, 1.0
    rows = []
    ok = True
    for n in (4, 8, 16):
        exact = float(exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=n, m=n, a=a)))
        approx = freeenergy.expansion(n, a, c, Regime.POST, M=2).log_z
        bound = 3.0 * freeenergy.first_omitted_tail_term(n, c, 2)
        resid = abs(exact - approx)
        rows.append({"N": n, "a": a, "residual": resid, "bound": bound})
        ok = ok and resid < bound
    for n in (4, 8, 16):
        exact = freeenergy.reference_logZ(n, c)
        approx = freeenergy.expansion(n, 0.0, c, Regime.POST, M=2).log_z
        bound = 3.0 * freeenergy.first_omitted_tail_term(n, c, 2)
        resid = abs(exact - approx)
        rows.append({"N": n, "a": 0.0, "residual": resid, "bound": bound})
        ok = ok and resid < bound
    worst = max(r["residual"] / r["bound"] for r in rows)
    return _result(
        "expansion_post", "freeenergy", "free-energy expansion, annular phase",
        ok,
        f"worst residual/bound {worst:.3f} (needs < 1)",
        {"rows": rows})


def check_expansion_pre() -> CheckResult:
    """Simply-connected-phase expansion residual halves as N doubles."""
    a, c = 1.2, 1.0
    residuals = {}
    for n in (8, 16):
        exact = float(exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=n, m=n, a=a)))
        approx = freeenergy.expansion(n, a, c, Regime.PRE).log_z
        residuals[n] = abs(exact - approx)
    ratio = residuals[8] / residuals[16]
    return _result(
        "expansion_pre", "freeenergy",
        "free-energy expansion, simply connected phase",
        1.5 <= ratio <= 3.0,
        f"residual ratio r(8)/r(16) = {ratio:.3f} (window [1.5, 3.0])",
        {"residuals": residuals, "ratio": ratio, "window": [1.5, 3.0]})


def check_kc_identity() -> CheckResult:
    """Rate function equals the constrained-gas action difference."""
    worst = 0.0
    per_alpha = {}
    for alpha in (0.5, 1.0, 16.0 / 9.0, 5.0):
        lam = ldp.LUEParams.from_alpha(alpha).lambda_minus
        s_edge = ldp.kc_action(lam, alpha)
        diffs = [abs(ldp.phi(t, alpha) - (ldp.kc_action(t, alpha) - s_edge))
                 for t in np.linspace(lam + 0.05, lam + 5.0, 50)]
        per_alpha[f"{alpha:.6f}"] = max(diffs)
        worst = max(worst, max(diffs))
    return _result(
        "kc_identity", "ldp", "rate function vs constrained-gas action",
        worst < 1e-10,
        f"max |Phi - (S(t) - S(edge))| = {worst:.3e} (tolerance 1e-10)",
        {"tolerance": 1e-10, "worst": worst, "per_alpha": per_alpha})


def check_third_order() -> CheckResult:
    """Fitted cubic coefficient of the rate function at the edge."""
    rows = []
    ok = True
    for alpha in (1.0, 16.0 / 9.0):
        lam = ldp.LUEParams.from_alpha(alpha).lambda_minus
        dts = np.linspace(1e-3, 1e-2, 50)
        vals = np.array([ldp.phi(lam + dt, alpha) for dt in dts])
        design = np.vstack([dts ** 3, dts ** 4]).T
        k3, k4 = np.linalg.lstsq(design, vals, rcond=None)[0]
        target = math.sqrt(alpha + 1.0) / (12.0 * lam * lam)
        rel = abs(k3 / target - 1.0)
        rows.append({"alpha": alpha, "fitted": float(k3), "target": target,
                     "rel_error": float(rel), "next_order": float(k4)})
        ok = ok and rel < 0.01
    worst = max(r["rel_error"] for r in rows)
    return _result(
        "third_order", "ldp", "third-order transition coefficient",
        ok,
        f"worst fitted-coefficient relative error {worst:.2e} (tolerance 1e-2)",
        {"rows": rows})


def check_ldp_constants() -> CheckResult:
    """Constant-order expansion of log P approaches the exact finite-n value."""
    alpha = 1.0
    t = ldp.LUEParams.from_alpha(alpha).lambda_minus + 1.0
    diffs = []
    for n in (4, 8, 16):
        exact = ldp.exact_log_gap_probability(n, alpha, t)
        approx = ldp.ldp_log_probability(n, alpha, t)
        diffs.append({"n": n, "abs_error": abs(exact - approx)})
    decreasing = (diffs[0]["abs_error"] > diffs[1]["abs_error"]
                  > diffs[2]["abs_error"])
    final_ok = diffs[2]["abs_error"] < 0.2
    shown = ", ".join(f"{d['abs_error']:.4f}" for d in diffs)
    return _result(
        "ldp_constants", "ldp", "large-deviation constant terms",
        decreasing and final_ok,
        f"errors [{shown}] must decrease and end below 0.2",
        {"alpha": alpha, "t": t, "rows": diffs})


def check_tw_tails() -> CheckResult:
    """Distribution tails against the printed expansions; ODE self-convergence."""
    sol = painleve.hastings_mcleod()
    t_left = -8.0
    scale = 3.0 / (2 ** 6 * abs(t_left) ** 3)
    left_diff = abs(math.log(painleve.tw_cdf(sol, t_left))
                    - painleve.left_tail_log_cdf(abs(t_left)))
    right_rel = abs(painleve.tw_survival(sol, 6.0)
                    / painleve.right_tail_survival(6.0) - 1.0)
    refined = painleve.hastings_mcleod(tol=painleve.DEFAULT_TOL / 2.0)
    drift = abs(painleve.tw_cdf(sol, -5.0) - painleve.tw_cdf(refined, -5.0))
    ok = left_diff < scale and right_rel < 0.20 and drift < 1e-8
    return _result(
        "tw_tails", "tw", "extreme-value distribution tails",
        ok,
        f"left diff {left_diff:.2e} (< {scale:.2e}), right rel {right_rel:.3f} "
        f"(< 0.2), tol-halving drift {drift:.1e} (< 1e-8)",
        {"left_abs_diff": left_diff, "left_scale": scale,
         "right_rel_error": right_rel, "tol_halving_drift": drift})


def check_op_asymptotics() -> CheckResult:
    """Polynomial asymptotics vs the exact moment-determinant polynomials.

    Annular half: fixed-N relative error threshold at the stated point.
    Simply connected half: error-halving ratios as N doubles, which probe the
    declared inverse-square error class at a fixed exterior point.
    """
    z = 3.0
    post_ev = opasymp.GEvaluator.build(0.2, 1.0)
    exact = complex(exactfiniten.eval_polynomial(
        exactfiniten.exact_op(exactfiniten.ExactContext(N=8, m=8, a=0.2)), z))
    asym = opasymp.p_asymp(post_ev, z, 8).value
    rel_post = abs(asym - exact) / abs(exact)
    post_ok = rel_post < 1e-6

    pre_ev = opasymp.GEvaluator.build(1.2, 1.0)
    errs = {}
    for n in (4, 8, 16):
        exact = complex(exactfiniten.eval_polynomial(
            exactfiniten.exact_op(exactfiniten.ExactContext(N=n, m=n, a=1.2)),
            z))
        asym = opasymp.p_asymp(pre_ev, z, n).value
        errs[n] = abs(asym - exact) / abs(exact)
    ratios = (errs[4] / errs[8], errs[8] / errs[16])
    pre_ok = all(3.0 <= r <= 5.0 for r in ratios)
    return _result(
        "op_asymptotics", "opasymp", "orthogonal-polynomial asymptotics",
        post_ok and pre_ok,
        f"annular rel error {rel_post:.3e} (needs < 1e-6); simply connected "
        f"ratios {ratios[0]:.2f}, {ratios[1]:.2f} (window [3, 5])",
        {"post": {"a": 0.2, "N": 8, "z": z, "rel_error": rel_post,
                  "tolerance": 1e-6},
         "pre": {"a": 1.2, "z": z, "errors": errs,
                 "ratios": list(ratios), "window": [3.0, 5.0]}})


def check_residue() -> CheckResult:
    """Numerically extracted far-field coefficient of R11 vs its closed form."""
    rows = []
    worst = 0.0
    for a, c in ((1.0, 9.0 / 16.0), (1.2, 1.0), (2.0, 1.0)):
        geom = geometry.pre_geometry(a, c)
        coeffs = opasymp.rh_coefficients(geom, 8)
        probe = opasymp.r11_residue_probe(coeffs)
        closed = opasymp.res_r11_infinity(geom, 8)
        rel = abs(probe - closed) / abs(closed)
        rows.append({"a": a, "c": c, "probe_re": probe.real, "closed": closed,
                     "rel_error": rel})
        worst = max(worst, rel)
    return _result(
        "residue_r11", "opasymp", "far-field coefficient identity for R11",
        worst < 1e-10,
        f"worst relative error {worst:.3e} over three parameter pairs "
        f"(tolerance 1e-10)",
        {"tolerance": 1e-10, "rows": rows})


def _zw_grid() -> list[tuple[float, float, Regime]]:
    points = []
    for c in (0.25, 0.5625, 1.0, 4.0):
        a_cri = geometry.critical_values(c).a_cri
        points.append((0.3 * a_cri, c, Regime.POST))
        points.append((0.7 * a_cri, c, Regime.POST))
        points.append((1.5 * a_cri, c, Regime.PRE))
        points.append((3.0 * a_cri, c, Regime.PRE))
    points.append((0.0, 1.0, Regime.POST))
    points.append((0.1, 2.0, Regime.POST))
    points.append((1.2, 1.0, Regime.PRE))
    points.append((2.0, 1.0, Regime.PRE))
    return points


def check_zw_constant() -> CheckResult:
    """Constant term equals minus half the log-determinant, both phases."""
    worst = 0.0
    rows = []
    for a, c, regime in _zw_grid():
        resid = abs(freeenergy.fconst(a, c, regime)
                    + 0.5 * freeenergy.detzeta_log(a, c, regime))
        rows.append({"a": a, "c": c, "regime": regime.name, "residual": resid})
        worst = max(worst, resid)
    return _result(
        "zw_constant", "freeenergy", "constant term vs zeta-determinant",
        worst < 1e-12,
        f"max |fconst + detzeta_log/2| = {worst:.3e} over 20 points "
        f"(tolerance 1e-12)",
        {"tolerance": 1e-12, "worst": worst, "rows": rows})


def check_derivatives() -> CheckResult:
    """Closed-form insertion-point derivatives vs central differences."""
    c = 1.0
    h = 1e-6
    worst = 0.0
    rows = []
    for a in np.linspace(0.6, 2.4, 10):
        fd_energy = (freeenergy.energy_pre(a + h, c)
                     - freeenergy.energy_pre(a - h, c)) / (2.0 * h)
        fd_const = (freeenergy.fconst(a + h, c, Regime.PRE)
                    - freeenergy.fconst(a - h, c, Regime.PRE)) / (2.0 * h)
        fd_reg = (freeenergy.re_g_at_a(a + h, c)
                  - freeenergy.re_g_at_a(a - h, c)) / (2.0 * h)
        q = geometry.solve_q(a, c)
        diffs = {
            "energy": abs(fd_energy - freeenergy.d_energy_pre_da(a, c)),
            "fconst": abs(fd_const - freeenergy.d_fconst_pre_da(a, c)),
            "re_g": abs(fd_reg - a * q * q),
        }
        rows.append({"a": float(a), **diffs})
        worst = max(worst, *diffs.values())
    return _result(
        "derivative_forms", "freeenergy", "closed-form derivatives vs differences",
        worst < 1e-7,
        f"max |finite difference - closed form| = {worst:.3e} over 10 points "
        f"(tolerance 1e-7)",
        {"tolerance": 1e-7, "worst": worst, "rows": rows})


def check_energy_continuity() -> CheckResult:
    """Energy branches agree at the phase boundary and order correctly past it."""
    rows = []
    ok = True
    for c in (0.25, 0.5625, 1.0, 4.0):
        a_cri = geometry.critical_values(c).a_cri
        a_edge = a_cri + 1e-8
        gap = abs(freeenergy.energy_pre(a_edge, c)
                  - freeenergy.energy_post(a_edge, c))
        ordered = all(
            freeenergy.energy_pre(a_cri + da, c)
            > freeenergy.energy_post(a_cri + da, c)
            for da in (1e-3, 1e-2, 0.1, 0.5, 1.0))
        rows.append({"c": c, "boundary_gap": gap, "ordered": ordered})
        ok = ok and gap < 1e-9 and ordered
    worst = max(r["boundary_gap"] for r in rows)
    return _result(
        "energy_continuity", "freeenergy", "energy continuity and ordering",
        ok,
        f"max boundary gap {worst:.3e} (tolerance 1e-9); ordering holds on "
        f"all grids",
        {"tolerance": 1e-9, "rows": rows})


@dataclass(frozen=True)
class CheckSpec:
    key: str
    suite: str
    label: str
    fn: Callable[[], CheckResult]


CHECKS: tuple[CheckSpec, ...] = (
    CheckSpec("duality", "exact", "duality identity at 256 bits",
              check_duality),
    CheckSpec("expansion_post", "freeenergy",
              "free-energy expansion, annular phase", check_expansion_post),
    CheckSpec("expansion_pre", "freeenergy",
              "free-energy expansion, simply connected phase",
              check_expansion_pre),
    CheckSpec("kc_identity", "ldp", "rate function vs constrained-gas action",
              check_kc_identity),
    CheckSpec("third_order", "ldp", "third-order transition coefficient",
              check_third_order),
    CheckSpec("ldp_constants", "ldp", "large-deviation constant terms",
              check_ldp_constants),
    CheckSpec("tw_tails", "tw", "extreme-value distribution tails",
              check_tw_tails),
    CheckSpec("op_asymptotics", "opasymp",
              "orthogonal-polynomial asymptotics", check_op_asymptotics),
    CheckSpec("residue_r11", "opasymp",
              "far-field coefficient identity for R11", check_residue),
    CheckSpec("zw_constant", "freeenergy",
              "constant term vs zeta-determinant", check_zw_constant),
    CheckSpec("derivative_forms", "freeenergy",
              "closed-form derivatives vs differences", check_derivatives),
    CheckSpec("energy_continuity", "freeenergy",
              "energy continuity and ordering", check_energy_continuity),
)

SUITES = tuple(dict.fromkeys(spec.suite for spec in CHECKS))


def run_checks(skip: tuple[str, ...] = ()) -> list[CheckResult]:
    """Run every registered check not in a skipped suite, in registry order.

    A check that raises reports as failed with the exception recorded; the
    report itself always completes.
    """
    unknown = set(skip) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}; "
                         f"known: {list(SUITES)}")
    results = []
    for spec in CHECKS:
        if spec.suite in skip:
            continue
        start = time.perf_counter()
        try:
            res = spec.fn()
        except Exception as exc:
            res = _result(spec.key, spec.suite, spec.label, False,
                          f"check raised {type(exc).__name__}: {exc}",
                          {"exception": repr(exc)})
        results.append(dataclasses.replace(
            res, elapsed_seconds=time.perf_counter() - start))
    return results


def run_report(skip: tuple[str, ...] = ()) -> dict:
    """Machine-readable pass/fail summary of the full verification suite."""
    start = time.perf_counter()
    results = run_checks(skip)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "verification_report",
        "skipped_suites": list(skip),
        "all_passed": all(r.passed for r in results),
        "n_passed": sum(r.passed for r in results),
        "n_checks": len(results),
        "elapsed_seconds": time.perf_counter() - start,
        "checks": [r.as_dict() for r in results],
    }

"""Pipeline orchestration and report generation.

One run executes, per requested root index: the orientation probe, the
hypothesis checks and contraction constants, the direct-orientation Picard
solve (residual-certified), the adjoint-orientation iteration with its
envelope certificates, synthesis of the fundamental solution, and oracle
cross-validation.  Results land in a schema-stable report.json plus CSV
series; the exit code is 0 only when every requested check passes.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import hypotheses, oracle, picard, synthesis
from .errors import Diverged, MaxIterExceeded, SolverError
from .problem import ProblemSpec
from .riccati import build_system, residual_profile
from .spectra import characteristic_data

RESIDUAL_TOL = 1e-6
RATIO_TOL = 1e-4
ORACLE_Y_TOL = 1e-4
ORACLE_LOGDERIV_TOL = 1e-3
WRONSKIAN_REL_TOL = 0.01


def _num(x):
    """JSON-safe number: finite float or None."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _root_keys():
    return {
        "lambda": None, "gamma": None, "case": None, "orientation": None,
        "constants": None, "h2": None, "solve": None, "certificates": None,
        "synthesis": None, "oracle": None, "status": "skipped", "error": None,
        "pass": None,
    }


def _default_beta(sys):
    lo, hi = picard.beta_interval(sys)
    return hi if sys.i == 4 else lo


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _run_root(spec: ProblemSpec, cd, i, mode, out_dir):
    result = _root_keys()
    sys = build_system(cd, spec.parsed_r(), i)
    result["lambda"] = _num(sys.lam)
    result["gamma"] = [_num(g) for g in sys.kernel.gamma]
    result["case"] = sys.kernel.case.value
    checks = []

    try:
        probe = picard.resolve_orientation(sys, t0=spec.t0)
        result["orientation"] = {
            "selected": probe["selected"],
            "residual_direct": _num(probe["residuals"]["direct"]),
            "residual_adjoint": _num(probe["residuals"]["adjoint"]),
        }

        env = hypotheses.envelope_report(cd, i, sys.r, spec.eta, t0=spec.t0)
        result["constants"] = {
            "delta_w": _num(env.delta_w),
            "alpha": [_num(a) for a in env.alpha],
            "alpha_displayed": [_num(a) for a in env.alpha_displayed],
            "A": _num(env.A),
            "A_kernel": _num(env.A_kernel),
            "varsigma": _num(env.varsigma),
            "eta": _num(env.eta),
            "rho": _num(env.rho),
            "smallness_ok": env.smallness_ok,
            "Phi": _num(env.Phi),
        }
        result["h2"] = {
            "verdict": env.h2.verdict,
            "fitted_rate": _num(env.h2.fitted_rate),
            "samples": [[_num(t), _num(v)] for t, v in env.h2.samples],
        }
        checks.append(env.h2.verdict == "PASS")
        checks.append(env.smallness_ok)
        result["status"] = "analyzed"
        if mode == "analyze":
            result["pass"] = all(checks)
            return result, None

        nodes = picard.default_grid(cd, spec.t0, spec.nodes, spec.t_max)
        snapshots = [] if spec.trace else None
        collect = (lambda n, z: snapshots.append((n, z))) if spec.trace else None
        z, trace = picard.iterate_to_fixed_point(
            sys, nodes, fp_tol=spec.fp_tol, max_iter=spec.max_iter,
            eta=spec.eta, orientation=probe["selected"],
            quad_tol=spec.quad_tol, snapshot=collect,
        )
        residual_max = float(np.max(np.abs(residual_profile(sys, z))))
        result["solve"] = {
            "orientation": trace.orientation,
            "converged": trace.converged,
            "n_iter": trace.n_iter,
            "deltas": [_num(d) for d in trace.deltas],
            "contraction": [_num(c) for c in trace.contraction],
            "certificate": _num(trace.certificate),
            "riccati_residual_max": _num(residual_max),
            "z_norm": _num(z.norm_c02()),
        }
        checks.append(trace.converged)
        checks.append(trace.certificate <= max(spec.fp_tol, 1e-12))
        checks.append(residual_max <= RESIDUAL_TOL)

        if out_dir:
            _write_csv(
                os.path.join(out_dir, f"z_root{i}.csv"),
                ["t", "z", "dz", "d2z"],
                zip(z.nodes, z.value, z.d1, z.d2),
            )
            if spec.trace and snapshots:
                rows = []
                for n, snap in snapshots:
                    rows.extend(zip([n] * snap.nodes.size, snap.nodes,
                                    snap.value, snap.d1, snap.d2))
                _write_csv(os.path.join(out_dir, f"trace_root{i}.csv"),
                           ["iter", "t", "z", "dz", "d2z"], rows)

        # adjoint-path certificates: the envelope theory describes these iterates
        beta = _default_beta(sys)
        certs = {
            "beta": _num(beta), "status": "ok", "n_iter": None,
            "certificate": None, "contraction": None,
            "envelope_ratio_max": None, "envelope_ok": None,
            "envelope_split_ratio_max": None, "first_iterate_ratio": None,
        }
        try:
            z_adj, trace_adj = picard.iterate_to_fixed_point(
                sys, nodes, fp_tol=spec.fp_tol, max_iter=spec.max_iter,
                eta=spec.eta, orientation="adjoint", quad_tol=spec.quad_tol,
            )
            certs["n_iter"] = trace_adj.n_iter
            certs["certificate"] = _num(trace_adj.certificate)
            certs["contraction"] = [_num(c) for c in trace_adj.contraction]
            if env.Phi is not None:
                ok, ratio, _ = picard.envelope_check(
                    sys, z_adj, beta, env.Phi, quad_tol=spec.quad_tol,
                )
                certs["envelope_ratio_max"] = _num(ratio)
                certs["envelope_ok"] = ok
                checks.append(ok)
                if sys.i in (2, 3):
                    _, ratio_split, _ = picard.envelope_check(
                        sys, z_adj, beta, env.Phi, quad_tol=spec.quad_tol,
                        variant="split",
                    )
                    certs["envelope_split_ratio_max"] = _num(ratio_split)
            certs["first_iterate_ratio"] = _num(
                picard.first_iterate_ratio(sys, nodes, env.A, beta,
                                           quad_tol=spec.quad_tol)
            )
        except (Diverged, MaxIterExceeded) as exc:
            certs["status"] = f"diverged: {exc}"
            checks.append(False)
        result["certificates"] = certs

        if mode == "solve":
            result["status"] = "solved"
            result["pass"] = all(checks)
            return result, None

        fs = synthesis.fundamental_solution(sys, z, cd)
        errors, verdict = synthesis.derivative_ratio_limits(fs, ratio_tol=RATIO_TOL)
        _, gap = synthesis.asymptotic_integral_formula(fs, sys)
        rng = np.random.default_rng(1000 + i)
        identity_residual = 0.0
        for _ in range(5):
            a = float(rng.uniform(0.2, 2.0))
            decay = a + float(rng.uniform(0.3, 2.5))
            t_probe = float(rng.uniform(1.0, 6.0))
            identity_residual = max(
                identity_residual,
                synthesis.double_integral_identity_residual(a, decay, t_probe),
            )
        result["synthesis"] = {
            "ratio_errors_at_tmax": [_num(errors[l, -1]) for l in range(4)],
            "ratio_verdict": verdict,
            "asymptotic_gap_first": _num(gap[1]),
            "asymptotic_gap_last": _num(gap[-1]),
            "identity_self_test": _num(identity_residual),
        }
        checks.append(verdict == "PASS")
        checks.append(identity_residual <= 1e-8)

        if out_dir and mode == "report":
            log_y = np.clip(fs.log_y, -700.0, 700.0)
            ratios = fs.ratios()
            _write_csv(
                os.path.join(out_dir, f"ratios_root{i}.csv"),
                ["t", "y", "y1_over_y", "y2_over_y", "y3_over_y", "y4_over_y"],
                zip(fs.nodes, np.exp(log_y), *ratios),
            )

        val = oracle.cross_validate(fs, sys)
        result["oracle"] = {
            "mode": val["mode"],
            "span": val["span"],
            "y_rel_error": _num(val.get("y_rel_error")),
            "logderiv_error": _num(val.get("logderiv_error")),
            "riccati_error": _num(val.get("riccati_error")),
            "riccati_direction": val.get("riccati_direction"),
        }
        if i == 1:
            checks.append(val["y_rel_error"] <= ORACLE_Y_TOL)
        checks.append(val["logderiv_error"] <= ORACLE_LOGDERIV_TOL)

        result["status"] = "ok"
        result["pass"] = all(checks)
        return result, fs

    except SolverError as exc:
        result["status"] = "error"
        result["error"] = f"{type(exc).__name__}: {exc}"
        result["pass"] = False
        return result, None


def run_report(spec: ProblemSpec, roots=(1, 2, 3, 4), out_dir=None,
               mode="report", jobs=4):
    """Execute the pipeline and return (report dict, exit code)."""
    spec.validate()
    report = {
        "problem": {
            "a": [spec.a3, spec.a2, spec.a1, spec.a0],
            "r": list(spec.r),
            "t0": spec.t0,
            "t_max": spec.t_max,
            "nodes": spec.nodes,
            "eta": spec.eta,
            "tolerances": {
                "fp_tol": spec.fp_tol, "quad_tol": spec.quad_tol,
                "root_tol": spec.root_tol, "gap_tol": spec.gap_tol,
            },
            "mode": mode,
        },
        "characteristic": None,
        "roots": {},
        "wronskian": None,
        "overall_pass": False,
    }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)

    cd = characteristic_data(spec.a, root_tol=spec.root_tol,
                             gap_tol=spec.gap_tol)
    report["characteristic"] = {
        "roots": [_num(x) for x in cd.lam],
        "min_gap": _num(cd.min_gap),
    }

    roots = tuple(sorted(set(int(i) for i in roots)))
    if any(i not in (1, 2, 3, 4) for i in roots):
        raise ValueError("root indices must be within 1..4")

    solutions = {}
    with ThreadPoolExecutor(max_workers=min(jobs, len(roots))) as pool:
        futures = {
            i: pool.submit(_run_root, spec, cd, i, mode, out_dir) for i in roots
        }
        for i, future in futures.items():
            result, fs = future.result()
            report["roots"][str(i)] = result
            if fs is not None:
                solutions[i] = fs

    flags = [report["roots"][str(i)]["pass"] for i in roots]

    if len(solutions) == 4 and mode in ("report", "verify"):
        fss = [solutions[i] for i in (1, 2, 3, 4)]
        target = synthesis.vandermonde_target(cd)
        t_ref = solutions[1].nodes[-1]
        w_norm = synthesis.wronskian_normalized(fss, t_ref)
        rel = abs(w_norm - target) / abs(target)
        report["wronskian"] = {
            "normalized_at_tmax": _num(w_norm),
            "target": _num(target),
            "rel_error": _num(rel),
            "t": _num(t_ref),
        }
        flags.append(rel <= WRONSKIAN_REL_TOL)
        if out_dir and mode == "report":
            sample = solutions[1].nodes[:: max(1, solutions[1].nodes.size // 256)]
            _write_csv(
                os.path.join(out_dir, "wronskian.csv"),
                ["t", "w_normalized"],
                ((t, synthesis.wronskian_normalized(fss, t)) for t in sample),
            )

    report["overall_pass"] = bool(flags) and all(flags)

    if out_dir:
        with open(os.path.join(out_dir, "report.json"), "w") as handle:
            json.dump(report, handle, indent=2)

    return report, (0 if report["overall_pass"] else 1)

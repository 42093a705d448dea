"""Command-line front end.

One UTF-8 JSON format serves both problem files and reports; numbers are
serialized with 17 significant digits so doubles round-trip losslessly.
Exit codes: 0 success, 1 usage/runtime error, 2 certificate failure.

Timing is printed to stderr, never into the JSON document, so identical
(file, flags, seed) invocations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._backend import backend_name
from .errors import CertificateError, InvalidInput, SharpprojError
from .instances import random_bounded_lp, random_direction, random_polytope
from .kernels import distance_to_cone, unit
from .polyhedron import Polyhedron, lp_solve_enumeration, normal_cone_at, project_brute
from .projection import project_polyhedron
from .pwl import MaxAffine
from .regularity import distance_upper_bound, estimate_subtransversality
from .sharpness import (
    sharpness_dual_estimate,
    sharpness_exact,
    sharpness_lower_bound,
)
from .spp import solve_cp_spp, solve_lp_spp

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CERT_FAIL = 2


# --------------------------------------------------------------------------
# Canonical JSON (17 significant digits, sorted keys, inf as strings).
# --------------------------------------------------------------------------


def _canon(obj):
    if isinstance(obj, dict):
        return "{" + ",".join(
            f"{json.dumps(str(k))}:{_canon(v)}" for k, v in sorted(obj.items())) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_report(report: dict) -> str:
    return _canon(report)


def _parse_special_floats(x):
    if isinstance(x, str):
        if x == "inf":
            return math.inf
        if x == "-inf":
            return -math.inf
        if x == "nan":
            return math.nan
    return x


# --------------------------------------------------------------------------
# Problem files.
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProblemFile:
    n: int
    A: np.ndarray
    b: np.ndarray
    linear: np.ndarray | None
    max_affine: MaxAffine | None
    v: np.ndarray | None
    t: float | None
    mu: float | None
    alpha: float | None

    def polyhedron(self) -> Polyhedron:
        return Polyhedron(self.A, self.b)


def _field_error(path: str, msg: str):
    raise InvalidInput(f"problem file field '{path}': {msg}")


def _as_float_array(raw, path: str, shape=None) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError):
        _field_error(path, "not a numeric array")
    if not np.all(np.isfinite(arr)):
        _field_error(path, "contains NaN/Inf")
    if shape is not None and arr.shape != shape:
        _field_error(path, f"shape {arr.shape} != expected {shape}")
    return arr


def parse_problem_dict(data: dict) -> ProblemFile:
    if not isinstance(data, dict):
        raise InvalidInput("problem file must be a JSON object")
    if "n" not in data:
        _field_error("n", "missing")
    n = int(data["n"])
    if n < 1:
        _field_error("n", "must be >= 1")
    if "A" not in data:
        _field_error("A", "missing")
    A = _as_float_array(data["A"], "A")
    if A.ndim != 2 or A.shape[1] != n:
        _field_error("A", f"must be m x {n}, got {A.shape}")
    b = _as_float_array(data.get("b"), "b", shape=(A.shape[0],))

    linear = None
    max_affine = None
    obj = data.get("objective")
    if obj is not None:
        if not isinstance(obj, dict):
            _field_error("objective", "must be an object")
        if "linear" in obj:
            linear = _as_float_array(obj["linear"], "objective.linear", shape=(n,))
        if "max_affine" in obj:
            pieces = obj["max_affine"]
            if not isinstance(pieces, list) or not pieces:
                _field_error("objective.max_affine", "must be a nonempty list")
            grads, offs = [], []
            for i, piece in enumerate(pieces):
                grads.append(_as_float_array(piece.get("a"),
                                             f"objective.max_affine[{i}].a", shape=(n,)))
                try:
                    offs.append(float(piece["c"]))
                except (KeyError, TypeError, ValueError):
                    _field_error(f"objective.max_affine[{i}].c", "missing or non-numeric")
            max_affine = MaxAffine(np.vstack(grads), np.array(offs))
        if linear is None and max_affine is None:
            _field_error("objective", "needs 'linear' or 'max_affine'")

    v = None
    if data.get("v") is not None:
        v = _as_float_array(data["v"], "v", shape=(n,))
    t = float(data["t"]) if data.get("t") is not None else None
    mu = float(data["mu"]) if data.get("mu") is not None else None
    alpha = float(data["alpha"]) if data.get("alpha") is not None else None
    return ProblemFile(n=n, A=A, b=b, linear=linear, max_affine=max_affine,
                       v=v, t=t, mu=mu, alpha=alpha)


def parse_problem(path: str) -> ProblemFile:
    """Read and validate a problem file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"malformed JSON in {path}: {exc}") from exc
    return parse_problem_dict(data)


def problem_to_dict(pf: ProblemFile) -> dict:
    out = {"n": pf.n, "A": pf.A.tolist(), "b": pf.b.tolist()}
    obj = {}
    if pf.linear is not None:
        obj["linear"] = pf.linear.tolist()
    if pf.max_affine is not None:
        obj["max_affine"] = [
            {"a": a.tolist(), "c": float(c)}
            for a, c in zip(pf.max_affine.grads, pf.max_affine.offsets)]
    if obj:
        out["objective"] = obj
    for key in ("v", "t", "mu", "alpha"):
        val = getattr(pf, key)
        if val is not None:
            out[key] = val.tolist() if isinstance(val, np.ndarray) else float(val)
    return out


# --------------------------------------------------------------------------
# Report plumbing.
# --------------------------------------------------------------------------


def _problem_echo(pf: ProblemFile) -> dict:
    P = pf.polyhedron()
    echo = {
        "n": pf.n,
        "A_normalized": P.A.tolist(),
        "b_normalized": P.b.tolist(),
        "row_scale": P.row_scale.tolist(),
    }
    echo.update({k: v for k, v in problem_to_dict(pf).items() if k not in ("A", "b", "n")})
    return echo


def _base_report(command: str, config: dict, pf: ProblemFile | None, seed) -> dict:
    rep = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "sharpproj", "version": __version__,
                 "backend": backend_name()},
        "command": command,
        "config": config,
        "seed": seed,
    }
    if pf is not None:
        rep["problem"] = _problem_echo(pf)
    return rep


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _mark(ok: bool, stream) -> str:
    word = "PASS" if ok else "FAIL"
    if _use_color(stream):
        code = "32" if ok else "31"
        return f"\x1b[{code}m{word}\x1b[0m"
    return word


def _emit(report: dict, fmt: str, text_lines: list[str], elapsed: float) -> None:
    if fmt == "json":
        sys.stdout.write(dumps_report(report) + "\n")
    else:
        for line in text_lines:
            sys.stdout.write(line + "\n")
    sys.stderr.write(f"[sharpproj] {report['command']} finished in {elapsed * 1e3:.1f} ms\n")


# --------------------------------------------------------------------------
# Subcommand implementations.  Each returns (exit_code, report, text_lines).
# --------------------------------------------------------------------------


def _cmd_project(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    if pf.v is None:
        raise InvalidInput("project needs a 'v' field (the point to project)")
    P = pf.polyhedron()
    res = project_polyhedron(P, pf.v, kkt_tol=args.tol, active_tol=args.active_tol)
    report = _base_report("project", _config(args), pf, None)
    report["result"] = {
        "projection": res.proj.tolist(),
        "distance": res.distance,
        "residual_normal": res.residual_normal,
        "active_rows": list(res.active.indices),
        "iterations": res.iterations,
    }
    ok = res.residual_normal <= args.tol
    report["certificate"] = {"passed": ok, "kkt_distance": res.residual_normal}
    lines = [
        f"projection: {res.proj.tolist()}",
        f"distance:   {res.distance:.12g}",
        f"certificate {_mark(ok, sys.stdout)} (normal-cone residual {res.residual_normal:.3e})",
    ]
    return (EXIT_OK if ok else EXIT_CERT_FAIL), report, lines


def _cmd_sharpness(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    if pf.linear is None:
        raise InvalidInput("sharpness needs a linear objective to use as the direction")
    P = pf.polyhedron()
    direction = unit(pf.linear)
    rep = sharpness_exact(P, direction)
    dual = None
    dual_note = None
    try:
        dual = sharpness_dual_estimate(P, direction, num_samples=args.samples,
                                       seed=args.seed)
    except SharpprojError as exc:
        dual_note = str(exc)
    report = _base_report("sharpness", _config(args), pf, args.seed)
    report["result"] = {
        "direction": direction.tolist(),
        "alpha_lower": rep.alpha_lower,
        "alpha_exact": rep.alpha_exact,
        "subsets_examined": rep.subsets_examined,
        "vacuous": rep.vacuous,
        "dual_estimate": dual,
        "dual_skipped": dual_note,
        "samples": args.samples,
    }
    lines = [
        f"direction:    {direction.tolist()}",
        f"alpha lower:  {rep.alpha_lower:.12g}",
        f"alpha exact:  {rep.alpha_exact:.12g}" if rep.alpha_exact is not None else "alpha exact:  n/a",
        f"dual estimate: {dual:.12g}" if dual is not None else f"dual estimate: skipped ({dual_note})",
    ]
    return EXIT_OK, report, lines


def _cmd_solve_lp(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    if pf.linear is None:
        raise InvalidInput("solve-lp needs objective.linear")
    P = pf.polyhedron()
    c_norm = float(np.linalg.norm(pf.linear))
    x_star = unit(pf.linear)
    mu = _flag_or_file(args.mu, pf.mu, "auto")
    alpha = _flag_or_file(args.alpha, pf.alpha, "auto")
    v = pf.v if pf.v is not None else "auto"
    rep = solve_lp_spp(P, x_star, v, mu=mu, alpha=alpha, cert_tol=args.tol,
                       strict=False, max_doublings=args.max_doublings)
    report = _base_report("solve-lp", _config(args), pf, args.seed)
    report["result"] = _spp_report_dict(rep, scale=c_norm)
    report["certificate"] = {"passed": rep.certificate_passed,
                             "kkt_distance": rep.kkt_certificate}
    lines = [
        f"solution: {rep.solution.tolist()}",
        f"value:    {rep.value * c_norm:.12g} (unit-direction value {rep.value:.12g})",
        f"mu used:  {rep.mu_used:.12g} (threshold {rep.mu_threshold:.12g}, alpha {rep.alpha_used:.12g})",
        f"doublings: {rep.doublings}",
        f"certificate {_mark(rep.certificate_passed, sys.stdout)} "
        f"(normal-cone distance {rep.kkt_certificate:.3e})",
    ]
    return (EXIT_OK if rep.certificate_passed else EXIT_CERT_FAIL), report, lines


def _cmd_solve_cp(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    if pf.max_affine is None:
        raise InvalidInput("solve-cp needs objective.max_affine")
    P = pf.polyhedron()
    v = pf.v if pf.v is not None else "auto"
    t = pf.t if pf.t is not None else "auto"
    rep = solve_cp_spp(P, pf.max_affine, t=t, v=v, cert_tol=args.tol)
    lp = rep.lp_report
    report = _base_report("solve-cp", _config(args), pf, args.seed)
    report["result"] = {
        "w": rep.w.tolist(),
        "f_w": rep.fw,
        "oracle_value": rep.oracle_value,
        "lifted_point": [rep.point[0].tolist(), rep.point[1]],
        "lp": _spp_report_dict(lp),
    }
    report["certificate"] = {"passed": lp.certificate_passed,
                             "kkt_distance": lp.kkt_certificate}
    lines = [
        f"minimizer: {rep.w.tolist()}",
        f"value:     {rep.fw:.12g}",
        f"certificate {_mark(lp.certificate_passed, sys.stdout)} "
        f"(normal-cone distance {lp.kkt_certificate:.3e})",
    ]
    return (EXIT_OK if lp.certificate_passed else EXIT_CERT_FAIL), report, lines


def _cmd_dist_bound(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    P = pf.polyhedron()
    a = np.array([float(x) for x in args.a.split(",")])
    b = np.array([float(x) for x in args.b.split(",")])
    rep = distance_upper_bound(P, a, b, args.delta, num_samples=args.samples,
                               seed=args.seed)
    report = _base_report("dist-bound", _config(args), pf, args.seed)
    report["result"] = {
        "a": rep.a.tolist(), "b": rep.b.tolist(), "rho": rep.rho,
        "delta": rep.delta, "sampled_inf": rep.sampled_inf,
        "epsilon": rep.epsilon, "verified": rep.verified, "samples": rep.samples,
    }
    report["certificate"] = {"passed": rep.verified}
    lines = [
        f"rho = ||a-b|| = {rep.rho:.12g}",
        f"sampled inf:    {rep.sampled_inf:.12g}",
        f"epsilon:        {rep.epsilon:.12g}",
        f"bound d(b,A) <= rho - eps {_mark(rep.verified, sys.stdout)}",
    ]
    return (EXIT_OK if rep.verified else EXIT_CERT_FAIL), report, lines


def _cmd_subtrans(args) -> tuple[int, dict, list[str]]:
    pf = parse_problem(args.problem)
    if pf.linear is None:
        raise InvalidInput("subtrans needs a linear objective to use as the direction")
    P = pf.polyhedron()
    direction = unit(pf.linear)
    rep = estimate_subtransversality(P, direction, box_radius=args.radius,
                                     num_samples=args.samples, seed=args.seed)
    report = _base_report("subtrans", _config(args), pf, args.seed)
    report["result"] = {
        "direction": direction.tolist(),
        "alpha_sub_est": rep.alpha_sub_est,
        "gamma_implied": rep.gamma_implied,
        "beta_required": rep.beta_required,
        "samples": rep.samples,
        "box_radius": rep.box_radius,
        "vacuous": rep.vacuous,
    }
    if rep.vacuous:
        lines = ["hyperplane sampling vacuous (supporting hyperplane lies in the set)"]
    else:
        lines = [
            f"alpha estimate: {rep.alpha_sub_est:.12g}",
            f"implied sharpness gamma: {rep.gamma_implied:.12g}",
            f"sufficient sharpness beta: {rep.beta_required:.12g}",
        ]
    return EXIT_OK, report, lines


def _cmd_bench(args) -> tuple[int, dict, list[str]]:
    rng = np.random.default_rng(args.seed)
    failures = []
    proj_mismatch = 0
    value_mismatch = 0
    for idx in range(args.count):
        P, x_star = random_bounded_lp(rng, args.n, args.m)
        z = 3.0 * rng.standard_normal(args.n)
        fast = project_polyhedron(P, z, kkt_tol=args.tol)
        brute = project_brute(P, z)
        if np.linalg.norm(fast.proj - brute.proj) > 1e-7:
            proj_mismatch += 1
            failures.append(idx)
            continue
        rep = solve_lp_spp(P, x_star, "auto", cert_tol=args.tol, strict=False)
        oracle = lp_solve_enumeration(P, x_star)
        if (not rep.certificate_passed) or abs(rep.value - oracle.value) > 1e-7:
            value_mismatch += 1
            failures.append(idx)
    report = _base_report("bench", _config(args), None, args.seed)
    report["result"] = {
        "count": args.count, "n": args.n, "m": args.m,
        "projection_mismatches": proj_mismatch,
        "value_mismatches": value_mismatch,
        "failed_instances": failures,
    }
    ok = not failures
    report["certificate"] = {"passed": ok}
    lines = [
        f"{args.count - len(failures)}/{args.count} oracle matches "
        f"(n={args.n}, m={args.m}, seed={args.seed}) {_mark(ok, sys.stdout)}"
    ]
    return (EXIT_OK if ok else EXIT_CERT_FAIL), report, lines


def _cmd_gen(args) -> tuple[int, dict, list[str]]:
    rng = np.random.default_rng(args.seed)
    P = random_polytope(rng, args.n, args.m)
    direction = random_direction(rng, args.n)
    data = {
        "n": args.n,
        "A": (P.A * P.row_scale[:, None]).tolist(),
        "b": (P.b * P.row_scale).tolist(),
        "objective": {"linear": direction.tolist()},
    }
    text = _canon(data)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    report = _base_report("gen", _config(args), None, args.seed)
    report["result"] = {"problem": data, "out": args.out}
    lines = [text if not args.out else f"wrote {args.out}"]
    return EXIT_OK, report, lines


def _cmd_verify(args) -> tuple[int, dict, list[str]]:
    with open(args.report, "r", encoding="utf-8") as fh:
        stored = json.load(fh)
    command = stored.get("command")
    checks: list[tuple[str, bool]] = []

    def check(name, ok):
        checks.append((name, bool(ok)))

    prob = stored.get("problem")
    P = None
    if prob is not None:
        P = Polyhedron(np.array(prob["A_normalized"]), np.array(prob["b_normalized"]))

    if command == "solve-lp":
        res = stored["result"]
        x_star = np.array(res["x_star"])
        solution = np.array(res["solution"])
        u = np.array(res["u"])
        v = np.array(res["v"])
        mu = float(res["mu_used"])
        check("u == v - mu * x_star", np.allclose(u, v - mu * x_star, atol=1e-12))
        check("solution feasible", P.contains(solution, tol=1e-8))
        cert, _ = distance_to_cone(-x_star, normal_cone_at(P, solution))
        check("kkt certificate", cert <= stored["config"]["tol"])
        redo = project_polyhedron(P, u, kkt_tol=stored["config"]["tol"])
        check("projection reproducible", np.linalg.norm(redo.proj - solution) <= 1e-8)
    elif command == "solve-cp":
        res = stored["result"]
        lp = res["lp"]
        solution = np.array(lp["solution"])
        x_star = np.array(lp["x_star"])
        pieces = prob["objective"]["max_affine"]
        f = MaxAffine(np.array([p["a"] for p in pieces]),
                      np.array([p["c"] for p in pieces]))
        from .projection import lift_epigraph

        lifted = lift_epigraph(P, f).poly
        check("solution feasible", lifted.contains(solution, tol=1e-8))
        cert, _ = distance_to_cone(-x_star, normal_cone_at(lifted, solution))
        check("kkt certificate", cert <= stored["config"]["tol"])
        w = np.array(res["w"])
        check("graph landing", abs(res["f_w"] - solution[-1]) <= 1e-8)
        check("w consistent", np.allclose(w, solution[:-1], atol=1e-12))
        check("value is f(w)", abs(f(w) - res["f_w"]) <= 1e-9)
    elif command == "project":
        res = stored["result"]
        proj = np.array(res["projection"])
        v = np.array(prob["v"])
        redo = project_polyhedron(P, v, kkt_tol=stored["config"]["tol"])
        check("projection reproducible", np.linalg.norm(redo.proj - proj) <= 1e-8)
        check("residual", redo.residual_normal <= stored["config"]["tol"])
    elif command == "sharpness":
        res = stored["result"]
        direction = np.array(res["direction"])
        rep = sharpness_lower_bound(P, direction)
        check("alpha lower reproducible", abs(rep.alpha_lower - res["alpha_lower"]) <= 1e-12)
        if res.get("alpha_exact") is not None:
            rep2 = sharpness_exact(P, direction)
            check("alpha exact reproducible",
                  abs(rep2.alpha_exact - _parse_special_floats(res["alpha_exact"])) <= 1e-12
                  if math.isfinite(_parse_special_floats(res["alpha_exact"]))
                  else not math.isfinite(rep2.alpha_exact))
    elif command == "dist-bound":
        res = stored["result"]
        a, b = np.array(res["a"]), np.array(res["b"])
        dP = project_polyhedron(P, b).distance
        check("bound holds", dP <= res["rho"] - res["epsilon"] + 1e-7)
        check("rho", abs(res["rho"] - float(np.linalg.norm(a - b))) <= 1e-12)
    elif command == "subtrans":
        res = stored["result"]
        direction = np.array(res["direction"])
        rep = estimate_subtransversality(
            P, direction, box_radius=res["box_radius"],
            num_samples=stored["config"]["samples"], seed=stored["seed"])
        same = (rep.vacuous and res["vacuous"]) or (
            rep.alpha_sub_est is not None and res["alpha_sub_est"] is not None
            and abs(rep.alpha_sub_est - res["alpha_sub_est"]) <= 1e-9)
        check("estimate reproducible", same)
    elif command == "bench":
        cfg = stored["config"]
        ns = argparse.Namespace(**{**cfg, "format": "json"})
        code, redo, _ = _cmd_bench(ns)
        check("bench reproducible",
              redo["result"]["failed_instances"] == stored["result"]["failed_instances"])
        check("bench green", code == EXIT_OK)
    elif command == "gen":
        cfg = stored["config"]
        ns = argparse.Namespace(**{**cfg, "format": "json", "out": None})
        _, redo, _ = _cmd_gen(ns)
        check("generation reproducible",
              _canon(redo["result"]["problem"]) == _canon(stored["result"]["problem"]))
    else:
        raise InvalidInput(f"cannot verify reports for command {command!r}")

    ok = all(flag for _, flag in checks)
    report = _base_report("verify", {"report": args.report}, None, stored.get("seed"))
    report["result"] = {"verified_command": command,
                        "checks": [{"name": n, "passed": p} for n, p in checks],
                        "passed": ok}
    report["certificate"] = {"passed": ok}
    lines = [f"{n}: {_mark(p, sys.stdout)}" for n, p in checks]
    lines.append(f"verify {_mark(ok, sys.stdout)}")
    return (EXIT_OK if ok else EXIT_CERT_FAIL), report, lines


# --------------------------------------------------------------------------
# Wiring.
# --------------------------------------------------------------------------


def _flag_or_file(flag, file_value, default):
    if flag is not None:
        if isinstance(flag, str) and flag != "auto":
            return float(flag)
        return flag
    if file_value is not None:
        return file_value
    return default


def _spp_report_dict(rep, scale: float = 1.0) -> dict:
    return {
        "x_star": rep.x_star.tolist(),
        "v": rep.v.tolist(),
        "theta_v": rep.theta_v,
        "d_vA": rep.d_vA,
        "alpha_used": rep.alpha_used,
        "mu_threshold": rep.mu_threshold,
        "mu_used": rep.mu_used,
        "u": rep.u.tolist(),
        "solution": rep.solution.tolist(),
        "value": rep.value,
        "value_original_scale": rep.value * scale,
        "kkt_certificate": rep.kkt_certificate,
        "conditions": rep.conditions,
        "doublings": rep.doublings,
        "certificate_passed": rep.certificate_passed,
    }


def _config(args) -> dict:
    skip = {"func", "problem", "report"}
    out = {}
    for key, val in vars(args).items():
        if key in skip or val is None:
            continue
        out[key] = val
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sharpproj",
                     description="single-projection solvers and sharpness reports "
                                 "for polyhedral programs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, problem=True, sampling=False):
        if problem:
            p.add_argument("problem", help="problem file (JSON)")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="KKT/certificate tolerance (default 1e-9)")
        p.add_argument("--active-tol", dest="active_tol", type=float, default=1e-8,
                       help="active-set tolerance (default 1e-8)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        if sampling:
            p.add_argument("--samples", type=int, default=128)

    p = sub.add_parser("project", help="project the file's point v onto the polyhedron")
    common(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("sharpness", help="sharpness lower bound, exact modulus, dual estimate")
    common(p, sampling=True)
    p.set_defaults(func=_cmd_sharpness)

    p = sub.add_parser("solve-lp", help="single-projection LP solve")
    common(p)
    p.add_argument("--mu", default=None, help="shift magnitude or 'auto'")
    p.add_argument("--alpha", default=None, help="sharpness constant or 'auto'")
    p.add_argument("--max-doublings", dest="max_doublings", type=int, default=60)
    p.set_defaults(func=_cmd_solve_lp)

    p = sub.add_parser("solve-cp", help="single-projection solve of a max-affine program")
    common(p)
    p.set_defaults(func=_cmd_solve_cp)

    p = sub.add_parser("dist-bound", help="certified distance upper bound")
    common(p, sampling=True)
    p.add_argument("--a", required=True, help="feasible point, comma separated")
    p.add_argument("--b", required=True, help="infeasible point, comma separated")
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=_cmd_dist_bound)

    p = sub.add_parser("subtrans", help="subtransversality constant estimate")
    common(p, sampling=True)
    p.add_argument("--radius", type=float, default=None)
    p.set_defaults(func=_cmd_subtrans)

    p = sub.add_parser("verify", help="re-check a stored report's certificates")
    p.add_argument("report", help="report file produced with --format json")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="random-instance oracle comparison")
    common(p, problem=False)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("gen", help="seeded bounded-instance generator")
    common(p, problem=False)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        code, report, lines = args.func(args)
    except CertificateError as exc:
        sys.stderr.write(f"sharpproj: certificate failure: {exc}\n")
        return EXIT_CERT_FAIL
    except SharpprojError as exc:
        sys.stderr.write(f"sharpproj: error: {exc}\n")
        return EXIT_ERROR
    except FileNotFoundError as exc:
        sys.stderr.write(f"sharpproj: error: {exc}\n")
        return EXIT_ERROR
    _emit(report, args.format, lines, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: config-driven experiment runs with archivable output.

Three subcommands, each taking a single JSON config path:

    yamabe check    <config.json>   structural suites for a symmetric function
    yamabe example1 <config.json>   closed-form non-smooth profile + verification
    yamabe solve    <config.json>   continuation solve of a Dirichlet problem

Exit codes: 0 pass, 1 domain/check failure, 2 config error, 3 partial
convergence.  Configs are validated strictly (unknown keys rejected) before
any computation; --out, --seed and --verbose override the config.  Output
files embed the resolved config and a format version line, use 17 significant
digits and LF line endings, so identical configs produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._errors import (
    ConfigError,
    ContinuationError,
    YamabeError,
)
from . import benchmarks, example1, solver, symfun
from .geometry import CylinderGeometry, RadialProfile

FORMAT_VERSION = "yamabe/1"


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _check_keys(mapping, allowed, context):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{context}: expected an object")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown keys {sorted(unknown)}")


def _need(mapping, key, context):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def _as_int(value, context, lo=None, hi=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{context}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{context}: must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{context}: must be <= {hi}, got {value}")
    return value


def _as_real(value, context):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{context}: expected a number, got {value!r}")
    return float(value)


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _function_spec(cfg, context="function"):
    _check_keys(cfg, {"kind", "n", "k", "l"}, context)
    kind = _need(cfg, "kind", context)
    n = _as_int(_need(cfg, "n", context), f"{context}.n", lo=3)
    if kind == "sigma1_squared_broken":
        if "k" in cfg or "l" in cfg:
            raise ConfigError(f"{context}: the broken fixture takes only n")
        return symfun.BrokenHomogeneitySpec(n=n)
    if kind == "sigma_k_root":
        k = _as_int(_need(cfg, "k", context), f"{context}.k", lo=1, hi=n)
        if "l" in cfg:
            raise ConfigError(f"{context}: l is only for the quotient kind")
        return symfun.SymFuncSpec("sigma_k_root", n=n, k=k)
    if kind == "quotient":
        k = _as_int(_need(cfg, "k", context), f"{context}.k", lo=2, hi=n)
        l = _as_int(_need(cfg, "l", context), f"{context}.l", lo=1, hi=k - 1)
        return symfun.SymFuncSpec("quotient", n=n, k=k, l=l)
    raise ConfigError(f"{context}.kind: unknown kind {kind!r}")


def _profile_family(cfg, context):
    _check_keys(cfg, {"family", "amplitude", "offset", "slope", "value"}, context)
    family = _need(cfg, "family", context)
    if family == "cosh":
        amp = _as_real(_need(cfg, "amplitude", context), f"{context}.amplitude")
        off = _as_real(cfg.get("offset", 0.0), f"{context}.offset")
        return benchmarks.cosh_profile(amp, off)
    if family == "linear":
        slope = _as_real(_need(cfg, "slope", context), f"{context}.slope")
        off = _as_real(cfg.get("offset", 0.0), f"{context}.offset")
        return benchmarks.linear_profile(slope, off)
    if family == "constant":
        return benchmarks.constant_profile(_as_real(_need(cfg, "value", context), f"{context}.value"))
    raise ConfigError(f"{context}.family: unknown family {family!r}")


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _config_comment(resolved):
    return json.dumps(resolved, sort_keys=True, separators=(",", ":"))


def _write_profile_csv(path, resolved, profile, residual_column, extra_comments=()):
    lines = [f"# format {FORMAT_VERSION} profile", f"# config {_config_comment(resolved)}"]
    lines += list(extra_comments)
    lines.append("x,u,du,d2u,residual")
    for x, u, du, d2u, res in zip(profile.grid, profile.u, profile.du, profile.d2u,
                                  residual_column):
        lines.append(",".join(_fmt(float(v)) for v in (x, u, du, d2u, res)))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _write_monitors_csv(path, resolved, states):
    lines = [f"# format {FORMAT_VERSION} monitors", f"# config {_config_comment(resolved)}"]
    lines.append("t,sup_u,sup_du,sup_d2u,residual_norm,cone_margin,newton_iters")
    for s in states:
        row = (s.t, *s.monitors, s.residual_norm, s.cone_margin, s.newton_iters)
        lines.append(",".join(_fmt(float(v) if not isinstance(v, int) else v) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _write_report(path, resolved, checks, passed, extra=None):
    doc = {
        "format_version": FORMAT_VERSION,
        "config": resolved,
        "checks": checks,
        "passed": bool(passed),
    }
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", newline="\n")


def _out_dir(resolved):
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# check command
# ---------------------------------------------------------------------------

_CHECK_KEYS = {"function", "samples", "seed", "ball", "separation", "out", "verbose"}


def cmd_check(config):
    _check_keys(config, _CHECK_KEYS, "config")
    spec = _function_spec(_need(config, "function", "config"))
    samples = _as_int(config.get("samples", 1000), "samples", lo=1)
    seed = _as_int(config.get("seed", 0), "seed")
    ball_cfg = config.get("ball", {})
    _check_keys(ball_cfg, {"t_values", "directions"}, "ball")
    t_values = tuple(_as_real(t, "ball.t_values") for t in ball_cfg.get("t_values", (0.0, 0.25, 0.5, 0.9, 0.99)))
    directions = _as_int(ball_cfg.get("directions", 1000), "ball.directions", lo=1)
    sep_cfg = config.get("separation", {})
    _check_keys(sep_cfg, {"samples", "beta"}, "separation")
    sep_samples = _as_int(sep_cfg.get("samples", 2000), "separation.samples", lo=1)
    beta = _as_real(sep_cfg.get("beta", 0.2), "separation.beta")
    resolved = {
        "command": "check",
        "function": dict(_need(config, "function", "config")),
        "samples": samples,
        "seed": seed,
        "ball": {"t_values": list(t_values), "directions": directions},
        "separation": {"samples": sep_samples, "beta": beta},
        "out": str(config.get("out", "results/check")),
        "verbose": bool(config.get("verbose", False)),
    }
    out = _out_dir(resolved)

    checks = []
    structure = symfun.verify_structure(spec, sample_count=samples, seed=seed)
    for c in structure.checks:
        checks.append({"name": f"structure.{c.name}", "status": "pass" if c.passed else "fail",
                       "value": c.worst, "threshold": c.threshold})

    broken = getattr(spec, "kind", "") == "sigma1_squared_broken"
    classification = None
    if not broken:
        classification = symfun.classify_type(spec)
        ball = symfun.interpolation_ball_report(spec, t_values=t_values,
                                                directions=directions, seed=seed)
        worst_score = min(row[1] for row in ball.rows)
        worst_corner = min(row[2] for row in ball.rows)
        checks.append({"name": "ball.membership", "status": "pass" if worst_score > 0 else "fail",
                       "value": worst_score, "threshold": 0.0})
        checks.append({"name": "ball.value_bound", "status": "pass" if worst_corner >= 0 else "fail",
                       "value": worst_corner, "threshold": 0.0})
        sep = symfun.concavity_margin_suite(spec, samples=sep_samples, beta=beta, seed=seed)
        checks.append({"name": "separation.margin_positive",
                       "status": "pass" if sep.passed else "fail",
                       "value": sep.min_margin, "threshold": 0.0})

    passed = all(c["status"] == "pass" for c in checks)
    extra = {"label": spec.label}
    if classification is not None:
        extra["classification"] = {"cone_type": classification.cone_type,
                                   "f_type": classification.f_type}
    _write_report(out / "report.json", resolved, checks, passed, extra=extra)
    if resolved["verbose"]:
        for c in checks:
            print(f"{c['name']}: {c['status']} (value {_fmt(c['value'])})", file=sys.stderr)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# example1 command
# ---------------------------------------------------------------------------

_EXAMPLE_KEYS = {"n", "k", "c", "grid_size", "thresholds", "out", "seed", "verbose"}


def cmd_example1(config):
    _check_keys(config, _EXAMPLE_KEYS, "config")
    n = _as_int(_need(config, "n", "config"), "n", lo=3)
    k = _as_int(_need(config, "k", "config"), "k", lo=2, hi=n)
    c = _as_real(_need(config, "c", "config"), "c")
    grid_size = _as_int(config.get("grid_size", 401), "grid_size", lo=5)
    th_cfg = config.get("thresholds", {})
    _check_keys(th_cfg, {"interior_residual", "boundary_error", "drift", "d2u_floor"},
                "thresholds")
    thresholds = example1.VerifyThresholds(
        interior_residual=_as_real(th_cfg.get("interior_residual", 1e-7), "thresholds.interior_residual"),
        boundary_error=_as_real(th_cfg.get("boundary_error", 1e-6), "thresholds.boundary_error"),
        drift=_as_real(th_cfg.get("drift", 1e-8), "thresholds.drift"),
        d2u_floor=_as_real(th_cfg.get("d2u_floor", 10.0), "thresholds.d2u_floor"),
    )
    resolved = {
        "command": "example1", "n": n, "k": k, "c": c, "grid_size": grid_size,
        "thresholds": {
            "interior_residual": thresholds.interior_residual,
            "boundary_error": thresholds.boundary_error,
            "drift": thresholds.drift,
            "d2u_floor": thresholds.d2u_floor,
        },
        "out": str(config.get("out", "results/example1")),
        "seed": _as_int(config.get("seed", 0), "seed"),
        "verbose": bool(config.get("verbose", False)),
    }
    out = _out_dir(resolved)

    params = example1.ExampleParams.from_c(n, k, c)
    solution = example1.solve_profile(params, node_count=grid_size)
    report = example1.verify_example(params, solution, thresholds=thresholds)

    profile = solution.profile
    interior = np.abs(profile.grid) < solution.t_max
    residual_col = np.empty(grid_size)
    residual_col[~interior] = profile.u[~interior] - c
    du = solution.du_at(profile.grid[interior])
    d2u = solution.d2u_at(profile.grid[interior])
    sigk = example1._sigma_k_of_radial(n, k, du, d2u)
    residual_col[interior] = example1._signed_root(sigk, k) \
        - params.rhs_root * np.exp(-2.0 * profile.u[interior])

    derived = {
        "d": params.d,
        "c": params.c,
        "h0": params.h0,
        "half_length": solution.t_max,
        "boundary_value": params.boundary_value,
    }
    _write_profile_csv(
        out / "profile.csv", resolved, profile, residual_col,
        extra_comments=[f"# derived " + json.dumps({k2: float(v) for k2, v in derived.items()},
                                                   sort_keys=True)],
    )

    checks = [
        {"name": "interior_residual", "status": "pass" if report.max_interior_residual <= thresholds.interior_residual else "fail",
         "value": report.max_interior_residual, "threshold": thresholds.interior_residual},
        {"name": "slope_subunit", "status": "pass" if report.min_one_minus_slope_sq > 0 else "fail",
         "value": report.min_one_minus_slope_sq, "threshold": 0.0},
        {"name": "boundary_error", "status": "pass" if report.boundary_error <= thresholds.boundary_error else "fail",
         "value": report.boundary_error, "threshold": thresholds.boundary_error},
        {"name": "first_integral_drift", "status": "pass" if report.max_drift <= thresholds.drift else "fail",
         "value": report.max_drift, "threshold": thresholds.drift},
        {"name": "curvature_increasing", "status": "pass" if report.d2u_increasing else "fail",
         "value": report.d2u_last_over_first, "threshold": 1.0},
        {"name": "curvature_floor", "status": "pass" if report.d2u_samples[-1] > thresholds.d2u_floor else "fail",
         "value": report.d2u_samples[-1], "threshold": thresholds.d2u_floor},
    ]
    _write_report(out / "report.json", resolved, checks, report.passed, extra={"derived": derived})
    if resolved["verbose"]:
        print(f"d={_fmt(params.d)} T={_fmt(solution.t_max)}", file=sys.stderr)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# solve command
# ---------------------------------------------------------------------------

_SOLVE_KEYS = {"n", "function", "half_length", "grid_size", "t_schedule", "psi", "phi",
               "subsolution", "init", "newton", "uniformity_factor", "out", "seed", "verbose"}


def _build_solve_problem(config, resolved):
    n = _as_int(_need(config, "n", "config"), "n", lo=3)
    spec = _function_spec({"n": n, **_need(config, "function", "config")})
    grid_size = _as_int(config.get("grid_size", 401), "grid_size", lo=5)

    psi_cfg = _need(config, "psi", "config")
    _check_keys(psi_cfg, {"family", "theta", "c", "value"}, "psi")
    psi_family = _need(psi_cfg, "family", "psi")

    ell_cfg = _need(config, "half_length", "config")
    example_params = None
    if ell_cfg == "example1":
        if psi_family != "example1_rhs":
            raise ConfigError("half_length: 'example1' requires psi.family example1_rhs")
        c = _as_real(_need(psi_cfg, "c", "psi"), "psi.c")
        if not 2 <= spec.k <= n:
            raise ConfigError("half_length: the closed form requires 2 <= k <= n")
        example_params = example1.ExampleParams.from_c(n, spec.k, c)
        ell = example1.half_length(example_params)
    else:
        ell = _as_real(ell_cfg, "half_length")
        if ell <= 0:
            raise ConfigError("half_length must be positive")

    geom = CylinderGeometry(n=n, half_length=ell)
    grid = np.linspace(-ell, ell, grid_size)

    sub_profile = None
    sub_funcs = None
    if "subsolution" in config:
        sub_funcs = _profile_family(config["subsolution"], "subsolution")
        sub_profile = RadialProfile(grid, sub_funcs[0](grid))

    if psi_family == "subsolution_scaled":
        if sub_funcs is None:
            raise ConfigError("psi.family subsolution_scaled requires a subsolution")
        theta = _as_real(psi_cfg.get("theta", 0.5), "psi.theta")
        if not 0.0 < theta < 1.0:
            raise ConfigError("psi.theta must lie in (0, 1)")
        dense = np.linspace(-ell, ell, 4001)
        f_values = theta * benchmarks.radial_curvature_value(
            spec, 1.0, sub_funcs[1](dense), sub_funcs[2](dense))

        def psi(x, z):
            return np.interp(np.asarray(x, dtype=float), dense, f_values) \
                * np.ones_like(np.asarray(z, dtype=float))

        def psi_z(x, z):
            return np.zeros_like(np.asarray(x, dtype=float) * np.asarray(z, dtype=float))
    elif psi_family == "example1_rhs":
        c = _as_real(_need(psi_cfg, "c", "psi"), "psi.c")
        if example_params is None:
            example_params = example1.ExampleParams.from_c(n, spec.k, c)
        root = example_params.rhs_root

        def psi(x, z):
            return root * np.exp(-2.0 * np.asarray(z, dtype=float)) \
                * np.ones_like(np.asarray(x, dtype=float))

        def psi_z(x, z):
            return -2.0 * psi(x, z)
    elif psi_family == "constant":
        value = _as_real(_need(psi_cfg, "value", "psi"), "psi.value")
        if value <= 0:
            raise ConfigError("psi.value must be positive")

        def psi(x, z):
            return np.full_like(np.asarray(x, dtype=float) * np.asarray(z, dtype=float), value)

        def psi_z(x, z):
            return np.zeros_like(np.asarray(x, dtype=float) * np.asarray(z, dtype=float))
    else:
        raise ConfigError(f"psi.family: unknown family {psi_family!r}")

    phi_cfg = config.get("phi", "subsolution")
    if phi_cfg == "subsolution":
        if sub_profile is None:
            raise ConfigError("phi: 'subsolution' requires a subsolution")
        phi_left = float(sub_profile.u[0])
        phi_right = float(sub_profile.u[-1])
    else:
        _check_keys(phi_cfg, {"left", "right"}, "phi")
        phi_left = _as_real(_need(phi_cfg, "left", "phi"), "phi.left")
        phi_right = _as_real(_need(phi_cfg, "right", "phi"), "phi.right")

    init_profile = None
    if "init" in config:
        init_cfg = config["init"]
        _check_keys(init_cfg, {"family", "amplitude", "offset", "slope", "value", "c"}, "init")
        if init_cfg.get("family") == "example1_profile":
            c = _as_real(_need(init_cfg, "c", "init"), "init.c")
            ep = example1.ExampleParams.from_c(n, spec.k, c)
            t_max = example1.half_length(ep)
            if abs(t_max - ell) > 1e-9 * max(1.0, ell):
                raise ConfigError("init example1_profile requires half_length 'example1'")
            init_profile = example1.solve_profile(ep, node_count=grid_size).profile
        else:
            funcs = _profile_family(init_cfg, "init")
            init_profile = RadialProfile(grid, funcs[0](grid))

    if sub_profile is None and init_profile is None:
        raise ConfigError("solve needs a subsolution or an init profile")

    problem = solver.DirichletProblem(
        geom=geom, spec=spec, psi=psi, psi_z=psi_z,
        phi_left=phi_left, phi_right=phi_right, subsolution=sub_profile,
    )
    return problem, init_profile, ell


def cmd_solve(config):
    _check_keys(config, _SOLVE_KEYS, "config")
    problem, init_profile, ell = _build_solve_problem(config, None)

    schedule = config.get("t_schedule")
    if schedule is not None:
        schedule = tuple(_as_real(t, "t_schedule") for t in schedule)
    newton_cfg = config.get("newton", {})
    _check_keys(newton_cfg, {"tol", "max_iter"}, "newton")
    opts = solver.NewtonOptions(
        tol=_as_real(newton_cfg.get("tol", 1e-10), "newton.tol"),
        max_iter=_as_int(newton_cfg.get("max_iter", 50), "newton.max_iter", lo=1),
    )
    factor = _as_real(config.get("uniformity_factor", 2.0), "uniformity_factor")

    resolved = {
        "command": "solve",
        "n": problem.geom.n,
        "function": dict(_need(config, "function", "config")),
        "half_length": config["half_length"] if config["half_length"] == "example1" else float(config["half_length"]),
        "grid_size": _as_int(config.get("grid_size", 401), "grid_size", lo=5),
        "t_schedule": list(schedule) if schedule is not None else list(solver.DEFAULT_T_SCHEDULE),
        "psi": dict(config["psi"]),
        "phi": config.get("phi", "subsolution") if isinstance(config.get("phi", "subsolution"), str) else dict(config["phi"]),
        "subsolution": dict(config["subsolution"]) if "subsolution" in config else None,
        "init": dict(config["init"]) if "init" in config else None,
        "newton": {"tol": opts.tol, "max_iter": opts.max_iter},
        "uniformity_factor": factor,
        "out": str(config.get("out", "results/solve")),
        "seed": _as_int(config.get("seed", 0), "seed"),
        "verbose": bool(config.get("verbose", False)),
    }
    out = _out_dir(resolved)

    checks = []
    if problem.subsolution is not None:
        sub_report = solver.check_subsolution(problem)
        checks.append({"name": "subsolution.margin",
                       "status": "pass" if sub_report.passed else "fail",
                       "value": sub_report.min_margin, "threshold": -1e-10})
        checks.append({"name": "subsolution.cone_margin",
                       "status": "pass" if not sub_report.cone_violations else "fail",
                       "value": sub_report.min_cone_margin, "threshold": 0.0})
        if not sub_report.passed:
            _write_report(out / "report.json", resolved, checks, False)
            return 1

    failed_t = None
    try:
        report = solver.continuation_run(problem, t_schedule=schedule, opts=opts,
                                         init=init_profile)
        states = report.states
    except ContinuationError as exc:
        failed_t = exc.t_failed
        states = exc.states
        report = solver.ContinuationReport(states=states)

    _write_monitors_csv(out / "monitors.csv", resolved, states)
    for i, s in enumerate(states):
        res_col = solver.residual(problem, s.t, s.profile)
        _write_profile_csv(out / f"profile_{i:03d}_t{s.t:.6f}.csv", resolved, s.profile, res_col,
                           extra_comments=[f"# t {_fmt(s.t)}"])

    extra = {"failed_t": failed_t}
    if states:
        extra["monitor_growth"] = list(report.monitor_growth())
        extra["monitor_spread"] = list(report.monitor_spread())
        extra["curvature_scaled"] = [[t, v] for t, v in report.curvature_scaled()]
        if problem.subsolution is not None:
            # bounded monitors are only promised when a subsolution anchors
            # the family; without one, growth is expected data
            checks.append({"name": "continuation.uniform_growth",
                           "status": "pass" if report.uniform_within(factor) else "fail",
                           "value": max(report.monitor_growth()), "threshold": factor})
    checks.append({"name": "continuation.full_schedule",
                   "status": "pass" if failed_t is None else "fail",
                   "value": failed_t if failed_t is not None else -1.0,
                   "threshold": -1.0})
    passed = failed_t is None and all(c["status"] == "pass" for c in checks)
    _write_report(out / "report.json", resolved, checks, passed, extra=extra)
    if failed_t is not None:
        return 3
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="yamabe",
        description="Experiments for fully nonlinear Yamabe-type Dirichlet problems "
                    "on the round cylinder.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "example1", "solve"):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a JSON config")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--seed", type=int, help="override the seed")
        p.add_argument("--verbose", action="store_true", help="progress on stderr")
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
        if args.out is not None:
            config["out"] = args.out
        if args.seed is not None:
            config["seed"] = args.seed
        if args.verbose:
            config["verbose"] = True
        handler = {"check": cmd_check, "example1": cmd_example1, "solve": cmd_solve}[args.command]
        return handler(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except YamabeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

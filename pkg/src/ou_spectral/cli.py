"""Command-line interface.

Subcommands load a JSON model config and emit human-readable reports to
stdout, with optional machine-readable copies via --json and --csv.
Exit codes: 0 success, 1 verification failure, 2 usage or config error.
All machine-readable output is deterministically ordered, so identical
inputs give byte-identical files.
"""

import argparse
import json
import sys

import numpy as np

from . import verify as verify_mod
from .errors import ConfigError, OUSpectralError
from .gaussian import ForwardFunction, GaussianDensity
from .ladder import (
    adjoint_eigenfunction,
    apply_forward,
    build_model,
    eigenvalue,
    enumerate_modes,
    forward_eigenfunction,
    mode_normalization,
)
from .mpoly import MPoly, coeff_distance, render
from .sde_oracle import SimConfig, simulate
from .spectral import (
    evaluate_grid_complex,
    exact_gaussian_propagate,
    expand_gaussian,
    solve_inhomogeneous,
)

_TOL_DEFAULTS = {
    "defect_tol": 1e-9,
    "residual_tol": 1e-8,
    "prune_eps": 1e-13,
    "solvability_tol": 1e-10,
}

_TOP_KEYS = {
    "dimension",
    "A",
    "B",
    "max_order",
    "tolerances",
    "initial",
    "sim",
    "propagate",
    "source",
}


def _fail(field, msg):
    raise ConfigError(f"config field '{field}': {msg}")


def _number(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        _fail(field, f"expected a number, got {type(x).__name__}")
    return float(x)


def _integer(x, field, minimum=None):
    if isinstance(x, bool) or not isinstance(x, int):
        _fail(field, f"expected an integer, got {type(x).__name__}")
    if minimum is not None and x < minimum:
        _fail(field, f"must be at least {minimum}, got {x}")
    return x


def _vector(x, field, n):
    if not isinstance(x, list) or len(x) != n:
        _fail(field, f"expected a list of {n} numbers")
    return np.array([_number(v, field) for v in x], dtype=float)


def _matrix(x, field, n):
    if not isinstance(x, list) or len(x) != n:
        _fail(field, f"expected a {n}x{n} matrix as {n} row arrays")
    rows = []
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != n:
            _fail(field, f"row {i} is not a list of {n} numbers")
        rows.append([_number(v, f"{field}[{i}]") for v in row])
    return np.array(rows, dtype=float)


class ModelConfig:
    """Validated contents of a config file."""

    def __init__(self, raw, path):
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        unknown = sorted(set(raw) - _TOP_KEYS)
        if unknown:
            raise ConfigError(f"{path}: unknown config field '{unknown[0]}'")
        if "dimension" not in raw:
            _fail("dimension", "missing (required)")
        n = _integer(raw["dimension"], "dimension", minimum=1)
        self.dimension = n
        if "A" not in raw:
            _fail("A", "missing (required)")
        if "B" not in raw:
            _fail("B", "missing (required)")
        self.A = _matrix(raw["A"], "A", n)
        self.B = _matrix(raw["B"], "B", n)
        self.max_order = _integer(raw.get("max_order", 6), "max_order", minimum=0)

        tols = dict(_TOL_DEFAULTS)
        for key, val in (raw.get("tolerances") or {}).items():
            if key not in _TOL_DEFAULTS:
                _fail(f"tolerances.{key}", "unknown tolerance name")
            v = _number(val, f"tolerances.{key}")
            if v <= 0:
                _fail(f"tolerances.{key}", "must be positive")
            tols[key] = v
        self.tolerances = tols

        self.initial = None
        if raw.get("initial") is not None:
            block = raw["initial"]
            if not isinstance(block, dict):
                _fail("initial", "expected an object with 'mean' and 'cov'")
            if "mean" not in block or "cov" not in block:
                _fail("initial", "needs both 'mean' and 'cov'")
            self.initial = (
                _vector(block["mean"], "initial.mean", n),
                _matrix(block["cov"], "initial.cov", n),
            )

        self.sim = None
        if raw.get("sim") is not None:
            block = raw["sim"]
            if not isinstance(block, dict):
                _fail("sim", "expected an object")
            for key in ("paths", "dt", "t_final", "seed"):
                if key not in block:
                    _fail(f"sim.{key}", "missing (required for sim)")
            try:
                self.sim = SimConfig(
                    paths=_integer(block["paths"], "sim.paths", minimum=1),
                    dt=_number(block["dt"], "sim.dt"),
                    t_final=_number(block["t_final"], "sim.t_final"),
                    seed=_integer(block["seed"], "sim.seed"),
                )
            except ValueError as e:
                _fail("sim", str(e))

        self.times = [0.1, 0.5, 1.0]
        self.grid_lo, self.grid_hi = -3.0, 3.0
        self.grid_points = 61 if n == 1 else 21
        if raw.get("propagate") is not None:
            block = raw["propagate"]
            if not isinstance(block, dict):
                _fail("propagate", "expected an object")
            if "times" in block:
                if not isinstance(block["times"], list) or not block["times"]:
                    _fail("propagate.times", "expected a nonempty list of times")
                self.times = [_number(t, "propagate.times") for t in block["times"]]
                if any(t < 0 for t in self.times):
                    _fail("propagate.times", "times must be nonnegative")
            grid = block.get("grid") or {}
            if not isinstance(grid, dict):
                _fail("propagate.grid", "expected an object")
            self.grid_lo = _number(grid.get("lo", self.grid_lo), "propagate.grid.lo")
            self.grid_hi = _number(grid.get("hi", self.grid_hi), "propagate.grid.hi")
            self.grid_points = _integer(
                grid.get("points", self.grid_points), "propagate.grid.points", minimum=2
            )
            if self.grid_lo >= self.grid_hi:
                _fail("propagate.grid", "lo must be below hi")
            if self.grid_points**n > 200_000:
                _fail("propagate.grid.points", f"{self.grid_points}^{n} grid points is too many")

        self.source = None
        if raw.get("source") is not None:
            block = raw["source"]
            if not isinstance(block, dict) or "terms" not in block:
                _fail("source", "expected an object with a 'terms' list")
            terms = {}
            for idx, item in enumerate(block["terms"]):
                ok = (
                    isinstance(item, list)
                    and len(item) == 2
                    and isinstance(item[0], list)
                    and len(item[0]) == n
                    and isinstance(item[1], list)
                    and len(item[1]) == 2
                )
                if not ok:
                    _fail(
                        f"source.terms[{idx}]",
                        f"expected [[{n} exponents], [real, imag]]",
                    )
                exps = tuple(_integer(e, f"source.terms[{idx}]", minimum=0) for e in item[0])
                re = _number(item[1][0], f"source.terms[{idx}]")
                im = _number(item[1][1], f"source.terms[{idx}]")
                terms[exps] = terms.get(exps, 0.0) + complex(re, im)
            self.source = terms


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: parse error at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return ModelConfig(raw, path)


def _build(cfg):
    return build_model(
        cfg.A,
        cfg.B,
        tol=cfg.tolerances["defect_tol"],
        prune_eps=cfg.tolerances["prune_eps"],
    )


def _initial_density(cfg, model):
    if cfg.initial is None:
        return model.f0
    mean, cov = cfg.initial
    return GaussianDensity(mean=mean, cov=cov)


def _jsonify(x):
    if isinstance(x, dict):
        return {str(k): _jsonify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    if isinstance(x, complex):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.complexfloating,)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonify(v) for v in x.tolist()]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonify(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def _grid_points(cfg):
    axes = [np.linspace(cfg.grid_lo, cfg.grid_hi, cfg.grid_points)] * cfg.dimension
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _fmt_c(z):
    if z.imag == 0.0:
        return f"{z.real:.9g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.9g}{sign}{abs(z.imag):.9g}i"


def cmd_eigensystem(cfg, args):
    model = _build(cfg)
    modes = enumerate_modes(model.dim, cfg.max_order)
    print(f"dimension {model.dim}, {len(modes)} modes up to order {cfg.max_order}")
    print("drift eigenvalues: " + ", ".join(_fmt_c(v) for v in model.eig.values))
    records = []
    for K in modes:
        lam = eigenvalue(model, K)
        f = forward_eigenfunction(model, K)
        g = adjoint_eigenfunction(model, K)
        records.append(
            {
                "index": list(K),
                "eigenvalue": lam,
                "normalization": mode_normalization(K),
                "forward": render(f.poly),
                "adjoint": render(g),
            }
        )
        print(f"K={K}  lambda={_fmt_c(lam)}")
        print(f"  f: {render(f.poly)}")
        print(f"  g: {render(g)}")
    if args.json:
        _write_json(
            args.json,
            {
                "dimension": model.dim,
                "max_order": cfg.max_order,
                "drift_eigenvalues": list(model.eig.values),
                "stationary_cov": model.Sigma,
                "modes": records,
            },
        )
    return 0


def cmd_verify(cfg, args):
    model = _build(cfg)
    report = verify_mod.run_all(
        model, cfg.max_order, residual_tol=cfg.tolerances["residual_tol"]
    )
    for suite in report.suites:
        status = "PASS" if suite.passed else "FAIL"
        print(f"suite {suite.name}: {status} (worst {suite.worst:.3e}, tol {suite.tol:.1e})")
        for line in suite.lines:
            print(f"  {line}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    if args.json:
        _write_json(
            args.json,
            {
                "dimension": model.dim,
                "max_order": cfg.max_order,
                "drift_eigenvalues": list(model.eig.values),
                "suites": {
                    s.name: {
                        "worst": s.worst,
                        "tol": s.tol,
                        "passed": s.passed,
                        "lines": s.lines,
                    }
                    for s in report.suites
                },
                "passed": report.passed,
            },
        )
    return 0 if report.passed else 1


def cmd_propagate(cfg, args):
    model = _build(cfg)
    F0 = _initial_density(cfg, model)
    expansion = expand_gaussian(model, F0, cfg.max_order)
    points = _grid_points(cfg)
    results = []
    csv_rows = []
    worst_imag = 0.0
    for t in cfg.times:
        vals = evaluate_grid_complex(expansion, points, t)
        exact_density = exact_gaussian_propagate(model, F0, t)
        exact = exact_density.pdf_grid(points)
        err = np.abs(vals.real - exact)
        worst_imag = max(worst_imag, float(np.max(np.abs(vals.imag))))
        results.append(
            {
                "t": t,
                "max_abs_error": float(err.max()),
                "mean_abs_error": float(err.mean()),
                "max_imag": float(np.max(np.abs(vals.imag))),
                "expansion": vals.real,
                "exact": exact,
            }
        )
        print(
            f"t={t:g}: max |expansion - exact| = {err.max():.6e}, "
            f"max imaginary residue = {np.max(np.abs(vals.imag)):.3e}"
        )
        for p, v, e in zip(points, vals, exact):
            csv_rows.append(
                [float(t)]
                + [float(c) for c in p]
                + [float(v.real), float(e), float(abs(v.real - e))]
            )
    if args.json:
        _write_json(
            args.json,
            {
                "max_order": cfg.max_order,
                "times": cfg.times,
                "grid": {
                    "lo": cfg.grid_lo,
                    "hi": cfg.grid_hi,
                    "points_per_axis": cfg.grid_points,
                },
                "results": [
                    {k: v for k, v in r.items()} for r in results
                ],
            },
        )
    if args.csv:
        header = (
            ["t"]
            + [f"x{i + 1}" for i in range(cfg.dimension)]
            + ["expansion", "exact", "abs_error"]
        )
        _write_csv(args.csv, header, csv_rows)
    return 0


def cmd_solve(cfg, args):
    model = _build(cfg)
    if cfg.source is None:
        _fail("source", "missing (required for solve)")
    q = ForwardFunction(
        MPoly(model.dim, cfg.source, model.prune_eps), model.f0
    )
    P = solve_inhomogeneous(
        model,
        q,
        cfg.max_order,
        solvability_tol=cfg.tolerances["solvability_tol"],
    )
    resid_poly = apply_forward(model, P).poly
    resid = coeff_distance(resid_poly, q.poly)
    tol = cfg.tolerances["residual_tol"]
    print(f"P: {render(P.poly)}")
    print(f"residual max|coeff(L P - q)| = {resid:.6e} (tol {tol:.1e})")
    ok = resid <= tol
    print(f"solve: {'PASS' if ok else 'FAIL'}")
    if args.json:
        _write_json(
            args.json,
            {
                "max_order": cfg.max_order,
                "solution": render(P.poly),
                "residual": resid,
                "tol": tol,
                "passed": ok,
            },
        )
    return 0 if ok else 1


def cmd_mc_check(cfg, args):
    model = _build(cfg)
    if cfg.sim is None:
        _fail("sim", "missing (required for mc-check)")
    F0 = _initial_density(cfg, model)
    report = simulate(model, F0, cfg.sim)
    exact = exact_gaussian_propagate(model, F0, cfg.sim.t_final)
    mean_sig = np.abs(report.mean - exact.mean) / report.mean_stderr
    cov_sig = np.abs(report.cov - exact.cov) / report.cov_stderr
    worst = float(max(mean_sig.max(), cov_sig.max()))
    ok = worst <= 4.0
    print(f"paths={report.paths}, t_final={report.t_final:g}, backend={report.backend}")
    for i in range(model.dim):
        print(
            f"mean[{i}] = {report.mean[i]:+.6f}  exact {exact.mean[i]:+.6f}  "
            f"({mean_sig[i]:.2f} sigma)"
        )
    for i in range(model.dim):
        for j in range(i, model.dim):
            print(
                f"cov[{i},{j}] = {report.cov[i, j]:+.6f}  exact {exact.cov[i, j]:+.6f}  "
                f"({cov_sig[i, j]:.2f} sigma)"
            )
    print(f"worst deviation {worst:.2f} sigma (limit 4)")
    print(f"mc-check: {'PASS' if ok else 'FAIL'}")
    if args.json:
        _write_json(
            args.json,
            {
                "paths": report.paths,
                "dt": cfg.sim.dt,
                "t_final": report.t_final,
                "seed": cfg.sim.seed,
                "backend": report.backend,
                "mean": report.mean,
                "mean_exact": exact.mean,
                "mean_stderr": report.mean_stderr,
                "cov": report.cov,
                "cov_exact": exact.cov,
                "cov_stderr": report.cov_stderr,
                "worst_sigma": worst,
                "passed": ok,
            },
        )
    return 0 if ok else 1


_COMMANDS = {
    "eigensystem": cmd_eigensystem,
    "verify": cmd_verify,
    "propagate": cmd_propagate,
    "solve": cmd_solve,
    "mc-check": cmd_mc_check,
}


def _parser():
    ap = argparse.ArgumentParser(
        prog="ou-spectral",
        description="Eigensystem, verification, and propagation tools for "
        "Ornstein-Uhlenbeck Fokker-Planck operators.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("eigensystem", "print eigenvalues and eigenfunctions up to max_order"),
        ("verify", "run all verification suites"),
        ("propagate", "spectral propagation vs the exact Gaussian oracle"),
        ("solve", "solve the inhomogeneous stationary equation L P = q"),
        ("mc-check", "Monte Carlo cross-check of the exact propagator"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to JSON config")
        p.add_argument("--json", metavar="PATH", help="write machine-readable report")
        if name == "propagate":
            p.add_argument("--csv", metavar="PATH", help="write grid table as CSV")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        handler = _COMMANDS[args.command]
        return handler(cfg, args)
    except ConfigError as e:
        print(f"error[config]: {e}", file=sys.stderr)
        return 2
    except OUSpectralError as e:
        print(f"error[{type(e).__name__}]: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

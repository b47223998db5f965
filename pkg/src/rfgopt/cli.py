"""Batch experiment runner and verification entry point.

Subcommands: verify-moments, gd-quadratic, phb, phb-grid, testfn, fa,
bench.  No interactive UI: every command reads a config (flags and/or a
JSON file, flags win), runs to completion, writes CSV with a schema tag
line, and exits 0 on success, 1 on verification/runtime failure, 2 on
usage errors.  Re-running with the same config and seed reproduces output
files byte for byte.
"""

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

from .distributions import KINDS, DistributionSpec, optimal_variance
from .experiments import (
    run_benchmark,
    run_fa_experiment,
    run_gd_quadratic_experiment,
    run_phb_experiment,
    run_test_function_experiment,
    write_csv,
)
from .moments import run_verification_suite
from .pilots import ACKLEY_ITERS, FA_BASELINE_ETA, FA_ETA, FA_ITERS, ROSENBROCK_ITERS
from .problems import make_gd_quadratic, make_phb_quadratic
from .quadratic import default_grid, grid_search, optimal_gd_lr

__all__ = ["ExperimentConfig", "main"]


@dataclass
class ExperimentConfig:
    """Serializable settings for one batch job; round-trips through JSON."""

    subcommand: str
    dist: str = "bernoulli"
    sigma2: object = 1.0  # float or "optimal"
    h: float = 1e-6
    eta: object = "optimal"  # float or "optimal"
    mu: float = 0.0
    d: int = 5
    cond: float = 10.0
    runs: int = 100
    iters: int = 2000
    seed: int = 0
    out: str = ""
    function: str = "rosenbrock"
    k_target: int = 10_000
    n_samples: int = 1_000_000
    m: int = 100
    width: int = 40
    baseline_eta: float = FA_BASELINE_ETA
    widths: tuple = (100, 200)
    depths: tuple = (4,)
    dump_problem: str = ""

    def to_json(self):
        d = dataclasses.asdict(self)
        d["widths"] = list(self.widths)
        d["depths"] = list(self.depths)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        for key in ("widths", "depths"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def _sigma2_value(raw):
    if raw == "optimal":
        return "optimal"
    try:
        val = float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"--sigma2 must be a number or 'optimal', got {raw!r}") from None
    if val <= 0:
        raise ValueError(f"--sigma2 must be positive, got {val}")
    return val


def _eta_value(raw):
    if raw == "optimal":
        return "optimal"
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"--eta must be a number or 'optimal', got {raw!r}") from None


def _resolve_spec(cfg, d):
    s2 = cfg.sigma2
    if s2 == "optimal":
        s2 = optimal_variance(d, cfg.dist)
    return DistributionSpec(cfg.dist, float(s2))


def _build_parser():
    parser = argparse.ArgumentParser(prog="rfgopt", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, *, dist=True, seed=True, out=True):
        sp.add_argument("--config", default=None, help="JSON config file; flags override")
        if dist:
            sp.add_argument("--dist", choices=KINDS, default=None)
            sp.add_argument("--sigma2", default=None, help="coordinate variance or 'optimal'")
        if seed:
            sp.add_argument("--seed", type=int, default=None)
        if out:
            sp.add_argument("--out", default=None, help="output CSV path")

    sp = sub.add_parser("verify-moments", help="run the Monte-Carlo moment suite")
    common(sp, dist=False)
    sp.add_argument("--n", dest="n_samples", type=int, default=None)

    sp = sub.add_parser("gd-quadratic", help="descent error curves on a synthetic quadratic")
    common(sp)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--cond", type=float, default=None, help="target cond(A)")
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--eta", default=None, help="learning rate or 'optimal'")
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--iters", type=int, default=None)
    sp.add_argument("--dump-problem", dest="dump_problem", default=None,
                    help="also write the generated A and b to this CSV for audit")

    sp = sub.add_parser("phb", help="heavy-ball error curves with the moment-map prediction")
    common(sp)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--eta", default=None)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--iters", type=int, default=None)
    sp.add_argument("--dump-problem", dest="dump_problem", default=None,
                    help="also write the generated A and b to this CSV for audit")

    sp = sub.add_parser("phb-grid", help="(mu, eta) value map from the per-mode recursion")
    common(sp)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--k-target", dest="k_target", type=int, default=None)
    sp.add_argument("--dump-problem", dest="dump_problem", default=None,
                    help="also write the generated A and b to this CSV for audit")

    sp = sub.add_parser("testfn", help="test-function comparison runs")
    common(sp)
    sp.add_argument("--function", choices=("rosenbrock", "ackley"), default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--iters", type=int, default=None)

    sp = sub.add_parser("fa", help="function approximation: estimator vs exact gradient")
    common(sp)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--width", type=int, default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--eta", default=None)
    sp.add_argument("--baseline-eta", dest="baseline_eta", type=float, default=None)
    sp.add_argument("--iters", type=int, default=None)

    sp = sub.add_parser("bench", help="iterations/second table (informational)")
    common(sp, dist=False)
    sp.add_argument("--widths", type=int, nargs="+", default=None)
    sp.add_argument("--depths", type=int, nargs="+", default=None)
    sp.add_argument("--iters", type=int, default=None)
    return parser


_SUBCOMMAND_DEFAULTS = {
    "verify-moments": {"n_samples": 1_000_000},
    "gd-quadratic": {"d": 5, "runs": 100, "iters": 2000, "eta": "optimal", "sigma2": 1.0},
    "phb": {"d": 3, "runs": 100, "iters": 200, "eta": 1e-3, "mu": 0.3, "sigma2": 1.0, "h": 0.0},
    "phb-grid": {"d": 30, "k_target": 10_000, "sigma2": 1.0},
    "testfn": {"function": "rosenbrock", "runs": 5, "sigma2": "optimal", "iters": ROSENBROCK_ITERS},
    "fa": {"m": 100, "width": 40, "eta": FA_ETA, "iters": FA_ITERS, "h": 0.0, "sigma2": "optimal"},
    "bench": {"widths": (100, 200), "depths": (4,), "iters": 100},
}


def _config_from_args(args):
    base = ExperimentConfig(subcommand=args.subcommand)
    for key, val in _SUBCOMMAND_DEFAULTS.get(args.subcommand, {}).items():
        setattr(base, key, val)
    if args.subcommand == "testfn" and getattr(args, "function", None) == "ackley":
        base.iters = ACKLEY_ITERS
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = ExperimentConfig.from_json(fh.read())
        if file_cfg.subcommand != args.subcommand:
            raise ValueError(
                f"config file is for {file_cfg.subcommand!r}, not {args.subcommand!r}"
            )
        base = file_cfg
    for field in dataclasses.fields(ExperimentConfig):
        if field.name in ("subcommand",):
            continue
        supplied = getattr(args, field.name, None)
        if supplied is not None:
            setattr(base, field.name, supplied)
    base.sigma2 = _sigma2_value(base.sigma2)
    base.eta = _eta_value(base.eta)
    if isinstance(base.widths, list):
        base.widths = tuple(base.widths)
    if isinstance(base.depths, list):
        base.depths = tuple(base.depths)
    return base


def _cmd_verify_moments(cfg):
    if cfg.n_samples < 10_000:
        print(
            f"warning: n={cfg.n_samples} gives standard-error bands too wide to be "
            "meaningful; use n >= 1e4",
            file=sys.stderr,
        )
    heavy = max(cfg.n_samples, min(10 * cfg.n_samples, 10_000_000))
    reports = run_verification_suite(n_samples=cfg.n_samples, n_heavy=heavy, master_seed=cfg.seed)
    for rep in reports:
        print(rep)
    if cfg.out:
        write_csv(
            cfg.out,
            "moment-checks-v1",
            ["name", "kind", "analytic", "estimate", "se", "n_samples", "is_bound", "passed"],
            [
                [r.name, "bound" if r.is_bound else "equality", r.analytic, r.estimate,
                 r.se, r.n_samples, r.is_bound, r.passed]
                for r in reports
            ],
        )
    failures = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failures)}/{len(reports)} checks passed")
    return 1 if failures else 0


def _dump_problem_csv(path, p):
    rows = []
    for i in range(p.A.shape[0]):
        for j in range(p.A.shape[1]):
            rows.append(["A", i, j, p.A[i, j]])
    for i in range(p.b.size):
        rows.append(["b", i, 0, p.b[i]])
    write_csv(path, "quadratic-problem-v1", ["entity", "row", "col", "value"], rows)


def _curve_rows(curve):
    rows = []
    for i, k in enumerate(curve.ks):
        rows.append([
            int(k),
            curve.mean[i] if curve.mean.size else float("nan"),
            curve.std[i] if curve.std.size else float("nan"),
            curve.overlay[i],
            curve.n_runs - curve.n_diverged,
            curve.n_diverged,
        ])
    return rows


def _cmd_gd_quadratic(cfg):
    p = make_gd_quadratic(cfg.d, target_cond_of_A=cfg.cond, seed=cfg.seed)
    if cfg.dump_problem:
        _dump_problem_csv(cfg.dump_problem, p)
    spec = _resolve_spec(cfg, cfg.d)
    curve = run_gd_quadratic_experiment(p, spec, cfg.h, cfg.eta, cfg.runs, cfg.iters, cfg.seed)
    if cfg.out:
        write_csv(cfg.out, "gd-quadratic-v1",
                  ["k", "mean_sq_error", "std_sq_error", "bound", "runs", "diverged"],
                  _curve_rows(curve))
    eta_val = optimal_gd_lr(p, spec) if cfg.eta == "optimal" else cfg.eta
    final = curve.mean[-1] if curve.mean.size else float("nan")
    print(f"gd-quadratic d={cfg.d} dist={cfg.dist} eta={eta_val:.6g} "
          f"runs={cfg.runs} diverged={curve.n_diverged} "
          f"final_mean_error={final:.6g}")
    return 0


def _cmd_phb(cfg):
    p = make_phb_quadratic(cfg.d, seed=cfg.seed)
    if cfg.dump_problem:
        _dump_problem_csv(cfg.dump_problem, p)
    spec = _resolve_spec(cfg, cfg.d)
    if cfg.eta == "optimal":
        raise ValueError("phb has no closed-form optimal rate; use phb-grid to pick one")
    curve = run_phb_experiment(p, spec, cfg.h, cfg.eta, cfg.mu, cfg.runs, cfg.iters, cfg.seed)
    if cfg.out:
        write_csv(cfg.out, "phb-v1",
                  ["k", "mean_stacked_error", "std_stacked_error", "prediction",
                   "runs", "diverged"],
                  _curve_rows(curve))
    final = curve.mean[-1] if curve.mean.size else float("nan")
    print(f"phb d={cfg.d} dist={cfg.dist} mu={cfg.mu} eta={cfg.eta} "
          f"diverged={curve.n_diverged} final_mean={final:.6g} "
          f"final_prediction={curve.overlay[-1]:.6g}")
    return 0


def _cmd_phb_grid(cfg):
    p = make_phb_quadratic(cfg.d, seed=cfg.seed)
    if cfg.dump_problem:
        _dump_problem_csv(cfg.dump_problem, p)
    spec = _resolve_spec(cfg, cfg.d)
    mus, etas = default_grid()
    result = grid_search(p, spec, mus, etas, k_target=cfg.k_target)
    if cfg.out:
        rows = []
        for i, mu in enumerate(result.mus):
            for j, eta in enumerate(result.etas):
                rows.append([mu, eta, result.values[i, j]])
        write_csv(cfg.out, "phb-grid-v1", ["mu", "eta", "max_eigenvalue"], rows)
    print(f"phb-grid d={cfg.d} dist={cfg.dist} k_target={cfg.k_target} "
          f"mu_star={result.mu_star} eta_star={result.eta_star:.6g}")
    return 0


def _cmd_testfn(cfg):
    curve = run_test_function_experiment(
        cfg.function, cfg.dist, cfg.sigma2, cfg.h, cfg.runs, cfg.iters, cfg.seed,
    )
    if cfg.out:
        write_csv(cfg.out, "testfn-v1",
                  ["k", "mean_objective", "std_objective", "overlay", "runs", "diverged"],
                  _curve_rows(curve))
    final = curve.mean[-1] if curve.mean.size else float("nan")
    print(f"testfn {cfg.function} dist={cfg.dist} runs={cfg.runs} "
          f"diverged={curve.n_diverged} final_mean_objective={final:.6g}")
    return 0


def _cmd_fa(cfg):
    if cfg.eta == "optimal":
        raise ValueError("fa needs a numeric learning rate")
    result = run_fa_experiment(cfg.m, cfg.width, float(cfg.eta), cfg.iters, cfg.seed,
                               h=cfg.h, kind=cfg.dist, sigma2=cfg.sigma2,
                               baseline_eta=cfg.baseline_eta)
    if cfg.out:
        write_csv(cfg.out, "fa-loss-v1",
                  ["k", "rfg_loss", "baseline_loss"],
                  [[int(k), result.rfg_loss[i], result.baseline_loss[i]]
                   for i, k in enumerate(result.ks)])
        pred_path = cfg.out.replace(".csv", "") + "_predictions.csv"
        write_csv(pred_path, "fa-predictions-v1",
                  ["x", "target", "rfg_prediction", "baseline_prediction"],
                  [[result.grid[i], result.target[i], result.rfg_prediction[i],
                    result.baseline_prediction[i]] for i in range(result.grid.size)])
    print(f"fa m={cfg.m} width={cfg.width} iters={cfg.iters} "
          f"rfg_final={result.rfg_loss[-1]:.6g} baseline_final={result.baseline_loss[-1]:.6g} "
          f"rfg_diverged={result.rfg_diverged}")
    return 0


def _cmd_bench(cfg):
    rows = run_benchmark(cfg.widths, cfg.depths, iters=cfg.iters, master_seed=cfg.seed)
    header = ["N", "L", "baseline_iters_per_sec", "rfg_iters_per_sec", "delta_pct"]
    table = [[r.width, r.depth, r.baseline_iters_per_sec, r.rfg_iters_per_sec, r.delta_pct]
             for r in rows]
    print("\t".join(header))
    for row in table:
        print("\t".join(_fmt_bench(v) for v in row))
    if cfg.out:
        write_csv(cfg.out, "bench-v1", header, table)
    return 0


def _fmt_bench(v):
    return f"{v:.1f}" if isinstance(v, float) else str(v)


_COMMANDS = {
    "verify-moments": _cmd_verify_moments,
    "gd-quadratic": _cmd_gd_quadratic,
    "phb": _cmd_phb,
    "phb-grid": _cmd_phb_grid,
    "testfn": _cmd_testfn,
    "fa": _cmd_fa,
    "bench": _cmd_bench,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.subcommand](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

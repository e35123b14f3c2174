"""Command-line front end.

Subcommands:
  separate   run one separation experiment, write images + traces + metrics
  sweep      repeat `separate` over sampling rates x seeds, aggregate a CSV
  selfcheck  run the micro-scale oracle suite, print PASS/FAIL per check

Exit codes: 0 success, 1 numerical/solver failure, 2 usage error.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import baseline, data, denoise, linops, solver
from .exceptions import MixAmpError, SolverDivergenceError

# Calibrated front-end defaults per experiment case. The lambda pairs are
# the reference values used for the corresponding comparison figures; tau
# and damping were calibrated once at desk scale (see README).
CASE_DEFAULTS = {
    "group": {"tau_a": 1.5, "tau_b": 1.0, "lambda1": 0.5, "lambda2": 1.2},
    "tv": {"tau_a": 2.0, "tau_b": 1.0, "lambda1": 2.0, "lambda2": 1.4},
}
DEFAULT_DAMPING = 0.3
MANIFEST_SCHEMA = "mixamp-run-v1"


def _sampling(text):
    try:
        value = float(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"invalid sampling rate {text!r}") from err
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"sampling rate must lie in (0, 1], got {value}")
    return value


def _sampling_list(text):
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("sampling list is empty")
    return [_sampling(p) for p in parts]


def _seed_list(text):
    try:
        seeds = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"invalid seed list {text!r}") from err
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def build_parser():
    parser = argparse.ArgumentParser(prog="mixamp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sep = sub.add_parser("separate", help="run one separation experiment")
    sep.add_argument("--case", choices=("group", "tv"), default="group")
    sep.add_argument("--side", type=int, default=64)
    sep.add_argument("--sampling", type=_sampling, default=0.7, help="M/N in (0, 1]")
    sep.add_argument("--sparsity", type=float, default=0.05, help="shot-noise density")
    sep.add_argument("--block", type=int, default=4, help="block side for group sparsity")
    sep.add_argument("--active-fraction", type=float, default=0.25,
                     help="fraction of active tiles in the group phantom")
    sep.add_argument("--image", type=str, default=None,
                     help="square PGM for the tv case (default: procedural scene)")
    sep.add_argument("--seed", type=int, default=0)
    sep.add_argument("--solver", choices=("mixamp", "baseline", "both"), default="mixamp")
    sep.add_argument("--max-iters", type=int, default=500)
    sep.add_argument("--tol", type=float, default=5e-4)
    sep.add_argument("--tau", type=float, default=None, help="threshold scale for both denoisers")
    sep.add_argument("--tau-a", type=float, default=None)
    sep.add_argument("--tau-b", type=float, default=None)
    sep.add_argument("--damping", type=float, default=DEFAULT_DAMPING)
    sep.add_argument("--lambda1", type=float, default=None)
    sep.add_argument("--lambda2", type=float, default=None)
    sep.add_argument("--rho", type=float, default=1e4)
    sep.add_argument("--disjoint", action="store_true",
                     help="draw shot-noise support disjoint from the group support")
    sep.add_argument("--no-timing", action="store_true",
                     help="write wall_ms columns as 0 for bit-reproducible outputs")
    sep.add_argument("--manifest", type=str, default=None,
                     help="re-run the configuration stored in a manifest file")
    sep.add_argument("--out", type=str, default="mixamp_out")

    swp = sub.add_parser("sweep", help="sweep sampling rates and seeds")
    swp.add_argument("--case", choices=("group", "tv"), default="tv")
    swp.add_argument("--side", type=int, default=64)
    swp.add_argument("--sampling", type=_sampling_list, default=[0.3, 0.5, 0.7],
                     help="comma-separated M/N list")
    swp.add_argument("--seeds", type=_seed_list, default=[0, 1, 2], help="comma-separated seeds")
    swp.add_argument("--sparsity", type=float, default=0.10)
    swp.add_argument("--block", type=int, default=4)
    swp.add_argument("--active-fraction", type=float, default=0.25)
    swp.add_argument("--image", type=str, default=None)
    swp.add_argument("--solver", choices=("mixamp", "baseline", "both"), default="mixamp")
    swp.add_argument("--max-iters", type=int, default=500)
    swp.add_argument("--tol", type=float, default=5e-4)
    swp.add_argument("--tau", type=float, default=None)
    swp.add_argument("--tau-a", type=float, default=None)
    swp.add_argument("--tau-b", type=float, default=None)
    swp.add_argument("--damping", type=float, default=DEFAULT_DAMPING)
    swp.add_argument("--lambda1", type=float, default=None)
    swp.add_argument("--lambda2", type=float, default=None)
    swp.add_argument("--rho", type=float, default=1e4)
    swp.add_argument("--no-timing", action="store_true")
    swp.add_argument("--out", type=str, default="mixamp_sweep")

    chk = sub.add_parser("selfcheck", help="run the micro-scale oracle suite")
    chk.add_argument("--list", action="store_true", help="print check names without running")
    chk.add_argument("--inject-fault", type=str, default=None, metavar="CHECK",
                     help="corrupt the named check (testing hook)")
    return parser


def _resolve_params(args):
    """Normalize separate/sweep args into one plain parameter dict."""
    case = args.case
    defaults = CASE_DEFAULTS[case]
    tau_a = args.tau_a if args.tau_a is not None else (args.tau if args.tau is not None else defaults["tau_a"])
    tau_b = args.tau_b if args.tau_b is not None else (args.tau if args.tau is not None else defaults["tau_b"])
    lambda1 = args.lambda1 if args.lambda1 is not None else defaults["lambda1"]
    lambda2 = args.lambda2 if args.lambda2 is not None else defaults["lambda2"]
    return {
        "case": case,
        "side": args.side,
        "sampling": getattr(args, "sampling", 0.7),
        "sparsity": args.sparsity,
        "block": args.block,
        "active_fraction": args.active_fraction,
        "image": args.image,
        "seed": getattr(args, "seed", 0),
        "solver": args.solver,
        "max_iters": args.max_iters,
        "tol": args.tol,
        "tau_a": tau_a,
        "tau_b": tau_b,
        "damping": args.damping,
        "lambda1": lambda1,
        "lambda2": lambda2,
        "rho": args.rho,
        "disjoint": bool(getattr(args, "disjoint", False)),
        "record_timing": not args.no_timing,
    }


def _validate_params(p):
    if p["side"] < 2:
        raise MixAmpError(f"side must be >= 2, got {p['side']}")
    if not 0.0 < p["sampling"] <= 1.0:
        raise MixAmpError(f"sampling must lie in (0, 1], got {p['sampling']}")
    if not 0.0 < p["sparsity"] <= 1.0:
        raise MixAmpError(f"sparsity must lie in (0, 1], got {p['sparsity']}")
    if p["case"] == "group" and p["side"] % p["block"] != 0:
        raise MixAmpError(f"block {p['block']} must divide side {p['side']}")


def build_problem(p):
    """Ground truth, sensing matrix, mask, and measurements for one run."""
    side = p["side"]
    n = side * side
    m = int(round(p["sampling"] * n))
    seed = p["seed"]
    spec_a = data.PhantomSpec(
        kind="shot_noise", side=side, sparsity=p["sparsity"], seed=seed * 101 + 11
    )
    if p["case"] == "group":
        spec_b = data.PhantomSpec(
            kind="group_sparse", side=side, block_side=p["block"],
            active_fraction=p["active_fraction"], seed=seed * 101 + 52,
        )
        xa_true, xb_true = data.make_mixture(spec_a, spec_b, disjoint=p["disjoint"])
    else:
        xb_true = data.load_image_pgm(p["image"]) if p["image"] else data.gen_cartoon(side, seed=1234)
        if xb_true.shape[0] != side:
            raise MixAmpError(
                f"image side {xb_true.shape[0]} does not match --side {side}"
            )
        forbidden = (xb_true != 0) if p["disjoint"] else None
        xa_true = data.gen_shot_noise(spec_a, forbidden=forbidden)
    a = linops.gen_gaussian_sensing(side, m, seed=seed * 101 + 97)
    mask = linops.gen_mask(side, m, seed=seed * 101 + 31)
    y = linops.forward(a, xa_true + xb_true, mask)
    return a, mask, xa_true, xb_true, y


def _mixamp_config(p):
    spec_a = denoise.DenoiserSpec(kind="soft", tau=p["tau_a"])
    if p["case"] == "group":
        spec_b = denoise.DenoiserSpec(kind="block_soft", block_side=p["block"], tau=p["tau_b"])
    else:
        spec_b = denoise.DenoiserSpec(kind="tv_bregman", tau=p["tau_b"])
    return solver.MixAmpConfig(
        denoiser_a=spec_a, denoiser_b=spec_b,
        max_iters=p["max_iters"], tol=p["tol"], damping=p["damping"],
    )


def _baseline_config(p):
    return baseline.BaselineConfig(
        lambda1=p["lambda1"], lambda2=p["lambda2"], rho=p["rho"],
        max_iters=max(p["max_iters"], 1000), tol=p["tol"], block_side=p["block"],
    )


def run_separation(p, out_dir):
    """Execute one experiment; returns (exit_code, metric rows)."""
    _validate_params(p)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    a, mask, xa_true, xb_true, y = build_problem(p)
    solvers = ("mixamp", "baseline") if p["solver"] == "both" else (p["solver"],)
    suffix = (lambda name: f"_{name}") if len(solvers) > 1 else (lambda name: "")

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "command": "separate",
        "params": p,
        "outputs": {},
    }
    rows = []
    code = 0
    for name in solvers:
        tic = time.perf_counter()
        try:
            if name == "mixamp":
                xa_hat, xb_hat, trace = solver.mixamp_run(a, y, mask, _mixamp_config(p))
            else:
                variant = "group" if p["case"] == "group" else "tv"
                xa_hat, xb_hat, trace = baseline.baseline_solve(a, y, mask, _baseline_config(p), variant)
        except SolverDivergenceError as err:
            print(f"mixamp: {name} diverged at iteration {err.iteration}", file=sys.stderr)
            if err.trace is not None:
                err.trace.record_timing = p["record_timing"]
                err.trace.to_csv(out / f"trace{suffix(name)}.csv")
            code = 1
            continue
        wall_ms = (time.perf_counter() - tic) * 1e3
        trace.record_timing = p["record_timing"]
        trace.to_csv(out / f"trace{suffix(name)}.csv")
        data.save_image_pgm(xa_hat, out / f"xhat_a{suffix(name)}.pgm")
        data.save_image_pgm(xb_hat, out / f"xhat_b{suffix(name)}.pgm")
        rows.append({
            "experiment": p["case"],
            "side": p["side"],
            "m_over_n": p["sampling"],
            "seed": p["seed"],
            "psnr_a_db": f"{data.psnr(xa_true, xa_hat):.4f}",
            "psnr_b_db": f"{data.psnr(xb_true, xb_hat):.4f}",
            "iters": len(trace),
            "wall_ms": f"{wall_ms:.3f}" if p["record_timing"] else "0.000",
            "solver": name,
        })
        manifest["outputs"][name] = {
            "xhat_a": f"xhat_a{suffix(name)}.pgm",
            "xhat_b": f"xhat_b{suffix(name)}.pgm",
            "trace": f"trace{suffix(name)}.csv",
            "iters": len(trace),
            "damping": p["damping"],
        }
    data.write_metrics_csv(out / "metrics.csv", rows)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code, rows


def cmd_separate(args):
    if args.manifest:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        if manifest.get("schema") != MANIFEST_SCHEMA:
            raise MixAmpError(f"unrecognized manifest schema in {args.manifest}")
        params = manifest["params"]
    else:
        params = _resolve_params(args)
    code, rows = run_separation(params, args.out)
    for row in rows:
        print(
            f"{row['solver']}: iters={row['iters']} psnr_a={row['psnr_a_db']} dB "
            f"psnr_b={row['psnr_b_db']} dB wall={row['wall_ms']} ms"
        )
    return code


def _sweep_worker(task):
    params, out_dir = task
    code, rows = run_separation(params, out_dir)
    return code, rows


def cmd_sweep(args):
    base = _resolve_params(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    for sampling in args.sampling:
        for seed in args.seeds:
            params = dict(base)
            params["sampling"] = sampling
            params["seed"] = seed
            tasks.append((params, str(out / f"s{sampling:g}_seed{seed}")))
    workers = max(1, int(os.environ.get("MIXAMP_THREADS", "1")))
    code = 0
    all_rows = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for task_code, rows in pool.map(_sweep_worker, tasks):
                code = max(code, task_code)
                all_rows.extend(rows)
    else:
        for task in tasks:
            task_code, rows = _sweep_worker(task)
            code = max(code, task_code)
            all_rows.extend(rows)
    all_rows.sort(key=lambda r: (float(r["m_over_n"]), int(r["seed"]), r["solver"]))
    data.write_metrics_csv(out / "sweep_metrics.csv", all_rows)
    print(f"sweep: {len(all_rows)} rows -> {out / 'sweep_metrics.csv'}")
    return code


# ---------------------------------------------------------------------------
# selfcheck


def _fault(value, enabled):
    return value + 1e-3 if enabled else value


def _check_kron_equivalence(fault):
    side = 8
    rng = np.random.default_rng(0)
    a = linops.gen_gaussian_sensing(side, 44, seed=1)
    mask = linops.gen_mask(side, 44, seed=2)
    x = rng.standard_normal((side, side))
    y2d = linops.forward(a, x, mask)
    yvec = linops.kron_forward_oracle(a, x.flatten(order="F"), mask.vec_indices())
    err = np.abs(_fault(y2d.flatten(order="F"), fault) - yvec).max() / np.abs(yvec).max()
    return err <= 1e-12, f"rel err {err:.2e}"


def _check_adjoint_identity(fault):
    side = 16
    rng = np.random.default_rng(3)
    a = linops.gen_gaussian_sensing(side, 128, seed=4)
    mask = linops.gen_mask(side, 128, seed=5)
    x = rng.standard_normal((side, side))
    r = linops.mask_apply(mask, rng.standard_normal((side, side)))
    lhs = float((linops.forward(a, x, mask) * r).sum())
    rhs = float((x * linops.adjoint(a, r)).sum())
    err = abs(_fault(lhs, fault) - rhs) / max(abs(rhs), 1e-30)
    return err <= 1e-10, f"rel err {err:.2e}"


def _check_soft_prox_grid(fault):
    worst = 0.0
    for x in (-1.3, -0.2, 0.45, 2.0):
        thr = 0.5
        grid = np.arange(-abs(x) - 1.0, abs(x) + 1.0, 1e-4)
        vals = np.abs(grid) + (grid - x) ** 2 / (2.0 * thr)
        worst = max(worst, abs(_fault(denoise.soft_threshold(x, thr), fault) - grid[np.argmin(vals)]))
    return worst <= 1e-3, f"max err {worst:.2e}"


def _check_soft_divergence_fd(fault):
    rng = np.random.default_rng(6)
    x = rng.standard_normal((8, 8))
    thr = 0.5
    x[np.abs(np.abs(x) - thr) < 1e-3] += 2e-3
    eps = 1e-6
    fd = ((np.abs(x + eps) > thr).astype(float) + (np.abs(x - eps) > thr).astype(float)) / 2.0
    err = abs(_fault(denoise.soft_threshold_div(x, thr), fault) - fd.mean())
    return err <= 1e-6, f"abs err {err:.2e}"


def _check_block_divergence_fd(fault):
    rng = np.random.default_rng(7)
    x = rng.standard_normal((8, 8))
    thr = 0.8
    out = denoise.block_soft_threshold(x, 2, thr)
    eps = 1e-6
    trace = 0.0
    flat = x.ravel()
    for i in range(flat.size):
        e = np.zeros_like(flat)
        e[i] = eps
        up = denoise.block_soft_threshold((flat + e).reshape(8, 8), 2, thr).estimate.ravel()[i]
        dn = denoise.block_soft_threshold((flat - e).reshape(8, 8), 2, thr).estimate.ravel()[i]
        trace += (up - dn) / (2 * eps)
    err = abs(_fault(out.divergence_avg, fault) - trace / flat.size)
    return err <= 1e-5, f"abs err {err:.2e}"


def _check_tv_objective_decrease(fault):
    rng = np.random.default_rng(8)
    x = rng.standard_normal((16, 16))
    spec = denoise.DenoiserSpec(kind="tv_bregman")
    out = denoise.tv_denoise_bregman(x, 1.0, spec)
    before = denoise.tv_objective(x, x, 1.0)
    after = denoise.tv_objective(out.estimate, x, 1.0)
    if fault:
        after = before + 1.0
    return after <= before + 1e-12, f"obj {after:.4f} vs input {before:.4f}"


def _check_dct_equivalence(fault):
    side = 32
    rng = np.random.default_rng(9)
    a = linops.dct_sensing(side)
    mask = linops.gen_mask(side, 700, seed=10)
    x = rng.standard_normal((side, side))
    y_fast = linops.dct_fast_forward(x, mask)
    y_explicit = linops.forward(a, x, mask)
    err = np.abs(_fault(y_fast, fault) - y_explicit).max()
    return err <= 1e-10, f"max err {err:.2e}"


def _check_residual_support(fault):
    side = 16
    m = 200
    a = linops.gen_gaussian_sensing(side, m, seed=11)
    mask = linops.gen_mask(side, m, seed=12)
    rng = np.random.default_rng(13)
    y = linops.forward(a, rng.standard_normal((side, side)), mask)
    cfg = solver.MixAmpConfig(
        denoiser_a=denoise.DenoiserSpec(kind="soft", tau=1.5),
        denoiser_b=denoise.DenoiserSpec(kind="block_soft", block_side=4, tau=1.2),
        max_iters=10, damping=0.3, record_trace=False,
    )
    a_run, y_run, _ = solver.normalize_problem(a, y, mask)
    state = solver.mixamp_init(y_run, mask)
    worst_off = 0.0
    worst_theta = 0.0
    for _ in range(10):
        state = solver.mixamp_step(state, a_run, y_run, mask, cfg)
        worst_off = max(worst_off, float(np.abs(state.r[~mask.grid]).max()) if (~mask.grid).any() else 0.0)
        worst_theta = max(worst_theta, abs(state.theta - (state.r ** 2).sum() / mask.m))
    worst = _fault(max(worst_off, worst_theta), fault)
    return worst == 0.0 or worst <= 1e-15, f"max violation {worst:.2e}"


SELFCHECKS = (
    ("kron_equivalence", _check_kron_equivalence),
    ("adjoint_identity", _check_adjoint_identity),
    ("soft_prox_grid", _check_soft_prox_grid),
    ("soft_divergence_fd", _check_soft_divergence_fd),
    ("block_divergence_fd", _check_block_divergence_fd),
    ("tv_objective_decrease", _check_tv_objective_decrease),
    ("dct_equivalence", _check_dct_equivalence),
    ("residual_support", _check_residual_support),
)


def cmd_selfcheck(args):
    names = [name for name, _ in SELFCHECKS]
    if args.list:
        for name in names:
            print(name)
        return 0
    if args.inject_fault is not None and args.inject_fault not in names:
        print(f"mixamp: unknown check {args.inject_fault!r}", file=sys.stderr)
        return 2
    failures = 0
    for name, check in SELFCHECKS:
        ok, detail = check(fault=(args.inject_fault == name))
        print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 1


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "separate":
            return cmd_separate(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_selfcheck(args)
    except MixAmpError as err:
        print(f"mixamp: {err}", file=sys.stderr)
        return 2 if not isinstance(err, SolverDivergenceError) else 1
    except OSError as err:
        print(f"mixamp: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

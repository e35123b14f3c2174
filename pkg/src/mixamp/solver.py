"""Dual-denoiser approximate message passing for 2D sparse separation.

One iteration denoises the shared pseudo-data A^T R A added to each
component estimate, then rebuilds the residual from the measurement
misfit plus two correction terms (N/M) <eta'> R that keep the effective
noise in the pseudo-data decorrelated across iterations:

    Xa <- eta_a(A^T R A + Xa; thr(theta))
    Xb <- eta_b(A^T R A + Xb; thr(theta))
    R  <- Y - P_Omega{A (Xa + Xb) A^T} + (N/M) (<eta_a'> + <eta_b'>) R
    theta <- ||R||_F^2 / M

Iteration stops when the relative change of the estimate pair drops
below the configured tolerance.
"""

import csv
import io
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import denoise, linops
from .exceptions import DegenerateProblemError, DomainError, SolverDivergenceError

TRACE_COLUMNS = ("t", "theta", "tol", "residual_norm", "wall_ms")


@dataclass
class MixAmpConfig:
    """Solver configuration: one DenoiserSpec per mixture component."""

    denoiser_a: denoise.DenoiserSpec
    denoiser_b: denoise.DenoiserSpec
    max_iters: int = 500
    tol: float = 5e-4
    record_trace: bool = True
    damping: float = 1.0
    onsager: bool = True
    normalize: bool = True
    mc_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise DomainError("damping must lie in (0, 1]")


@dataclass
class MixAmpState:
    """Full per-iteration state: estimates, masked residual, theta, counter."""

    xa: np.ndarray
    xb: np.ndarray
    r: np.ndarray
    theta: float
    t: int = 0


@dataclass
class TraceRecord:
    t: int
    theta: float
    tol_value: float
    residual_norm: float
    wall_ms: float
    objective: float | None = None  # baseline only; not part of the CSV schema


@dataclass
class IterationTrace:
    """One record per completed iteration, serializable to CSV."""

    records: list = field(default_factory=list)
    damping: float = 1.0
    record_timing: bool = True

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def last(self):
        return self.records[-1] if self.records else None

    def total_wall_ms(self):
        return sum(r.wall_ms for r in self.records)

    def to_csv(self, path_or_buf):
        """Write rows t, theta, tol, residual_norm, wall_ms."""
        own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
        handle = open(path_or_buf, "w", newline="") if own else path_or_buf
        try:
            writer = csv.writer(handle)
            writer.writerow(TRACE_COLUMNS)
            for rec in self.records:
                wall = rec.wall_ms if self.record_timing else 0.0
                writer.writerow(
                    [rec.t, repr(rec.theta), repr(rec.tol_value), repr(rec.residual_norm), f"{wall:.3f}"]
                )
        finally:
            if own:
                handle.close()

    def to_csv_text(self):
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def mixamp_init(y, mask):
    """Initial state: Xa = Xb = 0, R = Y, theta = ||Y||_F^2 / M."""
    if mask.m == 0:
        raise DegenerateProblemError("mask holds no samples")
    y = linops.mask_apply(mask, y)
    theta = float((y ** 2).sum() / mask.m)
    zero = np.zeros_like(y)
    return MixAmpState(xa=zero.copy(), xb=zero.copy(), r=y.copy(), theta=theta, t=0)


def apply_denoiser(spec, x, theta, probe_seed=None):
    """Evaluate a configured denoiser at threshold scale derived from theta.

    The block denoiser compares thresholds against per-block Frobenius
    norms, whose noise floor is sqrt(B * theta) rather than sqrt(theta),
    so its threshold carries an extra sqrt(B) = block_side factor.
    """
    if spec.threshold_mode == "raw":
        thr = spec.tau * theta
    else:
        thr = denoise.threshold_from_theta(theta, spec.tau)
    if spec.kind == "soft":
        return denoise.DenoiseOutput(
            estimate=denoise.soft_threshold(x, thr),
            divergence_avg=denoise.soft_threshold_div(x, thr),
        )
    if spec.kind == "block_soft":
        return denoise.block_soft_threshold(x, spec.block_side, thr * spec.block_side)
    # tv_bregman: the prox weight is the reciprocal threshold; a vanishing
    # threshold means no denoising at all
    if thr < denoise._TV_IDENTITY_THR:
        return denoise.DenoiseOutput(estimate=np.asarray(x, dtype=float).copy(), divergence_avg=1.0)
    if probe_seed is not None:
        spec = replace(spec, mc_seed=probe_seed)
    return denoise.tv_denoise_bregman(x, 1.0 / thr, spec)


def mixamp_step(state, a, y, mask, cfg):
    """One Algorithm-1 iteration; returns a new state, inputs untouched."""
    side = a.side
    if state.r.shape != (side, side) or y.shape != (side, side) or mask.side != side:
        raise DegenerateProblemError("state, matrix, measurements and mask sides must agree")
    n = side * side
    m = mask.m
    probe_seed = cfg.mc_seed + 2 * state.t

    # overflow here is how divergence manifests; it is detected below
    with np.errstate(over="ignore", invalid="ignore"):
        z = linops.adjoint(a, state.r)
        out_a = apply_denoiser(cfg.denoiser_a, z + state.xa, state.theta, probe_seed)
        out_b = apply_denoiser(cfg.denoiser_b, z + state.xb, state.theta, probe_seed + 1)

        beta = cfg.damping
        xa_new = out_a.estimate if beta == 1.0 else (1.0 - beta) * state.xa + beta * out_a.estimate
        xb_new = out_b.estimate if beta == 1.0 else (1.0 - beta) * state.xb + beta * out_b.estimate

        r_new = y - linops.forward(a, xa_new + xb_new, mask)
        if cfg.onsager:
            r_new = r_new + (n / m) * (out_a.divergence_avg + out_b.divergence_avg) * state.r
        if beta != 1.0:
            r_new = (1.0 - beta) * state.r + beta * r_new

        theta_new = float((r_new ** 2).sum() / m)
    if not np.isfinite(theta_new):
        raise SolverDivergenceError(
            f"non-finite residual at iteration {state.t + 1}", iteration=state.t + 1
        )
    return MixAmpState(xa=xa_new, xb=xb_new, r=r_new, theta=theta_new, t=state.t + 1)


def stopping_tol(prev, cur):
    """Relative change of the estimate pair between consecutive iterations.

    sqrt(||dXa||_F^2 + ||dXb||_F^2) / sqrt(||Xa||_F^2 + ||Xb||_F^2),
    with 0/0 -> 0 and positive/0 -> inf.
    """
    pa, pb = prev
    ca, cb = cur
    if pa.shape != ca.shape or pb.shape != cb.shape:
        raise DegenerateProblemError("estimate pairs must have matching shapes")
    num = np.sqrt(((pa - ca) ** 2).sum() + ((pb - cb) ** 2).sum())
    den = np.sqrt((ca ** 2).sum() + (cb ** 2).sum())
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return float(num / den)


def normalize_problem(a, y, mask):
    """Rescale (A, Y) so the composed masked operator has unit column gain.

    With A scaled by c, Y scales by c^2 and the estimated signals are
    unchanged, so this is an exact reparameterization. It restores the
    threshold/correction calibration that the iteration assumes, which the
    raw N(0, 1/M) normalization does not provide for the two-sided product.
    """
    q = float(np.mean((a.entries ** 2).sum(axis=0)))
    if q == 0.0:
        raise DegenerateProblemError("sensing matrix is identically zero")
    n = a.side * a.side
    c = (n / mask.m) ** 0.25 / np.sqrt(q)
    a_scaled = replace(a, entries=c * a.entries)
    return a_scaled, (c * c) * y, c


def mixamp_run(a, y, mask, cfg):
    """Iterate mixamp_step until the stopping rule or max_iters.

    Returns (xa, xb, trace). On numerical divergence raises
    SolverDivergenceError with the partial trace attached.
    """
    y = linops.mask_apply(mask, y)
    if cfg.normalize:
        a_run, y_run, _ = normalize_problem(a, y, mask)
    else:
        a_run, y_run = a, y

    state = mixamp_init(y_run, mask)
    trace = IterationTrace(damping=cfg.damping)
    while state.t < cfg.max_iters:
        tic = time.perf_counter()
        try:
            new_state = mixamp_step(state, a_run, y_run, mask, cfg)
        except SolverDivergenceError as err:
            err.trace = trace
            raise
        wall_ms = (time.perf_counter() - tic) * 1e3
        tol_value = stopping_tol((state.xa, state.xb), (new_state.xa, new_state.xb))
        state = new_state
        if cfg.record_trace:
            trace.append(
                TraceRecord(
                    t=state.t,
                    theta=state.theta,
                    tol_value=tol_value,
                    residual_norm=float(np.linalg.norm(state.r)),
                    wall_ms=wall_ms,
                )
            )
        if tol_value <= cfg.tol:
            break
    return state.xa, state.xb, trace

"""First-order comparator: accelerated proximal gradient on the penalized
combined objectives.

variant="group" solves
    min (rho/2) ||Y - P{A (Xa+Xb) A^T}||_F^2 + lambda1 ||Xa||_1
        + lambda2 sum_blocks ||Xb_B||_F
and variant="tv" replaces the block sum with lambda2 ||Xb||_TV. With a
large penalty rho this is the standard surrogate for the epsilon-
constrained form the objectives are usually stated in.

The iteration is a monotone FISTA: the accelerated candidate is kept
only when it does not increase the objective, so the recorded objective
sequence never rises. A long streak of rejected candidates resets the
momentum; if plain descent steps keep failing afterwards the step size
is wrong and a SolverError is raised.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import denoise, linops
from .exceptions import DimensionError, DomainError, SolverError
from .solver import IterationTrace, TraceRecord, stopping_tol

BASELINE_VARIANTS = ("group", "tv")

_ACCEPT_SLACK = 1e-10


@dataclass
class BaselineConfig:
    lambda1: float
    lambda2: float
    epsilon: float = 0.0  # informational: slack of the constraint form being mimicked
    rho: float = 1e4
    max_iters: int = 1000
    tol: float = 5e-4
    block_side: int = 4
    tv_inner_iters: int = 20
    tv_mu: float | None = None
    tv_sweeps: int = 2
    power_iters: int = 100
    power_seed: int = 0
    restart_patience: int = 10

    def __post_init__(self):
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise DomainError("lambda1 and lambda2 must be positive")
        if self.epsilon < 0:
            raise DomainError("epsilon must be nonnegative")
        if self.rho <= 0:
            raise DomainError("rho must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if self.tol <= 0:
            raise DomainError("tol must be positive")


def _check_variant(variant):
    if variant not in BASELINE_VARIANTS:
        raise DomainError(f"variant must be one of {BASELINE_VARIANTS}, got {variant!r}")


def _regularizer(xb, cfg, variant):
    if variant == "group":
        blocks, _ = denoise._blocks_view(np.asarray(xb, dtype=float), cfg.block_side)
        return float(np.sqrt((blocks ** 2).sum(axis=(2, 3))).sum())
    return denoise.tv_norm(xb)


def objective_eval(xa, xb, a, y, mask, cfg, variant):
    """Penalized objective F(Xa, Xb) for the selected variant."""
    _check_variant(variant)
    resid = y - linops.forward(a, np.asarray(xa, dtype=float) + np.asarray(xb, dtype=float), mask)
    data = 0.5 * cfg.rho * float((resid ** 2).sum())
    return data + cfg.lambda1 * float(np.abs(xa).sum()) + cfg.lambda2 * _regularizer(xb, cfg, variant)


def estimate_lipschitz(a, mask, cfg):
    """Power iteration on the composed operator (Xa, Xb) -> M*M(Xa + Xb).

    Returns rho times the dominant eigenvalue, padded by 2% so the 1/L
    step never overshoots.
    """
    rng = np.random.default_rng(cfg.power_seed)
    v = rng.standard_normal((a.side, a.side))
    va = v / np.linalg.norm(v)
    vb = va.copy()
    lam_max = 0.0
    for _ in range(cfg.power_iters):
        w = linops.adjoint(a, linops.forward(a, va + vb, mask))
        lam_max = float(np.sqrt(2.0 * (w ** 2).sum()))
        if lam_max == 0.0:
            break
        va = w / lam_max
        vb = va
    return cfg.rho * lam_max * 1.02


def _prox_b(v, step_weight, cfg, variant):
    if variant == "group":
        return denoise.block_soft_threshold(v, cfg.block_side, step_weight).estimate
    spec = denoise.DenoiserSpec(
        kind="tv_bregman",
        tv_inner_iters=cfg.tv_inner_iters,
        tv_mu=cfg.tv_mu,
        tv_sweeps=cfg.tv_sweeps,
    )
    u, _ = denoise._tv_bregman_estimate(np.asarray(v, dtype=float), 1.0 / step_weight, spec)
    return u


def baseline_solve(a, y, mask, cfg, variant):
    """Monotone accelerated proximal gradient; returns (xa, xb, trace)."""
    _check_variant(variant)
    if variant == "group" and a.side % cfg.block_side != 0:
        raise DimensionError(f"block side {cfg.block_side} does not divide grid side {a.side}")
    y = linops.mask_apply(mask, y)
    lip = estimate_lipschitz(a, mask, cfg)
    if lip == 0.0:
        raise SolverError("composed operator is identically zero")

    side = a.side
    xa = np.zeros((side, side))
    xb = np.zeros((side, side))
    xa_prev, xb_prev = xa, xb
    za, zb = xa, xb
    t_k = 1.0
    fx = objective_eval(xa, xb, a, y, mask, cfg, variant)
    trace = IterationTrace()
    reject_streak = 0
    plain_failures = 0

    for it in range(1, cfg.max_iters + 1):
        tic = time.perf_counter()
        grad = -cfg.rho * linops.adjoint(a, y - linops.forward(a, za + zb, mask))
        cand_a = denoise.soft_threshold(za - grad / lip, cfg.lambda1 / lip)
        cand_b = _prox_b(zb - grad / lip, cfg.lambda2 / lip, cfg, variant)
        f_cand = objective_eval(cand_a, cand_b, a, y, mask, cfg, variant)

        restarted = t_k == 1.0 and it > 1
        accepted = f_cand <= fx + _ACCEPT_SLACK
        if accepted:
            xa_new, xb_new, f_new = cand_a, cand_b, f_cand
            reject_streak = 0
            plain_failures = 0
        else:
            xa_new, xb_new, f_new = xa, xb, fx
            reject_streak += 1
            if restarted:
                # a rejected step from a fresh restart is a plain proximal
                # gradient step; it cannot increase F unless L is too small
                plain_failures += 1
                if plain_failures >= cfg.restart_patience:
                    raise SolverError(
                        f"objective kept increasing after restarts at iteration {it}"
                    )

        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k))
        if reject_streak >= cfg.restart_patience:
            za, zb = xa_new, xb_new
            t_next = 1.0
            reject_streak = 0
        else:
            za = xa_new + (t_k / t_next) * (cand_a - xa_new) + ((t_k - 1.0) / t_next) * (xa_new - xa_prev)
            zb = xb_new + (t_k / t_next) * (cand_b - xb_new) + ((t_k - 1.0) / t_next) * (xb_new - xb_prev)

        tol_value = stopping_tol((xa, xb), (xa_new, xb_new))
        resid_norm = float(np.linalg.norm(y - linops.forward(a, xa_new + xb_new, mask)))
        xa_prev, xb_prev = xa, xb
        xa, xb, fx, t_k = xa_new, xb_new, f_new, t_next
        trace.append(
            TraceRecord(
                t=it,
                theta=resid_norm * resid_norm / mask.m,
                tol_value=tol_value,
                residual_norm=resid_norm,
                wall_ms=(time.perf_counter() - tic) * 1e3,
                objective=fx,
            )
        )
        if accepted and tol_value <= cfg.tol:
            break
    return xa, xb, trace

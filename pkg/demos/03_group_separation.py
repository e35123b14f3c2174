#!/usr/bin/env python3
# Separate shot noise from a QR-code-like group-sparse image, comparing
# the message-passing solver against the proximal-gradient baseline.
#
# The mixture X = Xa + Xb is observed through Y = P_Omega{A X A^T} at
# 70% sampling with a Gaussian A; both solvers see the same data.

import time

import numpy as np

from mixamp import baseline, data, denoise, linops, solver

side, block = 64, 4
n = side * side
m = int(0.7 * n)

xa_true = data.gen_shot_noise(
    data.PhantomSpec(kind="shot_noise", side=side, sparsity=0.05, seed=11))
xb_true = data.gen_group_sparse(
    data.PhantomSpec(kind="group_sparse", side=side, block_side=block,
                     active_fraction=0.25, seed=52))
a = linops.gen_gaussian_sensing(side, m, seed=97)
mask = linops.gen_mask(side, m, seed=31)
y = linops.forward(a, xa_true + xb_true, mask)
print(f"mixture: {int((xa_true != 0).sum())} impulses + "
      f"{int(xb_true.sum() / block**2)} active tiles, M/N = {m/n:.2f}")

# --- message-passing solver ----------------------------------------------
cfg = solver.MixAmpConfig(
    denoiser_a=denoise.DenoiserSpec(kind="soft", tau=1.5),
    denoiser_b=denoise.DenoiserSpec(kind="block_soft", block_side=block, tau=1.0),
    damping=0.3,   # Gaussian A needs damping; see README
)
tic = time.perf_counter()
xa_mp, xb_mp, trace = solver.mixamp_run(a, y, mask, cfg)
t_mp = time.perf_counter() - tic
print(f"\nmixamp  : {len(trace):4d} iters {t_mp*1e3:7.1f} ms  "
      f"psnr_a {data.psnr(xa_true, xa_mp):5.2f} dB  "
      f"psnr_b {data.psnr(xb_true, xb_mp):5.2f} dB")

# --- proximal-gradient baseline ------------------------------------------
bcfg = baseline.BaselineConfig(lambda1=0.5, lambda2=1.2, block_side=block)
tic = time.perf_counter()
xa_pg, xb_pg, btrace = baseline.baseline_solve(a, y, mask, bcfg, "group")
t_pg = time.perf_counter() - tic
print(f"baseline: {len(btrace):4d} iters {t_pg*1e3:7.1f} ms  "
      f"psnr_a {data.psnr(xa_true, xa_pg):5.2f} dB  "
      f"psnr_b {data.psnr(xb_true, xb_pg):5.2f} dB")

print(f"\nspeedup: {t_pg / t_mp:.1f}x at comparable reconstruction quality")
print("final stopping tol:", f"{trace.last.tol_value:.2e}",
      "(threshold 5e-4)")

"""Baseline solver tests: objective, optimality probes, step-size bound."""

import numpy as np
import pytest

import oracles
from mixamp import baseline, data, linops
from mixamp.exceptions import DomainError

CFG_GROUP = dict(lambda1=0.5, lambda2=1.2, block_side=2)


def group_problem(side=8, mn=0.8, seed=0, block_side=2):
    m = int(round(mn * side * side))
    a = linops.gen_gaussian_sensing(side, m, seed=seed)
    mask = linops.gen_mask(side, m, seed=seed + 1)
    xa = data.gen_shot_noise(
        data.PhantomSpec(kind="shot_noise", side=side, sparsity=0.05, seed=seed)
    )
    xb = data.gen_group_sparse(
        data.PhantomSpec(kind="group_sparse", side=side, block_side=block_side,
                         active_fraction=0.25, seed=seed + 2)
    )
    y = linops.forward(a, xa + xb, mask)
    return a, mask, xa, xb, y


class TestObjectiveEval:
    def test_zero_point(self):
        a, mask, _, _, y = group_problem()
        cfg = baseline.BaselineConfig(**CFG_GROUP)
        val = baseline.objective_eval(np.zeros((8, 8)), np.zeros((8, 8)), a, y, mask, cfg, "group")
        assert val == pytest.approx(0.5 * cfg.rho * (y ** 2).sum())

    def test_ground_truth_zero_data_term(self):
        # noiseless full-sampling instance: only the penalty terms remain
        side = 8
        a = linops.identity_sensing(side)
        mask = linops.full_mask(side)
        xa, xb = group_problem(side=side)[2:4]
        y = linops.forward(a, xa + xb, mask)
        cfg = baseline.BaselineConfig(**CFG_GROUP)
        val = baseline.objective_eval(xa, xb, a, y, mask, cfg, "group")
        penalties = (cfg.lambda1 * np.abs(xa).sum()
                     + cfg.lambda2 * baseline._regularizer(xb, cfg, "group"))
        assert val == pytest.approx(penalties, rel=1e-12)

    def test_matches_straight_line_reimplementation(self):
        rng = np.random.default_rng(0)
        a, mask, _, _, y = group_problem()
        cfg = baseline.BaselineConfig(**CFG_GROUP)
        for variant in ("group", "tv"):
            for _ in range(5):
                xa = rng.standard_normal((8, 8))
                xb = rng.standard_normal((8, 8))
                ours = baseline.objective_eval(xa, xb, a, y, mask, cfg, variant)
                ref = oracles.straight_line_objective(
                    xa, xb, a.entries, y, mask.grid.astype(float), cfg.rho,
                    cfg.lambda1, cfg.lambda2, variant, block_side=cfg.block_side,
                )
                assert ours == pytest.approx(ref, rel=1e-12)

    def test_bad_variant(self):
        a, mask, _, _, y = group_problem()
        cfg = baseline.BaselineConfig(**CFG_GROUP)
        with pytest.raises(DomainError):
            baseline.objective_eval(np.zeros((8, 8)), np.zeros((8, 8)), a, y, mask, cfg, "wavelet")


class TestLipschitz:
    def test_no_gradient_overshoot(self):
        # descent lemma with the estimated step on 100 random pairs
        a, mask, _, _, y = group_problem(seed=3)
        cfg = baseline.BaselineConfig(**CFG_GROUP)
        lip = baseline.estimate_lipschitz(a, mask, cfg)
        rng = np.random.default_rng(4)

        def f_smooth(za, zb):
            resid = y - linops.forward(a, za + zb, mask)
            return 0.5 * cfg.rho * float((resid ** 2).sum())

        for _ in range(100):
            za = rng.standard_normal((8, 8))
            zb = rng.standard_normal((8, 8))
            grad = -cfg.rho * linops.adjoint(a, y - linops.forward(a, za + zb, mask))
            gnorm2 = 2.0 * float((grad ** 2).sum())  # same gradient for both blocks
            stepped = f_smooth(za - grad / lip, zb - grad / lip)
            assert stepped <= f_smooth(za, zb) - gnorm2 / (2.0 * lip) + 1e-9 * max(1.0, abs(stepped))


class TestBaselineSolve:
    def test_zero_measurements_zero_solution(self):
        a, mask, _, _, _ = group_problem(seed=5)
        cfg = baseline.BaselineConfig(max_iters=50, **CFG_GROUP)
        xa, xb, trace = baseline.baseline_solve(a, np.zeros((8, 8)), mask, cfg, "group")
        assert not xa.any() and not xb.any()

    def test_micro_random_probe_optimality(self):
        # side 4, full sampling, identity A: no random feasible point beats
        # the solver output
        side = 4
        a = linops.identity_sensing(side)
        mask = linops.full_mask(side)
        rng = np.random.default_rng(6)
        y = rng.standard_normal((side, side))
        cfg = baseline.BaselineConfig(lambda1=0.5, lambda2=1.2, block_side=2,
                                      max_iters=2000, tol=1e-10)
        xa, xb, _ = baseline.baseline_solve(a, y, mask, cfg, "group")
        best = baseline.objective_eval(xa, xb, a, y, mask, cfg, "group")
        for _ in range(500):
            pa = xa + 0.3 * rng.standard_normal((side, side))
            pb = xb + 0.3 * rng.standard_normal((side, side))
            assert best <= baseline.objective_eval(pa, pb, a, y, mask, cfg, "group") + 1e-9

    def test_monotone_objective(self):
        a, mask, _, _, y = group_problem(seed=7)
        cfg = baseline.BaselineConfig(max_iters=300, **CFG_GROUP)
        _, _, trace = baseline.baseline_solve(a, y, mask, cfg, "group")
        objs = [rec.objective for rec in trace.records]
        assert all(b <= a_ + 1e-10 for a_, b in zip(objs, objs[1:]))

    def test_fig3_analog_parameters_accepted(self):
        a, mask, _, _, y = group_problem(seed=8)
        cfg = baseline.BaselineConfig(lambda1=2.0, lambda2=1.4, max_iters=40)
        xa, xb, trace = baseline.baseline_solve(a, y, mask, cfg, "tv")
        assert cfg.lambda1 == 2.0 and cfg.lambda2 == 1.4
        assert len(trace) >= 1
        assert np.isfinite(xa).all() and np.isfinite(xb).all()

    def test_data_term_non_increasing_in_rho(self):
        a, mask, _, _, y = group_problem(seed=9)
        fits = []
        for rho in (1e2, 1e4, 1e6):
            cfg = baseline.BaselineConfig(lambda1=0.5, lambda2=1.2, block_side=2,
                                          rho=rho, max_iters=3000, tol=1e-9)
            xa, xb, _ = baseline.baseline_solve(a, y, mask, cfg, "group")
            resid = y - linops.forward(a, xa + xb, mask)
            fits.append(float((resid ** 2).sum()))
        assert fits[0] >= fits[1] >= fits[2]

    def test_tv_variant_runs(self):
        a, mask, _, _, y = group_problem(seed=10)
        cfg = baseline.BaselineConfig(lambda1=2.0, lambda2=1.4, max_iters=60)
        xa, xb, trace = baseline.baseline_solve(a, y, mask, cfg, "tv")
        start = 0.5 * cfg.rho * (y ** 2).sum()
        assert trace.records[-1].objective <= start

    def test_stopping_tol_matches_solver_formula(self):
        a, mask, _, _, y = group_problem(seed=11)
        cfg = baseline.BaselineConfig(max_iters=500, tol=1e-3, **CFG_GROUP)
        _, _, trace = baseline.baseline_solve(a, y, mask, cfg, "group")
        assert trace.last.tol_value <= 1e-3 or len(trace) == 500

"""Acceptance gate.

One test per headline claim, each printing a PASS/FAIL line with the measured
value next to its tolerance (run with -s or read captured output). Numbers
here restate the targets directly; the per-module suites carry the finer
frozen values and property checks backing them.
"""
import math
import time
from functools import lru_cache

import pytest

from ionrep import (
    C_VACUUM_KM_S,
    ChainLayout,
    Constraints,
    HardwareProfile,
    NoiseParams,
    SearchBounds,
    SimConfig,
    WernerState,
    apply_swap_gate_noise,
    compose_gate_errors,
    crossover_distance,
    end_to_end_Q,
    evaluate_rate,
    fiber_transmissivity,
    optimize_rate,
    plob_bound,
    run_protocol_sim,
    werner_rci,
)

BASE = HardwareProfile()


def verdict(tag: str, ok: bool, detail: str) -> None:
    print(f"criterion {tag}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {tag}: {detail}"


@lru_cache(maxsize=None)
def headline_run():
    t0 = time.perf_counter()
    res = optimize_rate(150.0, 10, BASE)
    return res, time.perf_counter() - t0


@lru_cache(maxsize=None)
def optimum(spatial_mux: int):
    return optimize_rate(150.0, spatial_mux, BASE)


class TestCriterion1Headline:
    def test_rate_within_15_percent_of_20000(self):
        res, _ = headline_run()
        rate = res.report.noisy_rate
        verdict("1 rate", 17000.0 <= rate <= 23000.0,
                f"optimized rate {rate:.2f} vs 20000 +/- 15%")

    def test_full_grid_runtime(self):
        _, seconds = headline_run()
        verdict("1 runtime", seconds < 60.0,
                f"601 x 2000 grid took {seconds:.3f} s, budget 60 s")


class TestCriterion2RepeaterCount:
    def test_baseline_n_opt(self):
        res, _ = headline_run()
        verdict("2 baseline", abs(res.n_opt - 87) <= 5,
                f"n_opt {res.n_opt} vs 87 +/- 5")

    def test_noisy_n_opt(self):
        res = optimize_rate(150.0, 10, BASE.updated(eps_g=1e-3, f0=0.999))
        verdict("2 noisy", abs(res.n_opt - 25) <= 5,
                f"n_opt {res.n_opt} at eps 1e-3 vs 25 +/- 5")


class TestCriterion3MultiplexingProduct:
    @pytest.mark.parametrize("spatial_mux", [1, 5, 10])
    def test_product_near_220(self, spatial_mux):
        res = optimum(spatial_mux)
        product = res.m_opt * spatial_mux
        verdict(f"3 M={spatial_mux}", 198.0 <= product <= 242.0,
                f"m_opt * M = {product} vs 220 +/- 10%")


class TestCriterion4Resources:
    def test_comm_ions_at_headline_optimum(self):
        res, _ = headline_run()
        verdict("4 N_o", 168 <= res.report.n_o <= 172,
                f"N_o {res.report.n_o} vs 170 +/- 2")

    def test_comm_ions_with_slow_gates(self):
        res = optimize_rate(150.0, 10, BASE.updated(tau_g=10e-6))
        verdict("4 N_o slow gates", 218 <= res.report.n_o <= 222,
                f"N_o {res.report.n_o} at tau_g=10us vs 220 +/- 2")

    def test_memory_ions_at_headline_optimum(self):
        res, _ = headline_run()
        verdict("4 N_m", 41.25 <= res.report.n_m <= 68.75,
                f"N_m {res.report.n_m} vs 55 +/- 25%")


class TestCriterion5PlobCrossing:
    def test_beats_plob_at_150km(self):
        res, _ = headline_run()
        eta = fiber_transmissivity(BASE.optical.alpha_db_per_km, 150.0)
        plob = plob_bound(eta, 10, BASE.timing.tau)
        ok = (res.report.noisy_rate > plob
              and abs(plob - 1.443e4) / 1.443e4 < 1e-3)
        verdict("5 at 150 km", ok,
                f"rate {res.report.noisy_rate:.1f} > PLOB {plob:.1f} ~ 1.443e4")

    def test_crossover_before_150km(self):
        x = crossover_distance(10, BASE)
        verdict("5 crossover", x is not None and x < 150.0,
                f"crossover {x} km < 150 km")


class TestCriterion6FixedSpacing:
    def test_rate_fraction_at_l0_20km(self):
        free, _ = headline_run()
        fixed = optimize_rate(150.0, 10, BASE,
                              constraints=Constraints(fixed_l0_km=20.0))
        frac = fixed.report.noisy_rate / free.report.noisy_rate
        verdict("6", 0.15 <= frac <= 0.35,
                f"fixed-spacing rate is {100 * frac:.1f}% of optimum "
                f"vs 25% +/- 10pp")


class TestCriterion7SimOracle:
    def test_grid_within_three_sigma_and_budget(self):
        t0 = time.perf_counter()
        worst = 0.0
        failures = []
        seed = 0
        for n in range(0, 4):
            for spatial_mux in range(1, 4):
                for time_mux in range(1, 6):
                    for p in (0.1, 0.3, 0.5):
                        cfg = SimConfig(
                            ChainLayout(10.0 * (n + 1), n, spatial_mux, time_mux),
                            j_steps=1, k_steps=2, tau_s=1e-6, tau_o_s=50e-6,
                            p=p, num_blocks=100_000, seed=seed)
                        seed += 1
                        stats = run_protocol_sim(cfg)
                        exact = (1 - (1 - p) ** (spatial_mux * time_mux)) ** (n + 1)
                        sigma = math.sqrt(exact * (1 - exact) / 100_000)
                        z = (abs(stats.empirical_block_success - exact) / sigma
                             if sigma > 0 else 0.0)
                        worst = max(worst, z)
                        if z > 3.0:
                            failures.append((n, spatial_mux, time_mux, p, z))
        seconds = time.perf_counter() - t0
        verdict("7", not failures and seconds < 30.0,
                f"{seed} configs, worst z {worst:.2f} <= 3, "
                f"{seconds:.1f} s < 30 s, outliers {failures}")


class TestCriterion8OccupancyReplay:
    def test_blind_regime_exact_peaks(self):
        time_mux, spatial_mux, j = 4, 3, 1
        cfg = SimConfig(ChainLayout(20.0, 1, spatial_mux, time_mux),
                        j_steps=j, k_steps=8, tau_s=1e-6, tau_o_s=5e-6,
                        p=1.0, num_blocks=10, seed=7)
        assert not cfg.waits_for_herald
        stats = run_protocol_sim(cfg)
        ok = (stats.peak_comm_loaded == 2 * j * spatial_mux
              and stats.peak_heralded == 2 * time_mux)
        verdict("8 blind", ok,
                f"comm peak {stats.peak_comm_loaded} == 2jM = "
                f"{2 * j * spatial_mux}, heralded peak {stats.peak_heralded} "
                f"== 2m = {2 * time_mux}")

    def test_heralded_regime_quantization(self):
        hw = BASE.updated(tau_o=10e-6)
        spatial_mux = 2
        l0 = 2.5e-6 * C_VACUUM_KM_S / hw.optical.refractive_index
        layout = ChainLayout(2 * l0, 1, spatial_mux, 6)
        cfg = SimConfig.from_profile(layout, hw, num_blocks=10, seed=7,
                                     p_override=1.0)
        assert cfg.waits_for_herald
        stats = run_protocol_sim(cfg)
        cap = 2 * (spatial_mux * cfg.k_steps + cfg.j_steps)
        delta = stats.peak_comm_loaded - evaluate_rate(layout, hw).n_o
        ok = stats.peak_comm_loaded == cap and 0 <= delta <= 2
        verdict("8 heralded", ok,
                f"comm peak {stats.peak_comm_loaded} == 2(Mk+j) = {cap} "
                f"with integer k={cfg.k_steps}, quantization delta {delta} <= 2")


class TestCriterion9Properties:
    def test_q_composition(self):
        noise = NoiseParams(f0=0.9995, eps_g=3e-4)
        worst = 0.0
        for n1 in range(0, 21):
            for n2 in range(0, 21):
                q12 = end_to_end_Q(n1 + n2, noise)
                q1, q2 = end_to_end_Q(n1, noise), end_to_end_Q(n2, noise)
                composed = 0.5 * (1 - (1 - 2 * q1) * (1 - 2 * q2))
                worst = max(worst, abs(q12 - composed))
        verdict("9 Q-composition", worst <= 1e-12,
                f"worst defect {worst:.3g} over n1,n2 in [0,20]")

    def test_swap_noise_composition(self):
        worst = 0.0
        for f in (0.6, 0.85, 0.9999):
            for e1 in (1e-4, 0.02):
                for e2 in (5e-4, 0.1):
                    twice = apply_swap_gate_noise(
                        apply_swap_gate_noise(WernerState(f), e1), e2)
                    once = apply_swap_gate_noise(
                        WernerState(f), compose_gate_errors(e1, e2))
                    worst = max(worst, abs(twice.fidelity - once.fidelity))
        verdict("9 swap-noise", worst <= 1e-15,
                f"worst composition defect {worst:.3g}")

    def test_rci_monotone_and_sign_crossing(self):
        fs = [0.5 + 0.005 * i for i in range(101)]
        vals = [werner_rci(WernerState(f)) for f in fs]
        monotone = all(a < b for a, b in zip(vals, vals[1:]))
        lo, hi = 0.25, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if werner_rci(WernerState(mid)) < 0.0:
                lo = mid
            else:
                hi = mid
        root_ok = abs(hi - 0.8107103750847682) < 1e-9
        verdict("9 rci", monotone and root_ok,
                f"strictly increasing, zero at {hi:.10f}")

    def test_rescale_invariance(self):
        c = 10.0
        scaled = BASE.updated(
            tau=BASE.timing.tau * c, tau_g=BASE.timing.tau_g * c,
            tau_o=BASE.timing.tau_o * c, tau_m=BASE.timing.tau_m * c,
            refractive_index=BASE.optical.refractive_index * c)
        bounds = SearchBounds(n_max=80, m_max=300)
        r1 = optimize_rate(40.0, 5, BASE, bounds=bounds)
        r2 = optimize_rate(40.0, 5, scaled, bounds=bounds)
        ok = ((r1.n_opt, r1.m_opt) == (r2.n_opt, r2.m_opt)
              and math.isclose(r1.report.noisy_rate, c * r2.report.noisy_rate,
                               rel_tol=1e-9))
        verdict("9 rescaling", ok,
                f"argmax ({r1.n_opt},{r1.m_opt}) invariant, rate scales by 1/{c:g}")

    def test_seed_determinism(self):
        cfg = SimConfig(ChainLayout(30.0, 2, 2, 3), j_steps=1, k_steps=1,
                        tau_s=1e-6, tau_o_s=50e-6, p=0.3,
                        num_blocks=50_000, seed=42)
        verdict("9 determinism", run_protocol_sim(cfg) == run_protocol_sim(cfg),
                "bit-identical rerun")

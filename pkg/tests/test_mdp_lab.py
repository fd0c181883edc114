"""Tests for the Monte Carlo suites: configuration, seeding discipline,
worker-count invariance, and the statistical sanity of each suite at
small, fast scales. All Monte Carlo assertions run at fixed seeds, so
they are deterministic."""

import json
import math
import os

import pytest

from dwlab import (
    DomainError,
    InsufficientEventsError,
    ModelParams,
    NoiseSpec,
    clopper_pearson,
    rate_dw,
    rate_rho,
    rate_theta,
    run_clt_suite,
    run_convergence_suite,
    run_deviation_suite,
    run_identity_suite,
    run_inequality_suite,
    run_suite,
    summary,
)
from dwlab.mdp_lab import (
    DET_AUDIT_POINTS,
    ExperimentConfig,
    burn_in_steps,
    det_audit_gap,
    draw_stable_params,
    gamma_grid_check,
    rows_to_csv,
)
from dwlab.model import substream

REF = ModelParams(theta=0.5, rho=0.3)


# ------------------------------------------------------------------ config

def test_config_defaults_are_valid():
    cfg = ExperimentConfig()
    assert cfg.suite == "clt"
    assert cfg.statistics == ("theta", "rho", "dw")
    assert cfg.params.sigma2 == cfg.noise.sigma2


@pytest.mark.parametrize("kwargs", [
    {"suite": "bootstrap"},
    {"n_grid": ()},
    {"n_grid": (1,)},
    {"n_grid": (100, 100)},
    {"n_grid": (200, 100)},
    {"replications": 99},
    {"suite": "deviations", "alpha": 0.5},
    {"suite": "convergence", "alpha": 0.0},
    {"threshold_mode": "quantile"},
    {"suite": "deviations", "thresholds": ()},
    {"thresholds": (2.0, -1.0)},
    {"statistics": ()},
    {"statistics": ("theta", "theta")},
    {"statistics": ("theta", "median")},
    {"delta": 0.0},
    {"master_seed": -1},
    {"workers": 0},
    {"noise": NoiseSpec("gaussian", sigma2=2.0)},  # disagrees with params
])
def test_config_rejects_invalid_values(kwargs):
    with pytest.raises(DomainError):
        ExperimentConfig(**kwargs)


def test_config_alpha_unchecked_outside_speed_suites():
    # alpha only matters where b_n is used
    cfg = ExperimentConfig(suite="clt", alpha=0.9)
    assert cfg.alpha == 0.9


def test_config_round_trip_through_json():
    cfg = ExperimentConfig(
        params=ModelParams(theta=-0.4, rho=0.25, sigma2=2.0, x0=1.0, eps0=-1.0),
        noise=NoiseSpec("weibull", sigma2=2.0, beta=0.7),
        suite="deviations",
        n_grid=(100, 1000),
        alpha=0.3,
        thresholds=(1.0, 2.0),
        threshold_mode="absolute",
        statistics=("theta", "dw"),
        replications=500,
        delta=0.1,
        burn_in=True,
        master_seed=99,
        workers=2,
    )
    decoded = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert decoded == cfg


def test_config_from_partial_dict_fills_defaults():
    cfg = ExperimentConfig.from_dict({"suite": "convergence",
                                      "params": {"theta": 0.7}})
    assert cfg.params.theta == 0.7 and cfg.params.rho == 0.3
    assert cfg.noise.family == "gaussian"
    assert cfg.replications == 1000


# --------------------------------------------------------- clopper-pearson

def test_clopper_pearson_closed_forms_at_extremes():
    n = 50
    lo, hi = clopper_pearson(0, n)
    assert lo == 0.0
    assert hi == pytest.approx(1.0 - 0.025 ** (1.0 / n), rel=1e-12)
    lo, hi = clopper_pearson(n, n)
    assert hi == 1.0
    assert lo == pytest.approx(0.025 ** (1.0 / n), rel=1e-12)


@pytest.mark.parametrize("k,n", [(5, 100), (1, 10), (250, 500)])
def test_clopper_pearson_brackets_point_estimate(k, n):
    lo, hi = clopper_pearson(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0
    wide_lo, wide_hi = clopper_pearson(k, n, confidence=0.99)
    assert wide_lo <= lo and hi <= wide_hi


def test_clopper_pearson_rejects_bad_counts():
    with pytest.raises(DomainError):
        clopper_pearson(5, 4)
    with pytest.raises(DomainError):
        clopper_pearson(-1, 4)


# ------------------------------------------------------------- determinism

def _csv_bytes(rows, tmp_path, name):
    path = os.path.join(tmp_path, name)
    rows_to_csv(rows, path)
    with open(path, "rb") as fh:
        return fh.read()


@pytest.mark.parametrize("suite,extra", [
    ("clt", {}),
    ("deviations", {"thresholds": (1.5,)}),
    ("convergence", {"delta": 0.3}),
    ("identities", {}),
    ("inequalities", {}),
])
def test_worker_count_does_not_change_results(suite, extra, tmp_path):
    # 2500 replications spans two chunks, so workers=3 exercises the pool
    base = dict(suite=suite, n_grid=(50,), replications=2500, master_seed=9,
                **extra)
    rows1 = run_suite(ExperimentConfig(**base, workers=1))
    rows3 = run_suite(ExperimentConfig(**base, workers=3))
    assert rows1 == rows3
    assert _csv_bytes(rows1, tmp_path, "w1.csv") == _csv_bytes(rows3, tmp_path, "w3.csv")


def test_rerun_is_bit_identical():
    cfg = ExperimentConfig(suite="deviations", n_grid=(200,), replications=150,
                           master_seed=31)
    assert run_deviation_suite(cfg) == run_deviation_suite(cfg)


def test_replication_streams_differ_from_grid_streams():
    # grid index is shifted far above the replication index, so stream ids
    # never collide across (grid, rep) pairs at any realistic scale
    a = substream(5, (0 << 40) | 1).standard_normal(4)
    b = substream(5, (1 << 40) | 1).standard_normal(4)
    assert a.tobytes() != b.tobytes()


def test_draw_stable_params_is_deterministic_and_stable():
    p1 = draw_stable_params(substream(123, 7))
    p2 = draw_stable_params(substream(123, 7))
    assert p1 == p2
    assert abs(p1.theta) < 0.95 and abs(p1.rho) < 0.95
    assert 0.25 <= p1.sigma2 <= 4.0
    fixed = draw_stable_params(substream(123, 8), sigma2=1.0)
    assert fixed.sigma2 == 1.0


# -------------------------------------------------------------- clt suite

def test_clt_suite_matches_limit_moments():
    cfg = ExperimentConfig(suite="clt", n_grid=(2000,), replications=600,
                           master_seed=41)
    rows = run_clt_suite(cfg)
    assert len(rows) == 1
    r = rows[0]
    s = summary(REF)
    assert r.target_var_theta == s.sigma2_theta
    assert r.target_var_rho == s.sigma2_rho
    assert r.target_var_dw == s.sigma2_d
    assert r.target_cov_theta_rho == 0.5 * 0.3 * s.sigma2_theta
    for got, want in ((r.var_theta, r.target_var_theta),
                      (r.var_rho, r.target_var_rho),
                      (r.var_dw, r.target_var_dw)):
        assert abs(got / want - 1.0) < 0.25
    assert abs(r.mean_theta) < 0.1 and abs(r.mean_rho) < 0.15
    assert abs(r.cov_theta_rho - r.target_cov_theta_rho) < 0.05
    assert 3.3 < r.var_dw_over_var_rho < 4.7


def test_clt_suite_requires_finite_fourth_moment():
    heavy = NoiseSpec("student", nu=3.0)
    with pytest.raises(DomainError):
        run_clt_suite(ExperimentConfig(suite="clt", noise=heavy,
                                       n_grid=(100,), replications=100))
    light = NoiseSpec("student", nu=4.5)
    rows = run_clt_suite(ExperimentConfig(suite="clt", noise=light,
                                          n_grid=(100,), replications=100))
    assert math.isfinite(rows[0].var_theta)


# -------------------------------------------------------- deviation suite

def test_deviation_estimates_are_internally_consistent():
    cfg = ExperimentConfig(suite="deviations", n_grid=(500,), replications=400,
                           thresholds=(1.5, 2.5), master_seed=7)
    rows = run_deviation_suite(cfg)
    assert len(rows) == 6  # 3 statistics x 2 thresholds
    s = summary(REF)
    rate_fn = {"theta": rate_theta, "rho": rate_rho, "dw": rate_dw}
    b_n = 500.0 ** cfg.alpha
    for e in rows:
        assert e.n == 500 and e.b_n == pytest.approx(b_n)
        assert e.p_hat == e.exceedances / 400
        assert e.ci_low <= e.p_hat <= e.ci_high
        assert e.flagged == (e.exceedances < 10)
        assert e.rate_target == rate_fn[e.statistic](e.x, s)
        assert e.gauss_oracle > 0.0
        if e.exceedances > 0:
            assert e.r_n == pytest.approx(-math.log(e.p_hat) / b_n**2)
            assert e.ratio_gauss == pytest.approx(e.r_n / e.gauss_oracle)
        else:
            assert math.isinf(e.r_n)
    # seed 7 produces both flagged and unflagged points at these thresholds
    assert any(e.flagged for e in rows) and any(not e.flagged for e in rows)
    with pytest.raises(InsufficientEventsError):
        run_deviation_suite(cfg, strict=True)


def test_sigma_multiple_exceedances_do_not_depend_on_alpha():
    # in sigma_multiple mode the event is |sqrt(n)(stat-star)| > c*sigma,
    # independent of b_n; only the slope normalization changes with alpha
    base = dict(suite="deviations", n_grid=(300,), replications=300,
                master_seed=3)
    rows_a = run_deviation_suite(ExperimentConfig(**base, alpha=0.15))
    rows_b = run_deviation_suite(ExperimentConfig(**base, alpha=0.3))
    assert [e.exceedances for e in rows_a] == [e.exceedances for e in rows_b]
    assert rows_a[0].r_n != rows_b[0].r_n


def test_absolute_mode_uses_raw_thresholds():
    cfg = ExperimentConfig(suite="deviations", n_grid=(100, 200),
                           replications=150, thresholds=(0.4,),
                           threshold_mode="absolute", master_seed=5)
    rows = run_deviation_suite(cfg)
    assert all(e.x == 0.4 for e in rows)


def test_dw_tail_tracks_doubled_rho_tail():
    # D_n - d* = -2(rho_hat - rho*) + O(1/n), and the sigma_multiple
    # threshold doubles along with it, so exceedance rates nearly agree
    cfg = ExperimentConfig(suite="deviations", n_grid=(2000,),
                           replications=2000, thresholds=(2.0,),
                           statistics=("rho", "dw"), master_seed=17)
    rho_row, dw_row = run_deviation_suite(cfg)
    assert rho_row.statistic == "rho" and dw_row.statistic == "dw"
    assert abs(rho_row.p_hat - dw_row.p_hat) < 0.015


# ------------------------------------------------------ convergence suite

def test_convergence_frequencies_decay_along_the_grid():
    cfg = ExperimentConfig(suite="convergence", n_grid=(200, 800),
                           replications=300, delta=0.25, master_seed=13)
    rows = run_convergence_suite(cfg)
    assert len(rows) == 12
    s = summary(REF)
    limits = {"s_over_n": s.ell, "p_over_n": s.ell1, "q_over_n": s.ell2,
              "j_over_n": s.j_limit, "t_stat": s.t_limit, "f_n": 0.0}
    by_name = {}
    for r in rows:
        assert r.limit_value == limits[r.functional]
        assert r.freq == r.exceedances / 300
        assert math.isinf(r.decay) if r.exceedances == 0 else r.decay > 0.0
        by_name.setdefault(r.functional, []).append(r.freq)
    for name, freqs in by_name.items():
        assert freqs[1] <= freqs[0], name
    # the sum functionals are still noisy at n=200 and visibly settle
    assert by_name["s_over_n"][0] > by_name["s_over_n"][1] > 0.0
    assert by_name["f_n"] == [0.0, 0.0]


# --------------------------------------------------------- identity suite

def test_identity_suite_rows():
    cfg = ExperimentConfig(suite="identities", n_grid=(200,),
                           replications=150, master_seed=23)
    rows = run_identity_suite(cfg)
    names = [r.check for r in rows]
    assert names == ["theta_decomposition", "sn_decomposition", "dw_identity",
                     "j_identity_relative", "gamma_product_relative",
                     "det_gamma_gap"]
    for r in rows[:5]:
        assert r.passed is True
        assert r.max_residual <= r.tolerance
    det_row = rows[5]
    assert det_row.tolerance is None and det_row.passed is None
    assert det_row.points == len(DET_AUDIT_POINTS)
    # the determinant shortcut genuinely disagrees at the audit points
    assert det_row.max_residual > 1e-3


def test_gamma_grid_check_is_tiny():
    assert gamma_grid_check(side=25) < 1e-12


def test_det_audit_gap_is_large():
    assert det_audit_gap() > 1e-3


# ------------------------------------------------------- inequality suite

def test_inequality_suite_has_no_violations():
    cfg = ExperimentConfig(suite="inequalities", n_grid=(300,),
                           replications=400, master_seed=29)
    rows = run_inequality_suite(cfg)
    assert [r.inequality for r in rows] == ["sum_squares", "max_x", "max_eps",
                                            "fourth_moment"]
    for r in rows:
        assert r.paths == 400 and r.violations == 0 and r.passed


def test_inequality_suite_with_heavy_tails():
    cfg = ExperimentConfig(suite="inequalities", n_grid=(200,),
                           replications=200, master_seed=37,
                           params=ModelParams(0.5, 0.3, sigma2=1.0),
                           noise=NoiseSpec("student", nu=2.2))
    rows = run_inequality_suite(cfg)
    assert all(r.violations == 0 for r in rows)


# ---------------------------------------------------------------- burn-in

def test_burn_in_steps_formula():
    # exact-binary parameters so ceil sees an exact quotient
    assert burn_in_steps(ModelParams(0.5, 0.3)) == 20
    assert burn_in_steps(ModelParams(0.75, 0.5)) == 40
    assert burn_in_steps(ModelParams(0.0, 0.0)) == 10


def test_burn_in_changes_draws_but_not_validity():
    base = dict(suite="clt", n_grid=(400,), replications=200, master_seed=51)
    plain = run_clt_suite(ExperimentConfig(**base))
    burned = run_clt_suite(ExperimentConfig(**base, burn_in=True))
    assert plain != burned
    r = burned[0]
    assert math.isfinite(r.var_theta) and r.var_theta > 0.0
    assert abs(r.var_theta / r.target_var_theta - 1.0) < 0.5


# -------------------------------------------------------------- csv output

def test_rows_to_csv_formatting(tmp_path):
    cfg = ExperimentConfig(suite="identities", n_grid=(100,),
                           replications=120, master_seed=61)
    rows = run_identity_suite(cfg)
    path = str(tmp_path / "rows.csv")
    rows_to_csv(rows, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "check,points,max_residual,tolerance,passed"
    assert len(lines) == 7
    assert lines[1].endswith(",true")
    assert lines[6].endswith(",,")  # report-only row: empty tolerance, passed
    # every float cell round-trips
    cell = lines[1].split(",")[2]
    assert float(cell) == rows[0].max_residual


def test_rows_to_csv_rejects_empty():
    with pytest.raises(DomainError):
        rows_to_csv([], "unused.csv")


def test_run_suite_dispatch():
    cfg = ExperimentConfig(suite="inequalities", n_grid=(100,),
                           replications=100, master_seed=71)
    assert run_suite(cfg) == run_inequality_suite(cfg)

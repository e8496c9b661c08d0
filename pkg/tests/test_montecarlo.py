import csv
import io
import json
import math

import numpy as np
import pytest

from rmtminors.errors import CapacityError, DomainError, InputError
from rmtminors.montecarlo import (ExperimentConfig, closed_form_cdf_m1, convergence_diagnostics,
                                  integral_identity_check, ks_distance, run_extreme_experiment,
                                  summarize, trend_table, truncated_exp_moment)


def test_truncated_exp_moment():
    assert truncated_exp_moment([0, 0, 0], 1, 0.1) == 0
    assert truncated_exp_moment([2.5], 0.7, 1) == pytest.approx(math.exp(1.75), rel=1e-15)
    assert truncated_exp_moment([0, 1, 2], 1, 0.5) == pytest.approx((math.e + math.e**2) / 3,
                                                                     rel=1e-15)
    assert truncated_exp_moment([-2.0], 1, 0.5) == pytest.approx(math.exp(2), rel=1e-15)
    with pytest.raises(InputError):
        truncated_exp_moment([], 1, 1)
    with pytest.raises(InputError):
        truncated_exp_moment([1.0], 0, 1)


def test_integral_identity():
    assert integral_identity_check([0, 1, 2], 1, 0.5) < 1e-10
    assert integral_identity_check([0.1, 0.2], 1, 0.5) == 0
    assert integral_identity_check([3.0], 2, 1) < 1e-10
    assert integral_identity_check([0.5, 0.5, 1.0], 1.5, 0.5) < 1e-10
    z = np.abs(np.random.default_rng(0).standard_cauchy(5000))
    z = z[z < 30]
    assert integral_identity_check(z, 0.5, 1.0) < 1e-10 * max(1.0, truncated_exp_moment(z, .5, 1))
    with pytest.raises(InputError):
        integral_identity_check([-1.0, 1.0], 1, 1)


def test_closed_form_cdf():
    assert closed_form_cdf_m1("wigner", 0.0, 10) == pytest.approx(9.765625e-4, rel=1e-14)
    assert closed_form_cdf_m1("wishart", 2 * math.log(2), 3, n=2) == pytest.approx(0.125, rel=1e-13)
    assert closed_form_cdf_m1("wigner", 1e3, 10) == 1.0
    assert closed_form_cdf_m1("wishart", 1e6, 10, n=5) == 1.0
    with pytest.raises(InputError):
        closed_form_cdf_m1("goe", 0.0, 3)
    with pytest.raises(DomainError):
        closed_form_cdf_m1("wishart", -1.0, 3, n=2)


def test_ks_distance():
    x = np.linspace(0.05, 0.95, 10)
    assert ks_distance(x, lambda v: v) == pytest.approx(0.05, abs=1e-12)


def test_m1_pipeline_matches_closed_form():
    cfg = ExperimentConfig("wigner", 1, ((None, 10),), 2000, seed=3)
    cell = run_extreme_experiment(cfg).cells[0]
    T = cell.samples["max"]
    assert np.mean(T <= 0) == pytest.approx(2.0**-10, abs=3e-3)
    assert ks_distance(T, lambda x: closed_form_cdf_m1("wigner", x, 10)) < 0.05
    cfg = ExperimentConfig("wishart", 1, ((2, 3),), 2000, seed=4)
    T = run_extreme_experiment(cfg).cells[0].samples["max"]
    assert np.mean(T <= 2 * math.log(2)) == pytest.approx(0.125, abs=0.03)


def test_single_rep_and_report_invariants():
    cfg = ExperimentConfig("wishart", 2, ((20, 6), (30, 8)), 1, seed=9)
    rep = run_extreme_experiment(cfg)
    for cell in rep.cells:
        assert cell.samples["max"].shape == (1,)
        assert cell.stats["max"]["z"]["variance"] == 0
    cfg = ExperimentConfig("wigner", 2, ((None, 12),), 50, seed=1)
    cell = run_extreme_experiment(cfg).cells[0]
    for side in ("max", "min"):
        st = cell.stats[side]
        assert st["statistic"]["variance"] >= 0
        for a in cfg.alpha_list:
            for d in cfg.delta_list:
                assert st["truncated_exp_moment"][f"alpha={a!r},delta={d!r}"] <= \
                    st["moments"][f"alpha={a!r}"]["exp"]
        for row in st["tails"].values():
            assert 0 <= row["count"] <= cfg.reps
        assert st["integral_identity_residual"] < 1e-10
    # Wigner centering: +-2 sqrt(m log p)
    loc = 2 * math.sqrt(2 * math.log(12))
    np.testing.assert_allclose(cell.z["max"], cell.samples["max"] - loc)
    np.testing.assert_allclose(cell.z["min"], cell.samples["min"] + loc)


def test_wishart_centering():
    cfg = ExperimentConfig("wishart", 2, ((40, 6),), 5, seed=2)
    c = run_extreme_experiment(cfg).cells[0]
    sc = 2 * math.sqrt(2 * math.log(6))
    np.testing.assert_allclose(c.z["max"], (c.samples["max"] - 40) / math.sqrt(40) - sc)
    np.testing.assert_allclose(c.z["min"], (c.samples["min"] - 40) / math.sqrt(40) + sc)


def test_eta_ratio():
    cfg = ExperimentConfig("wigner", 2, ((None, 16),), 5, seed=2, eta=0.5)
    c = run_extreme_experiment(cfg).cells[0]
    loc = math.sqrt((4 + 1.0) * math.log(16))
    np.testing.assert_allclose(c.ratio["max"], c.samples["max"] / loc)


def test_determinism_across_workers():
    cfg = ExperimentConfig("wigner", 2, ((None, 8), (None, 20)), 12, seed=5)
    outs = {w: run_extreme_experiment(cfg, workers=w) for w in (1, 2, 8)}
    j = {w: r.to_json() for w, r in outs.items()}
    c = {w: r.to_csv() for w, r in outs.items()}
    assert j[1] == j[2] == j[8]
    assert c[1] == c[2] == c[8]
    json.loads(j[1])
    assert "wall_time" not in json.loads(j[1])
    assert "wall_time" in json.loads(outs[1].to_json(include_timing=True))


def test_csv_shape():
    cfg = ExperimentConfig("wigner", 2, ((None, 8),), 3, seed=5)
    text = run_extreme_experiment(cfg).to_csv()
    assert text.splitlines()[0] == "cell,n,p,m,side,metric,value"
    rows = list(csv.reader(io.StringIO(text)))
    assert all(len(r) == 7 for r in rows)
    metrics = {r[5] for r in rows[1:]}
    assert "z.median" in metrics
    assert "truncated_exp_moment.alpha=1.0,delta=0.5" in metrics


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig("wigner", 5, ((None, 4),), 3)
    with pytest.raises(InputError):
        ExperimentConfig("wishart", 2, ((None, 4),), 3)
    with pytest.raises(InputError):
        ExperimentConfig("wigner", 2, ((None, 4),), 0)
    with pytest.raises(InputError):
        ExperimentConfig("wigner", 2, ((None, 4),), 3, eta=3.0)
    cfg = ExperimentConfig("wigner", 4, ((None, 10), (None, 400)), 1, strategy="enumerate")
    with pytest.raises(CapacityError, match="p=400"):
        run_extreme_experiment(cfg)


def test_trend_table():
    rng = np.random.default_rng(0)
    base = rng.normal(size=4000)
    ps = [16, 64, 256, 1024]
    t = trend_table(ps, [base * 4 / math.sqrt(p) for p in ps], 1.0, 0.2)
    assert all(f["monotone"] and f["endpoint"] for f in t["flags"].values())
    t = trend_table([1, 2], [np.zeros(10), np.zeros(10)], 1.0, 0.5)
    assert t["rows"][0]["exp_moment"] == 1.0
    with pytest.raises(InputError):
        trend_table([16], [base], 1.0, 0.5)


def test_convergence_diagnostics_checks_cells():
    a = run_extreme_experiment(ExperimentConfig("wigner", 2, ((None, 8), (None, 16)), 4)).cells
    b = run_extreme_experiment(ExperimentConfig("wigner", 3, ((None, 8),), 4)).cells
    assert len(convergence_diagnostics(a, 1.0)["rows"]) == 2
    with pytest.raises(InputError):
        convergence_diagnostics(a[:1], 1.0)
    with pytest.raises(InputError):
        convergence_diagnostics([a[0], b[0]], 1.0)


def test_summarize():
    s = summarize([1.0, 2.0, 4.0])
    assert s["mean"] == pytest.approx(7 / 3) and s["median"] == 2.0
    assert s["variance"] == pytest.approx(np.var([1, 2, 4]))
    assert s["mad"] == 1.0

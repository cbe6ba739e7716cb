import io
import json
import math

import numpy as np
import pytest

import depthcore as dc
from depthcore import harness


MIX = {"preset": "fig1d-mixture6"}


def tiny_config(**kw):
    base = dict(density=MIX, n_values=(60, 120), r_rule=(0.3,),
                k_values=(1, float("inf")), repetitions=2, seed_base=0,
                regime="rzero", name="tiny")
    base.update(kw)
    return dc.ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(dc.InputError):
        tiny_config(n_values=())
    with pytest.raises(dc.InputError):
        tiny_config(n_values=(20,))
    with pytest.raises(dc.InputError):
        tiny_config(r_rule=(0.0,))
    with pytest.raises(dc.InputError):
        tiny_config(r_rule=-1.0)
    with pytest.raises(dc.InputError):
        tiny_config(k_values=(-1,))
    with pytest.raises(dc.InputError):
        tiny_config(repetitions=0)
    with pytest.raises(dc.InputError):
        tiny_config(regime="both")
    with pytest.raises(dc.InputError):
        tiny_config(density={})


def test_config_k_order_and_props():
    cfg = tiny_config(k_values=(float("inf"), 5, 1, 5))
    assert cfg.k_values == (1, 5, float("inf"))
    assert cfg.wants_coreness
    assert cfg.finite_ks == (1, 5)
    assert not tiny_config(k_values=(2,)).wants_coreness


def test_repetitions_auto():
    cfg = tiny_config(repetitions="auto")
    assert harness.repetitions_for(cfg, 1000) == 20
    assert harness.repetitions_for(cfg, 1001) == 10
    assert harness.repetitions_for(tiny_config(repetitions=7), 500) == 7


def test_radii_for_symbolic():
    cfg = tiny_config(r_rule=2.0)
    assert math.isclose(harness.radii_for(cfg, 1, 1000)[0], 2.0 * 1000 ** (-1 / 3))
    assert math.isclose(harness.radii_for(cfg, 2, 1000)[0], 2.0 * 1000 ** (-0.25))
    explicit = tiny_config(r_rule=(0.5, 0.2))
    assert harness.radii_for(explicit, 1, 77) == (0.2, 0.5)


def test_load_experiment_config_forms():
    cfg = dc.load_experiment_config({
        "density": MIX, "n_values": [100], "r_rule": {"c": 1.5},
        "k_values": [1, "inf"], "repetitions": 3, "seed_base": 2,
        "regime": "rzero"})
    assert cfg.r_rule == 1.5
    assert cfg.k_values == (1, float("inf"))
    with pytest.raises(dc.InputError):
        dc.load_experiment_config({"density": MIX, "n_values": [100],
                                   "r_rule": (0.2,), "k_values": [],
                                   "repetitions": 1, "seed_base": 0,
                                   "regime": "rzero", "bogus": 1})
    with pytest.raises(dc.InputError):
        dc.load_experiment_config({"density": MIX, "n_values": [100],
                                   "r_rule": {"q": 2}, "k_values": [],
                                   "repetitions": 1, "seed_base": 0,
                                   "regime": "rzero"})
    with pytest.raises(dc.InputError):
        dc.load_experiment_config([1, 2])


def test_load_experiment_config_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({
        "density": MIX, "n_values": [60], "r_rule": [0.3],
        "k_values": [], "repetitions": 1, "seed_base": 0,
        "regime": "rfixed", "name": "file-test"}))
    cfg = dc.load_experiment_config_file(p)
    assert cfg.name == "file-test" and cfg.regime == "rfixed"
    with pytest.raises(dc.InputError):
        dc.load_experiment_config_file(tmp_path / "missing.json")
    p.write_text("{bad json")
    with pytest.raises(dc.InputError):
        dc.load_experiment_config_file(p)


def test_default_configs():
    for kind in ("rate", "kmax"):
        cfg = dc.default_config(kind)
        assert len(cfg.n_values) == 9
        assert cfg.n_values[0] == 100 and cfg.n_values[-1] == 10_000
        assert len(cfg.r_rule) == 8
        assert math.isclose(cfg.r_rule[0], 0.1) and math.isclose(cfg.r_rule[-1], 0.97)
        assert cfg.repetitions == "auto"
        cfg2 = dc.default_config(kind, "fig2d-crater")
        assert math.isclose(cfg2.r_rule[0], 0.27) and math.isclose(cfg2.r_rule[-1], 1.80)
    assert dc.default_config("converge").regime == "rfixed"
    with pytest.raises(dc.InputError):
        dc.default_config("nope")


def test_run_convergence_tiny_rzero(tmp_path):
    out = tmp_path / "runs.csv"
    cfg = tiny_config()
    records = dc.run_convergence(cfg, out_path=out)
    assert len(records) == 4
    assert [(rec.n, rec.seed) for rec in records] == [
        (60, 0), (60, 1), (120, 0), (120, 1)]
    for rec in records:
        assert rec.sup_error_degree >= 0 and math.isfinite(rec.sup_error_degree)
        assert rec.hk_errors[0][0] == 1
        assert rec.sup_error_coreness is not None
        assert rec.k_inf <= rec.montresor_sum
    lines = out.read_text().splitlines()
    assert lines[0] == ("n,r,seed,sup_error_degree,sup_error_h1,"
                        "sup_error_coreness,k_inf,diameter,max_degree,montresor_sum")
    assert len([ln for ln in lines if not ln.startswith("#")]) == 5
    assert "# runs=4" in lines[-1]


def test_run_convergence_rfixed_and_determinism(tmp_path):
    cfg = tiny_config(regime="rfixed", k_values=(2,))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    dc.run_convergence(cfg, out_path=a)
    dc.run_convergence(cfg, out_path=b)
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "n,r,seed,sup_error_degree,sup_error_h2"


def test_convergence_error_shrinks_with_n():
    cfg_small = tiny_config(n_values=(200,), r_rule=(0.3,), k_values=(),
                            repetitions=5)
    cfg_big = tiny_config(n_values=(3200,), r_rule=(0.3,), k_values=(),
                          repetitions=5)
    med = []
    for cfg in (cfg_small, cfg_big):
        recs = dc.run_convergence(cfg)
        med.append(float(np.median([r.sup_error_degree for r in recs])))
    assert med[1] < med[0]


def test_run_rate_sweep_tiny(tmp_path):
    out = tmp_path / "rate.csv"
    cfg = tiny_config(n_values=(100, 200, 400), r_rule=2.0,
                      k_values=(float("inf"),), repetitions=3)
    records, pearson, slope = dc.run_rate_sweep(cfg, out_path=out)
    assert len(records) == 9
    for rec in records:
        assert rec.sup_error_degree > 0 and rec.sup_error_coreness > 0
    assert -1.0 <= pearson <= 1.0
    text = out.read_text()
    assert "# pearson=" in text and "# slope_loglog=" in text and "# runs=9" in text


def test_run_kmax_sweep_tiny(tmp_path):
    out = tmp_path / "kmax.csv"
    cfg = tiny_config(n_values=(60, 120), r_rule=(0.1, 0.4),
                      k_values=(float("inf"),), repetitions=2)
    rows, violations = dc.run_kmax_sweep(cfg, out_path=out)
    assert len(rows) == 8
    lines = out.read_text().splitlines()
    assert lines[0] == dc.KMAX_HEADER
    assert lines[0] == "n,r,seed,k_inf,diameter,max_degree,montresor_sum,n_vertices,ratio"
    for n, r, seed, bounds, ratio in rows:
        assert bounds.k_inf <= bounds.montresor_sum
        assert bounds.k_inf <= n
        if bounds.k_inf > 0:
            assert ratio == bounds.diameter * bounds.max_degree / bounds.k_inf
    assert any("# conjecture_violations=" in ln for ln in lines)


def test_run_kmax_complete_graph_ratio_guard(tmp_path):
    # r far above the cloud diameter: complete graph, k_inf = 0, ratio = inf
    out = tmp_path / "kmax.csv"
    cfg = tiny_config(n_values=(60,), r_rule=(50.0,),
                      k_values=(float("inf"),), repetitions=1)
    rows, violations = dc.run_kmax_sweep(cfg, out_path=out)
    assert rows[0][3].k_inf == 0
    assert math.isinf(rows[0][4])
    assert violations == []
    text = out.read_text()
    assert "# k_inf_zero_rows=1" in text


def test_budget_guard():
    huge = tiny_config(n_values=(1_000_000,) * 8, r_rule=(0.02,),
                       repetitions=50)
    with pytest.raises(dc.ResourceError, match="allow-long"):
        harness._budget_guard(huge, "converge", False)
    harness._budget_guard(huge, "converge", True)
    assert dc.estimated_cost_seconds(huge, "converge") > \
        dc.estimated_cost_seconds(tiny_config(), "converge")


def test_estimate_deviation():
    model = dc.preset("fig1d-mixture6")
    centers = np.linspace(-7, 7, 29)[:, None]
    empty = dc.PointCloud(points=np.empty((0, 1)))
    base = dc.estimate_deviation(empty, model, 0.2, centers)
    assert base > 0.08  # the ball average itself, about max f
    cloud = dc.sample(model, 20_000, seed=0)
    small = dc.estimate_deviation(cloud, model, 0.2, centers)
    assert small < base / 3


def test_run_selftest_stream():
    buf = io.StringIO()
    assert dc.run_selftest(buf) == 0
    text = buf.getvalue()
    assert text.count("ok") >= 12 and "FAIL" not in text

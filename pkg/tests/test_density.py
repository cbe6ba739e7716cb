import math

import numpy as np
import pytest
import scipy.stats

import depthcore as dc


def test_preset_names():
    assert set(dc.PRESET_NAMES) == {"fig1d-mixture6", "fig2d-crater"}
    with pytest.raises(dc.InputError):
        dc.preset("nope")


def test_mixture6_composition():
    m = dc.preset("fig1d-mixture6")
    assert m.dim == 1
    assert len(m.components) == 6
    assert math.isclose(sum(c.weight for c in m.components), 1.0)
    assert m.lipschitz_bound > 0
    lo, hi = m.support_box[0]
    assert lo < -6.0 and hi > 5.4


def test_crater_composition():
    m = dc.preset("fig2d-crater")
    assert m.dim == 2
    kinds = sorted(type(c).__name__ for c in m.components)
    assert kinds == ["GaussianComponent", "RingComponent"]
    assert math.isclose(sum(c.weight for c in m.components), 1.0)


@pytest.mark.parametrize("name,h", [("fig1d-mixture6", 0.002), ("fig2d-crater", 0.02)])
def test_mass_is_one(name, h):
    model = dc.preset(name)
    grid = dc.GridSpec(model.dim, model.support_box, h)
    vals = dc.discretize_density(model, grid).values
    mass = vals.sum() * h ** model.dim
    assert abs(mass - 1.0) < 1e-4


def test_evaluate_nonnegative_and_shape():
    model = dc.preset("fig2d-crater")
    x = np.random.default_rng(3).uniform(-4, 4, size=(500, 2))
    vals = dc.evaluate(model, x)
    assert vals.shape == (500,)
    assert np.all(vals >= 0)
    # single-point call returns a scalar
    at0 = dc.evaluate(model, np.zeros(2))
    assert np.isscalar(at0) and at0 >= 0


def test_symmetric_mixture_is_symmetric():
    model = dc.parse_density_config({
        "dim": 1,
        "components": [
            {"type": "gaussian", "weight": 0.5, "mean": [-2.0], "sigma": 0.7},
            {"type": "gaussian", "weight": 0.5, "mean": [2.0], "sigma": 0.7},
        ],
    })
    x = np.linspace(0.0, 5.0, 101)[:, None]
    assert np.array_equal(dc.evaluate(model, x), dc.evaluate(model, -x))


def test_sample_deterministic():
    model = dc.preset("fig1d-mixture6")
    a = dc.sample(model, 500, seed=7)
    b = dc.sample(model, 500, seed=7)
    c = dc.sample(model, 500, seed=8)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.points.shape == (500, 1)


def test_sample_matches_density_chi2():
    # 50-bin goodness of fit at n = 1e5, significance 1e-3 (seeded)
    model = dc.preset("fig1d-mixture6")
    n = 100_000
    pts = dc.sample(model, n, seed=1).points[:, 0]
    lo, hi = model.support_box[0]
    edges = np.linspace(lo, hi, 51)
    counts, _ = np.histogram(pts, bins=edges)
    # expected mass per bin by fine midpoint quadrature
    h = (hi - lo) / 50000.0
    xs = np.arange(lo + h / 2, hi, h)
    f = dc.evaluate(model, xs[:, None])
    which = np.minimum(((xs - lo) / (hi - lo) * 50).astype(int), 49)
    exp_mass = np.bincount(which, weights=f * h, minlength=50)
    keep = exp_mass * n >= 5
    stat = ((counts[keep] - n * exp_mass[keep]) ** 2 / (n * exp_mass[keep])).sum()
    pval = scipy.stats.chi2.sf(stat, keep.sum() - 1)
    assert pval > 1e-3


def test_sample_crater_radial_profile():
    model = dc.preset("fig2d-crater")
    pts = dc.sample(model, 50_000, seed=2).points
    rad = np.hypot(pts[:, 0], pts[:, 1])
    # ring mode concentrates mass near rho0 = 1.5
    frac_ring = ((rad > 1.0) & (rad < 2.0)).mean()
    assert frac_ring > 0.55


def test_modulus_bound_property():
    for name in dc.PRESET_NAMES:
        model = dc.preset(name)
        rng = np.random.default_rng(11)
        x = rng.uniform(-4, 4, size=(300, model.dim))
        u = rng.uniform(0.0, 0.8, size=300)
        d = rng.normal(size=(300, model.dim))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        y = x + u[:, None] * d
        gap = np.abs(dc.evaluate(model, x) - dc.evaluate(model, y))
        bound = np.array([dc.modulus_bound(model, v) for v in u])
        assert np.all(gap <= bound + 1e-12)


def test_modulus_bound_caps_at_peak():
    model = dc.preset("fig1d-mixture6")
    small = dc.modulus_bound(model, 1e-3)
    assert math.isclose(small, model.lipschitz_bound * 1e-3)
    assert dc.modulus_bound(model, 100.0) < 2 * model.peak_bound + 1e-12
    assert dc.modulus_bound(model, 100.0) <= dc.modulus_bound(model, 200.0)


def test_serialize_roundtrip():
    for name in dc.PRESET_NAMES:
        model = dc.preset(name)
        doc = dc.serialize_density_config(model)
        back = dc.parse_density_config(doc)
        x = np.random.default_rng(0).uniform(-3, 3, size=(50, model.dim))
        assert np.array_equal(dc.evaluate(model, x), dc.evaluate(back, x))
        assert back.support_box == model.support_box


def test_preset_config_matches_preset():
    doc = dc.preset_config("fig1d-mixture6")
    model = dc.parse_density_config({"preset": "fig1d-mixture6"})
    assert doc["dim"] == 1
    assert model.dim == 1
    assert len(doc["components"]) == 6


@pytest.mark.parametrize("doc,fragment", [
    ({}, "dim"),
    ({"dim": 1}, "components"),
    ({"dim": 0, "components": [{}]}, "dim"),
    ({"dim": 1, "components": []}, "components"),
    ({"dim": 1, "components": [{"type": "gaussian", "weight": -1.0,
                                "mean": [0.0], "sigma": 1.0}]}, "weight"),
    ({"dim": 1, "components": [{"type": "gaussian", "weight": 1.0,
                                "mean": [0.0, 0.0], "sigma": 1.0}]}, "mean"),
    ({"dim": 1, "components": [{"type": "ring", "weight": 1.0,
                                "rho0": 1.0, "sigma": 0.2}]}, "ring"),
    ({"dim": 1, "components": [{"type": "blob", "weight": 1.0,
                                "sigma": 1.0}]}, "type"),
    ({"preset": 7}, "preset"),
])
def test_parse_errors(doc, fragment):
    with pytest.raises(dc.InputError, match=fragment):
        dc.parse_density_config(doc)


def test_parse_rejects_bad_json_text():
    with pytest.raises(dc.InputError):
        dc.parse_density_config("{not json")
    with pytest.raises(dc.InputError):
        dc.parse_density_config("[1, 2]")

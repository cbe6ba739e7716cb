import json
import math

import numpy as np
import pytest

import depthcore as dc


def gauss_model(dim, sigma=1.0):
    return dc.parse_density_config({
        "dim": dim,
        "components": [{"type": "gaussian", "weight": 1.0,
                        "mean": [0.0] * dim, "sigma": sigma}],
    })


def field_on(grid, values):
    return dc.ScalarField(grid=grid, values=np.asarray(values, dtype=np.float64),
                          tag="f")


def test_gridspec_validation():
    with pytest.raises(dc.InputError):
        dc.GridSpec(3, ((0.0, 1.0),) * 3, 0.1)
    with pytest.raises(dc.InputError):
        dc.GridSpec(1, ((0.0, 1.0),), 0.0)
    with pytest.raises(dc.InputError):
        dc.GridSpec(1, ((1.0, 0.0),), 0.1)
    with pytest.raises(dc.InputError):
        dc.GridSpec(2, ((0.0, 1.0),), 0.1)


def test_gridspec_nodes():
    g = dc.GridSpec(1, ((-1.0, 1.0),), 0.25)
    assert g.counts == (9,)
    assert np.array_equal(g.axis_nodes(0), np.arange(-4, 5) * 0.25)
    g2 = dc.GridSpec(2, ((0.0, 1.0), (0.0, 0.5)), 0.5)
    coords = g2.node_coords()
    assert g2.counts == (3, 2)
    assert coords.shape == (6, 2)
    # row-major: axis 0 outer
    assert np.array_equal(coords[:2, 0], [0.0, 0.0])
    assert np.array_equal(coords[:2, 1], [0.0, 0.5])


def test_scalarfield_validation():
    g = dc.GridSpec(1, ((0.0, 1.0),), 0.5)
    with pytest.raises(dc.InputError):
        dc.ScalarField(grid=g, values=np.ones(2), tag="f")
    with pytest.raises(dc.InputError):
        dc.ScalarField(grid=g, values=np.array([1.0, -0.5, 0.0]), tag="f")
    with pytest.raises(dc.InputError):
        dc.ScalarField(grid=g, values=np.array([1.0, np.inf, 0.0]), tag="f")


def test_discretize_density_exact_and_box_check():
    model = dc.preset("fig1d-mixture6")
    lo, hi = model.support_box[0]
    grid = dc.GridSpec(1, ((lo, hi),), 0.01)
    f = dc.discretize_density(model, grid)
    assert f.tag == "f"
    nodes = grid.axis_nodes(0)[:, None]
    assert np.array_equal(f.values, dc.evaluate(model, nodes))
    # a grid that misses part of the support is rejected
    with pytest.raises(dc.InputError):
        dc.discretize_density(model, dc.GridSpec(1, ((lo + 1.0, hi),), 0.01))
    with pytest.raises(dc.InputError):
        dc.discretize_density(gauss_model(2), dc.GridSpec(1, ((-8.0, 8.0),), 0.01))


def test_ball_average_indicator():
    grid = dc.GridSpec(1, ((-2.0, 2.0),), 0.001)
    x = grid.axis_nodes(0)
    f = field_on(grid, ((x >= -1.0) & (x <= 1.0)).astype(float))
    fr = dc.ball_average(f, 0.25)
    assert fr.tag == "f_r" and fr.r == 0.25
    # rectangle rule carries an O(h/r) volume bias, the documented 2% slack
    i0 = np.searchsorted(x, 0.0)
    assert abs(fr.values[i0] - 1.0) < 0.005
    iedge = np.searchsorted(x, 1.0)
    assert abs(fr.values[iedge] - 0.5) < 0.01
    ifar = np.searchsorted(x, 1.5)
    assert fr.values[ifar] == 0.0


def test_ball_average_matches_quadrature_1d():
    model = dc.preset("fig1d-mixture6")
    lo, hi = model.support_box[0]
    r = 0.2
    grid = dc.GridSpec(1, ((lo - r - 0.02, hi + r + 0.02),), 0.004)
    f = dc.discretize_density(model, grid)
    fr = dc.ball_average(f, r)
    # reference: plain stencil mean with zero padding
    R = int(r / grid.h)
    vals = f.values
    want = np.zeros_like(vals)
    padded = np.r_[np.zeros(R), vals, np.zeros(R)]
    for off in range(-R, R + 1):
        if (off * grid.h) ** 2 <= r * r:
            want += padded[R + off: R + off + vals.size]
    want *= grid.h / (2.0 * r)
    assert np.allclose(fr.values, want, rtol=1e-10, atol=1e-14)


def test_ball_average_matches_quadrature_2d():
    model = gauss_model(2, sigma=0.5)
    r = 0.3
    grid = dc.GridSpec(2, ((-3.3, 3.3), (-3.3, 3.3)), 0.03)
    f = dc.discretize_density(model, grid)
    fr = dc.ball_average(f, r)
    v = f.values.reshape(grid.counts)
    R = int(r / grid.h)
    n0, n1 = grid.counts
    pad = np.zeros((n0 + 2 * R, n1 + 2 * R))
    pad[R:R + n0, R:R + n1] = v
    want = np.zeros_like(v)
    cnt = 0
    for a in range(-R, R + 1):
        for b in range(-R, R + 1):
            if (a * grid.h) ** 2 + (b * grid.h) ** 2 <= r * r:
                cnt += 1
                want += pad[R + a:R + a + n0, R + b:R + b + n1]
    want *= grid.h ** 2 / (math.pi * r * r)
    assert np.allclose(fr.values.reshape(grid.counts), want, rtol=1e-9, atol=1e-13)


def test_h_transform_invariants():
    model = dc.preset("fig1d-mixture6")
    lo, hi = model.support_box[0]
    grid = dc.GridSpec(1, ((lo - 0.3, hi + 0.3),), 0.01)
    f = dc.discretize_density(model, grid)
    rng = np.random.default_rng(0)
    r = 0.25
    a = rng.uniform(0.0, 0.2, f.values.size)
    b = a + rng.uniform(0.0, 0.1, f.values.size)
    ha = dc.field_h_transform(f, field_on(grid, a), r)
    hb = dc.field_h_transform(f, field_on(grid, b), r)
    # monotone, exact
    assert np.all(ha.values <= hb.values)
    # 1-Lipschitz with tiny quantization slack
    assert np.abs(ha.values - hb.values).max() <= np.abs(a - b).max() + 1e-12
    # H f_r <= f_r, exact
    fr = dc.ball_average(f, r)
    h1 = dc.field_h_transform(f, fr, r)
    assert np.all(h1.values <= fr.values)


def test_iterate_h_k_monotone_and_tags():
    model = dc.preset("fig1d-mixture6")
    lo, hi = model.support_box[0]
    grid = dc.GridSpec(1, ((lo - 0.25, hi + 0.25),), 0.005)
    f = dc.discretize_density(model, grid)
    r = 0.2
    prev = dc.iterate_h(f, r, 0)
    assert np.array_equal(prev.values, dc.ball_average(f, r).values)
    for k in (1, 2, 3):
        cur = dc.iterate_h(f, r, k)
        assert cur.tag == "h_iterate(%d,r)" % k and cur.k == k
        assert np.all(cur.values <= prev.values)
        prev = cur
    with pytest.raises(dc.InputError):
        dc.iterate_h(f, r, -1)
    with pytest.raises(dc.InputError):
        dc.ball_average(f, 0.01)  # h > r/10


def test_h_chain_consistent_with_iterate():
    model = gauss_model(1)
    grid = dc.GridSpec(1, ((-6.3, 6.3),), 0.01)
    f = dc.discretize_density(model, grid)
    r = 0.3
    phi = dc.ball_average(f, r)
    for _ in range(4):
        phi = dc.field_h_transform(f, phi, r)
    assert np.array_equal(phi.values, dc.iterate_h(f, r, 4).values)


def test_continuum_r_coreness_fixpoint():
    model = dc.preset("fig1d-mixture6")
    lo, hi = model.support_box[0]
    grid = dc.GridSpec(1, ((lo - 0.25, hi + 0.25),), 0.005)
    f = dc.discretize_density(model, grid)
    cr, used = dc.continuum_r_coreness(f, 0.2)
    assert cr.tag == "C_r" and used >= 1
    assert np.all(cr.values <= dc.ball_average(f, 0.2).values)
    # reapplying H at the fixed point changes nothing
    again = dc.field_h_transform(f, cr, 0.2)
    assert np.array_equal(again.values, cr.values)


def test_constant_density_erodes_to_half():
    c = 0.7
    r = 0.05
    for h in (0.002, 0.0005):
        grid = dc.GridSpec(1, ((0.0, 1.0),), h)
        f = field_on(grid, np.full(grid.counts[0], c))
        cr, _ = dc.continuum_r_coreness(f, r)
        mid = cr.values[grid.counts[0] // 4: -grid.counts[0] // 4]
        assert np.all(mid == mid[0])  # interior plateau is exactly flat
        # discrete erosion stops at the half ball of R+1 nodes; c/2 + O(h/r)
        want = c * (int(r / h) + 1) * h / (2.0 * r)
        assert abs(mid[0] - want) < 1e-9
        assert abs(mid[0] - c / 2.0) <= c * h / (2.0 * r) + 1e-9


def test_c0_variational_unimodal_is_half():
    model = gauss_model(1)
    grid = dc.GridSpec(1, ((-6.0, 6.0),), 0.004)
    f = dc.discretize_density(model, grid)
    c0 = dc.c0_variational_1d(f)
    assert c0.tag == "C0"
    assert np.array_equal(c0.values, 0.5 * f.values)


def c0_brute(values):
    """max over intervals [a, b] containing x of
    min(f(a)/2, f(b)/2, min f on [a, b])."""
    m = values.size
    out = np.zeros(m)
    for a in range(m):
        run_min = math.inf
        for b in range(a, m):
            run_min = min(run_min, values[b])
            cand = min(values[a] / 2.0, values[b] / 2.0, run_min)
            for x in range(a, b + 1):
                if cand > out[x]:
                    out[x] = cand
    return out


def test_c0_variational_matches_brute():
    rng = np.random.default_rng(4)
    for m in (30, 80):
        vals = rng.uniform(0.0, 1.0, m)
        grid = dc.GridSpec(1, ((0.0, (m - 1) * 0.1),), 0.1)
        c0 = dc.c0_variational_1d(field_on(grid, vals))
        assert np.array_equal(c0.values, c0_brute(vals))


def test_c0_plateau_bridges_valley():
    # two peaks with a valley at 0.3: C0 flattens at the valley minimum
    # wherever f < 0.6, strictly above f/2 there
    grid = dc.GridSpec(1, ((-4.0, 4.0),), 0.01)
    x = grid.axis_nodes(0)
    vals = 1.0 * np.exp(-0.5 * ((x + 2) / 0.6) ** 2) \
        + 0.8 * np.exp(-0.5 * ((x - 2) / 0.6) ** 2) + 0.3 * np.exp(-0.5 * x ** 2)
    f = field_on(grid, vals)
    c0 = dc.c0_variational_1d(f)
    valley = np.flatnonzero((x > -1.2) & (x < 1.2))
    level = vals[valley].min()
    sel = valley[vals[valley] < 2 * level - 1e-9]
    assert sel.size > 10
    assert np.all(c0.values[sel] == level)
    assert np.all(c0.values[sel] > vals[sel] / 2.0)


def test_c0_variational_rejects_2d():
    model = gauss_model(2)
    grid = dc.GridSpec(2, ((-6.0, 6.0), (-6.0, 6.0)), 0.1)
    f = dc.discretize_density(model, grid)
    with pytest.raises(dc.InputError):
        dc.c0_variational_1d(f)


def test_extrapolate_matches_components():
    model = gauss_model(1)
    grid = dc.GridSpec(1, ((-6.4, 6.4),), 0.01)
    est, err = dc.continuum_coreness_extrapolate(model, grid, (0.3, 0.15))
    f = dc.discretize_density(model, grid)
    c_small, _ = dc.continuum_r_coreness(f, 0.15)
    c_double, _ = dc.continuum_r_coreness(f, 0.3)
    assert np.array_equal(est.values, c_small.values)
    assert np.array_equal(err.values, np.abs(c_small.values - c_double.values))
    assert est.tag == "C0" and err.tag == "C0_error"


def test_extrapolate_validation():
    model = gauss_model(1)
    grid = dc.GridSpec(1, ((-6.4, 6.4),), 0.01)
    with pytest.raises(dc.InputError):
        dc.continuum_coreness_extrapolate(model, grid, ())
    with pytest.raises(dc.InputError):
        dc.continuum_coreness_extrapolate(model, grid, (0.15, 0.3))
    with pytest.raises(dc.InputError):
        dc.continuum_coreness_extrapolate(model, grid, (0.3, 0.05))  # h too coarse
    small = dc.GridSpec(1, ((-6.1, 6.1),), 0.01)
    with pytest.raises(dc.InputError):
        # box cannot cover 2 r_min = 0.3 of padding
        dc.continuum_coreness_extrapolate(model, small, (0.3, 0.15))


def test_save_field_csv(tmp_path):
    model = gauss_model(1)
    grid = dc.GridSpec(1, ((-6.0, 6.0),), 0.5)
    f = dc.discretize_density(model, grid)
    fr = dc.ball_average(f, 5.0)
    p = tmp_path / "field.csv"
    dc.save_field_csv(fr, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "x0,value"
    data = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
    assert np.array_equal(data[:, 0], grid.axis_nodes(0))
    assert np.array_equal(data[:, 1], fr.values)
    meta = json.loads((tmp_path / "field.csv.json").read_text())
    assert meta["tag"] == "f_r" and meta["r"] == 5.0
    assert meta["grid"]["h"] == 0.5


def test_field_h_transform_grid_mismatch():
    g1 = dc.GridSpec(1, ((0.0, 1.0),), 0.01)
    g2 = dc.GridSpec(1, ((0.0, 1.0),), 0.02)
    f1 = field_on(g1, np.ones(g1.counts[0]))
    f2 = field_on(g2, np.ones(g2.counts[0]))
    with pytest.raises(dc.InputError):
        dc.field_h_transform(f1, f2, 0.2)

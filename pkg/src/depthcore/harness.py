"""Experiment orchestration: convergence suites, rate and k-max sweeps,
deviation estimation, and CSV reporting.

Conventions shared by every sweep:

* one CSV data row per (n, r, seed) run, rows emitted in (n, r, seed) order;
* floats printed with 17 significant digits, LF line endings;
* summary quantities appear as `# key=value` footer comment lines;
* wall-clock times never enter the CSV, so identical (config, seed, build)
  invocations produce byte-identical files regardless of thread settings.
"""

import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import centrality, continuum, density, geometry
from .errors import BoundViolationError, InputError, ResourceError

_REGIMES = ("rzero", "rfixed")
_INF = math.inf

# crude single-core cost model (seconds); sweeps estimated above this ask
# for an explicit allow_long
DEFAULT_BUDGET_SECONDS = 900.0


def _g(x) -> str:
    return "%.17g" % float(x)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: density x n-grid x r-rule x measures x repetitions.

    r_rule is either an explicit tuple of radii (crossed with every n) or a
    single constant c for the optimal-bandwidth rule r = c * n^(-1/(d+2));
    the exponent is fixed.  k_values lists the H-iterates to track (0 means
    the degree itself, math.inf means coreness).  repetitions is an int or
    "auto" (20 for n <= 1000, 10 above).  grid_h overrides the reference
    grid spacing; c0_r_sequence overrides the radii used by the limiting
    coreness estimate.
    """

    density: dict
    n_values: tuple
    r_rule: object
    k_values: tuple = ()
    repetitions: object = "auto"
    seed_base: int = 1
    regime: str = "rzero"
    grid_h: float = None
    c0_r_sequence: tuple = None
    edge_cap: int = None
    name: str = "custom"

    def __post_init__(self):
        if not isinstance(self.density, dict) or not self.density:
            raise InputError("density must be a preset or inline config mapping")
        ns = tuple(int(v) for v in self.n_values)
        if not ns:
            raise InputError("n_values is empty")
        if any(v < 50 for v in ns):
            raise InputError("all n_values must be >= 50")
        object.__setattr__(self, "n_values", ns)
        rule = self.r_rule
        if isinstance(rule, (list, tuple, np.ndarray)):
            rr = tuple(float(v) for v in rule)
            if not rr or any(not (v > 0 and math.isfinite(v)) for v in rr):
                raise InputError("explicit radii must be positive and finite")
            object.__setattr__(self, "r_rule", rr)
        else:
            c = float(rule)
            if not (c > 0 and math.isfinite(c)):
                raise InputError("bandwidth constant c must be positive")
            object.__setattr__(self, "r_rule", c)
        ks = []
        for k in self.k_values:
            if k == _INF or (isinstance(k, str) and k == "inf"):
                ks.append(_INF)
                continue
            ki = int(k)
            if ki < 0:
                raise InputError("k_values entries must be >= 0 or inf")
            ks.append(ki)
        object.__setattr__(self, "k_values", tuple(sorted(set(ks),
                           key=lambda v: (v == _INF, v))))
        if self.repetitions != "auto":
            reps = int(self.repetitions)
            if reps < 1:
                raise InputError("repetitions must be >= 1")
            object.__setattr__(self, "repetitions", reps)
        if self.regime not in _REGIMES:
            raise InputError("regime must be one of %s" % (_REGIMES,))
        if self.grid_h is not None:
            gh = float(self.grid_h)
            if not (gh > 0 and math.isfinite(gh)):
                raise InputError("grid_h must be positive")
            object.__setattr__(self, "grid_h", gh)
        if self.c0_r_sequence is not None:
            seq = tuple(float(v) for v in self.c0_r_sequence)
            if any(not (v > 0) for v in seq):
                raise InputError("c0_r_sequence radii must be positive")
            object.__setattr__(self, "c0_r_sequence", seq)
        if self.edge_cap is not None:
            object.__setattr__(self, "edge_cap", int(self.edge_cap))
        object.__setattr__(self, "seed_base", int(self.seed_base))

    @property
    def wants_coreness(self) -> bool:
        return _INF in self.k_values

    @property
    def finite_ks(self) -> tuple:
        return tuple(k for k in self.k_values if k != _INF)


@dataclass(frozen=True)
class ExperimentRecord:
    """Per-run results; hk_errors pairs (k, sup error) in k order."""

    n: int
    r: float
    seed: int
    sup_error_degree: float
    hk_errors: tuple = ()
    sup_error_coreness: float = None
    k_inf: int = None
    diameter: int = None
    max_degree: int = None
    montresor_sum: int = None
    wall_time: float = 0.0

    def __post_init__(self):
        errs = [self.sup_error_degree] + [e for _, e in self.hk_errors]
        if self.sup_error_coreness is not None:
            errs.append(self.sup_error_coreness)
        if any(not (e >= 0 and math.isfinite(e)) for e in errs):
            raise InputError("sup errors must be finite and >= 0")
        if self.k_inf is not None and self.montresor_sum is not None:
            if self.k_inf > self.montresor_sum:
                raise BoundViolationError(
                    "record has k_inf=%d > montresor_sum=%d"
                    % (self.k_inf, self.montresor_sum))


def resolve_model(config: ExperimentConfig) -> density.DensityModel:
    doc = config.density
    if "preset" in doc and len(doc) == 1:
        return density.preset(doc["preset"])
    return density.parse_density_config(doc)


def radii_for(config: ExperimentConfig, dim: int, n: int) -> tuple:
    if isinstance(config.r_rule, tuple):
        return tuple(sorted(config.r_rule))
    return (config.r_rule * float(n) ** (-1.0 / (dim + 2)),)


def repetitions_for(config: ExperimentConfig, n: int) -> int:
    if config.repetitions == "auto":
        return 20 if n <= 1000 else 10
    return config.repetitions


def _all_radii(config: ExperimentConfig, dim: int) -> tuple:
    rs = []
    for n in config.n_values:
        rs.extend(radii_for(config, dim, n))
    return tuple(sorted(set(rs)))


def _c0_sequence(config: ExperimentConfig, dim: int) -> tuple:
    if config.c0_r_sequence is not None:
        return config.c0_r_sequence
    return (0.2, 0.1, 0.05) if dim == 1 else (0.3, 0.15)


def _grid_for(model, pad: float, h: float) -> continuum.GridSpec:
    box = []
    for lo, hi in model.support_box:
        a = math.floor((lo - pad) / h) * h
        b = a + math.ceil((hi + pad - a) / h - 1e-9) * h
        box.append((a, b))
    return continuum.GridSpec(dim=model.dim, box=tuple(box), h=h)


# ---------------------------------------------------------------------------
# continuum references


class _ReferenceSet:
    """Reference fields for a sweep, all living on one shared grid.

    rzero: degree and every finite H-iterate converge to f itself; coreness
    converges to the limiting coreness, estimated by radius halving.
    rfixed: degree tracks the ball average at the sampling radius, finite
    iterates track the iterated transform, coreness tracks the fixed-radius
    fixpoint.
    """

    def __init__(self, model, config):
        self.model = model
        self.config = config
        dim = model.dim
        radii = _all_radii(config, dim)
        pol = 50.0 if dim == 1 else 10.0
        if config.regime == "rfixed":
            basis = min(radii) / pol
            pad = max(radii)
        else:
            basis = min(radii) / 5.0
            pad = 0.0
            if config.wants_coreness:
                seq = _c0_sequence(config, dim)
                basis = min(basis, min(seq) / pol)
                pad = max(max(seq), 2.0 * min(seq))
        h = config.grid_h if config.grid_h is not None else basis
        self.grid = _grid_for(model, pad + 2.0 * h, h)
        self.f = continuum.discretize_density(model, self.grid)
        self._per_r = {}
        self._c0 = None
        self._eval_cache = {}

    def _references_at(self, r: float) -> dict:
        cfg = self.config
        if cfg.regime == "rzero":
            refs = {"degree": self.f.values}
            for k in cfg.finite_ks:
                refs[k] = self.f.values
            if cfg.wants_coreness:
                if self._c0 is None:
                    est, _ = continuum.continuum_coreness_extrapolate(
                        self.model, self.grid, _c0_sequence(cfg, self.model.dim))
                    self._c0 = est.values
                refs["coreness"] = self._c0
            return refs
        if r not in self._per_r:
            refs = {}
            fr = continuum.ball_average(self.f, r)
            refs["degree"] = fr.values
            cur, cur_k = fr, 0
            for k in cfg.finite_ks:
                if k == 0:
                    refs[0] = fr.values
                    continue
                while cur_k < k:
                    cur = continuum.field_h_transform(self.f, cur, r)
                    cur_k += 1
                refs[k] = cur.values
            if cfg.wants_coreness:
                cr, _ = continuum.continuum_r_coreness(self.f, r)
                refs["coreness"] = cr.values
            self._per_r[r] = refs
        return self._per_r[r]

    def eval_nodes(self, r: float):
        """Grid nodes subsampled to spacing <= r/5: (coords, flat indices)."""
        h = self.grid.h
        stride = max(1, int(math.floor(r / (5.0 * h) * (1.0 + 1e-12))))
        if stride in self._eval_cache:
            return self._eval_cache[stride]
        counts = self.grid.counts
        if self.grid.dim == 1:
            flat = np.arange(0, counts[0], stride, dtype=np.int64)
            X = self.grid.axis_nodes(0)[flat].reshape(-1, 1)
        else:
            i0 = np.arange(0, counts[0], stride, dtype=np.int64)
            i1 = np.arange(0, counts[1], stride, dtype=np.int64)
            flat = (i0[:, None] * counts[1] + i1[None, :]).ravel()
            x0 = self.grid.axis_nodes(0)[i0]
            x1 = self.grid.axis_nodes(1)[i1]
            X = np.empty((flat.size, 2))
            X[:, 0] = np.repeat(x0, i1.size)
            X[:, 1] = np.tile(x1, i0.size)
        self._eval_cache[stride] = (X, flat)
        return X, flat


# ---------------------------------------------------------------------------
# budget guard


def _mean_density_mass(model) -> float:
    # quadrature of f^2 over the support box; E f(X) for X ~ f
    spans = [hi - lo for lo, hi in model.support_box]
    h = max(min(spans) / 400.0, 1e-3)
    grid = _grid_for(model, 0.0, h)
    f = continuum.discretize_density(model, grid)
    return float((f.values ** 2).sum() * h ** grid.dim)


def estimated_cost_seconds(config: ExperimentConfig, kind: str) -> float:
    """Order-of-magnitude single-core wall-time estimate for a sweep."""
    model = resolve_model(config)
    dim = model.dim
    i2 = _mean_density_mass(model)
    spans = [hi - lo for lo, hi in model.support_box]
    vol_eval = 1.0
    for s in spans:
        vol_eval *= s
    est = 0.5
    for n in config.n_values:
        reps = repetitions_for(config, n)
        for r in radii_for(config, dim, n):
            vball = geometry.unit_ball_volume(dim) * r ** dim
            deg = min(float(n), n * vball * i2)
            edges = 0.5 * n * deg
            m_eval = vol_eval / (r / 5.0) ** dim
            per = 4e-8 * n * math.log2(n + 2) + 2e-7 * n
            if dim >= 2:
                per += 1.2e-8 * edges
            if dim >= 2 and (kind == "kmax"
                             or (kind == "converge" and config.wants_coreness)):
                # kmax_bounds takes the exact hop diameter, an all-sources
                # BFS on the CSR form (the d=1 window form is near-linear)
                per += 1.5e-10 * n * (n + 2.0 * edges)
            if kind != "kmax":
                per += 6e-9 * m_eval * (deg + 8.0) * math.log2(deg + 4.0)
            nk = max(1, len(config.finite_ks) + (1 if config.wants_coreness else 0))
            est += reps * per * (1.0 if kind == "kmax" else 0.5 * (1 + nk))
    if kind != "kmax":
        radii = _all_radii(config, dim)
        pol = 50.0 if dim == 1 else 10.0
        h = config.grid_h
        if config.regime == "rfixed":
            h = h or min(radii) / pol
            m = vol_eval / h ** dim
            for r in radii:
                b = geometry.unit_ball_volume(dim) * (r / h) ** dim
                est += 1.5e-8 * m * b * (len(config.finite_ks) * 2 + 60)
        elif config.wants_coreness:
            seq = _c0_sequence(config, dim)
            h = h or min(min(radii) / 5.0, min(seq) / pol)
            m = vol_eval / h ** dim
            for r in (min(seq), 2.0 * min(seq)):
                b = geometry.unit_ball_volume(dim) * (r / h) ** dim
                est += 1.5e-8 * m * b * 80
    return est


def _budget_guard(config, kind, allow_long):
    est = estimated_cost_seconds(config, kind)
    if est > DEFAULT_BUDGET_SECONDS and not allow_long:
        raise ResourceError(
            "sweep %r estimated at %.0f s exceeds the %.0f s budget; "
            "pass allow_long (CLI: --allow-long) to run anyway"
            % (config.name, est, DEFAULT_BUDGET_SECONDS))
    return est


# ---------------------------------------------------------------------------
# convergence suite


def _consistency_probe(errs: np.ndarray, sup: float, seed: int):
    # the sup over the eval grid dominates any probed node
    rng = np.random.default_rng((seed, 0x5EED))
    for idx in rng.integers(0, errs.size, 10):
        assert sup >= errs[idx], "sup error lost to a probed node"


def _one_convergence_run(model, refs, config, n, r, seed):
    t0 = time.perf_counter()
    cloud = density.sample(model, n, seed)
    index = geometry.build_index(cloud, r)
    X, flat = refs.eval_nodes(r)
    table = refs._references_at(r)

    dep = centrality.depth_profile(cloud, index, X, r, "degree")
    errs = np.abs(dep - table["degree"][flat])
    sup_deg = float(errs.max())
    _consistency_probe(errs, sup_deg, seed)

    graph = None
    hk = []
    cap = config.edge_cap if config.edge_cap is not None else geometry.DEFAULT_EDGE_CAP
    need_graph = config.wants_coreness or any(k >= 1 for k in config.finite_ks)
    if need_graph:
        graph = geometry.build_graph(cloud, r, edge_cap=cap)
    scores, cur_k = None, 0
    for k in config.finite_ks:
        if k == 0:
            hk.append((0, sup_deg))
            continue
        # the query's level-k value is the h-rule over the sample's
        # level-(k-1) scores, so the chain stops one step short
        if scores is None:
            scores = centrality.degree_scores(graph)
        while cur_k < k - 1:
            scores = centrality.h_transform_graph(graph, scores)
            cur_k += 1
        dep = centrality.depth_profile(cloud, index, X, r,
                                       "h_iterate(%d)" % k, scores=scores)
        errs = np.abs(dep - table[k][flat])
        hk.append((k, float(errs.max())))
        _consistency_probe(errs, hk[-1][1], seed)

    sup_core = k_inf = diameter = max_degree = montresor = None
    if config.wants_coreness:
        core, _ = centrality.coreness_by_iteration(graph)
        dep = centrality.depth_profile(cloud, index, X, r, "coreness", scores=core)
        errs = np.abs(dep - table["coreness"][flat])
        sup_core = float(errs.max())
        _consistency_probe(errs, sup_core, seed)
        bounds = centrality.kmax_bounds(graph)
        k_inf, diameter = bounds.k_inf, bounds.diameter
        max_degree, montresor = bounds.max_degree, bounds.montresor_sum

    return ExperimentRecord(
        n=n, r=float(r), seed=seed, sup_error_degree=sup_deg,
        hk_errors=tuple(hk), sup_error_coreness=sup_core, k_inf=k_inf,
        diameter=diameter, max_degree=max_degree, montresor_sum=montresor,
        wall_time=time.perf_counter() - t0)


def _convergence_csv(records, config) -> str:
    cols = ["n", "r", "seed", "sup_error_degree"]
    cols += ["sup_error_h%d" % k for k in config.finite_ks]
    if config.wants_coreness:
        cols += ["sup_error_coreness", "k_inf", "diameter", "max_degree",
                 "montresor_sum"]
    lines = [",".join(cols)]
    for rec in records:
        row = [str(rec.n), _g(rec.r), str(rec.seed), _g(rec.sup_error_degree)]
        row += [_g(e) for _, e in rec.hk_errors]
        if config.wants_coreness:
            row += [_g(rec.sup_error_coreness), str(rec.k_inf),
                    str(rec.diameter), str(rec.max_degree),
                    str(rec.montresor_sum)]
        lines.append(",".join(row))
    lines.append("# runs=%d" % len(records))
    return "\n".join(lines) + "\n"


def run_convergence(config: ExperimentConfig, out_path=None, allow_long=False):
    """Sample -> graph -> depth on the eval grid -> sup error per reference.

    Returns the record list; writes one CSV data row per run when out_path
    is given.
    """
    _budget_guard(config, "converge", allow_long)
    model = resolve_model(config)
    refs = _ReferenceSet(model, config)
    records = []
    for n in sorted(config.n_values):
        for r in radii_for(config, model.dim, n):
            for rep in range(repetitions_for(config, n)):
                records.append(_one_convergence_run(
                    model, refs, config, n, r, config.seed_base + rep))
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_convergence_csv(records, config))
    return records


# ---------------------------------------------------------------------------
# rate sweep


def run_rate_sweep(config: ExperimentConfig, out_path=None, allow_long=False):
    """Degree-vs-coreness sup-error pairs over an (n, r) grid.

    Footer reports the Pearson correlation of the raw pairs and the
    least-squares slope of log coreness error against log degree error.
    """
    model = resolve_model(config)
    if model.dim > 2:
        raise InputError("rate sweep needs a continuum reference: d <= 2")
    cfg = ExperimentConfig(
        density=config.density, n_values=config.n_values, r_rule=config.r_rule,
        k_values=(_INF,), repetitions=config.repetitions,
        seed_base=config.seed_base, regime="rzero", grid_h=config.grid_h,
        c0_r_sequence=config.c0_r_sequence, edge_cap=config.edge_cap,
        name=config.name)
    _budget_guard(cfg, "rate", allow_long)
    refs = _ReferenceSet(model, cfg)
    records = []
    cap = cfg.edge_cap if cfg.edge_cap is not None else geometry.DEFAULT_EDGE_CAP
    for n in sorted(cfg.n_values):
        for r in radii_for(cfg, model.dim, n):
            table = refs._references_at(r)
            X, flat = refs.eval_nodes(r)
            for rep in range(repetitions_for(cfg, n)):
                seed = cfg.seed_base + rep
                t0 = time.perf_counter()
                cloud = density.sample(model, n, seed)
                index = geometry.build_index(cloud, r)
                dep = centrality.depth_profile(cloud, index, X, r, "degree")
                e_deg = float(np.abs(dep - table["degree"][flat]).max())
                graph = geometry.build_graph(cloud, r, edge_cap=cap)
                core = centrality.coreness_bucket(graph)
                dep = centrality.depth_profile(cloud, index, X, r, "coreness",
                                               scores=core)
                e_cor = float(np.abs(dep - table["coreness"][flat]).max())
                assert math.isfinite(e_deg) and e_deg > 0
                assert math.isfinite(e_cor) and e_cor > 0
                records.append(ExperimentRecord(
                    n=n, r=float(r), seed=seed, sup_error_degree=e_deg,
                    sup_error_coreness=e_cor,
                    wall_time=time.perf_counter() - t0))
    deg = np.array([rec.sup_error_degree for rec in records])
    cor = np.array([rec.sup_error_coreness for rec in records])
    pearson = float(np.corrcoef(deg, cor)[0, 1])
    slope = float(np.polyfit(np.log(deg), np.log(cor), 1)[0])
    lines = ["n,r,seed,sup_error_degree,sup_error_coreness"]
    for rec in records:
        lines.append(",".join([str(rec.n), _g(rec.r), str(rec.seed),
                               _g(rec.sup_error_degree),
                               _g(rec.sup_error_coreness)]))
    lines.append("# pearson=%s" % _g(pearson))
    lines.append("# slope_loglog=%s" % _g(slope))
    lines.append("# runs=%d" % len(records))
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return records, pearson, slope


# ---------------------------------------------------------------------------
# k-max sweep


KMAX_HEADER = "n,r,seed,k_inf,diameter,max_degree,montresor_sum,n_vertices,ratio"


def run_kmax_sweep(config: ExperimentConfig, out_path=None, allow_long=False):
    """Iteration counts against the proven and conjectured bounds.

    Proven bounds are hard (a violation raises); the conjectured bound
    diameter x max degree >= k_inf is soft: a run with ratio < 1 emits a
    CONJECTURE-VIOLATION comment row after its data row.
    """
    _budget_guard(config, "kmax", allow_long)
    model = resolve_model(config)
    cap = config.edge_cap if config.edge_cap is not None else geometry.DEFAULT_EDGE_CAP
    lines = [KMAX_HEADER]
    rows = []
    zero_rows = 0
    violations = []
    for n in sorted(config.n_values):
        for r in radii_for(config, model.dim, n):
            for rep in range(repetitions_for(config, n)):
                seed = config.seed_base + rep
                cloud = density.sample(model, n, seed)
                graph = geometry.build_graph(cloud, r, edge_cap=cap)
                b = centrality.kmax_bounds(graph)
                ratio = (b.conjecture / b.k_inf) if b.k_inf > 0 else _INF
                if b.k_inf == 0:
                    zero_rows += 1
                rows.append((n, r, seed, b, ratio))
                lines.append(",".join([
                    str(n), _g(r), str(seed), str(b.k_inf), str(b.diameter),
                    str(b.max_degree), str(b.montresor_sum), str(cloud.n),
                    _g(ratio)]))
                if b.k_inf > 0 and ratio < 1.0:
                    violations.append((n, r, seed, ratio))
                    lines.append("# CONJECTURE-VIOLATION n=%d r=%s seed=%d ratio=%s"
                                 % (n, _g(r), seed, _g(ratio)))
    finite = [ratio for _, _, _, _, ratio in rows if math.isfinite(ratio)]
    lines.append("# k_inf_zero_rows=%d" % zero_rows)
    lines.append("# conjecture_violations=%d" % len(violations))
    if finite:
        lines.append("# min_ratio=%s" % _g(min(finite)))
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return rows, violations


# ---------------------------------------------------------------------------
# deviation estimate


def estimate_deviation(cloud, model, r: float, centers) -> float:
    """max over centers of |P_n(B(c, r)) - P(B(c, r))| / (omega r^d).

    The model side is grid quadrature of the density (the ball average
    times omega r^d); the empirical side counts sample points in the ball.
    """
    r = float(r)
    if not (r > 0 and math.isfinite(r)):
        raise InputError("r must be positive")
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim == 1:
        centers = centers.reshape(-1, 1) if model.dim == 1 else centers.reshape(1, -1)
    if centers.shape[1] != model.dim:
        raise InputError("centers of shape %s do not match model dim %d"
                         % (centers.shape, model.dim))
    h = r / 50.0 if model.dim == 1 else r / 10.0
    grid = _grid_for(model, r + 2.0 * h, h)
    f = continuum.discretize_density(model, grid)
    ba = continuum.ball_average(f, r)
    vals = np.empty(centers.shape[0])
    counts = grid.counts
    for t in range(centers.shape[0]):
        flat = 0
        for a in range(grid.dim):
            i = int(round((centers[t, a] - grid.box[a][0]) / h))
            if not (0 <= i < counts[a]):
                raise InputError("center %s falls outside the quadrature grid"
                                 % (centers[t],))
            flat = flat * counts[a] + i
        vals[t] = ba.values[flat]
    norm = geometry.normalization(max(cloud.n, 1), r, model.dim)
    if cloud.n == 0:
        emp = np.zeros(centers.shape[0])
    else:
        index = geometry.build_index(cloud, r)
        emp = np.array([geometry.neighbors_of_point(cloud, index, c, r).size
                        for c in centers], dtype=np.float64) / norm
    return float(np.abs(emp - vals).max())


# ---------------------------------------------------------------------------
# default sweep configurations


def _geom_ints(lo, hi, count) -> tuple:
    vs = np.geomspace(lo, hi, count)
    return tuple(int(round(v)) for v in vs)


def _geom_radii(lo, hi, count) -> tuple:
    return tuple(float(v) for v in np.geomspace(lo, hi, count))


def default_config(kind: str, preset: str = "fig1d-mixture6") -> ExperimentConfig:
    """Built-in sweep configurations ("default" resolves to the 1-D preset,
    "default-2d" to the 2-D one)."""
    dens = {"preset": preset}
    two_d = preset == "fig2d-crater"
    if kind in ("rate", "kmax"):
        radii = _geom_radii(0.27, 1.80, 8) if two_d else _geom_radii(0.1, 0.97, 8)
        return ExperimentConfig(
            density=dens, n_values=_geom_ints(100, 10000, 9), r_rule=radii,
            k_values=(_INF,) if kind == "rate" else (), repetitions="auto",
            seed_base=1, regime="rzero", name="%s-%s" % (kind, preset))
    if kind == "converge":
        if two_d:
            # n = 2e4 at the optimal-bandwidth rule, r(2e4) = 0.25
            c = 0.25 * 20000.0 ** 0.25
            return ExperimentConfig(
                density=dens, n_values=(20000,), r_rule=c, k_values=(1, 5),
                repetitions="auto", seed_base=1, regime="rzero",
                name="converge-%s" % preset)
        return ExperimentConfig(
            density=dens, n_values=(10000,), r_rule=(0.13,),
            k_values=(0, 1, 5, 10, 15, 20, _INF), repetitions="auto",
            seed_base=1, regime="rfixed", name="converge-%s" % preset)
    raise InputError("unknown sweep kind %r" % (kind,))


def load_experiment_config(doc) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON-style mapping."""
    if not isinstance(doc, dict):
        raise InputError("experiment config must be a mapping")
    known = {"density", "n_values", "r_rule", "k_values", "repetitions",
             "seed_base", "regime", "grid_h", "c0_r_sequence", "edge_cap",
             "name"}
    extra = set(doc) - known
    if extra:
        raise InputError("unknown experiment config keys: %s" % sorted(extra))
    kw = dict(doc)
    if "r_rule" in kw and isinstance(kw["r_rule"], dict):
        if set(kw["r_rule"]) != {"c"}:
            raise InputError("symbolic r_rule must be {\"c\": <constant>}")
        kw["r_rule"] = float(kw["r_rule"]["c"])
    if "k_values" in kw:
        kw["k_values"] = tuple(
            _INF if v in ("inf", _INF) else int(v) for v in kw["k_values"])
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise InputError("bad experiment config: %s" % exc)


def load_experiment_config_file(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError("cannot read config %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise InputError("config %s is not valid JSON: %s" % (path, exc))
    return load_experiment_config(doc)


# ---------------------------------------------------------------------------
# selftest


def _st_tiny_line():
    cloud = geometry.PointCloud(points=np.array([[0.0], [0.05], [0.2]]))
    g = geometry.build_graph(cloud, 0.1)
    assert g.degrees().tolist() == [1, 1, 0]
    assert g.n_edges == 1


def _st_complete_graph():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1], [0.05, 0.05]])
    g = geometry.build_graph(geometry.PointCloud(points=pts), 0.5)
    core, k_inf = centrality.coreness_by_iteration(g)
    assert core.values.tolist() == [4] * 5 and k_inf == 0
    b = centrality.kmax_bounds(g)
    assert b.montresor_sum == 1 and b.diameter == 1
    ratio = (b.conjecture / b.k_inf) if b.k_inf else math.inf
    assert ratio == math.inf


def _st_path_graph():
    pts = np.arange(5, dtype=np.float64).reshape(-1, 1)
    g = geometry.build_graph(geometry.PointCloud(points=pts), 1.0)
    core, k_inf = centrality.coreness_by_iteration(g)
    assert core.values.tolist() == [1] * 5 and k_inf <= 3
    assert geometry.graph_diameter(g) == 4


def _st_triangle_pendant():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8], [2.0, 0.0]])
    g = geometry.build_graph(geometry.PointCloud(points=pts), 1.1)
    it, _ = centrality.coreness_by_iteration(g)
    bz = centrality.coreness_bucket(g)
    bf = centrality.coreness_bruteforce(g)
    assert it.values.tolist() == [2, 2, 2, 1]
    assert bz.values.tolist() == it.values.tolist() == bf.values.tolist()


def _st_star_h():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    g = geometry.build_graph(geometry.PointCloud(points=pts), 1.05)
    h1 = centrality.iterated_h(g, 1)
    assert h1.values.tolist() == [1] * 5


def _st_window_vs_csr():
    rng = np.random.default_rng(11)
    pts = np.sort(rng.uniform(0, 2, 70)).reshape(-1, 1)
    cloud = geometry.PointCloud(points=pts)
    g = geometry.build_graph(cloud, 0.12)
    deg = g.degrees()
    brute = ((np.abs(pts - pts.T) ** 2 <= 0.12 * 0.12).sum(axis=1) - 1)
    assert np.array_equal(deg, brute)
    core_w = centrality.coreness_bucket(g)
    dense = geometry.build_graph(geometry.PointCloud(points=np.c_[pts, np.zeros(70)]), 0.12)
    core_c = centrality.coreness_bucket(dense)
    assert np.array_equal(core_w.values, core_c.values)


def _st_ball_indicator():
    grid = continuum.GridSpec(dim=1, box=((-1.0, 2.0),), h=0.002)
    x = grid.axis_nodes(0)
    vals = ((x >= 0.0) & (x <= 1.0)).astype(np.float64)
    f = continuum.ScalarField(grid=grid, values=vals, tag="f")
    ba = continuum.ball_average(f, 0.1)
    at0 = ba.values[int(round(1.0 / grid.h))]
    assert abs(at0 - 0.5) < 0.02


def _st_quantized_monotone():
    grid = continuum.GridSpec(dim=1, box=((0.0, 4.0),), h=0.01)
    rng = np.random.default_rng(5)
    a = rng.uniform(0.0, 1.0, grid.counts[0])
    b = a + rng.uniform(0.0, 0.5, grid.counts[0])
    fa = continuum.ScalarField(grid=grid, values=a, tag="f")
    fb = continuum.ScalarField(grid=grid, values=b, tag="f")
    fra = continuum.ball_average(fa, 0.2)
    frb = continuum.ball_average(fb, 0.2)
    ha = continuum.field_h_transform(fa, fra, 0.2)
    hb = continuum.field_h_transform(fb, frb, 0.2)
    assert np.all(ha.values <= hb.values + 0.0)
    assert np.all(ha.values <= fra.values)


def _st_c0_unimodal():
    grid = continuum.GridSpec(dim=1, box=((-3.0, 3.0),), h=0.01)
    x = grid.axis_nodes(0)
    vals = np.exp(-0.5 * x * x)
    f = continuum.ScalarField(grid=grid, values=vals, tag="f")
    c0 = continuum.c0_variational_1d(f)
    assert np.array_equal(c0.values, 0.5 * vals)


def _st_depth_identity():
    model = density.preset("fig1d-mixture6")
    cloud = density.sample(model, 300, 4)
    r = 0.25
    index = geometry.build_index(cloud, r)
    g = geometry.build_graph(cloud, r)
    deg = g.degrees()
    N = geometry.normalization(cloud.n, r, 1)
    i = 137
    got = centrality.point_depth(cloud, index, cloud.points[i], r, "degree")
    assert got == (deg[i] + 1) / N


def _st_deviation_empty():
    model = density.preset("fig1d-mixture6")
    empty = geometry.PointCloud(points=np.empty((0, 1)))
    centers = np.array([[-6.0], [0.0], [5.4]])
    eta = estimate_deviation(empty, model, 0.2, centers)
    f_at = density.evaluate(model, centers)
    assert eta > 0.9 * float(f_at.max())


def _st_csv_roundtrip(tmpdir="/tmp"):
    import os
    import tempfile
    model = density.preset("fig1d-mixture6")
    cloud = density.sample(model, 64, 9)
    with tempfile.TemporaryDirectory() as td:
        p = os.path.join(td, "cloud.csv")
        geometry.save_cloud_csv(cloud, p)
        back = geometry.load_cloud_csv(p)
        assert np.array_equal(back.points, cloud.points)


SELFTEST_CHECKS = (
    ("two-close-one-far degrees", _st_tiny_line),
    ("complete-graph coreness and zero k_inf", _st_complete_graph),
    ("path-graph coreness and diameter", _st_path_graph),
    ("triangle-plus-pendant coreness three ways", _st_triangle_pendant),
    ("star h-transform", _st_star_h),
    ("window graph matches brute force", _st_window_vs_csr),
    ("ball average of an indicator", _st_ball_indicator),
    ("transform monotonicity, exact", _st_quantized_monotone),
    ("unimodal limiting coreness is f/2", _st_c0_unimodal),
    ("degree depth insertion identity", _st_depth_identity),
    ("deviation of the empty cloud", _st_deviation_empty),
    ("cloud CSV roundtrip", _st_csv_roundtrip),
)


def run_selftest(stream=None) -> int:
    """Quick end-to-end checks of the documented examples; 0 = all passed."""
    stream = stream if stream is not None else sys.stdout
    failed = 0
    for name, fn in SELFTEST_CHECKS:
        try:
            fn()
        except Exception as exc:  # report every failure, keep going
            failed += 1
            print("FAIL %s: %s" % (name, exc), file=stream)
        else:
            print("ok   %s" % name, file=stream)
    print("selftest: %d/%d checks passed"
          % (len(SELFTEST_CHECKS) - failed, len(SELFTEST_CHECKS)), file=stream)
    return 0 if failed == 0 else 2


def cli_dispatch(argv=None) -> int:
    from .cli import main
    return main(argv)

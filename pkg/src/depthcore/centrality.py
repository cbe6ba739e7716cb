"""Discrete centralities on the neighborhood graph: degree, the graph
H-transform and its iterates, coreness by iteration and by bucket peeling
(two independent algorithms), a brute-force subgraph oracle, one-point
insertion depth at query points, and the max-iteration bound record.

Scores stay nonnegative integers throughout; division by the normalization
N = n omega r^d happens only at the depth API edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BoundViolationError, InputError
from .geometry import (NeighborhoodGraph, PointCloud, GridIndex, graph_diameter,
                       neighbors_of_point, normalization)


@dataclass(frozen=True)
class VertexScores:
    """One nonnegative integer per vertex, tied to the graph it came from by
    (vertex count, adjacency hash) and by the radius r."""

    values: np.ndarray  # int64, indexed by original vertex id
    measure: str        # "degree" | "h_iterate(k)" | "coreness"
    n_vertices: int
    edge_hash: int
    r: float

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.int64)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def _scores_from(graph: NeighborhoodGraph, values: np.ndarray, measure: str) -> VertexScores:
    n, crc = graph.fingerprint
    return VertexScores(values=values, measure=measure, n_vertices=n,
                        edge_hash=crc, r=graph.r)


def _check_fingerprint(graph: NeighborhoodGraph, scores: VertexScores) -> None:
    n, crc = graph.fingerprint
    if scores.n_vertices != n or scores.edge_hash != crc or scores.r != graph.r:
        raise InputError("scores were computed on a different graph (fingerprint mismatch)")


def save_scores_csv(scores: VertexScores, path, normalized: bool = False,
                    norm: float = 1.0) -> None:
    """`vertex,score` (raw integers) or `vertex,score_norm` (score / N)."""
    with open(path, "w", newline="") as fh:
        if normalized:
            fh.write("vertex,score_norm\n")
            for i, v in enumerate(scores.values):
                fh.write("%d,%.17g\n" % (i, v / norm))
        else:
            fh.write("vertex,score\n")
            for i, v in enumerate(scores.values):
                fh.write("%d,%d\n" % (i, v))


# ---------------------------------------------------------------------------
# H-transform sweeps (Jacobi: out is computed from an immutable cur)


@njit(cache=True)
def _h_sweep_csr(offsets, indices, cur, out, bound, hist, active, next_active):
    """One Jacobi sweep: for active vertices, out[i] = largest h such that at
    least h neighbors j have cur[j] >= h; inactive vertices copy cur.

    bound[i] must be a valid upper bound on the output value (the neighbor
    count always is; in monotone iteration the previous value is too).
    Marks vertices with a changed neighbor in next_active; returns the
    number of changed vertices.
    """
    n = cur.size
    for i in range(n):
        next_active[i] = 0
    for i in range(n):
        if active[i] == 0:
            out[i] = cur[i]
            continue
        cap = bound[i]
        deg = offsets[i + 1] - offsets[i]
        if deg < cap:
            cap = deg
        if cap <= 0:
            out[i] = 0
            continue
        for e in range(offsets[i], offsets[i + 1]):
            v = cur[indices[e]]
            if v > cap:
                v = cap
            hist[v] += 1
        cum = np.int64(0)
        res = np.int64(0)
        for h in range(cap, 0, -1):
            cum += hist[h]
            if cum >= h:
                res = h
                break
        out[i] = res
        for e in range(offsets[i], offsets[i + 1]):
            v = cur[indices[e]]
            if v > cap:
                v = cap
            hist[v] = 0
    nchanged = 0
    for i in range(n):
        if out[i] != cur[i]:
            nchanged += 1
            for e in range(offsets[i], offsets[i + 1]):
                next_active[indices[e]] = 1
    return nchanged


@njit(cache=True)
def _h_sweep_win(lo, hi, cur, out, clip):
    """Full Jacobi sweep over position-sorted windows in O(n) amortized.

    A value histogram slides across the monotone windows; the H answer of
    the window multiset is maintained under single add/remove updates (one
    update moves it by at most 1, and the (answer, count >= answer) pair
    can be adjusted exactly in O(1)).  out[p] is read after temporarily
    removing p's own value.  Values count as min(value, clip); any
    clip >= max window size bounds every reachable answer, so this is
    lossless.  Returns the number of changed vertices.
    """
    n = cur.size
    nchanged = 0
    if n == 0:
        return 0
    hist = np.zeros(clip + 2, dtype=np.int64)
    a = np.int64(0)    # H of the current window multiset
    ge = np.int64(0)   # #{values >= a} in the current window
    wl = np.int64(0)   # window is positions [wl, wr)
    wr = np.int64(0)
    for p in range(n):
        while wr <= hi[p]:
            v = cur[wr]
            if v > clip:
                v = clip
            hist[v] += 1
            if v >= a:
                ge += 1
            if ge - hist[a] >= a + 1:
                ge -= hist[a]
                a += 1
            wr += 1
        while wl < lo[p]:
            v = cur[wl]
            if v > clip:
                v = clip
            hist[v] -= 1
            if v >= a:
                ge -= 1
            if ge < a:
                a -= 1
                ge += hist[a]
            wl += 1
        v = cur[p]
        if v > clip:
            v = clip
        hist[v] -= 1
        if v >= a:
            ge -= 1
        if ge < a:
            a -= 1
            ge += hist[a]
        out[p] = a
        hist[v] += 1
        if v >= a:
            ge += 1
        if ge - hist[a] >= a + 1:
            ge -= hist[a]
            a += 1
        if out[p] != cur[p]:
            nchanged += 1
    return nchanged


class _SweepState:
    """Workspace for iterating H from the degrees on one graph, in the
    graph's native representation (position space for window graphs).
    In the iteration the vector is pointwise non-increasing, so the CSR
    kernel can use the previous value as its search ceiling and restrict
    work to vertices with a changed neighbor."""

    def __init__(self, graph: NeighborhoodGraph):
        self.graph = graph
        n = graph.n
        if graph.has_windows:
            self.deg = graph.win_hi - graph.win_lo
            self.clip = int(self.deg.max()) + 1 if n else 1
        else:
            self.deg = np.diff(graph.offsets)
            maxdeg = int(self.deg.max()) if n else 0
            self.hist = np.zeros(maxdeg + 2, dtype=np.int64)
            self.active = np.ones(n, dtype=np.uint8)
            self.next_active = np.empty(n, dtype=np.uint8)
        self.cur = self.deg.astype(np.int64)
        self.out = np.empty(n, dtype=np.int64)

    def sweep(self) -> int:
        g = self.graph
        if g.has_windows:
            nch = _h_sweep_win(g.win_lo, g.win_hi, self.cur, self.out, self.clip)
        else:
            nch = _h_sweep_csr(g.offsets, g.indices, self.cur, self.out, self.cur,
                               self.hist, self.active, self.next_active)
            self.active, self.next_active = self.next_active, self.active
        self.cur, self.out = self.out, self.cur
        return nch

    def values_by_vertex(self) -> np.ndarray:
        if self.graph.has_windows:
            vals = np.empty(self.graph.n, dtype=np.int64)
            vals[self.graph.win_orig] = self.cur
            return vals
        return self.cur.copy()


# ---------------------------------------------------------------------------
# public centrality operations


def degree_scores(graph: NeighborhoodGraph) -> VertexScores:
    """value_i = |adj(i)|; self never counted (no self loops by construction)."""
    return _scores_from(graph, graph.degrees().astype(np.int64), "degree")


def _next_tag(measure: str) -> str:
    if measure == "degree":
        return "h_iterate(1)"
    if measure.startswith("h_iterate(") and measure.endswith(")"):
        k = int(measure[len("h_iterate("):-1])
        return "h_iterate(%d)" % (k + 1)
    if measure == "coreness":
        return "coreness"
    return "h_transform(%s)" % measure


def h_transform_graph(graph: NeighborhoodGraph, scores: VertexScores) -> VertexScores:
    """out_i = max{h : #{j in adj(i) : scores_j >= h} >= h}; 0 for isolated
    vertices. Single Jacobi application, valid for arbitrary nonnegative
    integer input scores."""
    _check_fingerprint(graph, scores)
    if np.any(scores.values < 0):
        raise InputError("scores must be nonnegative")
    n = graph.n
    out = np.empty(n, dtype=np.int64)
    if graph.has_windows:
        cur = scores.values[graph.win_orig].astype(np.int64)
        deg = graph.win_hi - graph.win_lo
        clip = int(deg.max()) + 1 if n else 1
        _h_sweep_win(graph.win_lo, graph.win_hi, cur, out, clip)
        vals = np.empty(n, dtype=np.int64)
        vals[graph.win_orig] = out
    else:
        cur = scores.values.astype(np.int64)
        deg = np.diff(graph.offsets).astype(np.int64)
        maxdeg = int(deg.max()) if n else 0
        hist = np.zeros(maxdeg + 2, dtype=np.int64)
        active = np.ones(n, dtype=np.uint8)
        next_active = np.empty(n, dtype=np.uint8)
        _h_sweep_csr(graph.offsets, graph.indices, cur, out, deg, hist, active, next_active)
        vals = out
    return _scores_from(graph, vals, _next_tag(scores.measure))


def iterated_h(graph: NeighborhoodGraph, k: int) -> VertexScores:
    """H^k applied to the degree scores; k = 0 is the degrees themselves.

    The sequence is pointwise non-increasing, so each sweep can use the
    previous value as its search ceiling, and sweeps stop early once the
    vector is stationary (further applications cannot change it).
    """
    if k < 0:
        raise InputError("iteration count k must be >= 0")
    if k == 0:
        return degree_scores(graph)
    state = _SweepState(graph)
    for _ in range(k):
        if state.sweep() == 0:
            break
    return _scores_from(graph, state.values_by_vertex(), "h_iterate(%d)" % k)


def coreness_by_iteration(graph: NeighborhoodGraph):
    """Iterate the H transform from the degrees until two consecutive score
    vectors are identical. Returns (coreness scores, k_inf) with k_inf the
    minimal number of applications after which the vector is stationary."""
    state = _SweepState(graph)
    k_inf = 0
    while True:
        if state.sweep() == 0:
            break
        k_inf += 1
    return _scores_from(graph, state.values_by_vertex(), "coreness"), k_inf


@njit(cache=True)
def _peel_csr(offsets, indices, core):
    """Bucket peeling: repeatedly remove a minimum-degree vertex; the core
    number of v is its remaining degree when removed (never below any
    earlier removal level)."""
    n = offsets.size - 1
    deg = np.empty(n, dtype=np.int64)
    md = np.int64(0)
    for i in range(n):
        deg[i] = offsets[i + 1] - offsets[i]
        if deg[i] > md:
            md = deg[i]
    count = np.zeros(md + 1, dtype=np.int64)
    for i in range(n):
        count[deg[i]] += 1
    binstart = np.zeros(md + 2, dtype=np.int64)
    acc = np.int64(0)
    for d in range(md + 1):
        binstart[d] = acc
        acc += count[d]
    fill = binstart[:md + 1].copy()
    vert = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    for i in range(n):
        p = fill[deg[i]]
        vert[p] = i
        pos[i] = p
        fill[deg[i]] += 1
    for t in range(n):
        v = vert[t]
        core[v] = deg[v]
        for e in range(offsets[v], offsets[v + 1]):
            u = indices[e]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = binstart[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                binstart[du] = pw + 1
                deg[u] -= 1


@njit(cache=True)
def _peel_win(lo, hi, core):
    """Window-form twin of _peel_csr in position space."""
    n = lo.size
    deg = np.empty(n, dtype=np.int64)
    md = np.int64(0)
    for p in range(n):
        deg[p] = hi[p] - lo[p]
        if deg[p] > md:
            md = deg[p]
    count = np.zeros(md + 1, dtype=np.int64)
    for p in range(n):
        count[deg[p]] += 1
    binstart = np.zeros(md + 2, dtype=np.int64)
    acc = np.int64(0)
    for d in range(md + 1):
        binstart[d] = acc
        acc += count[d]
    fill = binstart[:md + 1].copy()
    vert = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    for p in range(n):
        t = fill[deg[p]]
        vert[t] = p
        pos[p] = t
        fill[deg[p]] += 1
    for t in range(n):
        v = vert[t]
        core[v] = deg[v]
        for u in range(lo[v], hi[v] + 1):
            if u == v:
                continue
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = binstart[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                binstart[du] = pw + 1
                deg[u] -= 1


def coreness_bucket(graph: NeighborhoodGraph) -> VertexScores:
    """Coreness by linear-time bucket peeling; an implementation path fully
    independent of the H-iteration route."""
    n = graph.n
    if n == 0:
        return _scores_from(graph, np.empty(0, dtype=np.int64), "coreness")
    if graph.has_windows:
        core_pos = np.empty(n, dtype=np.int64)
        _peel_win(graph.win_lo, graph.win_hi, core_pos)
        core = np.empty(n, dtype=np.int64)
        core[graph.win_orig] = core_pos
    else:
        core = np.empty(n, dtype=np.int64)
        _peel_csr(graph.offsets, graph.indices, core)
    return _scores_from(graph, core, "coreness")


def coreness_bruteforce(graph: NeighborhoodGraph) -> VertexScores:
    """Exhaustive oracle: for every vertex, the max over all vertex subsets
    containing it of the induced subgraph's minimum degree. Test use only."""
    n = graph.n
    if n > 16:
        raise InputError("brute-force coreness is limited to 16 vertices")
    masks = []
    for i in range(n):
        m = 0
        for j in graph.adjacency(i):
            m |= 1 << int(j)
        masks.append(m)
    core = [0] * n
    for sub in range(1, 1 << n):
        mindeg = n
        v = sub
        while v:
            b = (v & -v).bit_length() - 1
            dv = (masks[b] & sub).bit_count()
            if dv < mindeg:
                mindeg = dv
            v &= v - 1
        if mindeg:
            v = sub
            while v:
                b = (v & -v).bit_length() - 1
                if mindeg > core[b]:
                    core[b] = mindeg
                v &= v - 1
    return _scores_from(graph, np.array(core, dtype=np.int64), "coreness")


# ---------------------------------------------------------------------------
# one-point insertion depth


_MEASURES = ("degree", "coreness")


def parse_measure(measure):
    """Accepts "degree", "coreness", or "h_iterate(k)" with k >= 1."""
    if measure == "degree":
        return "degree", 0
    if measure == "coreness":
        return "coreness", -1
    if isinstance(measure, str) and measure.startswith("h_iterate(") and measure.endswith(")"):
        try:
            k = int(measure[len("h_iterate("):-1])
        except ValueError:
            raise InputError("bad measure %r" % (measure,)) from None
        if k < 1:
            raise InputError("h_iterate(k) needs k >= 1")
        return "h_iterate", k
    raise InputError("unknown measure %r; use degree, coreness, or h_iterate(k)" % (measure,))


def _required_input_tag(kind, k):
    if kind == "h_iterate":
        return "degree" if k == 1 else "h_iterate(%d)" % (k - 1)
    if kind == "coreness":
        return "coreness"
    return None


def _h_rule(vals: np.ndarray) -> int:
    if vals.size == 0:
        return 0
    vs = np.sort(vals)[::-1]
    ranks = np.arange(1, vs.size + 1, dtype=np.int64)
    return int(np.minimum(vs, ranks).max())


def _check_query_scores(cloud, r, kind, k, scores):
    req = _required_input_tag(kind, k)
    if scores is None:
        raise InputError("measure %s needs precomputed sample scores tagged %r" % (kind, req))
    if scores.r != float(r):
        raise InputError("scores were computed at r=%g, queried at r=%g" % (scores.r, r))
    if scores.n_vertices != cloud.n:
        raise InputError("scores cover %d vertices, cloud has %d" % (scores.n_vertices, cloud.n))
    if scores.measure != req:
        raise InputError("measure %s at the query point needs sample scores %r, got %r"
                         % (kind, req, scores.measure))


def point_depth(cloud: PointCloud, index: GridIndex, x, r: float, measure,
                scores: VertexScores = None) -> float:
    """Normalized depth of the query point x by one-point insertion.

    degree: |B(x,r) sample points| / N.  h_iterate(k): the largest-h rule
    over the sample's h_iterate(k-1) scores (degrees for k = 1) restricted
    to the r-ball around x, divided by N.  coreness: the same rule over the
    sample's coreness scores.  N = n omega r^d with n the sample size.
    """
    kind, k = parse_measure(measure)
    N = normalization(cloud.n, r, cloud.dim)
    nbrs = neighbors_of_point(cloud, index, x, r)
    if kind == "degree":
        return nbrs.size / N
    _check_query_scores(cloud, r, kind, k, scores)
    return _h_rule(scores.values[nbrs]) / N


def depth_profile(cloud: PointCloud, index: GridIndex, X, r: float, measure,
                  scores: VertexScores = None) -> np.ndarray:
    """point_depth evaluated at each row of X (m x d)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if cloud.dim == 1 else X.reshape(1, -1)
    if X.shape[1] != cloud.dim:
        raise InputError("eval points of shape %s do not match cloud dim %d" % (X.shape, cloud.dim))
    kind, k = parse_measure(measure)
    if kind != "degree":
        _check_query_scores(cloud, r, kind, k, scores)
    N = normalization(cloud.n, r, cloud.dim)
    out = np.empty(X.shape[0])
    for t in range(X.shape[0]):
        nbrs = neighbors_of_point(cloud, index, X[t], r)
        if kind == "degree":
            out[t] = nbrs.size / N
        else:
            out[t] = _h_rule(scores.values[nbrs]) / N
    return out


# ---------------------------------------------------------------------------
# max-iteration bounds


@dataclass(frozen=True)
class KmaxBounds:
    k_inf: int
    montresor_sum: int   # 1 + sum_v |deg(v) - C(v)|, proven upper bound
    montresor_n: int     # |V|, proven upper bound
    conjecture: int      # max component diameter x max degree (conjectured)
    diameter: int
    max_degree: int


def kmax_bounds(graph: NeighborhoodGraph) -> KmaxBounds:
    """k_inf plus the two proven bounds and the conjectured one.

    The conjectured bound takes the diameter over connected components (the
    operative reading; an arbitrary connected subgraph can only have larger
    diameter by dropping edges, which the simulations do not do).  Proven
    bounds are hard-asserted.
    """
    core, k_inf = coreness_by_iteration(graph)
    deg = graph.degrees()
    montresor_sum = 1 + int(np.abs(deg - core.values).sum())
    montresor_n = graph.n
    diameter = graph_diameter(graph)
    max_degree = int(deg.max()) if graph.n else 0
    if k_inf > montresor_sum or k_inf > montresor_n:
        raise BoundViolationError(
            "k_inf=%d violates a proven bound (montresor_sum=%d, |V|=%d)"
            % (k_inf, montresor_sum, montresor_n))
    return KmaxBounds(k_inf=k_inf, montresor_sum=montresor_sum, montresor_n=montresor_n,
                      conjecture=diameter * max_degree, diameter=diameter,
                      max_degree=max_degree)

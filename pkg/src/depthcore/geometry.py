"""Point clouds, radius queries through a uniform bucket grid, r-neighborhood
graphs in canonical CSR form, and combinatorial graph metrics.

The neighborhood graph uses the closed ball: (i, j) is an edge iff
``||x_i - x_j|| <= r``.  All distance tests compare squared norms against
``r*r`` in double precision, and the brute-force comparators in the test
suite use the identical expression, so agreement is exact.

In d = 1 the graph is stored as contiguous windows over the position-sorted
points (two-pointer construction, O(n) memory); the canonical CSR arrays are
materialized lazily on first access and are bit-identical to what the
generic bucket-grid path would produce.  Centrality kernels run on whichever
representation is native.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import InputError, ResourceError

# Directed adjacency entries (2 per undirected edge) allowed before the
# sizing guard trips; overridable per call for deliberately large runs.
DEFAULT_EDGE_CAP = 200_000_000


# ---------------------------------------------------------------------------
# point clouds


@dataclass(frozen=True)
class PointCloud:
    """n points in R^d, immutable after construction.

    provenance carries optional metadata (model id, seed) and never affects
    equality or computation.
    """

    points: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise InputError("points must be a 2-d array of shape (n, d)")
        if pts.shape[1] < 1:
            raise InputError("point dimension must be >= 1")
        if pts.size and not np.all(np.isfinite(pts)):
            raise InputError("points must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def save_cloud_csv(cloud: PointCloud, path) -> None:
    """Write `x0,...,x{d-1}` header plus one point per row, 17 significant
    digits, LF line endings."""
    d = cloud.dim
    header = ",".join("x%d" % k for k in range(d))
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in cloud.points:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def load_cloud_csv(path) -> PointCloud:
    try:
        fh = open(path, "r")
    except OSError as exc:
        raise InputError("cannot read cloud CSV %s: %s" % (path, exc)) from exc
    with fh:
        header = fh.readline().strip()
        cols = header.split(",") if header else []
        d = len(cols)
        if d < 1 or cols != ["x%d" % k for k in range(d)]:
            raise InputError("cloud CSV must start with header x0,...,x{d-1}, got %r" % header)
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != d:
                raise InputError("cloud CSV row has %d fields, expected %d" % (len(parts), d))
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise InputError("cloud CSV contains a non-numeric field: %s" % exc) from exc
    pts = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    return PointCloud(pts)


# ---------------------------------------------------------------------------
# uniform bucket grid index (cell side = query radius, 3^d adjacent cells)


@dataclass(frozen=True)
class GridIndex:
    """Points bucketed into cubical cells of side `side`.

    Occupied cells are kept as a sorted array of raveled ids; a query visits
    the 3^d cells around the query point's cell, which covers every point
    within `side` of it.
    """

    side: float
    origin: np.ndarray   # (d,) per-axis minimum
    shape: np.ndarray    # (d,) int64 cells per axis
    strides: np.ndarray  # (d,) int64 ravel strides
    cell_ids: np.ndarray  # sorted unique occupied cell ids, int64
    cell_start: np.ndarray  # (len(cell_ids)+1,) int64 slice bounds into perm
    perm: np.ndarray     # point indices grouped by cell, int64
    deltas: np.ndarray   # (3^d, d) int64 neighbor-cell offsets


def build_index(cloud: PointCloud, side: float) -> GridIndex:
    if not (side > 0.0) or not math.isfinite(side):
        raise InputError("grid cell side must be positive and finite")
    pts = cloud.points
    n, d = pts.shape
    if n == 0:
        origin = np.zeros(d)
        shape = np.ones(d, dtype=np.int64)
    else:
        origin = pts.min(axis=0)
        shape = np.floor((pts.max(axis=0) - origin) / side).astype(np.int64) + 1
    # ravel ids must fit int64 with headroom for the +-1 neighbor offsets
    if float(np.prod(shape.astype(np.float64))) > 2.0 ** 62:
        raise ResourceError("grid index would need more than 2^62 cells; radius too small for the data extent")
    strides = np.ones(d, dtype=np.int64)
    for k in range(d - 2, -1, -1):
        strides[k] = strides[k + 1] * shape[k + 1]
    if n == 0:
        ids = np.empty(0, dtype=np.int64)
    else:
        coords = np.floor((pts - origin) / side).astype(np.int64)
        ids = coords @ strides
    order = np.argsort(ids, kind="stable")
    sorted_ids = ids[order]
    uniq, counts = np.unique(sorted_ids, return_counts=True)
    cell_start = np.zeros(uniq.size + 1, dtype=np.int64)
    np.cumsum(counts, out=cell_start[1:])
    grids = np.meshgrid(*([np.array([-1, 0, 1], dtype=np.int64)] * d), indexing="ij")
    deltas = np.stack([g.ravel() for g in grids], axis=1)
    return GridIndex(side=float(side), origin=origin, shape=shape, strides=strides,
                     cell_ids=uniq, cell_start=cell_start, perm=order.astype(np.int64),
                     deltas=deltas)


@njit(cache=True)
def _count_pass(pts, origin, side, shape, strides, cell_ids, cell_start, perm,
                deltas, r2, counts):
    n, d = pts.shape
    ncells = cell_ids.size
    for i in range(n):
        cnt = 0
        for t in range(deltas.shape[0]):
            cid = np.int64(0)
            ok = True
            for k in range(d):
                ck = np.int64(np.floor((pts[i, k] - origin[k]) / side)) + deltas[t, k]
                if ck < 0 or ck >= shape[k]:
                    ok = False
                    break
                cid += ck * strides[k]
            if not ok:
                continue
            pos = np.searchsorted(cell_ids, cid)
            if pos >= ncells or cell_ids[pos] != cid:
                continue
            for s in range(cell_start[pos], cell_start[pos + 1]):
                j = perm[s]
                if j == i:
                    continue
                sq = 0.0
                for k in range(d):
                    diff = pts[i, k] - pts[j, k]
                    sq += diff * diff
                if sq <= r2:
                    cnt += 1
        counts[i] = cnt


@njit(cache=True)
def _fill_pass(pts, origin, side, shape, strides, cell_ids, cell_start, perm,
               deltas, r2, offsets, indices):
    n, d = pts.shape
    ncells = cell_ids.size
    for i in range(n):
        w = offsets[i]
        for t in range(deltas.shape[0]):
            cid = np.int64(0)
            ok = True
            for k in range(d):
                ck = np.int64(np.floor((pts[i, k] - origin[k]) / side)) + deltas[t, k]
                if ck < 0 or ck >= shape[k]:
                    ok = False
                    break
                cid += ck * strides[k]
            if not ok:
                continue
            pos = np.searchsorted(cell_ids, cid)
            if pos >= ncells or cell_ids[pos] != cid:
                continue
            for s in range(cell_start[pos], cell_start[pos + 1]):
                j = perm[s]
                if j == i:
                    continue
                sq = 0.0
                for k in range(d):
                    diff = pts[i, k] - pts[j, k]
                    sq += diff * diff
                if sq <= r2:
                    indices[w] = np.int32(j)
                    w += 1
        sorted_row = True
        for t in range(offsets[i] + 1, w):
            if indices[t] < indices[t - 1]:
                sorted_row = False
                break
        if not sorted_row:
            row = indices[offsets[i]:w]
            row.sort()


@njit(cache=True)
def _query_point(pts, origin, side, shape, strides, cell_ids, cell_start, perm,
                 deltas, x, r2, out):
    d = pts.shape[1]
    ncells = cell_ids.size
    m = 0
    for t in range(deltas.shape[0]):
        cid = np.int64(0)
        ok = True
        for k in range(d):
            ck = np.int64(np.floor((x[k] - origin[k]) / side)) + deltas[t, k]
            if ck < 0 or ck >= shape[k]:
                ok = False
                break
            cid += ck * strides[k]
        if not ok:
            continue
        pos = np.searchsorted(cell_ids, cid)
        if pos >= ncells or cell_ids[pos] != cid:
            continue
        for s in range(cell_start[pos], cell_start[pos + 1]):
            j = perm[s]
            sq = 0.0
            for k in range(d):
                diff = x[k] - pts[j, k]
                sq += diff * diff
            if sq <= r2:
                out[m] = j
                m += 1
    res = out[:m]
    res.sort()
    return m


# ---------------------------------------------------------------------------
# d = 1 window construction (two-pointer over position-sorted points)


@njit(cache=True)
def _windows_1d(sx, r2, lo, hi):
    """Inclusive index windows in position-sorted order: q in [lo[p], hi[p]]
    iff (sx[p]-sx[q])^2 <= r2. Same accept predicate as the grid kernels."""
    n = sx.size
    a = 0
    for p in range(n):
        while True:
            diff = sx[p] - sx[a]
            if diff * diff <= r2:
                break
            a += 1
        lo[p] = a
    b = 0
    for p in range(n):
        if b < p:
            b = p
        while b + 1 < n:
            diff = sx[b + 1] - sx[p]
            if diff * diff > r2:
                break
            b += 1
        hi[p] = b


@njit(cache=True)
def _materialize_rows_from_windows(orig, lo, hi, offsets, indices):
    n = orig.size
    for p in range(n):
        i = orig[p]
        w = offsets[i]
        for q in range(lo[p], hi[p] + 1):
            if q != p:
                indices[w] = np.int32(orig[q])
                w += 1
        sorted_row = True
        for t in range(offsets[i] + 1, w):
            if indices[t] < indices[t - 1]:
                sorted_row = False
                break
        if not sorted_row:
            row = indices[offsets[i]:w]
            row.sort()


@njit(cache=True)
def _position_csr_from_windows(lo, hi, pos_offsets, pos_indices):
    n = lo.size
    w = np.int64(0)
    for p in range(n):
        pos_offsets[p] = w
        for q in range(lo[p], hi[p] + 1):
            if q != p:
                pos_indices[w] = np.int32(q)
                w += 1
    pos_offsets[n] = w


# ---------------------------------------------------------------------------
# neighborhood graph


class NeighborhoodGraph:
    """Closed-ball graph at radius r over a point cloud.

    Canonical public form is CSR over the original vertex ids with rows
    sorted ascending, no self loops, no duplicates, symmetric.  For d = 1
    the native storage is the window form (win_orig, win_lo, win_hi) over
    position-sorted points; `indices` is materialized on first access.
    """

    def __init__(self, r, cloud, offsets, indices=None, win_orig=None,
                 win_lo=None, win_hi=None):
        self.r = float(r)
        self.cloud = cloud
        self.offsets = offsets
        self._indices = indices
        self.win_orig = win_orig
        self.win_lo = win_lo
        self.win_hi = win_hi
        self._pos_csr = None
        self._fingerprint = None

    @property
    def n(self) -> int:
        return self.offsets.size - 1

    @property
    def n_entries(self) -> int:
        return int(self.offsets[-1])

    @property
    def n_edges(self) -> int:
        return self.n_entries // 2

    @property
    def has_windows(self) -> bool:
        return self.win_orig is not None

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            out = np.empty(self.n_entries, dtype=np.int32)
            _materialize_rows_from_windows(self.win_orig, self.win_lo, self.win_hi,
                                           self.offsets, out)
            out.flags.writeable = False
            self._indices = out
        return self._indices

    def position_csr(self):
        """CSR over position-sorted vertex labels (d = 1 window graphs);
        labelings agree for CSR-native graphs. Used by label-invariant
        kernels (components, diameter)."""
        if not self.has_windows:
            return self.offsets, self.indices
        if self._pos_csr is None:
            po = np.empty(self.n + 1, dtype=np.int64)
            pi = np.empty(self.n_entries, dtype=np.int32)
            _position_csr_from_windows(self.win_lo, self.win_hi, po, pi)
            self._pos_csr = (po, pi)
        return self._pos_csr

    @property
    def fingerprint(self) -> tuple:
        if self._fingerprint is None:
            crc = zlib.crc32(np.ascontiguousarray(self.offsets))
            if self.has_windows:
                crc = zlib.crc32(np.ascontiguousarray(self.win_orig), crc)
                crc = zlib.crc32(np.ascontiguousarray(self.win_lo), crc)
                crc = zlib.crc32(np.ascontiguousarray(self.win_hi), crc)
            else:
                crc = zlib.crc32(np.ascontiguousarray(self._indices), crc)
            self._fingerprint = (self.n, crc)
        return self._fingerprint

    def adjacency(self, i: int) -> np.ndarray:
        idx = self.indices
        return idx[self.offsets[i]:self.offsets[i + 1]]


def build_graph(cloud: PointCloud, r: float, edge_cap: int = DEFAULT_EDGE_CAP) -> NeighborhoodGraph:
    """Exact r-neighborhood graph.

    d >= 2 uses the bucket grid (cell side r, 3^d scan); d = 1 uses the
    two-pointer window construction over position-sorted points.  Fails with
    a sizing error if the predicted number of directed adjacency entries
    exceeds edge_cap.
    """
    if not (r > 0.0) or not math.isfinite(r):
        raise InputError("radius r must be positive and finite")
    n = cloud.n
    if n == 0:
        return NeighborhoodGraph(r, cloud, offsets=np.zeros(1, dtype=np.int64),
                                 indices=np.empty(0, dtype=np.int32))
    if n > np.iinfo(np.int32).max:
        raise ResourceError("vertex count exceeds int32 indexing")
    r2 = float(r) * float(r)
    if cloud.dim == 1:
        xs = cloud.points[:, 0]
        order = np.argsort(xs, kind="stable").astype(np.int64)
        sx = np.ascontiguousarray(xs[order])
        lo = np.empty(n, dtype=np.int64)
        hi = np.empty(n, dtype=np.int64)
        _windows_1d(sx, r2, lo, hi)
        deg_pos = hi - lo
        total = int(deg_pos.sum())
        if total > edge_cap:
            raise ResourceError(
                "graph would hold %d directed adjacency entries, above the cap %d; "
                "raise edge_cap explicitly to allow this" % (total, edge_cap))
        counts = np.empty(n, dtype=np.int64)
        counts[order] = deg_pos
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        offsets.flags.writeable = False
        return NeighborhoodGraph(r, cloud, offsets=offsets, win_orig=order,
                                 win_lo=lo, win_hi=hi)
    index = build_index(cloud, r)
    counts = np.empty(n, dtype=np.int64)
    _count_pass(cloud.points, index.origin, index.side, index.shape, index.strides,
                index.cell_ids, index.cell_start, index.perm, index.deltas, r2, counts)
    total = int(counts.sum())
    if total > edge_cap:
        raise ResourceError(
            "graph would hold %d directed adjacency entries, above the cap %d; "
            "raise edge_cap explicitly to allow this" % (total, edge_cap))
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    indices = np.empty(total, dtype=np.int32)
    _fill_pass(cloud.points, index.origin, index.side, index.shape, index.strides,
               index.cell_ids, index.cell_start, index.perm, index.deltas, r2,
               offsets, indices)
    indices.flags.writeable = False
    offsets.flags.writeable = False
    return NeighborhoodGraph(r, cloud, offsets=offsets, indices=indices)


def neighbors_of_point(cloud: PointCloud, index: GridIndex, x, r: float) -> np.ndarray:
    """Sorted indices of sample points within the closed r-ball around x.

    One-point insertion: the graph is never rebuilt for a query point.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != cloud.dim:
        raise InputError("query point has dimension %d, cloud has %d" % (x.size, cloud.dim))
    if not (r > 0.0):
        raise InputError("radius r must be positive")
    if index.side < r:
        raise InputError("grid index cell side %g is smaller than query radius %g" % (index.side, r))
    out = np.empty(cloud.n, dtype=np.int64)
    m = _query_point(cloud.points, index.origin, index.side, index.shape, index.strides,
                     index.cell_ids, index.cell_start, index.perm, index.deltas,
                     x, float(r) * float(r), out)
    return out[:m].copy()


def save_edges_csv(graph: NeighborhoodGraph, path) -> None:
    """Debug export: `src,dst` with src < dst, sorted lexicographically."""
    with open(path, "w", newline="") as fh:
        fh.write("src,dst\n")
        offsets, indices = graph.offsets, graph.indices
        for i in range(graph.n):
            for j in indices[offsets[i]:offsets[i + 1]]:
                if j > i:
                    fh.write("%d,%d\n" % (i, j))


# ---------------------------------------------------------------------------
# ball volumes and the normalization constant


def unit_ball_volume(d: int) -> float:
    """Volume of the unit Euclidean ball: pi^{d/2} / Gamma(d/2 + 1)."""
    if int(d) != d or d < 1:
        raise InputError("dimension must be a positive integer")
    d = int(d)
    # closed forms for the dimensions in routine use; the Gamma quotient
    # rounds 2.0 to 1.9999999999999998 in d = 1
    if d == 1:
        return 2.0
    if d == 2:
        return math.pi
    if d == 3:
        return 4.0 * math.pi / 3.0
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def normalization(n: int, r: float, d: int) -> float:
    """N = n * omega * r^d, the expected r-ball population under unit density."""
    if n < 1:
        raise InputError("n must be >= 1")
    if not (r > 0.0):
        raise InputError("r must be positive")
    return float(n) * unit_ball_volume(d) * float(r) ** int(d)


# ---------------------------------------------------------------------------
# components and exact diameter


@njit(cache=True)
def _components_kernel(offsets, indices, labels):
    n = labels.size
    for i in range(n):
        labels[i] = -1
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = s
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(offsets[u], offsets[u + 1]):
                v = indices[e]
                if labels[v] < 0:
                    labels[v] = s
                    queue[tail] = v
                    tail += 1


def connected_components(graph: NeighborhoodGraph) -> np.ndarray:
    """Component label per vertex; the label is the smallest vertex id in the
    component."""
    n = graph.n
    labels = np.empty(n, dtype=np.int64)
    if n == 0:
        return labels
    if graph.has_windows:
        po, pi = graph.position_csr()
        pos_labels = np.empty(n, dtype=np.int64)
        _components_kernel(po, pi, pos_labels)
        orig = graph.win_orig
        # component roots are positions; the public label is the smallest
        # original id inside the component
        compmin = np.full(n, np.iinfo(np.int64).max)
        np.minimum.at(compmin, pos_labels, orig)
        labels[orig] = compmin[pos_labels]
        return labels
    _components_kernel(graph.offsets, graph.indices, labels)
    return labels


@njit(cache=True)
def _bfs_ecc(offsets, indices, src, dist, queue):
    """BFS from src over its component; dist must be -1 on the component.
    Returns (eccentricity, farthest vertex). Leaves dist filled."""
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    far = src
    ecc = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du > ecc:
            ecc = du
            far = u
        for e in range(offsets[u], offsets[u + 1]):
            v = indices[e]
            if dist[v] < 0:
                dist[v] = du + 1
                queue[tail] = v
                tail += 1
    return ecc, far


@njit(cache=True)
def _diameter_kernel(offsets, indices):
    """Exact diameter = max over connected components of the combinatorial
    (hop) diameter.

    Per component: double sweep for a lower bound, then the iFUB refinement
    from a central root, computing exact eccentricities level by level until
    the remaining levels provably cannot improve the bound.  Exact for every
    component size; degenerates to all-vertex BFS only in the worst case.
    """
    n = offsets.size - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    comp = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.uint8)
    best = 0
    for s in range(n):
        if seen[s]:
            continue
        # collect the component via one BFS
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        csize = 0
        u0 = s
        maxdeg = np.int64(-1)
        while head < tail:
            u = queue[head]
            head += 1
            comp[csize] = u
            csize += 1
            seen[u] = 1
            deg = offsets[u + 1] - offsets[u]
            if deg > maxdeg:
                maxdeg = deg
                u0 = u
            for e in range(offsets[u], offsets[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
        for t in range(csize):
            dist[comp[t]] = -1
        if csize == 1:
            continue
        # double sweep from the max-degree vertex
        ecc0, a = _bfs_ecc(offsets, indices, u0, dist, queue)
        for t in range(csize):
            dist[comp[t]] = -1
        # BFS from a with parents, to find the sweep-path midpoint
        dist[a] = 0
        parent[a] = a
        queue[0] = a
        head, tail = 0, 1
        b = a
        lb = 0
        while head < tail:
            u = queue[head]
            head += 1
            if dist[u] > lb:
                lb = dist[u]
                b = u
            for e in range(offsets[u], offsets[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue[tail] = v
                    tail += 1
        mid = b
        for _ in range(lb // 2):
            mid = parent[mid]
        for t in range(csize):
            dist[comp[t]] = -1
        # levels from the midpoint root
        ecc_m, _ = _bfs_ecc(offsets, indices, mid, dist, queue)
        if ecc_m > lb:
            lb = ecc_m
        # order component vertices by decreasing level (counting sort)
        levels = np.zeros(ecc_m + 2, dtype=np.int64)
        for t in range(csize):
            levels[dist[comp[t]]] += 1
        starts = np.zeros(ecc_m + 2, dtype=np.int64)
        acc = np.int64(0)
        for lev in range(ecc_m, -1, -1):
            starts[lev] = acc
            acc += levels[lev]
        order = np.empty(csize, dtype=np.int64)
        fill = starts.copy()
        for t in range(csize):
            u = comp[t]
            lev = dist[u]
            order[fill[lev]] = u
            fill[lev] += 1
        levdist = dist.copy()  # keep levels; dist is reused by inner BFS
        for t in range(csize):
            dist[comp[t]] = -1
        # iFUB refinement
        i = ecc_m
        pos = 0
        while 2 * i > lb and i > 0:
            while pos < csize and levdist[order[pos]] == i:
                v = order[pos]
                pos += 1
                ecc_v, _ = _bfs_ecc(offsets, indices, v, dist, queue)
                for t in range(csize):
                    dist[comp[t]] = -1
                if ecc_v > lb:
                    lb = ecc_v
            if lb >= 2 * (i - 1):
                break
            i -= 1
        if lb > best:
            best = lb
    return best


@njit(cache=True)
def _diameter_windows(lo, hi):
    # Indifference-graph shortcut: within a component the rightward greedy
    # reach after t hops is monotone in the start position, so the hop
    # distance between the extreme vertices dominates every other pair.
    n = lo.size
    best = 0
    s = 0
    while s < n:
        e = s
        while e + 1 < n and lo[e + 1] <= e:
            e += 1
        cur = s
        hops = 0
        while cur < e:
            cur = hi[cur]
            hops += 1
        if hops > best:
            best = hops
        s = e + 1
    return best


def graph_diameter(graph: NeighborhoodGraph) -> int:
    """Max over connected components of the exact hop diameter; 0 for an
    edgeless graph."""
    if graph.n == 0:
        return 0
    if graph.has_windows:
        return int(_diameter_windows(graph.win_lo, graph.win_hi))
    offsets, indices = graph.position_csr()
    return int(_diameter_kernel(offsets, indices))


# ---------------------------------------------------------------------------
# Monte-Carlo ball intersection volume


def ball_intersection_volume_mc(y, r: float, x, alpha: float, m: int, seed: int):
    """Estimate |B(y, r) & B(x, alpha)| by sampling uniformly in B(y, r).

    Valid in the regime r <= alpha and ||y - x|| <= alpha.  Returns
    (estimate, standard error).
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if y.size != x.size:
        raise InputError("y and x must have the same dimension")
    d = y.size
    if not (0.0 < r <= alpha):
        raise InputError("need 0 < r <= alpha")
    if float(np.linalg.norm(y - x)) > alpha:
        raise InputError("need ||y - x|| <= alpha")
    if m < 1:
        raise InputError("sample count m must be >= 1")
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 1_000_000
    done = 0
    while done < m:
        b = min(chunk, m - done)
        dirs = rng.standard_normal((b, d))
        norms = np.linalg.norm(dirs, axis=1)
        norms[norms == 0.0] = 1.0
        radii = r * rng.random(b) ** (1.0 / d)
        pts = y + dirs / norms[:, None] * radii[:, None]
        sq = np.sum((pts - x) ** 2, axis=1)
        hits += int(np.count_nonzero(sq <= alpha * alpha))
        done += b
    vol_ball = unit_ball_volume(d) * r ** d
    p = hits / m
    est = vol_ball * p
    se = vol_ball * math.sqrt(max(p * (1.0 - p), 0.0) / m)
    return est, se

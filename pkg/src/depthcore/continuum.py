"""Grid-based continuum objects: a density sampled on a uniform grid, its
ball average f_r, the H_r transform and its iterates, the r-coreness
fixpoint C_r, the exact 1-D variational form of C_0, and the small-r
extrapolation of C_r toward C_0.

Exactness design: for a fixed (density field, radius) pair the ball weights
f(z) h^d / (omega r^d) are quantized once to int64 multiples of a common
quantum u chosen so that no stencil sum can overflow and the relative
quantization error stays at the 2^-52 level.  All cumulative weights are
then exact integer sums, so superlevel-set weights compare exactly, which
makes monotonicity of H_r, H_r f_r <= f_r, and the k-monotonicity of the
iterates hold bitwise on the grid, not merely up to rounding.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .density import DensityModel, evaluate
from .errors import InputError, ResourceError
from .geometry import unit_ball_volume

_NODE_CAP = 40_000_000


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over a box, d in {1, 2}; node i sits at lo + i*h."""

    dim: int
    box: tuple          # ((lo, hi),) * dim
    h: float
    counts: tuple = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputError("grid dim must be 1 or 2, got %r" % (self.dim,))
        if not (isinstance(self.h, (int, float)) and math.isfinite(self.h) and self.h > 0):
            raise InputError("grid spacing h must be a positive finite number")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != self.dim:
            raise InputError("box must have one (lo, hi) pair per axis")
        counts = []
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise InputError("box sides must be finite with hi > lo")
            steps = (hi - lo) / self.h
            nsteps = round(steps)
            if abs((hi - lo) - nsteps * self.h) > 1e-9:
                raise InputError(
                    "box side [%g, %g] is not an integer multiple of h=%g" % (lo, hi, self.h))
            counts.append(int(nsteps) + 1)
        total = 1
        for c in counts:
            total *= c
        if total > _NODE_CAP:
            raise ResourceError("grid would hold %d nodes, above the cap %d" % (total, _NODE_CAP))
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "counts", tuple(counts))

    @property
    def n_nodes(self) -> int:
        total = 1
        for c in self.counts:
            total *= c
        return total

    def axis_nodes(self, axis: int) -> np.ndarray:
        lo = self.box[axis][0]
        return lo + np.arange(self.counts[axis], dtype=np.float64) * self.h

    def node_coords(self) -> np.ndarray:
        """(n_nodes, dim) coordinates in row-major node order (x0 slowest)."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes[0].reshape(-1, 1)
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.column_stack([g0.ravel(), g1.ravel()])


@dataclass(frozen=True)
class ScalarField:
    """One real per grid node (flat, row-major), tagged with its semantics
    (f, f_r, h_iterate(k,r), C_r, C0, ...) and provenance."""

    grid: GridSpec
    values: np.ndarray
    tag: str
    r: float = None
    k: int = None
    model_id: str = None

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        if vals.size != self.grid.n_nodes:
            raise InputError("field has %d values for a grid of %d nodes"
                             % (vals.size, self.grid.n_nodes))
        if vals.size and (not np.all(np.isfinite(vals)) or vals.min() < 0):
            raise InputError("field values must be finite and >= 0")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def values_nd(self) -> np.ndarray:
        return self.values.reshape(self.grid.counts)


def _check_box_covers(grid: GridSpec, model: DensityModel, pad: float = 0.0) -> None:
    """Fields are zero-padded outside the grid, so the box must contain the
    support box (plus any radius the caller will average over) or the padding
    error stops being negligible."""
    for axis, ((lo, hi), (slo, shi)) in enumerate(zip(grid.box, model.support_box)):
        if lo > slo - pad + 1e-9 or hi < shi + pad - 1e-9:
            raise InputError(
                "grid box axis %d [%g, %g] does not cover the density support "
                "[%g, %g] padded by %g" % (axis, lo, hi, slo, shi, pad))


def discretize_density(model: DensityModel, grid: GridSpec) -> ScalarField:
    if model.dim != grid.dim:
        raise InputError("model dim %d != grid dim %d" % (model.dim, grid.dim))
    _check_box_covers(grid, model)
    vals = evaluate(model, grid.node_coords())
    return ScalarField(grid=grid, values=vals, tag="f", model_id=model.name)


# ---------------------------------------------------------------------------
# stencil + quantized weights


def _check_radius(grid: GridSpec, r: float) -> None:
    if not (isinstance(r, (int, float)) and math.isfinite(r) and r > 0):
        raise InputError("radius r must be a positive finite number")
    # tiny slack so h = r/10 written in decimal passes the exact-ratio check
    if grid.h > (r / 10.0) * (1.0 + 1e-12):
        raise InputError("grid spacing h=%g too coarse for r=%g; need h <= r/10"
                         % (grid.h, r))


def _stencil(grid: GridSpec, r: float):
    """Integer node offsets with ||offset * h|| <= r, shared by every node;
    same squared-comparison predicate as the graph builder."""
    h = grid.h
    R = int(r / h) + 1
    r2 = r * r
    if grid.dim == 1:
        off = np.arange(-R, R + 1, dtype=np.int64)
        keep = (off * h) ** 2 <= r2
        return (off[keep].copy(),)
    o = np.arange(-R, R + 1, dtype=np.int64)
    o0, o1 = np.meshgrid(o, o, indexing="ij")
    o0 = o0.ravel()
    o1 = o1.ravel()
    keep = (o0 * h) ** 2 + (o1 * h) ** 2 <= r2
    return o0[keep].copy(), o1[keep].copy()


def _quantize(fvals: np.ndarray, scale: float, stencil_size: int):
    """int64 weights q with true weight ~= q * u; B * q_max <= 2^62 so any
    stencil sum stays exact in int64."""
    mx = float(fvals.max()) * scale if fvals.size else 0.0
    if mx <= 0.0:
        return np.zeros(fvals.size, dtype=np.int64), 1.0
    shift = min(52, 62 - int(math.ceil(math.log2(stencil_size + 1))))
    u = mx * 2.0 ** (-shift)
    q = np.rint(fvals * (scale / u)).astype(np.int64)
    return q, u


class _BallContext:
    """Everything fixed by a (density field, radius) pair: the stencil and
    the quantized weights.  Reused across H applications so that f_r and
    every iterate share the exact same integer weights."""

    def __init__(self, f: ScalarField, r: float):
        _check_radius(f.grid, r)
        self.grid = f.grid
        self.r = float(r)
        self.offsets = _stencil(f.grid, r)
        size = self.offsets[0].size
        scale = f.grid.h ** f.grid.dim / (unit_ball_volume(f.grid.dim) * self.r ** f.grid.dim)
        self.q, self.u = _quantize(f.values, scale, size)


@njit(cache=True)
def _ball_sum_1d(q, off, out):
    m = q.size
    B = off.size
    for i in range(m):
        s = np.int64(0)
        for t in range(B):
            j = i + off[t]
            if 0 <= j < m:
                s += q[j]
        out[i] = s


@njit(cache=True)
def _ball_sum_2d(q, off0, off1, n0, n1, out):
    B = off0.size
    for i0 in range(n0):
        for i1 in range(n1):
            s = np.int64(0)
            for t in range(B):
                j0 = i0 + off0[t]
                j1 = i1 + off1[t]
                if 0 <= j0 < n0 and 0 <= j1 < n1:
                    s += q[j0 * n1 + j1]
            out[i0 * n1 + i1] = s


def ball_average(f: ScalarField, r: float) -> ScalarField:
    """f_r(x) = sum_{nodes z in B(x,r)} f(z) h^d / (omega r^d); nodes outside
    the box contribute zero."""
    ctx = _BallContext(f, r)
    return _ball_average_ctx(f, ctx)


def _ball_average_ctx(f: ScalarField, ctx: _BallContext) -> ScalarField:
    m = f.values.size
    sums = np.empty(m, dtype=np.int64)
    if f.grid.dim == 1:
        _ball_sum_1d(ctx.q, ctx.offsets[0], sums)
    else:
        n0, n1 = f.grid.counts
        _ball_sum_2d(ctx.q, ctx.offsets[0], ctx.offsets[1], n0, n1, sums)
    vals = sums.astype(np.float64) * ctx.u
    return ScalarField(grid=f.grid, values=vals, tag="f_r", r=ctx.r, model_id=f.model_id)


@njit(cache=True)
def _h_node(vals, qs, n, u):
    """Exact sup{t >= 0 : (integer weight of {vals >= t}) * u >= t}.

    Equivalent to walking the descending distinct levels t of vals and
    taking max over levels of min(t, W(t)*u) with W(t) the exact integer
    superlevel weight, but solved by 3-way partitioning in O(n) expected:
    at pivot level v, if W(v)*u >= v every lower level is dominated by v,
    otherwise every higher level is dominated by W(v)*u; either way one
    side drops out. Candidate values are identical to the full walk, so
    the result is bit-for-bit the same.
    """
    lo = 0
    hi = n
    acc = np.int64(0)  # weight of values above the working range
    best = 0.0
    while hi > lo:
        a = vals[lo]
        b = vals[(lo + hi) >> 1]
        c = vals[hi - 1]
        if a < b:
            a, b = b, a
        if a < c:
            a, c = c, a
        if b < c:
            b, c = c, b
        v = b
        # 3-way partition of [lo, hi): > v | == v | < v
        i = lo
        lt = lo
        gt = hi
        while i < gt:
            if vals[i] > v:
                vals[i], vals[lt] = vals[lt], vals[i]
                qs[i], qs[lt] = qs[lt], qs[i]
                lt += 1
                i += 1
            elif vals[i] < v:
                gt -= 1
                vals[i], vals[gt] = vals[gt], vals[i]
                qs[i], qs[gt] = qs[gt], qs[i]
            else:
                i += 1
        s_top = acc
        for t in range(lo, gt):
            s_top += qs[t]
        wu = s_top * u
        if wu >= v:
            if v > best:
                best = v
            hi = lt
        else:
            if wu > best:
                best = wu
            acc = s_top
            lo = gt
    return best


@njit(cache=True)
def _h_apply_1d(phi, q, u, off, active, out, changed):
    m = phi.size
    B = off.size
    vbuf = np.empty(B, dtype=np.float64)
    qbuf = np.empty(B, dtype=np.int64)
    nch = 0
    for i in range(m):
        if active[i] == 0:
            out[i] = phi[i]
            continue
        cnt = 0
        for t in range(B):
            j = i + off[t]
            if 0 <= j < m:
                vbuf[cnt] = phi[j]
                qbuf[cnt] = q[j]
                cnt += 1
        out[i] = _h_node(vbuf, qbuf, cnt, u)
        if out[i] != phi[i]:
            changed[nch] = i
            nch += 1
    return nch


@njit(cache=True)
def _h_apply_2d(phi, q, u, off0, off1, n0, n1, active, out, changed):
    B = off0.size
    vbuf = np.empty(B, dtype=np.float64)
    qbuf = np.empty(B, dtype=np.int64)
    nch = 0
    for i0 in range(n0):
        for i1 in range(n1):
            i = i0 * n1 + i1
            if active[i] == 0:
                out[i] = phi[i]
                continue
            cnt = 0
            for t in range(B):
                j0 = i0 + off0[t]
                j1 = i1 + off1[t]
                if 0 <= j0 < n0 and 0 <= j1 < n1:
                    j = j0 * n1 + j1
                    vbuf[cnt] = phi[j]
                    qbuf[cnt] = q[j]
                    cnt += 1
            out[i] = _h_node(vbuf, qbuf, cnt, u)
            if out[i] != phi[i]:
                changed[nch] = i
                nch += 1
    return nch


@njit(cache=True)
def _mark_active_1d(changed, nch, m, R, next_active):
    """next_active = changed set dilated by the stencil range."""
    for i in range(m):
        next_active[i] = 0
    cover = np.int64(-1)
    for t in range(nch):
        i = changed[t]
        a = i - R
        if a < 0:
            a = 0
        if a <= cover:
            a = cover + 1
        b = i + R
        if b >= m:
            b = m - 1
        for j in range(a, b + 1):
            next_active[j] = 1
        if b > cover:
            cover = b
    return 0


@njit(cache=True)
def _mark_active_2d(changed, nch, n0, n1, R, next_active, diff):
    """2-D box dilation of the changed set via a difference array of shape
    (n0+1, n1+1), then a running 2-D prefix sum."""
    s1 = n1 + 1
    for i in range((n0 + 1) * s1):
        diff[i] = 0
    for t in range(nch):
        i = changed[t]
        i0 = i // n1
        i1 = i - i0 * n1
        a0 = i0 - R
        if a0 < 0:
            a0 = 0
        b0 = i0 + R
        if b0 >= n0:
            b0 = n0 - 1
        a1 = i1 - R
        if a1 < 0:
            a1 = 0
        b1 = i1 + R
        if b1 >= n1:
            b1 = n1 - 1
        diff[a0 * s1 + a1] += 1
        diff[a0 * s1 + b1 + 1] -= 1
        diff[(b0 + 1) * s1 + a1] -= 1
        diff[(b0 + 1) * s1 + b1 + 1] += 1
    for i0 in range(n0):
        acc = np.int64(0)
        for i1 in range(n1):
            acc += diff[i0 * s1 + i1]
            diff[i0 * s1 + i1] = acc
    for i1 in range(n1):
        acc = np.int64(0)
        for i0 in range(n0):
            acc += diff[i0 * s1 + i1]
            next_active[i0 * n1 + i1] = 1 if acc > 0 else 0
    return 0


class _HState:
    """Workspace for repeated H applications with one _BallContext."""

    def __init__(self, ctx: _BallContext, start_values: np.ndarray):
        self.ctx = ctx
        m = start_values.size
        self.cur = start_values.copy()
        self.out = np.empty(m, dtype=np.float64)
        self.active = np.ones(m, dtype=np.uint8)
        self.next_active = np.empty(m, dtype=np.uint8)
        self.changed = np.empty(m, dtype=np.int64)
        self.R = int(ctx.r / ctx.grid.h) + 1
        if ctx.grid.dim == 2:
            n0, n1 = ctx.grid.counts
            self.diff = np.empty((n0 + 1) * (n1 + 1), dtype=np.int64)

    def apply(self) -> int:
        ctx = self.ctx
        if ctx.grid.dim == 1:
            nch = _h_apply_1d(self.cur, ctx.q, ctx.u, ctx.offsets[0],
                              self.active, self.out, self.changed)
            _mark_active_1d(self.changed, nch, self.cur.size, self.R, self.next_active)
        else:
            n0, n1 = ctx.grid.counts
            nch = _h_apply_2d(self.cur, ctx.q, ctx.u, ctx.offsets[0], ctx.offsets[1],
                              n0, n1, self.active, self.out, self.changed)
            _mark_active_2d(self.changed, nch, n0, n1, self.R, self.next_active, self.diff)
        self.cur, self.out = self.out, self.cur
        self.active, self.next_active = self.next_active, self.active
        return nch

    def last_delta(self) -> float:
        # cur/out were swapped after apply: out holds the previous iterate
        if self.cur.size == 0:
            return 0.0
        return float(np.abs(self.cur - self.out).max())


def field_h_transform(f: ScalarField, phi: ScalarField, r: float) -> ScalarField:
    """One application of H_r with ball weights from f: at each node the
    exact sup{t >= 0 : weight of {phi >= t} in B(x,r) >= t} over the
    discretized measure."""
    if phi.grid != f.grid:
        raise InputError("phi and f live on different grids")
    ctx = _BallContext(f, r)
    state = _HState(ctx, phi.values)
    state.apply()
    return ScalarField(grid=f.grid, values=state.cur.copy(), tag=_next_tag(phi.tag),
                       r=float(r), model_id=f.model_id)


def _next_tag(tag: str) -> str:
    if tag == "f_r":
        return "h_iterate(1,r)"
    if tag.startswith("h_iterate(") and "," in tag:
        try:
            k = int(tag[len("h_iterate("):].split(",")[0])
            return "h_iterate(%d,r)" % (k + 1)
        except ValueError:
            pass
    if tag == "C_r":
        return "C_r"
    return "H_r(%s)" % tag


def iterate_h(f: ScalarField, r: float, k: int) -> ScalarField:
    """H_r^k f_r; k = 0 is the ball average itself.  The iterates are
    pointwise non-increasing, so once an application changes nothing the
    remaining ones are skipped."""
    if k < 0:
        raise InputError("iteration count k must be >= 0")
    ctx = _BallContext(f, r)
    fr = _ball_average_ctx(f, ctx)
    if k == 0:
        return ScalarField(grid=f.grid, values=fr.values, tag="h_iterate(0,r)",
                           r=float(r), k=0, model_id=f.model_id)
    state = _HState(ctx, fr.values)
    for _ in range(k):
        if state.apply() == 0:
            break
    return ScalarField(grid=f.grid, values=state.cur.copy(), tag="h_iterate(%d,r)" % k,
                       r=float(r), k=int(k), model_id=f.model_id)


_FIX_CAP = 10_000


def continuum_r_coreness(f: ScalarField, r: float):
    """Iterate H_r from f_r until the sup-norm change is <= 1e-9 * max f
    (cap 10^4 applications; the iteration is monotone non-increasing, so
    hitting the cap is reported as a warning, not silence).

    Returns (C_r field, number of applications performed).
    """
    ctx = _BallContext(f, r)
    fr = _ball_average_ctx(f, ctx)
    eps = 1e-9 * (float(f.values.max()) if f.values.size else 0.0)
    state = _HState(ctx, fr.values)
    used = 0
    delta = 0.0
    for _ in range(_FIX_CAP):
        nch = state.apply()
        used += 1
        delta = state.last_delta()
        if nch == 0 or delta <= eps:
            break
    else:
        warnings.warn("r-coreness fixpoint hit the %d-iteration cap; last sup change %.3e"
                      % (_FIX_CAP, delta), RuntimeWarning)
    field = ScalarField(grid=f.grid, values=state.cur.copy(), tag="C_r",
                        r=float(r), model_id=f.model_id)
    return field, used


@njit(cache=True)
def _c0_scan_1d(f, out):
    """C0(x) = max(f(x)/2, min(L(x), R(x))) where L and R extend the best
    interval endpoint to the left/right; both satisfy an O(m) recursion
    (max/min selections only, so the fp evaluation is exact)."""
    m = f.size
    L = np.empty(m, dtype=np.float64)
    Rv = np.empty(m, dtype=np.float64)
    for i in range(m):
        half = 0.5 * f[i]
        if i == 0:
            L[i] = half
        else:
            cand = L[i - 1]
            if f[i] < cand:
                cand = f[i]
            L[i] = cand if cand > half else half
    for i in range(m - 1, -1, -1):
        half = 0.5 * f[i]
        if i == m - 1:
            Rv[i] = half
        else:
            cand = Rv[i + 1]
            if f[i] < cand:
                cand = f[i]
            Rv[i] = cand if cand > half else half
    for i in range(m):
        v = L[i] if L[i] < Rv[i] else Rv[i]
        half = 0.5 * f[i]
        out[i] = v if v > half else half
    return 0


def c0_variational_1d(f: ScalarField) -> ScalarField:
    """Exact grid evaluation of the variational form: C0(x) is the best of
    f(x)/2 and, over grid intervals [a,b] containing x, the smallest of the
    interval minimum of f and the endpoint halves f(a)/2, f(b)/2."""
    if f.grid.dim != 1:
        raise InputError("the variational oracle is 1-D only")
    out = np.empty(f.values.size, dtype=np.float64)
    _c0_scan_1d(f.values, out)
    return ScalarField(grid=f.grid, values=out, tag="C0", model_id=f.model_id)


def continuum_coreness_extrapolate(model: DensityModel, grid: GridSpec, r_sequence):
    """C_0 estimate: C_{r_min} for the smallest radius of the (strictly
    decreasing) sequence, with the per-node error estimate
    |C_{r_min} - C_{2 r_min}|.  No Richardson step: the convergence order
    in r is not established, so the two-radius difference is reported as
    the honest uncertainty."""
    rs = [float(r) for r in r_sequence]
    if len(rs) < 1:
        raise InputError("r_sequence must contain at least one radius")
    if any(b >= a for a, b in zip(rs, rs[1:])):
        raise InputError("r_sequence must be strictly decreasing")
    for r in rs:
        _check_radius(grid, r)
    # largest radius actually averaged over: the error estimate uses 2 r_min
    _check_box_covers(grid, model, pad=max(rs[0], 2.0 * rs[-1]))
    f = discretize_density(model, grid)
    r_min = rs[-1]
    c_small, _ = continuum_r_coreness(f, r_min)
    c_double, _ = continuum_r_coreness(f, 2.0 * r_min)
    err = np.abs(c_small.values - c_double.values)
    est = ScalarField(grid=grid, values=c_small.values, tag="C0", r=r_min,
                      model_id=model.name)
    err_field = ScalarField(grid=grid, values=err, tag="C0_error", r=r_min,
                            model_id=model.name)
    return est, err_field


# ---------------------------------------------------------------------------
# field CSV + sidecar


def save_field_csv(field: ScalarField, path) -> None:
    """`x0[,x1],value` rows in row-major node order, 17 significant digits,
    plus a JSON sidecar `<path>.json` with tag, r, k, grid, and model id."""
    grid = field.grid
    coords = grid.node_coords()
    with open(path, "w", newline="") as fh:
        if grid.dim == 1:
            fh.write("x0,value\n")
            for i in range(coords.shape[0]):
                fh.write("%.17g,%.17g\n" % (coords[i, 0], field.values[i]))
        else:
            fh.write("x0,x1,value\n")
            for i in range(coords.shape[0]):
                fh.write("%.17g,%.17g,%.17g\n" % (coords[i, 0], coords[i, 1], field.values[i]))
    meta = {
        "tag": field.tag,
        "r": field.r,
        "k": field.k,
        "grid": {"dim": grid.dim, "box": [list(side) for side in grid.box],
                 "h": grid.h, "counts": list(grid.counts)},
        "model": field.model_id,
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Mixture densities on R^d: analytic evaluation, exact seeded sampling,
Lipschitz/modulus bounds, JSON config parsing, and the two built-in presets.

Components are isotropic Gaussians in any dimension plus, in d = 2 only, a
ring component w * Z^{-1} * exp(-(||x|| - rho0)^2 / (2 sigma^2)) whose
normalizer Z is fixed at construction by 1-D radial quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import erf

from .errors import InputError
from .geometry import PointCloud

_INV_SQRT_E = math.exp(-0.5)

PRESET_NAMES = ("fig1d-mixture6", "fig2d-crater")


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    mean: tuple
    sigma: float

    def peak(self, d: int) -> float:
        return self.weight * (2.0 * math.pi * self.sigma ** 2) ** (-d / 2.0)

    def grad_bound(self, d: int) -> float:
        # sup ||grad|| attained at ||x - mu|| = sigma
        return self.peak(d) * _INV_SQRT_E / self.sigma


@dataclass(frozen=True)
class RingComponent:
    weight: float
    rho0: float
    sigma: float
    znorm: float = field(compare=False, default=0.0)

    def peak(self, d: int) -> float:
        return self.weight / self.znorm

    def grad_bound(self, d: int) -> float:
        # radial profile; sup |d/drho| at |rho - rho0| = sigma
        return self.peak(d) * _INV_SQRT_E / self.sigma


def _ring_normalizer(rho0: float, sigma: float) -> float:
    """Z = int_0^inf 2 pi rho exp(-(rho - rho0)^2 / 2 sigma^2) drho by
    adaptive quadrature, so that the ring component integrates to its
    weight over R^2."""
    def integrand(rho):
        return 2.0 * math.pi * rho * math.exp(-0.5 * ((rho - rho0) / sigma) ** 2)

    hi = rho0 + 14.0 * sigma
    val, _ = integrate.quad(integrand, 0.0, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class DensityModel:
    """Validated mixture density with cached bounds.

    support_box contains all but <= 1e-6 of the mass (mu +- 6 sigma per
    Gaussian, radius rho0 + 6 sigma for rings); lipschitz_bound dominates
    sup ||grad f||; peak_bound dominates max f.
    """

    dim: int
    components: tuple
    support_box: tuple
    lipschitz_bound: float
    peak_bound: float
    name: str = field(default="custom", compare=False)


def make_model(dim: int, components, name: str = "custom") -> DensityModel:
    if int(dim) != dim or dim < 1:
        raise InputError("dim: must be a positive integer")
    dim = int(dim)
    comps = tuple(components)
    if not comps:
        raise InputError("components: at least one component required")
    wsum = math.fsum(c.weight for c in comps)
    if abs(wsum - 1.0) > 1e-9:
        raise InputError("weights must sum to 1 (got %.17g)" % wsum)
    if abs(wsum - 1.0) > 1e-12:
        # renormalize the sub-1e-9 slack away so downstream math sees mass 1
        fixed = []
        for c in comps:
            if isinstance(c, GaussianComponent):
                fixed.append(GaussianComponent(c.weight / wsum, c.mean, c.sigma))
            else:
                fixed.append(RingComponent(c.weight / wsum, c.rho0, c.sigma, c.znorm))
        comps = tuple(fixed)
    lo = np.full(dim, np.inf)
    hi = np.full(dim, -np.inf)
    for c in comps:
        if isinstance(c, GaussianComponent):
            mu = np.asarray(c.mean, dtype=np.float64)
            lo = np.minimum(lo, mu - 6.0 * c.sigma)
            hi = np.maximum(hi, mu + 6.0 * c.sigma)
        else:
            reach = c.rho0 + 6.0 * c.sigma
            lo = np.minimum(lo, -reach)
            hi = np.maximum(hi, reach)
    box = tuple((float(a), float(b)) for a, b in zip(lo, hi))
    lip = math.fsum(c.grad_bound(dim) for c in comps)
    peak = math.fsum(c.peak(dim) for c in comps)
    return DensityModel(dim=dim, components=comps, support_box=box,
                        lipschitz_bound=lip, peak_bound=peak, name=name)


def evaluate(model: DensityModel, x) -> np.ndarray:
    """Mixture density at x; x of shape (d,) gives a scalar, (m, d) a vector."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != model.dim:
        raise InputError("points of shape %s do not match model dim %d"
                         % (arr.shape, model.dim))
    out = np.zeros(arr.shape[0])
    for c in model.components:
        if isinstance(c, GaussianComponent):
            mu = np.asarray(c.mean, dtype=np.float64)
            sq = np.sum((arr - mu) ** 2, axis=1)
            out += c.weight * (2.0 * math.pi * c.sigma ** 2) ** (-model.dim / 2.0) \
                * np.exp(-0.5 * sq / c.sigma ** 2)
        else:
            rho = np.sqrt(np.sum(arr ** 2, axis=1))
            out += c.weight / c.znorm * np.exp(-0.5 * ((rho - c.rho0) / c.sigma) ** 2)
    return float(out[0]) if single else out


def _ring_radial_mass(rho, rho0, sigma):
    """int_0^rho s exp(-(s - rho0)^2 / 2 sigma^2) ds, closed form."""
    a = sigma * sigma * (math.exp(-0.5 * (rho0 / sigma) ** 2)
                         - np.exp(-0.5 * ((rho - rho0) / sigma) ** 2))
    b = rho0 * sigma * math.sqrt(math.pi / 2.0) * (
        erf((rho - rho0) / (sigma * math.sqrt(2.0)))
        + math.erf(rho0 / (sigma * math.sqrt(2.0))))
    return a + b


def sample(model: DensityModel, n: int, seed: int) -> PointCloud:
    """n i.i.d. draws, fully determined by seed.

    Stream order (part of the reproducibility contract): one block of
    component labels, then for each component in declaration order its own
    variates - standard normals for Gaussians; radial inverse-CDF uniforms
    followed by angle uniforms for rings.
    """
    if n < 1:
        raise InputError("sample size n must be >= 1")
    rng = np.random.default_rng(seed)
    weights = np.array([c.weight for c in model.components])
    weights = weights / weights.sum()
    labels = rng.choice(len(model.components), size=n, p=weights)
    pts = np.empty((n, model.dim))
    for ci, c in enumerate(model.components):
        mask = labels == ci
        m = int(mask.sum())
        if m == 0:
            continue
        if isinstance(c, GaussianComponent):
            mu = np.asarray(c.mean, dtype=np.float64)
            pts[mask] = mu + c.sigma * rng.standard_normal((m, model.dim))
        else:
            u = rng.random(m)
            total = _ring_radial_mass(np.inf, c.rho0, c.sigma)
            target = u * total
            lo = np.zeros(m)
            hi = np.full(m, c.rho0 + 14.0 * c.sigma)
            # 80 bisection steps: interval shrinks below one ulp of the bracket
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                below = _ring_radial_mass(mid, c.rho0, c.sigma) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            rho = 0.5 * (lo + hi)
            theta = rng.random(m) * (2.0 * math.pi)
            pts[mask, 0] = rho * np.cos(theta)
            pts[mask, 1] = rho * np.sin(theta)
    return PointCloud(pts, provenance={"model": model.name, "seed": int(seed), "n": int(n)})


def modulus_bound(model: DensityModel, u: float) -> float:
    """Upper bound on the modulus of continuity omega_f(u):
    min(lipschitz_bound * u, peak bound on max f)."""
    if u < 0:
        raise InputError("distance u must be >= 0")
    return min(model.lipschitz_bound * float(u), model.peak_bound)


# ---------------------------------------------------------------------------
# config parsing


def preset_config(name: str) -> dict:
    if name == "fig1d-mixture6":
        weights = (0.25, 0.2, 0.2, 0.15, 0.1, 0.1)
        means = (-6.0, -3.4, -1.0, 1.2, 3.2, 5.4)
        sigmas = (0.6, 0.5, 0.45, 0.5, 0.55, 0.5)
        return {"dim": 1,
                "components": [{"type": "gaussian", "weight": w, "mean": [m], "sigma": s}
                               for w, m, s in zip(weights, means, sigmas)]}
    if name == "fig2d-crater":
        return {"dim": 2,
                "components": [
                    {"type": "gaussian", "weight": 0.35, "mean": [0.0, 0.0], "sigma": 0.4},
                    {"type": "ring", "weight": 0.65, "rho0": 1.5, "sigma": 0.25}]}
    raise InputError("unknown preset %r; available: %s" % (name, ", ".join(PRESET_NAMES)))


def _require_number(doc, path, positive=False):
    v = doc
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(float(v)):
        raise InputError("%s: expected a finite number, got %r" % (path, v))
    if positive and not float(v) > 0.0:
        raise InputError("%s: must be > 0, got %r" % (path, v))
    return float(v)


def parse_density_config(doc) -> DensityModel:
    """Build a validated DensityModel from a JSON document (text or mapping).

    Accepts either {"preset": name} or {"dim": d, "components": [...]}.
    Error messages carry the offending field path.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InputError("config is not valid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise InputError("config root: expected a JSON object")
    name = "custom"
    if "preset" in doc:
        name = doc["preset"]
        if not isinstance(name, str):
            raise InputError("preset: expected a string")
        doc = preset_config(name)
    if "dim" not in doc:
        raise InputError("dim: missing")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError("dim: must be a positive integer, got %r" % (dim,))
    raw = doc.get("components")
    if not isinstance(raw, list) or not raw:
        raise InputError("components: expected a non-empty list")
    comps = []
    for i, c in enumerate(raw):
        path = "components[%d]" % i
        if not isinstance(c, dict):
            raise InputError("%s: expected an object" % path)
        ctype = c.get("type")
        w = _require_number(c.get("weight"), path + ".weight", positive=True)
        sigma = _require_number(c.get("sigma"), path + ".sigma", positive=True)
        if ctype == "gaussian":
            mean = c.get("mean")
            if not isinstance(mean, list) or len(mean) != dim:
                raise InputError("%s.mean: expected a list of %d coordinates" % (path, dim))
            mean = tuple(_require_number(v, "%s.mean[%d]" % (path, k)) for k, v in enumerate(mean))
            comps.append(GaussianComponent(weight=w, mean=mean, sigma=sigma))
        elif ctype == "ring":
            if dim != 2:
                raise InputError("%s: ring components require dim = 2" % path)
            rho0 = _require_number(c.get("rho0"), path + ".rho0", positive=True)
            comps.append(RingComponent(weight=w, rho0=rho0, sigma=sigma,
                                       znorm=_ring_normalizer(rho0, sigma)))
        else:
            raise InputError("%s.type: expected 'gaussian' or 'ring', got %r" % (path, ctype))
    return make_model(dim, comps, name=name)


def serialize_density_config(model: DensityModel) -> dict:
    comps = []
    for c in model.components:
        if isinstance(c, GaussianComponent):
            comps.append({"type": "gaussian", "weight": c.weight,
                          "mean": list(c.mean), "sigma": c.sigma})
        else:
            comps.append({"type": "ring", "weight": c.weight,
                          "rho0": c.rho0, "sigma": c.sigma})
    return {"dim": model.dim, "components": comps}


def preset(name: str) -> DensityModel:
    return parse_density_config({"preset": name})

"""Diagonal-limit capacity estimates for clusters with more users than BSs.

Each BS j contributes log(1 + P r_jj) where r_jj is its in-cluster received
gain over noise plus out-of-cluster gain. Scaling the user density multiplies
numerator and interference alike, so with no noise the estimate does not
depend on the user/BS ratio. The continuous form replaces user sums by
integrals of the squared-gain kernel over the cluster region and the rest of
the network.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import CapacityEstimate
from .channel import FadingParams, large_scale_gain, pairwise_distance
from .netgen import Clustering, NodeSet, ScenarioConfig, ScenarioKind


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ContinuousFadingKernel:
    """Squared large-scale gain written as gamma * d^-epsilon on three bands."""

    d0: float = 10.0
    d1: float = 50.0

    @classmethod
    def from_params(cls, params: FadingParams) -> ContinuousFadingKernel:
        return cls(params.d0, params.d1)

    def gamma(self, d):
        d = np.asarray(d, dtype=float)
        return np.where(d > self.d1, 1.0,
                        np.where(d > self.d0, self.d1**-1.5, self.d1**-1.5 * self.d0**-2))

    def epsilon(self, d):
        d = np.asarray(d, dtype=float)
        return np.where(d > self.d1, 3.5, np.where(d > self.d0, 2.0, 0.0))

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide="ignore"):
            return self.gamma(d) * np.where(self.epsilon(d) > 0, d, 1.0) ** -self.epsilon(d)

    def radial_integral(self, R):
        """F(R) = int_0^R f(r) r dr in closed form."""
        R = np.asarray(R, dtype=float)
        d0, d1 = self.d0, self.d1
        g1, g0 = d1**-1.5, d1**-1.5 * d0**-2
        F0 = g0 * d0 * d0 / 2
        F1 = F0 + g1 * math.log(d1 / d0)
        Rm = np.maximum(R, 1e-300)
        return np.where(R <= d0, g0 * R * R / 2,
                        np.where(R <= d1, F0 + g1 * np.log(Rm / d0),
                                 F1 + (d1**-1.5 - Rm**-1.5) / 1.5))


def _cluster_gains(nodes: NodeSet, clustering: Clustering, m: int, params: FadingParams):
    bs = nodes.bs[clustering.bs_in(m)]
    if len(bs) == 0:
        raise ValueError(f"cluster {m} has no BSs")
    l_in = large_scale_gain(pairwise_distance(bs, nodes.users[clustering.users_in(m)]), params)
    l_out = large_scale_gain(pairwise_distance(bs, nodes.users[clustering.users_outside(m)]), params)
    return (l_in**2).sum(axis=1), (l_out**2).sum(axis=1)


def _log1p_sinr(signal, interference, params: FadingParams, scale: float = 1.0):
    P, N0 = params.P, params.N0
    r = scale * signal / (N0 + P * scale * interference)
    return params.log_base.log(1 + P * r)


def rjj_all(nodes: NodeSet, clustering: Clustering, m: int, params: FadingParams) -> np.ndarray:
    sig, intf = _cluster_gains(nodes, clustering, m, params)
    return sig / (params.N0 + params.P * intf)


def rjj(nodes: NodeSet, clustering: Clustering, m: int, j: int, params: FadingParams) -> float:
    """Diagonal limit entry for the j-th BS (in cluster order) of cluster m."""
    return float(rjj_all(nodes, clustering, m, params)[j])


def closed_form_capacity(nodes: NodeSet, clustering: Clustering, m: int,
                         params: FadingParams) -> CapacityEstimate:
    sig, intf = _cluster_gains(nodes, clustering, m, params)
    vals = _log1p_sinr(sig, intf, params)
    return CapacityEstimate(float(np.mean(vals)), "closed_form",
                            {"J_m": len(sig), "K_m": len(clustering.users_in(m))})


def stability_gap(nodes: NodeSet, clustering: Clustering, m: int, params: FadingParams,
                  scale: float) -> float:
    """|C(rho_u) - C(scale * rho_u)| with every user-sum term multiplied by ``scale``."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    sig, intf = _cluster_gains(nodes, clustering, m, params)
    base = np.mean(_log1p_sinr(sig, intf, params))
    scaled = np.mean(_log1p_sinr(sig, intf, params, scale))
    return float(abs(base - scaled))


def closed_form_estimator(rep, params: FadingParams) -> CapacityEstimate:
    return closed_form_capacity(rep.nodes, rep.clustering, rep.m, params)


# Regions. Every region here is convex, so it is star-shaped about any
# interior point and is described by its exit distance along a ray.

@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.hypot(*(pts - np.asarray(self.center)).T) <= self.radius

    def ray_exit(self, x, u) -> np.ndarray:
        p = np.asarray(x, float) - np.asarray(self.center)
        pu = u @ p
        disc = pu**2 - (p @ p - self.radius**2)
        return -pu + np.sqrt(np.maximum(disc, 0.0))

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class HalfPlanes:
    """Intersection of {y : (y - p_i) . n_i <= 0} with an optional container region."""

    points: np.ndarray
    normals: np.ndarray
    container: object = None

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.all(((pts[:, None, :] - self.points[None]) * self.normals[None]).sum(axis=2) <= 0, axis=1)
        if self.container is not None:
            ok &= self.container.contains(pts)
        return ok

    def ray_exit(self, x, u) -> np.ndarray:
        x = np.asarray(x, float)
        un = u @ self.normals.T  # (n_dir, n_planes)
        slack = -((x - self.points) * self.normals).sum(axis=1)  # >= 0 inside
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(un > 0, slack[None, :] / un, np.inf)
        r = t.min(axis=1) if t.shape[1] else np.full(len(u), np.inf)
        if self.container is not None:
            r = np.minimum(r, self.container.ray_exit(x, u))
        return np.maximum(r, 0.0)


def square(D: float, center=(0.0, 0.0)) -> HalfPlanes:
    c = np.asarray(center, float)
    normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    return HalfPlanes(c + D * normals, normals)


def voronoi_cell(centroids: np.ndarray, m: int, container=None) -> HalfPlanes:
    """Cell of centroid m among ``centroids``, clipped to ``container``."""
    c = np.asarray(centroids, float)
    others = np.delete(c, m, axis=0)
    normals = others - c[m]
    mids = 0.5 * (others + c[m])
    return HalfPlanes(mids, normals, container)


def network_region(cfg: ScenarioConfig):
    if cfg.kind is ScenarioKind.S1:
        return Disk((0.0, 0.0), cfg.D)
    return square(cfg.D)


def _angular_integral(values_fn, n0: int = 256, rtol: float = 1e-4, max_n: int = 1 << 20):
    """Periodic trapezoid rule over [0, 2 pi), doubling until two levels agree."""
    prev = None
    n = n0
    while n <= max_n:
        phi = (np.arange(n) + 0.5) * (2 * np.pi / n)
        cur = float(np.mean(values_fn(phi)) * 2 * np.pi)
        if prev is not None and abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
        n *= 2
    raise QuadratureError(f"angular quadrature did not reach rtol={rtol} with {max_n} nodes")


def uniform_density_integrals(D0, Dm, x, kernel: ContinuousFadingKernel,
                              rtol: float = 1e-4) -> tuple[float, float]:
    """(int_{D0} f(x - y) dy, int_{D0 \\ Dm} f(x - y) dy) for x in Dm, Dm inside D0.

    Polar coordinates about x: the radial integral of f(r) r is closed form,
    leaving a 1-D angular integral of F(exit radius).
    """
    x = np.asarray(x, float)

    def dirs(phi):
        return np.column_stack([np.cos(phi), np.sin(phi)])

    def whole(phi):
        return kernel.radial_integral(D0.ray_exit(x, dirs(phi)))

    def outside(phi):
        u = dirs(phi)
        r0 = D0.ray_exit(x, u)
        rm = np.minimum(Dm.ray_exit(x, u), r0)
        return kernel.radial_integral(r0) - kernel.radial_integral(rm)

    return _angular_integral(whole, rtol=rtol), _angular_integral(outside, rtol=rtol)


def continuous_uniform_capacity(geometry, cluster_region, bs_position,
                                params: FadingParams, rtol: float = 1e-4) -> CapacityEstimate:
    """log(int_{D0} f / int_{D0 minus Dm} f) at a BS location, constant user density.

    Noise power and transmit power drop out in the large-cluster limit, so
    only the kernel thresholds and the log base are read from ``params``.
    """
    kernel = ContinuousFadingKernel.from_params(params)
    total, outside = uniform_density_integrals(geometry, cluster_region, bs_position, kernel, rtol)
    if outside <= 0:
        value = math.inf
    else:
        value = float(params.log_base.log(total / outside))
    return CapacityEstimate(value, "continuous_uniform", {"inner": total - outside, "outer": outside})


def continuous_uniform_estimator(rep, params: FadingParams) -> CapacityEstimate:
    """Average of the continuous-density estimate over the target cluster's BSs.

    The cluster region is the Voronoi cell of its centroid clipped to the network.
    """
    D0 = network_region(rep.cfg)
    Dm = voronoi_cell(rep.clustering.centroids, rep.m, D0)
    vals = [continuous_uniform_capacity(D0, Dm, p, params).value
            for p in rep.nodes.bs[rep.clustering.bs_in(rep.m)]]
    return CapacityEstimate(float(np.mean(vals)), "continuous_uniform", {"J_m": len(vals)})

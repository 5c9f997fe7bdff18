"""Network layouts (scenarios S1/S2), K-means clustering and target-cluster selection."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .rngkit import (KMEANS, LAYOUT_BS, LAYOUT_USERS, RngStream, sample_poisson,
                     sample_truncated_normal)


class ScenarioKind(str, Enum):
    S1 = "S1_disk_ppp"
    S2 = "S2_square_truncnorm"


@dataclass(frozen=True)
class ScenarioConfig:
    """Network geometry and node-density settings.

    S1 uses ``lambda_b`` (BSs per m^2) on a disk of radius ``D``; S2 uses
    ``J_total`` BSs with truncated-normal coordinates on the square [-D, D]^2.
    User intensity / count is always BS intensity / count times ``beta``.
    """

    kind: ScenarioKind
    D: float = 1000.0
    beta: float = 1.0
    M: int = 25
    lambda_b: float | None = None
    J_total: int | None = None
    mu: float = 0.0
    sigma: float = 600.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if not self.D > 0:
            raise ValueError(f"D must be positive, got {self.D}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.kind is ScenarioKind.S1:
            if self.lambda_b is None:
                raise ValueError("lambda_b is required for S1")
            if self.J_total is not None:
                raise ValueError("J_total is an S2 field; S1 takes lambda_b")
        else:
            if self.J_total is None:
                raise ValueError("J_total is required for S2")
            if self.lambda_b is not None:
                raise ValueError("lambda_b is an S1 field; S2 takes J_total")
            if not self.sigma > 0:
                raise ValueError(f"sigma must be positive, got {self.sigma}")

    def with_beta(self, beta: float) -> ScenarioConfig:
        return replace(self, beta=beta)

    def scaled_density(self, factor: float) -> ScenarioConfig:
        """Same geometry with ``factor`` times as many nodes (beta fixed)."""
        if self.kind is ScenarioKind.S1:
            return replace(self, lambda_b=self.lambda_b * factor)
        return replace(self, J_total=int(round(self.J_total * factor)))

    @property
    def center(self) -> np.ndarray:
        return np.zeros(2)


def s1_desk_config(beta: float = 1.0, expected_bs: float = 300.0, M: int = 9,
                   D: float = 1000.0) -> ScenarioConfig:
    """S1 with ``lambda_b`` chosen so the expected BS count is ``expected_bs``."""
    return ScenarioConfig(ScenarioKind.S1, D=D, beta=beta, M=M,
                          lambda_b=expected_bs / (math.pi * D * D))


@dataclass(frozen=True, eq=False)
class NodeSet:
    bs: np.ndarray  # (J, 2)
    users: np.ndarray  # (K, 2)

    @property
    def J(self) -> int:
        return len(self.bs)

    @property
    def K(self) -> int:
        return len(self.users)

    def pooled(self) -> np.ndarray:
        return np.vstack([self.bs, self.users])


@dataclass(frozen=True, eq=False)
class Clustering:
    """Assignment over pooled nodes: BSs first (0..J-1), then users (J..J+K-1)."""

    assignment: np.ndarray
    centroids: np.ndarray
    n_bs: int

    @property
    def M(self) -> int:
        return len(self.centroids)

    def bs_in(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.assignment[: self.n_bs] == m)

    def users_in(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.assignment[self.n_bs:] == m)

    def users_outside(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.assignment[self.n_bs:] != m)


def _uniform_disk(stream: RngStream, n: int, D: float) -> np.ndarray:
    g = stream.generator
    # radius density 2t/D^2 on [0, D] by inverse CDF
    r = D * np.sqrt(g.random(n))
    theta = 2 * np.pi * g.random(n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def generate_s1(cfg: ScenarioConfig, stream: RngStream) -> NodeSet:
    if cfg.kind is not ScenarioKind.S1:
        raise ValueError("generate_s1 needs an S1 config")
    if not cfg.lambda_b > 0:
        raise ValueError(f"lambda_b must be positive, got {cfg.lambda_b}")
    area = math.pi * cfg.D**2
    # BS and user draws come from separate substreams so that, for a fixed
    # stream, changing beta leaves the BS layout untouched.
    s_bs, s_u = stream.child(LAYOUT_BS), stream.child(LAYOUT_USERS)
    J = sample_poisson(s_bs, cfg.lambda_b * area)
    K = sample_poisson(s_u, cfg.lambda_b * cfg.beta * area)
    return NodeSet(_uniform_disk(s_bs, J, cfg.D), _uniform_disk(s_u, K, cfg.D))


def generate_s2(cfg: ScenarioConfig, stream: RngStream) -> NodeSet:
    if cfg.kind is not ScenarioKind.S2:
        raise ValueError("generate_s2 needs an S2 config")
    if cfg.J_total < 1:
        raise ValueError(f"J_total must be >= 1, got {cfg.J_total}")
    J = cfg.J_total
    K = int(round(J * cfg.beta))
    s_bs, s_u = stream.child(LAYOUT_BS), stream.child(LAYOUT_USERS)

    def coords(s, n):
        xy = sample_truncated_normal(s, cfg.mu, cfg.sigma, -cfg.D, cfg.D, 2 * n)
        return xy.reshape(n, 2)

    return NodeSet(coords(s_bs, J), coords(s_u, K))


def generate(cfg: ScenarioConfig, stream: RngStream) -> NodeSet:
    if cfg.kind is ScenarioKind.S1:
        return generate_s1(cfg, stream)
    return generate_s2(cfg, stream)


def _sqdist(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _farthest_point_seeds(points: np.ndarray, M: int, stream: RngStream) -> np.ndarray:
    first = int(stream.generator.integers(len(points)))
    idx = [first]
    d2 = ((points - points[first]) ** 2).sum(axis=1)
    for _ in range(1, M):
        nxt = int(np.argmax(d2))
        idx.append(nxt)
        d2 = np.minimum(d2, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[idx].copy()


def lloyd(points: np.ndarray, M: int, stream: RngStream,
          max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm with farthest-point seeding.

    Returns ``(assignment, centroids)`` where every point is assigned to its
    nearest returned centroid. Empty clusters are re-seeded with the point of
    the largest cluster that lies farthest from that cluster's centroid.
    """
    n = len(points)
    if n < M:
        raise ValueError(f"cannot form {M} clusters from {n} nodes")
    centroids = _farthest_point_seeds(points, M, stream)
    prev = None
    for _ in range(max_iter):
        assign = np.argmin(_sqdist(points, centroids), axis=1)
        counts = np.bincount(assign, minlength=M)
        if (counts == 0).any():
            for e in np.flatnonzero(counts == 0):
                big = int(np.argmax(counts))
                members = np.flatnonzero(assign == big)
                far = members[np.argmax(((points[members] - centroids[big]) ** 2).sum(axis=1))]
                centroids[e] = points[far]
                assign[far] = e
                counts[big] -= 1
                counts[e] += 1
            prev = None
            continue
        if prev is not None and np.array_equal(assign, prev):
            break
        prev = assign
        sums = np.zeros((M, 2))
        np.add.at(sums, assign, points)
        centroids = sums / counts[:, None]
    assign = np.argmin(_sqdist(points, centroids), axis=1)
    return assign, centroids


def kmeans_partition(nodes: NodeSet, M: int, stream: RngStream) -> Clustering:
    """K-means on the pooled BS + user coordinates."""
    pts = nodes.pooled()
    assign, centroids = lloyd(pts, M, stream.child(KMEANS))
    return Clustering(assign, centroids, nodes.J)


class Selector(str, Enum):
    CLOSEST = "closest"
    MEDIAN = "median"
    FURTHEST = "furthest"


def select_cluster(clustering: Clustering, which: Selector | str,
                   center=(0.0, 0.0)) -> int:
    which = Selector(which)
    dist = np.linalg.norm(clustering.centroids - np.asarray(center, float), axis=1)
    if which is Selector.CLOSEST:
        return int(np.argmin(dist))
    if which is Selector.FURTHEST:
        return int(np.argmax(dist))
    # descending order, lower median for even M
    order = np.argsort(-dist, kind="stable")
    return int(order[math.ceil(len(dist) / 2) - 1])

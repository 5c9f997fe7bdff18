"""Exact log-determinant capacity and the Monte-Carlo replication driver."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import linalg

from .channel import ChannelInstance, FadingParams, build_channel
from .netgen import Clustering, NodeSet, ScenarioConfig, Selector, generate, kmeans_partition, select_cluster
from .rngkit import RETRY, RngStream

WORKERS_ENV = "UDNCAP_WORKERS"
MAX_RETRIES = 10


@dataclass
class CapacityEstimate:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict)


class EmptyClusterError(RuntimeError):
    pass


class ReplicationError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"replication {index} failed: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause


def logdet_hpd(A: np.ndarray) -> float:
    """Natural log-determinant of a Hermitian positive-definite matrix."""
    C = linalg.cholesky(A, lower=True)
    return 2.0 * float(np.sum(np.log(C.diagonal().real)))


def exact_capacity_once(ch: ChannelInstance, params: FadingParams) -> CapacityEstimate:
    """(1/J_m) log det(I + P Xi^-1/2 H H^* Xi^-1/2) as a difference of two log-dets."""
    H = ch.H
    C = ch.xi_cholesky()
    ld_xi = 2.0 * float(np.sum(np.log(C.diagonal().real)))
    ld_sig = logdet_hpd(ch.Xi + params.P * (H @ H.conj().T))
    value = (ld_sig - ld_xi) / ch.J_m * params.log_base.per_nat
    return CapacityEstimate(max(value, 0.0), "exact", {"J_m": ch.J_m, "K_m": ch.K_m})


@dataclass
class Replication:
    """One network draw with a selected target cluster. The channel is built on first use."""

    cfg: ScenarioConfig
    params: FadingParams
    nodes: NodeSet
    clustering: Clustering
    m: int
    stream: RngStream

    @property
    def K(self) -> int:
        return self.nodes.K

    @property
    def J_m(self) -> int:
        return len(self.clustering.bs_in(self.m))

    @property
    def K_m(self) -> int:
        return len(self.clustering.users_in(self.m))

    @cached_property
    def channel(self) -> ChannelInstance:
        return build_channel(self.nodes, self.clustering, self.m, self.params, self.stream)


def draw_replication(cfg: ScenarioConfig, which: Selector | str, params: FadingParams,
                     stream: RngStream) -> Replication:
    nodes = generate(cfg, stream)
    if nodes.J + nodes.K < cfg.M:
        raise EmptyClusterError(f"only {nodes.J + nodes.K} nodes for {cfg.M} clusters")
    clustering = kmeans_partition(nodes, cfg.M, stream)
    m = select_cluster(clustering, which, cfg.center)
    rep = Replication(cfg, params, nodes, clustering, m, stream)
    if rep.J_m == 0 or rep.K_m == 0:
        raise EmptyClusterError(f"selected cluster has J_m={rep.J_m}, K_m={rep.K_m}")
    return rep


def draw_with_retry(cfg: ScenarioConfig, which: Selector | str, params: FadingParams,
                    stream: RngStream) -> Replication:
    """Redraw the whole layout on a derived stream when the target cluster is empty."""
    last = None
    for attempt in range(MAX_RETRIES + 1):
        s = stream.fresh() if attempt == 0 else stream.child(RETRY, attempt)
        try:
            return draw_replication(cfg, which, params, s)
        except EmptyClusterError as exc:
            last = exc
    raise EmptyClusterError(f"no usable layout after {MAX_RETRIES} retries: {last}")


Estimator = Callable[[Replication, FadingParams], CapacityEstimate]


def exact_estimator(rep: Replication, params: FadingParams) -> CapacityEstimate:
    return exact_capacity_once(rep.channel, params)


def _one(args) -> CapacityEstimate:
    cfg, which, params, seed, stream_id, method, index = args
    try:
        rep = draw_with_retry(cfg, which, params, RngStream(seed, stream_id))
        return method(rep, params)
    except Exception as exc:  # surfaced with the replication index
        raise ReplicationError(index, exc) from exc


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def replicate(cfg: ScenarioConfig, which: Selector | str, params: FadingParams, reps: int,
              base_stream: RngStream, method: Estimator = exact_estimator,
              workers: int | None = None) -> list[CapacityEstimate]:
    """Per-replication estimates in replication order; replication r uses stream_id base + r."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    jobs = [(cfg, which, params, base_stream.seed, base_stream.stream_id + r, method, r)
            for r in range(reps)]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, jobs))


def summarize(values) -> tuple[float, float]:
    """(mean, sample std) by Welford's update in the given order; std of a single value is 0."""
    n, mean, m2 = 0, 0.0, 0.0
    for v in values:
        n += 1
        d = v - mean
        mean += d / n
        m2 += d * (v - mean)
    if n == 0:
        raise ValueError("no values")
    return mean, (m2 / (n - 1)) ** 0.5 if n > 1 else 0.0


def monte_carlo_capacity(cfg: ScenarioConfig, which: Selector | str, params: FadingParams,
                         reps: int, base_stream: RngStream,
                         method: Estimator = exact_estimator,
                         workers: int | None = None) -> tuple[float, float]:
    ests = replicate(cfg, which, params, reps, base_stream, method, workers)
    return summarize(e.value for e in ests)

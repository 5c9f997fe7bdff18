"""Per-cluster channel assembly: large-scale gains, fading, interference matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from .netgen import Clustering, NodeSet
from .rngkit import CHANNEL, INTERFERENCE, RngStream, sample_complex_gaussian


class LogBase(str, Enum):
    BITS = "bits"
    NATS = "nats"

    def log(self, x):
        return np.log2(x) if self is LogBase.BITS else np.log(x)

    @property
    def per_nat(self) -> float:
        """Multiply a natural-log quantity by this to convert to this base."""
        return 1.0 / math.log(2.0) if self is LogBase.BITS else 1.0


@dataclass(frozen=True)
class FadingParams:
    d0: float = 10.0
    d1: float = 50.0
    P: float = 1.0
    N0: float = 1e-12
    log_base: LogBase = LogBase.BITS

    def __post_init__(self):
        object.__setattr__(self, "log_base", LogBase(self.log_base))
        if not 0 < self.d0 < self.d1:
            raise ValueError(f"need 0 < d0 < d1, got d0={self.d0}, d1={self.d1}")
        if not self.P > 0:
            raise ValueError(f"P must be positive, got {self.P}")
        if not self.N0 >= 0:
            raise ValueError(f"N0 must be nonnegative, got {self.N0}")


def large_scale_gain(d, params: FadingParams = FadingParams()):
    """Three-band distance law: capped near field, d^-1 middle band, d^-1.75 far field."""
    d = np.asarray(d, dtype=float)
    d0, d1 = params.d0, params.d1
    near = d1**-0.75 / d0
    with np.errstate(divide="ignore", over="ignore"):
        mid = d1**-0.75 / d
        far = d**-1.75
    out = np.where(d > d1, far, np.where(d > d0, mid, near))
    return out[()] if out.ndim == 0 else out


def pairwise_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    """One cluster's channel draw.

    ``L``/``G`` are the in-cluster large- and small-scale matrices (J_m x K_m),
    ``Xi`` the noise-plus-interference matrix and ``Ltilde`` the row means of
    ``L`` (the diagonal of the optimal diagonal replacement for ``L``).
    """

    L: np.ndarray
    G: np.ndarray
    Xi: np.ndarray
    Ltilde: np.ndarray
    n_interferers: int = 0
    _chol: list = field(default_factory=list, init=False, repr=False, compare=False)

    @property
    def J_m(self) -> int:
        return self.L.shape[0]

    @property
    def K_m(self) -> int:
        return self.L.shape[1]

    @property
    def H(self) -> np.ndarray:
        return self.L * self.G

    def xi_cholesky(self) -> np.ndarray:
        """Lower Cholesky factor of Xi, computed once."""
        if not self._chol:
            self._chol.append(linalg.cholesky(self.Xi, lower=True))
        return self._chol[0]


def interference_matrix(H_out: np.ndarray, params: FadingParams) -> np.ndarray:
    """N0 I + P sum_k h_k h_k^* over the columns of ``H_out``."""
    J = H_out.shape[0]
    Xi = params.P * (H_out @ H_out.conj().T)
    Xi = 0.5 * (Xi + Xi.conj().T)
    Xi[np.diag_indices(J)] += params.N0
    return Xi


def build_channel(nodes: NodeSet, clustering: Clustering, m: int,
                  params: FadingParams, stream: RngStream) -> ChannelInstance:
    bs_idx = clustering.bs_in(m)
    u_in = clustering.users_in(m)
    if len(bs_idx) == 0 or len(u_in) == 0:
        raise ValueError(f"cluster {m} has {len(bs_idx)} BSs and {len(u_in)} users")
    u_out = clustering.users_outside(m)
    bs = nodes.bs[bs_idx]
    L = large_scale_gain(pairwise_distance(bs, nodes.users[u_in]), params)
    G = sample_complex_gaussian(stream.child(CHANNEL), L.shape)
    L_out = large_scale_gain(pairwise_distance(bs, nodes.users[u_out]), params)
    G_out = sample_complex_gaussian(stream.child(INTERFERENCE), L_out.shape)
    Xi = interference_matrix(L_out * G_out, params)
    return ChannelInstance(L, G, Xi, L.mean(axis=1), n_interferers=len(u_out))


def hadamard_approx_error(L: np.ndarray) -> float:
    """Minimum over diagonal D of E||L o G - D G||_F^2 for CN(0,1) G; attained at row means."""
    L = np.asarray(L, dtype=float)
    K = L.shape[1]
    return float(np.sum((L**2).sum(axis=1) - L.sum(axis=1) ** 2 / K))


def sinr_trace(ch: ChannelInstance, params: FadingParams) -> float:
    """tr(P Xi^-1/2 Lt G G^* Lt Xi^-1/2) via one Cholesky factor and a triangular solve."""
    C = ch.xi_cholesky()
    A = ch.Ltilde[:, None] * ch.G
    W = linalg.solve_triangular(C, A, lower=True)
    return float(params.P * np.sum(W.real**2 + W.imag**2))

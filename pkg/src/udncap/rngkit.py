"""Reproducible random streams and the few distributions the simulator needs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import truncnorm

# Child-stream keys used across the package. Keeping them in one place keeps
# substreams of one replication disjoint.
LAYOUT_BS = 1
LAYOUT_USERS = 2
KMEANS = 3
CHANNEL = 4
INTERFERENCE = 5
RETRY = 6


@dataclass
class RngStream:
    """A (seed, stream_id) pair backed by a PCG64 generator.

    The generator is derived with ``SeedSequence(seed, spawn_key=(stream_id, *path))``
    so different stream ids (replications) and different child paths never
    share state. A stream is consumed as it is sampled; do not hand the same
    instance to two workers.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def child(self, *key: int) -> RngStream:
        """Independent substream; does not advance this stream."""
        return RngStream(self.seed, self.stream_id, self.path + tuple(key))

    def fresh(self) -> RngStream:
        """Same identity, rewound to the start of the sequence."""
        return RngStream(self.seed, self.stream_id, self.path)


def sample_complex_gaussian(stream: RngStream, n) -> np.ndarray:
    """CN(0, 1) draws: real and imaginary parts i.i.d. N(0, 1/2). ``n`` may be a shape."""
    g = stream.generator
    z = g.standard_normal(n) + 1j * g.standard_normal(n)
    return z * math.sqrt(0.5)


def sample_poisson(stream: RngStream, lam: float) -> int:
    if not math.isfinite(lam):
        raise ValueError(f"Poisson rate must be finite, got {lam}")
    if lam < 0:
        raise ValueError(f"Poisson rate must be nonnegative, got {lam}")
    return int(stream.generator.poisson(lam))


def sample_truncated_normal(stream: RngStream, mu: float, sigma: float,
                            lo: float, hi: float, n: int) -> np.ndarray:
    """Inverse-CDF draws from N(mu, sigma^2) restricted to [lo, hi]."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    u = stream.generator.random(n)
    a, b = (lo - mu) / sigma, (hi - mu) / sigma
    x = truncnorm.ppf(u, a, b, loc=mu, scale=sigma)
    # ppf can round a hair outside the interval at the extremes
    return np.clip(x, lo, hi)

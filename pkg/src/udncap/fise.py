"""Fisher-spiked capacity estimation for clusters with no more users than BSs.

The estimate has two parts. The R = min(J_m, K_m) spiked eigenvalues of
I + P_m are placed evenly above the bulk edge b_m so that their sum matches
R + tr(P_m). The bulk contributes the log-moment of the Fisher limiting
density over [max(1, a_m), b_m].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .capacity import CapacityEstimate
from .channel import ChannelInstance, FadingParams, LogBase, sinr_trace

PANEL_ORDER = 32


class RegimeError(ValueError):
    """Cluster dimensions fall outside the regime where the Fisher LSD applies."""


@dataclass(frozen=True)
class SpectralParams:
    beta_m: float
    y_m: float

    @property
    def mu(self) -> float:
        return math.sqrt((1 + self.beta_m * self.y_m - self.y_m) / self.beta_m)

    @property
    def a_m(self) -> float:
        return (1 - self.mu) ** 2 / (1 - self.y_m) ** 2

    @property
    def b_m(self) -> float:
        return (1 + self.mu) ** 2 / (1 - self.y_m) ** 2


def spectral_params(J_m: int, K_m: int, K: int, allow_beta_above_one: bool = False) -> SpectralParams:
    """Plug-in (beta_m, y_m) = (K_m / J_m, J_m / (K - K_m)).

    ``allow_beta_above_one`` lets a replication whose realized K_m slightly
    exceeds J_m through when the nominal network ratio is <= 1.
    """
    if J_m < 1 or K_m < 1:
        raise RegimeError(f"empty cluster: J_m={J_m}, K_m={K_m}")
    beta_m = K_m / J_m
    if beta_m > 1 and not allow_beta_above_one:
        raise RegimeError(f"beta_m = {beta_m:.4g} > 1: use the closed-form path")
    n_out = K - K_m
    if n_out <= J_m:
        raise RegimeError(f"network too small for FISE regime: y_m = J_m/(K-K_m) = {J_m}/{n_out}")
    return SpectralParams(beta_m, J_m / n_out)


def lsd_density(x, sp: SpectralParams):
    """Continuous part of the Fisher LSD (total mass beta_m); zero off [a_m, b_m]."""
    x = np.asarray(x, dtype=float)
    a, b, beta, y = sp.a_m, sp.b_m, sp.beta_m, sp.y_m
    inside = (x >= a) & (x <= b) & (x > 0)
    xs = np.where(inside, x, 0.5 * (a + b))
    val = beta * (1 - y) * np.sqrt(np.maximum((b - xs) * (xs - a), 0.0)) / (2 * np.pi * xs * (1 + beta * y * xs))
    out = np.where(inside, val, 0.0)
    return out[()] if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _theta_nodes(t_lo: float, width: float, order: int):
    """Composite Gauss-Legendre on [t_lo, pi], panels doubling in length from ``width``."""
    edges = [t_lo]
    t = width
    while t < math.pi:
        if t > t_lo:
            edges.append(t)
        t *= 2
    edges.append(math.pi)
    e = np.array(edges)
    left, half = e[:-1], 0.5 * np.diff(e)
    x, w = _legendre(order)
    t = (left[:, None] + half[:, None] * (x[None, :] + 1)).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def bulk_nodes(sp: SpectralParams, lo: float, order: int = PANEL_ORDER):
    """Nodes x and weights for integrals of g(x) p(x) over [lo, b_m], lo in [a_m, b_m].

    With x = c - h cos(t), c = (a+b)/2, h = (b-a)/2, the square-root factor
    times dx becomes h^2 sin^2(t) dt, so the integrand in t is smooth. The
    1/x factor still peaks at t ~ sqrt(a/h) when a_m is near zero, hence the
    panels graded from that width.
    """
    a, b, beta, y = sp.a_m, sp.b_m, sp.beta_m, sp.y_m
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    t_lo = math.acos(min(1.0, max(-1.0, (c - lo) / h)))
    if t_lo >= math.pi:
        return np.zeros(0), np.zeros(0)
    width = min(0.5, max(math.sqrt(max(a, 0.0) / h), 1e-8))
    t, wt = _theta_nodes(t_lo, width, order)
    x = a + 2 * h * np.sin(0.5 * t) ** 2  # c - h cos(t) without cancellation near a
    kern = beta * (1 - y) * h * h * np.sin(t) ** 2 / (2 * np.pi * x * (1 + beta * y * x))
    return x, wt * kern


def _bulk_integral(g, sp: SpectralParams, lo: float, order: int = PANEL_ORDER) -> float:
    x, w = bulk_nodes(sp, lo, order)
    return float(np.sum(w * g(x))) if len(x) else 0.0


def lsd_mass(sp: SpectralParams, order: int = PANEL_ORDER) -> float:
    """Total mass of the continuous part over [a_m, b_m]; should equal beta_m."""
    return _bulk_integral(np.ones_like, sp, sp.a_m, order)


@dataclass(frozen=True)
class Spikes:
    values: np.ndarray  # descending
    step: float
    separated: bool


def spike_estimates(trace_Pm: float, R: int, b_m: float) -> Spikes:
    """Evenly spaced spikes b_m + (R + 1 - j) * step, j = 1..R, summing to R + trace.

    A nonpositive step means the trace is too small to put R spikes above
    b_m; the spikes are then clamped to at least 1 and flagged.
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    step = 2.0 * (trace_Pm + R - R * b_m) / (R * (R + 1))
    rho = b_m + np.arange(R, 0, -1) * step
    separated = step > 0
    if not separated:
        rho = np.sort(np.maximum(rho, 1.0))[::-1]
    return Spikes(rho, step, separated)


def cm2_integral(sp: SpectralParams, log_base: LogBase = LogBase.BITS,
                 order: int = PANEL_ORDER) -> float:
    lo = max(1.0, sp.a_m)
    if sp.b_m <= lo:
        return 0.0
    return _bulk_integral(np.log, sp, lo, order) * log_base.per_nat


def fise_from_trace(trace_Pm: float, J_m: int, K_m: int, K: int,
                    log_base: LogBase = LogBase.BITS,
                    allow_beta_above_one: bool = False) -> CapacityEstimate:
    """FISE given tr(P_m): work is O(R) for the spikes plus a quadrature of bounded size."""
    sp = spectral_params(J_m, K_m, K, allow_beta_above_one)
    R = min(J_m, K_m)
    spikes = spike_estimates(trace_Pm, R, sp.b_m)
    c1 = float(np.sum(log_base.log(spikes.values))) / J_m
    lo = max(1.0, sp.a_m)
    x, w = bulk_nodes(sp, lo) if sp.b_m > lo else (np.zeros(0), np.zeros(0))
    c2 = float(np.sum(w * np.log(x))) * log_base.per_nat
    diag = {
        "trace": trace_Pm, "R": R, "delta_rho": spikes.step, "a_m": sp.a_m, "b_m": sp.b_m,
        "beta_m": sp.beta_m, "y_m": sp.y_m, "J_m": J_m, "K_m": K_m,
        "C_m1": c1, "C_m2": c2, "separated": spikes.separated,
        # logarithm evaluations: one per spike plus one per quadrature node
        "n_log_evals": R + len(x),
    }
    if trace_Pm == 0:
        diag["degenerate"] = True
    return CapacityEstimate(c1 + c2, "fise", diag)


def fise_capacity(ch: ChannelInstance, K: int, params: FadingParams,
                  allow_beta_above_one: bool = False) -> CapacityEstimate:
    tr = sinr_trace(ch, params)
    return fise_from_trace(tr, ch.J_m, ch.K_m, K, params.log_base, allow_beta_above_one)


def fise_estimator(rep, params: FadingParams) -> CapacityEstimate:
    """Replication estimator; tolerates realized beta_m slightly above 1."""
    return fise_capacity(rep.channel, rep.K, params, allow_beta_above_one=True)

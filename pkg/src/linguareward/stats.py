"""Rank correlation between reward channels: Kendall's tau and Spearman's rho.

Bucketed describers produce heavily tied samples, so the tie-corrected tau-b
is the default; tau-a (ties counted in neither the concordant nor discordant
tally, plain n(n-1)/2 denominator) is available to match the textbook
definition.  Spearman's rho uses average ranks and is computed as the Pearson
correlation of the rank vectors, which reduces to the classical
1 - 6*sum(d_i^2)/(n(n^2-1)) form when ties are absent.

P-values are the standard analytic approximations: a normal approximation
with variance n(n-1)(2n+5)/18 on (n_c - n_d) for tau, and the
t-approximation t = rho*sqrt((n-2)/(1-rho^2)) for rho, both two-sided.  An
optional permutation p-value (shuffling y) is available for small samples.
All-tied inputs have no defined rank correlation and yield None.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import stdtr

TAU_VARIANTS = ("a", "b")


@dataclass(frozen=True)
class CorrelationReport:
    """One semantic-vs-physical comparison with its sampling metadata.

    ``ties_x``/``ties_y`` count tied pairs (the tau-b correction terms), and
    the channel names record the sign convention: correlating a similarity
    against a cost-like magnitude legitimately comes out negative.
    """

    tau: float | None
    rho: float | None
    p_tau: float | None
    p_rho: float | None
    n: int
    ties_x: int
    ties_y: int
    variant: str
    x_channel: str
    y_channel: str

    def to_dict(self) -> dict:
        return asdict(self)


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional")
    return arr


def pair_counts(x, y) -> tuple[int, int, int, int]:
    """(concordant, discordant, pairs tied in x, pairs tied in y) over all i<j."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    nc = nd = ties_x = ties_y = 0
    for i in range(n - 1):
        dx = x[i + 1 :] - x[i]
        dy = y[i + 1 :] - y[i]
        s = np.sign(dx) * np.sign(dy)
        nc += int((s > 0).sum())
        nd += int((s < 0).sum())
        ties_x += int((dx == 0).sum())
        ties_y += int((dy == 0).sum())
    return nc, nd, ties_x, ties_y


def _tau_p_value(nc_minus_nd: int, n: int) -> float:
    var = n * (n - 1) * (2 * n + 5) / 18.0
    if var == 0.0:
        return 1.0
    z = nc_minus_nd / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


def kendall_tau(
    x,
    y,
    variant: str = "b",
    permutation: int | None = None,
    permutation_seed: int = 0,
) -> tuple[float | None, float | None]:
    """Kendall's tau and a two-sided p-value.

    ``variant="a"`` divides (n_c - n_d) by n(n-1)/2; ``variant="b"`` applies
    the tie correction sqrt((n0 - t_x)(n0 - t_y)) and is undefined (None) when
    either channel is entirely tied.  ``permutation`` switches the p-value to
    a permutation test with that many shuffles.
    """
    if variant not in TAU_VARIANTS:
        raise ValueError(f"variant must be one of {TAU_VARIANTS}")
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise ValueError("kendall_tau requires n >= 2")
    nc, nd, ties_x, ties_y = pair_counts(x, y)
    n0 = n * (n - 1) // 2
    if variant == "a":
        tau = (nc - nd) / (0.5 * n * (n - 1))
    else:
        denom_sq = (n0 - ties_x) * (n0 - ties_y)
        if denom_sq == 0:
            return None, None
        tau = (nc - nd) / math.sqrt(denom_sq)
    if permutation is not None:
        p = _permutation_p(x, y, lambda a, b: _tau_stat(a, b, variant), permutation, permutation_seed)
    else:
        p = _tau_p_value(nc - nd, n)
    return tau, p


def _tau_stat(x, y, variant):
    nc, nd, ties_x, ties_y = pair_counts(x, y)
    n = len(x)
    n0 = n * (n - 1) // 2
    if variant == "a":
        return (nc - nd) / (0.5 * n * (n - 1))
    denom_sq = (n0 - ties_x) * (n0 - ties_y)
    return 0.0 if denom_sq == 0 else (nc - nd) / math.sqrt(denom_sq)


def average_ranks(x) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their positions."""
    x = _as_vector(x, "x")
    n = len(x)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n, dtype=np.float64)
    sorted_x = x[order]
    i = 0
    while i < n:
        j = i
        while j < n and sorted_x[j] == sorted_x[i]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2.0  # positions i+1..j averaged
        i = j
    return ranks


def spearman_rho(
    x,
    y,
    permutation: int | None = None,
    permutation_seed: int = 0,
) -> tuple[float | None, float | None]:
    """Spearman's rho (average-rank ties) and a two-sided t-approximation p-value."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError("spearman_rho requires n >= 3")
    rx = average_ranks(x)
    ry = average_ranks(y)
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    sxx = float(np.sum(cx * cx))
    syy = float(np.sum(cy * cy))
    if sxx == 0.0 or syy == 0.0:
        return None, None
    rho = float(np.sum(cx * cy)) / math.sqrt(sxx * syy)
    if permutation is not None:
        p = _permutation_p(
            x, y, lambda a, b: _rho_stat(a, b), permutation, permutation_seed
        )
    else:
        if abs(rho) >= 1.0:
            p = 0.0
        else:
            t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
            p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return rho, p


def _rho_stat(x, y):
    rx = average_ranks(x)
    ry = average_ranks(y)
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    sxx = float(np.sum(cx * cx))
    syy = float(np.sum(cy * cy))
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    return float(np.sum(cx * cy)) / math.sqrt(sxx * syy)


def _permutation_p(x, y, stat, n_shuffles: int, seed: int) -> float:
    observed = abs(stat(x, y))
    rng = np.random.default_rng(seed)
    hits = 0
    y = np.array(y)
    for _ in range(n_shuffles):
        rng.shuffle(y)
        if abs(stat(x, y)) >= observed:
            hits += 1
    return (hits + 1) / (n_shuffles + 1)


def correlate_rollout(trajectory, x_channel: str, y_channel: str, variant: str = "b") -> CorrelationReport:
    """Rank-correlate two named per-step channels of a trajectory."""
    x = trajectory.channel(x_channel)
    y = trajectory.channel(y_channel)
    if len(x) < 3:
        raise ValueError("correlate_rollout requires a trajectory with >= 3 steps")
    return correlate_channels(x, y, x_channel, y_channel, variant=variant)


def correlate_channels(x, y, x_name: str, y_name: str, variant: str = "b") -> CorrelationReport:
    """CorrelationReport for two already-extracted channels."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    tau, p_tau = kendall_tau(x, y, variant=variant)
    rho, p_rho = spearman_rho(x, y)
    _, _, ties_x, ties_y = pair_counts(x, y)
    return CorrelationReport(
        tau=tau,
        rho=rho,
        p_tau=p_tau,
        p_rho=p_rho,
        n=len(x),
        ties_x=ties_x,
        ties_y=ties_y,
        variant=variant,
        x_channel=x_name,
        y_channel=y_name,
    )

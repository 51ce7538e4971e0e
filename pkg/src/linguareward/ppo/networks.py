"""Actor-critic MLPs (numpy forward/backward) and Gaussian policy math.

Both networks are 2-hidden-layer tanh MLPs (64 units each by default).  The
actor outputs the Gaussian mean; a state-independent log-standard-deviation
vector completes the policy.  Initialization is orthogonal with gain sqrt(2)
on hidden layers, 0.01 on the actor output, and 1.0 on the critic output;
log-std starts at 0 and is kept in [-5, 2].

Parameters live in a flat dict of named float64 arrays so checkpoints,
optimizers, and gradient checks all share one representation.
"""

from __future__ import annotations

import math

import numpy as np

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0

_LOG_2PI = math.log(2.0 * math.pi)

ACTOR_KEYS = ("actor.w1", "actor.b1", "actor.w2", "actor.b2", "actor.w_out", "actor.b_out")
CRITIC_KEYS = ("critic.w1", "critic.b1", "critic.w2", "critic.b2", "critic.w_out", "critic.b_out")


def orthogonal_init(n_in: int, n_out: int, gain: float, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n_in, n_out))
    flat = a if n_in >= n_out else a.T
    q, r = np.linalg.qr(flat)
    q = q * np.sign(np.diag(r))
    if n_in < n_out:
        q = q.T
    return gain * q


def init_policy_params(
    obs_dim: int,
    action_dim: int,
    hidden: tuple[int, int] = (64, 64),
    rng: np.random.Generator | None = None,
) -> dict[str, np.ndarray]:
    rng = rng or np.random.default_rng(0)
    h1, h2 = hidden
    sqrt2 = math.sqrt(2.0)
    return {
        "actor.w1": orthogonal_init(obs_dim, h1, sqrt2, rng),
        "actor.b1": np.zeros(h1),
        "actor.w2": orthogonal_init(h1, h2, sqrt2, rng),
        "actor.b2": np.zeros(h2),
        "actor.w_out": orthogonal_init(h2, action_dim, 0.01, rng),
        "actor.b_out": np.zeros(action_dim),
        "actor.log_std": np.zeros(action_dim),
        "critic.w1": orthogonal_init(obs_dim, h1, sqrt2, rng),
        "critic.b1": np.zeros(h1),
        "critic.w2": orthogonal_init(h1, h2, sqrt2, rng),
        "critic.b2": np.zeros(h2),
        "critic.w_out": orthogonal_init(h2, 1, 1.0, rng),
        "critic.b_out": np.zeros(1),
    }


def _mlp_forward(params: dict, prefix: str, x: np.ndarray):
    h1 = np.tanh(x @ params[f"{prefix}.w1"] + params[f"{prefix}.b1"])
    h2 = np.tanh(h1 @ params[f"{prefix}.w2"] + params[f"{prefix}.b2"])
    out = h2 @ params[f"{prefix}.w_out"] + params[f"{prefix}.b_out"]
    return out, (x, h1, h2)


def _mlp_backward(params: dict, prefix: str, cache, d_out: np.ndarray) -> dict[str, np.ndarray]:
    x, h1, h2 = cache
    grads = {
        f"{prefix}.w_out": h2.T @ d_out,
        f"{prefix}.b_out": d_out.sum(axis=0),
    }
    dh2 = d_out @ params[f"{prefix}.w_out"].T
    dz2 = dh2 * (1.0 - h2 * h2)
    grads[f"{prefix}.w2"] = h1.T @ dz2
    grads[f"{prefix}.b2"] = dz2.sum(axis=0)
    dh1 = dz2 @ params[f"{prefix}.w2"].T
    dz1 = dh1 * (1.0 - h1 * h1)
    grads[f"{prefix}.w1"] = x.T @ dz1
    grads[f"{prefix}.b1"] = dz1.sum(axis=0)
    return grads


def actor_forward(params: dict, obs: np.ndarray):
    """Gaussian mean for a batch of observations; returns (mean, cache)."""
    return _mlp_forward(params, "actor", obs)


def actor_backward(params: dict, cache, d_mean: np.ndarray) -> dict[str, np.ndarray]:
    return _mlp_backward(params, "actor", cache, d_mean)


def critic_forward(params: dict, obs: np.ndarray):
    """State values for a batch of observations; returns (values (n,), cache)."""
    out, cache = _mlp_forward(params, "critic", obs)
    return out[:, 0], cache


def critic_backward(params: dict, cache, d_value: np.ndarray) -> dict[str, np.ndarray]:
    return _mlp_backward(params, "critic", cache, d_value[:, None])


def gaussian_log_prob(actions: np.ndarray, mean: np.ndarray, log_std: np.ndarray) -> np.ndarray:
    """Per-sample log density of a diagonal Gaussian (summed over action dims)."""
    z = (actions - mean) * np.exp(-log_std)
    return (-0.5 * z * z - log_std - 0.5 * _LOG_2PI).sum(axis=1)


def gaussian_log_prob_backward(
    actions: np.ndarray, mean: np.ndarray, log_std: np.ndarray, d_logp: np.ndarray
):
    """Gradients of sum(d_logp * logp) w.r.t. mean and log_std."""
    inv_var = np.exp(-2.0 * log_std)
    diff = actions - mean
    d_mean = d_logp[:, None] * diff * inv_var
    d_log_std = (d_logp[:, None] * (diff * diff * inv_var - 1.0)).sum(axis=0)
    return d_mean, d_log_std


def gaussian_entropy(log_std: np.ndarray) -> float:
    """Closed-form entropy of the diagonal Gaussian (state-independent)."""
    return float(np.sum(log_std + 0.5 * (1.0 + _LOG_2PI)))

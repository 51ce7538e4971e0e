"""Clipped-surrogate PPO: configuration, update step, and training loop.

The update maximizes ``min(ratio*A, clip(ratio, 1-eps, 1+eps)*A)`` minus a
value-regression MSE weighted by ``value_coef`` plus an entropy bonus weighted
by ``entropy_coef``, with Adam and a global gradient-norm clip.  Advantages
are normalized per minibatch (the Stable-Baselines3 convention), which makes
the update invariant to the reward scale; the cosine rewards in [-1, 1] are
therefore used un-rescaled.

The training loop is sequential and deterministic: given the same seed,
config, and embedding backend, two runs produce identical logs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..environments.base import SolverBlowupError
from ..rng import SplitMix64
from .buffer import RolloutBuffer
from .networks import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    actor_backward,
    actor_forward,
    critic_backward,
    critic_forward,
    gaussian_entropy,
    gaussian_log_prob,
    gaussian_log_prob_backward,
    init_policy_params,
)

REWARD_MODES = ("semantic", "raw")


class TrainingError(RuntimeError):
    """Non-finite network output or loss; aborts the run with diagnostics."""


@dataclass
class PPOConfig:
    learning_rate: float = 3e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    epochs_per_update: int = 10
    minibatch_size: int = 64
    rollout_length: int = 2048
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    total_timesteps: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must be in [0, 1]")
        if self.clip_eps <= 0.0:
            raise ValueError("clip_eps must be > 0")
        for name in ("learning_rate", "epochs_per_update", "minibatch_size", "rollout_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.total_timesteps < 0:
            raise ValueError("total_timesteps must be >= 0")


@dataclass
class UpdateMetrics:
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            t=0,
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """In-place Adam update with bias correction."""
    state.t += 1
    bc1 = 1.0 - beta1**state.t
    bc2 = 1.0 - beta2**state.t
    for key, g in grads.items():
        m = state.m[key] = beta1 * state.m[key] + (1.0 - beta1) * g
        v = state.v[key] = beta2 * state.v[key] + (1.0 - beta2) * g * g
        params[key] -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def clip_grad_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients jointly so their global L2 norm is at most max_norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total


def explained_variance(pred, target):
    """1 - Var(target - pred)/Var(target); None when Var(target) is zero."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    if pred.size < 2:
        raise ValueError("explained variance requires at least 2 samples")
    var_target = float(np.var(target))
    if var_target == 0.0:
        return None
    return 1.0 - float(np.var(target - pred)) / var_target


def sample_action(params, obs, rng: np.random.Generator):
    """Sample from the Gaussian policy; returns (action, log_prob, value).

    The returned action is the raw Gaussian sample and the log-prob is its
    density, so stored (action, log_prob) pairs stay consistent and the PPO
    ratio is exactly 1 at the start of an update.  Clamping to the action box
    happens at the environment boundary; the boxes here are small, so the
    clamp stands in for a squash and no change-of-variables correction is
    applied.
    """
    obs = np.asarray(obs, dtype=np.float64)[None, :]
    mean, _ = actor_forward(params, obs)
    value, _ = critic_forward(params, obs)
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(value))):
        raise TrainingError(f"non-finite network output: mean={mean}, value={value}")
    log_std = params["actor.log_std"]
    raw = mean[0] + np.exp(log_std) * rng.standard_normal(mean.shape[1])
    log_prob = float(gaussian_log_prob(raw[None, :], mean, log_std)[0])
    return raw, log_prob, float(value[0])


def deterministic_action(params, obs, action_low: float, action_high: float) -> np.ndarray:
    """Policy mean clipped to the action box (evaluation-time action)."""
    mean, _ = actor_forward(params, np.asarray(obs, dtype=np.float64)[None, :])
    return np.clip(mean[0], action_low, action_high)


def ppo_update(
    params: dict[str, np.ndarray],
    buffer: RolloutBuffer,
    config: PPOConfig,
    adam_state: AdamState,
    rng: np.random.Generator,
):
    """One PPO update over the filled buffer; returns (params, UpdateMetrics)."""
    n = buffer.size
    eps = config.clip_eps
    policy_losses, value_losses, entropies, clip_fractions = [], [], [], []
    for epoch in range(config.epochs_per_update):
        perm = rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            mb = perm[start : start + config.minibatch_size]
            obs = buffer.observations[mb]
            actions = buffer.actions[mb]
            logp_old = buffer.log_probs[mb]
            returns = buffer.returns[mb]
            adv = buffer.advantages[mb]
            adv = (adv - adv.mean()) / (adv.std() + 1e-8)
            batch = len(mb)

            mean, actor_cache = actor_forward(params, obs)
            log_std = params["actor.log_std"]
            logp_new = gaussian_log_prob(actions, mean, log_std)
            ratio = np.exp(logp_new - logp_old)
            clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps)
            surr1 = ratio * adv
            surr2 = clipped * adv
            policy_loss = -float(np.minimum(surr1, surr2).mean())

            values, critic_cache = critic_forward(params, obs)
            value_err = values - returns
            value_loss = float(np.mean(value_err * value_err))
            entropy = gaussian_entropy(log_std)

            loss = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy
            if not math.isfinite(loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, minibatch {start // config.minibatch_size}"
                )

            # d(-mean(min(surr1, surr2)))/d(ratio): through ratio where the
            # unclipped branch is active, through clip'(ratio) otherwise
            use_unclipped = surr1 <= surr2
            inside_clip = (ratio > 1.0 - eps) & (ratio < 1.0 + eps)
            d_ratio = np.where(use_unclipped, adv, np.where(inside_clip, adv, 0.0)) * (
                -1.0 / batch
            )
            d_logp = d_ratio * ratio
            d_mean, d_log_std = gaussian_log_prob_backward(actions, mean, log_std, d_logp)
            d_log_std = d_log_std - config.entropy_coef  # entropy bonus: dH/dlog_std = 1
            grads = actor_backward(params, actor_cache, d_mean)
            grads["actor.log_std"] = d_log_std
            d_value = config.value_coef * 2.0 * value_err / batch
            grads.update(critic_backward(params, critic_cache, d_value))

            clip_grad_norm(grads, config.max_grad_norm)
            adam_step(params, grads, adam_state, config.learning_rate)
            np.clip(params["actor.log_std"], LOG_STD_MIN, LOG_STD_MAX, out=params["actor.log_std"])

            policy_losses.append(policy_loss)
            value_losses.append(value_loss)
            entropies.append(entropy)
            clip_fractions.append(float(np.mean(np.abs(ratio - 1.0) > eps)))

    metrics = UpdateMetrics(
        policy_loss=float(np.mean(policy_losses)),
        value_loss=float(np.mean(value_losses)),
        entropy=float(np.mean(entropies)),
        clip_fraction=float(np.mean(clip_fractions)),
    )
    return params, metrics


def config_sha256(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def read_train_log(path) -> list[dict]:
    """Parse a JSON Lines training log back into its update records."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def save_checkpoint(path_base, params: dict[str, np.ndarray], meta: dict) -> None:
    """Write ``<base>.npz`` (named tensors) and ``<base>.json`` (sidecar)."""
    path_base = Path(path_base)
    np.savez(str(path_base) + ".npz", **params)
    sidecar = dict(meta)
    sidecar["shapes"] = {k: list(v.shape) for k, v in params.items()}
    with open(str(path_base) + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def load_checkpoint(path):
    """Load ``(params, sidecar)`` from a ``.npz`` path or its base name."""
    path = str(path)
    base = path[: -len(".npz")] if path.endswith(".npz") else path
    with np.load(base + ".npz") as npz:
        params = {k: npz[k].astype(np.float64) for k in npz.files}
    sidecar_path = Path(base + ".json")
    meta = {}
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
        for key, shape in meta.get("shapes", {}).items():
            if key not in params or list(params[key].shape) != shape:
                raise ValueError(f"checkpoint {base}.npz does not match sidecar shape for {key!r}")
    return params, meta


def train(
    env,
    reward_mode: str,
    config: PPOConfig,
    log_path=None,
    checkpoint_dir=None,
    checkpoint_interval_updates: int | None = None,
    run_config: dict | None = None,
    hidden: tuple[int, int] = (64, 64),
):
    """Collect -> GAE -> update loop; returns (params, list of log records).

    ``reward_mode`` declares which channel ``env.step().reward`` carries:
    "semantic" expects a wrapped env that logs the classical reward in
    ``metrics["raw_reward"]``, "raw" a plain env.  Episode seeds derive
    deterministically from ``config.seed``.  A solver blowup ends the episode
    (terminal at the previous step) and training continues on a fresh one.
    """
    if reward_mode not in REWARD_MODES:
        raise ValueError(f"reward_mode must be one of {REWARD_MODES}")
    rng = np.random.default_rng(config.seed)
    seed_stream = SplitMix64(config.seed)
    params = init_policy_params(env.observation_dim, env.action_dim, hidden=hidden, rng=rng)
    adam_state = AdamState.for_params(params)
    buffer = RolloutBuffer(config.rollout_length, env.observation_dim, env.action_dim)

    n_updates = math.ceil(config.total_timesteps / config.rollout_length)
    records: list[dict] = []
    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    ckpt_dir = Path(checkpoint_dir) if checkpoint_dir else None
    if ckpt_dir:
        ckpt_dir.mkdir(parents=True, exist_ok=True)

    def checkpoint_meta(timesteps: int) -> dict:
        conf = run_config if run_config is not None else {"ppo": asdict(config)}
        return {
            "config_hash": config_sha256(conf),
            "step_count": timesteps,
            "config": conf,
            "reward_mode": reward_mode,
            "obs_dim": env.observation_dim,
            "action_dim": env.action_dim,
        }

    try:
        obs = env.reset(seed_stream.next_uint64() >> 1)
        ep_sem = 0.0
        ep_raw = 0.0
        for update in range(1, n_updates + 1):
            buffer.reset()
            done_sem: list[float] = []
            done_raw: list[float] = []
            while not buffer.full:
                action, log_prob, value = sample_action(params, obs, rng)
                try:
                    result = env.step(action)
                except SolverBlowupError:
                    # terminate the broken episode at its previous step and move on
                    if buffer.size > 0:
                        buffer.dones[buffer.size - 1] = True
                    obs = env.reset(seed_stream.next_uint64() >> 1)
                    ep_sem = 0.0
                    ep_raw = 0.0
                    continue
                reward = result.reward
                if result.done:
                    # episodes end by horizon truncation, not task failure:
                    # bootstrap the continuation value into the final reward
                    # (SB3's TimeLimit handling) so the cut does not inject a
                    # spurious terminal advantage
                    v_next, _ = critic_forward(
                        params, np.asarray(result.observation, dtype=np.float64)[None, :]
                    )
                    reward += config.gamma * float(v_next[0])
                buffer.add(obs, action, log_prob, value, reward, result.done)
                if reward_mode == "semantic":
                    ep_sem += result.reward
                    ep_raw += result.metrics["raw_reward"]
                else:
                    ep_raw += result.reward
                if result.done:
                    done_sem.append(ep_sem)
                    done_raw.append(ep_raw)
                    ep_sem = 0.0
                    ep_raw = 0.0
                    obs = env.reset(seed_stream.next_uint64() >> 1)
                else:
                    obs = result.observation

            if buffer.dones[-1]:
                last_value = 0.0
            else:
                v, _ = critic_forward(params, np.asarray(obs, dtype=np.float64)[None, :])
                last_value = float(v[0])
            buffer.compute_gae(last_value, config.gamma, config.gae_lambda)
            ev = explained_variance(buffer.values, buffer.returns)
            params, metrics = ppo_update(params, buffer, config, adam_state, rng)

            record = {
                "update": update,
                "timesteps": update * config.rollout_length,
                "mean_sem_reward": float(np.mean(done_sem))
                if (done_sem and reward_mode == "semantic")
                else None,
                "mean_raw_reward": float(np.mean(done_raw)) if done_raw else None,
                "ev": ev,
                "losses": {
                    "policy": metrics.policy_loss,
                    "value": metrics.value_loss,
                    "entropy": metrics.entropy,
                    "clip_fraction": metrics.clip_fraction,
                },
            }
            records.append(record)
            if log_fh:
                log_fh.write(json.dumps(record) + "\n")
                log_fh.flush()
            if (
                ckpt_dir
                and checkpoint_interval_updates
                and update % checkpoint_interval_updates == 0
            ):
                save_checkpoint(
                    ckpt_dir / f"ckpt_{update * config.rollout_length:010d}",
                    params,
                    checkpoint_meta(update * config.rollout_length),
                )
        if ckpt_dir:
            save_checkpoint(
                ckpt_dir / "ckpt_final",
                params,
                checkpoint_meta(n_updates * config.rollout_length),
            )
    finally:
        if log_fh:
            log_fh.close()
    return params, records

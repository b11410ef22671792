"""Gaussian policy-gradient baseline for the power allocation task.

A plain REINFORCE agent: an MLP maps the environment vector to mean logits,
actions are the mean plus fixed-std Gaussian noise, and the score-function
gradient is weighted by reward minus a moving-average baseline. Serves as
the deep-reinforcement-learning comparison for the diffusion policy.
"""

from __future__ import annotations

import logging

import numpy as np

from .allocator import Budget
from .channel import ChannelParams, CodingParams
from .corpus import Corpus
from .diffusion import TrainConfig, encode_batch, env_dim, env_rewards, environments_from
from .nets import MLP, Adam

logger = logging.getLogger(__name__)

BASELINE_DECAY = 0.9


class GaussianPolicy:
    """Mean network plus a fixed exploration std over allocation logits."""

    def __init__(self, n_max: int, env_dim: int, std: float, hidden=(128, 128), seed=0):
        if std <= 0:
            raise ValueError("GaussianPolicy requires std > 0")
        self.n_max = n_max
        self.env_dim = env_dim
        self.std = std
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.mlp = MLP([env_dim, *hidden, n_max], rng)

    def mean(self, env_mat: np.ndarray):
        return self.mlp.forward(np.atleast_2d(env_mat))

    def sample(self, env_mat: np.ndarray, rng: np.random.Generator):
        mu, cache = self.mean(env_mat)
        actions = mu + self.std * rng.standard_normal(mu.shape)
        return actions, mu, cache

    @property
    def params(self):
        return self.mlp.params


def pg_surrogate_loss(policy: GaussianPolicy, env_mat, actions, advantages):
    """REINFORCE surrogate: -mean(adv * log pi(a | e)) and its gradients.

    Actions and advantages are treated as constants; the gradient w.r.t.
    the mean-net parameters equals the score-function estimator.
    """
    mu, cache = policy.mean(env_mat)
    actions = np.atleast_2d(np.asarray(actions, dtype=float))
    adv = np.asarray(advantages, dtype=float)
    batch = actions.shape[0]
    var = policy.std**2
    # log pi = -||a - mu||^2 / (2 var) + const
    logp = -((actions - mu) ** 2).sum(axis=1) / (2.0 * var)
    loss = float(-(adv * logp).mean())
    g_mu = -adv[:, None] * (actions - mu) / var / batch
    _, grads = policy.mlp.backward(cache, g_mu)
    return loss, grads


def pg_baseline_train(corpus: Corpus, budget: Budget, chan: ChannelParams,
                      coding: CodingParams, config: TrainConfig):
    """Train the REINFORCE baseline; mirrors the diffusion trainer's contract.

    Returns (policy, per-epoch mean quality curve); deterministic per seed.
    """
    envs = environments_from(corpus, budget, chan, coding)
    n_max = config.n_max if config.n_max is not None else max(e.n for e in envs)
    dim = env_dim(n_max)
    # REINFORCE needs persistent exploration, so the std is fixed rather
    # than decayed.
    std = config.exploration_std if config.exploration_std > 0 else 0.1

    seeds = np.random.SeedSequence(config.seed).spawn(3)
    policy = GaussianPolicy(n_max, dim, std, seed=np.random.default_rng(seeds[0]))
    rng_batch = np.random.default_rng(seeds[1])
    rng_act = np.random.default_rng(seeds[2])
    optimizer = Adam(policy.params, config.actor_lr)

    env_mat_all, mask_all = encode_batch(envs, n_max)
    baseline = None
    curve: list[float] = []
    for epoch in range(config.epochs):
        idx = rng_batch.integers(0, len(envs), size=config.batch_size)
        batch_envs = [envs[i] for i in idx]
        env_mat = env_mat_all[idx]
        mask = mask_all[idx]

        actions, _, _ = policy.sample(env_mat, rng_act)
        rewards = env_rewards(batch_envs, actions, mask, n_max)
        curve.append(float(rewards.mean()))

        if baseline is None:
            baseline = float(rewards.mean())
        advantages = rewards - baseline
        baseline = BASELINE_DECAY * baseline + (1.0 - BASELINE_DECAY) * float(rewards.mean())

        _, grads = pg_surrogate_loss(policy, env_mat, actions, advantages)
        if all(np.all(np.isfinite(g)) for g in grads):
            optimizer.step(policy.params, grads)
        else:
            logger.warning("pg_baseline_train: non-finite gradient at epoch %d, skipping", epoch)

    return policy, curve


def evaluate_pg_policy(policy: GaussianPolicy, envs, seed=0):
    """Mean quality of the policy's mean action (no exploration noise)."""
    env_mat, mask = encode_batch(envs, policy.n_max)
    mu, _ = policy.mean(env_mat)
    rewards = env_rewards(envs, mu, mask, policy.n_max)
    return float(rewards.mean()), rewards

"""Conditional diffusion policy for per-triplet power allocation.

The policy samples allocation logits by running a learned reverse denoising
chain conditioned on an environment vector; logits map onto the budget
simplex through a masked softmax. A value network regresses observed
transmission quality and supplies the actor gradient, which is
backpropagated through every denoising step.

Each image transmission is treated as a one-step episode: the reward is the
immediate transmission quality, so the critic target is plain regression.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import quality
from .allocator import Budget, softmax_fractions
from .channel import ChannelParams, CodingParams
from .corpus import Corpus
from .nets import MLP, Adam, timestep_embedding

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "semra-checkpoint"
CHECKPOINT_VERSION = 1

# Environment features appended after the padded importances.
_ENV_EXTRA_DIM = 5


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class NoiseSchedule:
    """Beta schedule with its derived alpha products and posterior stddevs.

    Step indices are 1-based: step t uses betas[t-1]. sigmas[0] is 0, so the
    final denoising update adds no noise.
    """

    betas: np.ndarray
    alphas: np.ndarray
    alpha_bar: np.ndarray
    sigmas: np.ndarray

    @classmethod
    def from_betas(cls, betas) -> "NoiseSchedule":
        betas = np.asarray(betas, dtype=float)
        if betas.ndim != 1 or betas.size < 1:
            raise ValueError("betas must be a non-empty 1-D array")
        if not (np.all(betas > 0) and np.all(betas < 1)):
            raise ValueError("betas must lie in (0, 1)")
        if np.any(np.diff(betas) < 0):
            raise ValueError("betas must be non-decreasing")
        alphas = 1.0 - betas
        alpha_bar = np.cumprod(alphas)
        if np.any(np.diff(alpha_bar) >= 0):
            raise ValueError("cumulative alpha products must be strictly decreasing")
        alpha_bar_prev = np.concatenate([[1.0], alpha_bar[:-1]])
        sigmas = np.sqrt(betas * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar))
        return cls(betas, alphas, alpha_bar, sigmas)

    @classmethod
    def linear(cls, steps: int, beta_start: float = 1e-4, beta_end: float = 0.2) -> "NoiseSchedule":
        if steps < 1:
            raise ValueError("steps must be >= 1")
        return cls.from_betas(np.linspace(beta_start, beta_end, steps))

    @property
    def steps(self) -> int:
        return len(self.betas)


@dataclass(frozen=True)
class Environment:
    """One allocation task: a user's transmission of one image's triplets."""

    importances: tuple[float, ...]
    gain: float
    budget_w: float
    noise_power: float
    fading: str
    coding: CodingParams

    def __post_init__(self):
        object.__setattr__(self, "importances", tuple(float(v) for v in self.importances))
        if len(self.importances) < 1:
            raise ValueError("environment needs at least one triplet")

    @property
    def n(self) -> int:
        return len(self.importances)


def env_dim(n_max: int) -> int:
    return n_max + _ENV_EXTRA_DIM


def encode_environment(env: Environment, n_max: int) -> np.ndarray:
    """Fixed-length conditioning vector: padded importances then channel,
    budget, triplet count, and coding features (all roughly unit scale)."""
    if env.n > n_max:
        raise ValueError(f"environment has {env.n} triplets but n_max={n_max}")
    imps = np.zeros(n_max)
    imps[: env.n] = env.importances
    extras = np.array(
        [
            np.log10(env.gain / env.noise_power),
            env.budget_w / 1000.0,
            env.n / n_max,
            env.coding.l_t / 1024.0,
            env.coding.l_e / env.coding.l_t,
        ]
    )
    return np.concatenate([imps, extras])


def encode_batch(envs: list[Environment], n_max: int):
    """Stacked environment vectors and the matching active-triplet mask."""
    mat = np.stack([encode_environment(e, n_max) for e in envs])
    mask = np.zeros((len(envs), n_max), dtype=bool)
    for i, e in enumerate(envs):
        mask[i, : e.n] = True
    return mat, mask


class DenoiserNet:
    """Predicts the noise component of noisy allocation logits.

    Input is the concatenation of the noisy logits, a sinusoidal embedding
    of the step index, and the environment vector.
    """

    def __init__(self, n_max: int, env_dim: int, hidden=(128, 128, 128),
                 t_emb_dim: int = 16, seed=0):
        self.n_max = n_max
        self.env_dim = env_dim
        self.t_emb_dim = t_emb_dim
        sizes = [n_max + t_emb_dim + env_dim, *hidden, n_max]
        self.mlp = MLP(sizes, _as_rng(seed))

    def forward(self, x: np.ndarray, t: int, env_mat: np.ndarray):
        x = np.atleast_2d(x)
        env_mat = np.atleast_2d(env_mat)
        emb = np.broadcast_to(timestep_embedding(t, self.t_emb_dim), (x.shape[0], self.t_emb_dim))
        features = np.concatenate([x, emb, env_mat], axis=1)
        return self.mlp.forward(features)

    def backward(self, cache, grad_eps: np.ndarray):
        """Returns (gradient wrt the noisy logits, parameter gradients)."""
        g_features, grads = self.mlp.backward(cache, grad_eps)
        return g_features[:, : self.n_max], grads

    @property
    def params(self):
        return self.mlp.params


class ValueNet:
    """Critic mapping (environment, allocation logits) to expected quality.

    Logits enter through the masked softmax, so the estimate is invariant to
    constant logit shifts, exactly like the reward itself.
    """

    def __init__(self, n_max: int, env_dim: int, hidden=(128, 128), seed=0):
        self.n_max = n_max
        self.env_dim = env_dim
        self.mlp = MLP([env_dim + n_max, *hidden, 1], _as_rng(seed))

    def forward(self, env_mat: np.ndarray, logits: np.ndarray, mask: np.ndarray):
        env_mat = np.atleast_2d(env_mat)
        logits = np.atleast_2d(logits)
        mask = np.atleast_2d(mask)
        fractions = softmax_fractions(logits, mask)
        out, mlp_cache = self.mlp.forward(np.concatenate([env_mat, fractions], axis=1))
        return out[:, 0], (mlp_cache, fractions)

    def backward(self, cache, grad_q: np.ndarray):
        """Returns (parameter gradients, gradient wrt the logits)."""
        mlp_cache, fractions = cache
        g_features, grads = self.mlp.backward(mlp_cache, np.asarray(grad_q)[:, None])
        g_frac = g_features[:, self.env_dim :]
        # Softmax Jacobian; padded entries have fraction exactly 0 and so
        # receive zero gradient.
        inner = (fractions * g_frac).sum(axis=1, keepdims=True)
        g_logits = fractions * (g_frac - inner)
        return grads, g_logits

    @property
    def params(self):
        return self.mlp.params


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the diffusion-policy trainer.

    The reward surface has one local optimum per "set of triplets worth
    rescuing", so training interleaves three ingredients: a critic warm-up
    phase on broadly scattered logits, epsilon-style global exploration that
    decays linearly, and distillation of the best allocation found so far
    for each environment back into the denoiser. The defaults were tuned so
    N<=4 instances reliably reach the exhaustive-search optimum.
    """

    epochs: int
    batch_size: int = 32
    candidates: int = 4
    actor_lr: float = 2e-4
    critic_lr: float = 1e-3
    exploration_std: float = 0.3
    exploration_floor: float = 0.02
    global_frac: float = 0.5
    global_scale: tuple[float, float] = (0.2, 2.5)
    warmup_frac: float = 0.2
    polish_frac: float = 0.12
    critic_updates: int = 3
    distill_weight: float = 1.0
    seed: int = 0
    steps: int = 12
    n_max: int | None = None
    beta_start: float = 1e-4
    beta_end: float = 0.2
    denoiser_hidden: tuple[int, ...] = (128, 128, 128)
    critic_hidden: tuple[int, ...] = (128, 128)
    t_emb_dim: int = 16

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1 or self.steps < 1 or self.candidates < 1:
            raise ValueError("batch_size, candidates, and steps must be >= 1")
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            raise ValueError("learning rates must be > 0")
        if self.exploration_std < 0 or self.exploration_floor < 0:
            raise ValueError("exploration noise must be >= 0")
        if not 0.0 <= self.global_frac <= 1.0 or not 0.0 <= self.warmup_frac < 1.0:
            raise ValueError("global_frac and warmup_frac must be fractions")
        if not 0.0 <= self.polish_frac < 1.0 or self.warmup_frac + self.polish_frac >= 1.0:
            raise ValueError("polish_frac must be a fraction and leave room for joint epochs")
        if self.critic_updates < 1:
            raise ValueError("critic_updates must be >= 1")


def forward_noising(x0: np.ndarray, t: int, schedule: NoiseSchedule, noise: np.ndarray) -> np.ndarray:
    """Closed-form forward marginal: sqrt(abar_t) * x0 + sqrt(1 - abar_t) * noise."""
    if not 1 <= t <= schedule.steps:
        raise ValueError(f"step {t} outside 1..{schedule.steps}")
    ab = schedule.alpha_bar[t - 1]
    return np.sqrt(ab) * np.asarray(x0, dtype=float) + np.sqrt(1.0 - ab) * np.asarray(noise, dtype=float)


def reverse_sample_batch(env_mat: np.ndarray, net: DenoiserNet, schedule: NoiseSchedule,
                         rng: np.random.Generator, with_cache: bool = False):
    """Ancestral sampling of allocation logits for a batch of environments.

    Starts from standard normal logits and applies ``schedule.steps``
    denoising updates. With ``with_cache`` the per-step forward caches are
    kept so :func:`chain_backward` can push gradients through the chain.
    """
    env_mat = np.atleast_2d(env_mat)
    batch = env_mat.shape[0]
    x = rng.standard_normal((batch, net.n_max))
    caches = [] if with_cache else None
    for t in range(schedule.steps, 0, -1):
        i = t - 1
        eps, cache = net.forward(x, t, env_mat)
        mean = (x - schedule.betas[i] / np.sqrt(1.0 - schedule.alpha_bar[i]) * eps) / np.sqrt(
            schedule.alphas[i]
        )
        # Noise drawn every step keeps the stream layout fixed; sigma is 0
        # at the final step.
        z = rng.standard_normal((batch, net.n_max))
        x = mean + schedule.sigmas[i] * z
        if with_cache:
            caches.append((t, cache))
    return (x, caches) if with_cache else x


def reverse_sample(env_vector: np.ndarray, net: DenoiserNet, schedule: NoiseSchedule, seed) -> np.ndarray:
    """Sample one allocation-logit vector for an encoded environment."""
    env_vector = np.asarray(env_vector, dtype=float)
    if env_vector.shape != (net.env_dim,):
        raise ValueError(f"environment vector shape {env_vector.shape} != ({net.env_dim},)")
    x = reverse_sample_batch(env_vector[None, :], net, schedule, _as_rng(seed))
    return x[0]


def chain_backward(caches, net: DenoiserNet, schedule: NoiseSchedule, grad_x0: np.ndarray):
    """Backpropagate d(loss)/d(x0) through the full denoising chain.

    Returns parameter gradients for the denoiser. Each step contributes both
    directly through its noise prediction and recursively through the next
    noisy iterate.
    """
    grads = [np.zeros_like(p) for p in net.params]
    g = np.asarray(grad_x0, dtype=float)
    for t, cache in reversed(caches):
        i = t - 1
        a = 1.0 / np.sqrt(schedule.alphas[i])
        c = a * schedule.betas[i] / np.sqrt(1.0 - schedule.alpha_bar[i])
        g_x_via_eps, step_grads = net.backward(cache, -c * g)
        for acc, sg in zip(grads, step_grads):
            acc += sg
        g = a * g + g_x_via_eps
    return grads


def critic_loss(value_net: ValueNet, batch):
    """MSE between critic estimates and observed rewards, with gradients.

    ``batch`` is a non-empty list of (Environment, logits, reward) tuples.
    Returns (loss, parameter gradients).
    """
    if not batch:
        raise ValueError("critic_loss requires a non-empty batch")
    envs = [b[0] for b in batch]
    logits = np.stack([np.asarray(b[1], dtype=float) for b in batch])
    rewards = np.array([b[2] for b in batch], dtype=float)
    env_mat, mask = encode_batch(envs, value_net.n_max)
    loss, grads, _ = _critic_loss_mats(value_net, env_mat, logits, mask, rewards)
    return loss, grads


def _critic_loss_mats(value_net: ValueNet, env_mat, logits, mask, rewards):
    q, cache = value_net.forward(env_mat, logits, mask)
    err = q - rewards
    loss = float(np.mean(err**2))
    grads, g_logits = value_net.backward(cache, 2.0 * err / err.size)
    return loss, grads, g_logits


def actor_step(denoiser: DenoiserNet, value_net, env_mat, mask, schedule: NoiseSchedule,
               optimizer: Adam, rng: np.random.Generator):
    """One ascent step on the critic's estimate of freshly sampled actions.

    The critic only needs ``forward``/``backward``; the gradient flows from
    its logit input through every denoising step. Non-finite gradients are
    reported and the step is skipped.
    """
    x0, caches = reverse_sample_batch(env_mat, denoiser, schedule, rng, with_cache=True)
    q, qcache = value_net.forward(env_mat, x0, mask)
    _, g_x0 = value_net.backward(qcache, np.full(q.shape, -1.0 / q.size))
    grads = chain_backward(caches, denoiser, schedule, g_x0)
    if not all(np.all(np.isfinite(g)) for g in grads):
        logger.warning("actor_step: non-finite gradient, skipping update")
        return {"actor_objective": float(np.mean(q)), "skipped": True, "x0": x0}
    optimizer.step(denoiser.params, grads)
    return {"actor_objective": float(np.mean(q)), "skipped": False, "x0": x0}


def environments_from(corpus: Corpus, budget: Budget, chan: ChannelParams,
                      coding: CodingParams) -> list[Environment]:
    """One environment per (record, user) pair under equal per-user budgets."""
    gains = np.atleast_1d(np.asarray(chan.pathloss_gain, dtype=float))
    per_user = budget.total_power / gains.size
    return [
        Environment(
            importances=tuple(t.importance for t in rec.triplets),
            gain=float(g),
            budget_w=per_user,
            noise_power=chan.noise_power,
            fading=chan.fading,
            coding=coding,
        )
        for rec in corpus.records
        for g in gains
    ]


def _env_arrays(envs: list[Environment], n_max: int):
    imps = np.zeros((len(envs), n_max))
    for i, e in enumerate(envs):
        imps[i, : e.n] = e.importances
    gains = np.array([e.gain for e in envs])
    budgets = np.array([e.budget_w for e in envs])
    return imps, gains, budgets


def env_rewards(envs: list[Environment], logits: np.ndarray, mask: np.ndarray, n_max: int) -> np.ndarray:
    """Transmission quality of the allocations induced by a batch of logits.

    All environments in the batch must share noise, fading, and coding
    (importances, gain, and budget may vary), which holds for any batch
    drawn from :func:`environments_from`.
    """
    imps, gains, budgets = _env_arrays(envs, n_max)
    fractions = softmax_fractions(logits, mask)
    powers = fractions * budgets[:, None]
    e0 = envs[0]
    return quality.batch_total(powers, imps, gains, e0.noise_power, e0.fading, e0.coding)


def _sample_global_logits(rng: np.random.Generator, batch: int, n_max: int,
                          scale_range: tuple[float, float]) -> np.ndarray:
    """Exploration logits at log-uniform random scale.

    Small scales land near the uniform split, large scales near simplex
    vertices, so the critic sees the whole allocation landscape.
    """
    lo, hi = scale_range
    scales = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(batch, 1)))
    return scales * rng.standard_normal((batch, n_max))


def denoise_match_grads(denoiser: DenoiserNet, schedule: NoiseSchedule, env_rows: np.ndarray,
                        targets: np.ndarray, rng: np.random.Generator):
    """Gradients of the standard denoising regression toward target logits.

    Draws one (step, noise) pair per target, corrupts the target with the
    forward marginal, and differentiates the mean squared noise-prediction
    error. Used to distill each environment's best-found allocation into
    the policy.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    env_rows = np.atleast_2d(env_rows)
    batch = targets.shape[0]
    ts = rng.integers(1, schedule.steps + 1, size=batch)
    noise = rng.standard_normal(targets.shape)
    grads = [np.zeros_like(p) for p in denoiser.params]
    total = 0.0
    denom = batch * denoiser.n_max
    for t in np.unique(ts):
        rows = np.flatnonzero(ts == t)
        ab = schedule.alpha_bar[t - 1]
        x_t = np.sqrt(ab) * targets[rows] + np.sqrt(1.0 - ab) * noise[rows]
        pred, cache = denoiser.forward(x_t, int(t), env_rows[rows])
        diff = pred - noise[rows]
        total += float((diff**2).sum())
        _, step_grads = denoiser.backward(cache, 2.0 * diff / denom)
        for acc, g in zip(grads, step_grads):
            acc += g
    return total / denom, grads


def train(corpus: Corpus, budget: Budget, chan: ChannelParams, coding: CodingParams,
          config: TrainConfig):
    """Train the diffusion policy against the value network.

    Epochs split into three phases. During the warm-up fraction the critic
    regresses rewards of globally scattered logits while the actor waits.
    In the joint phase each epoch samples a few environments with several
    chain candidates each, acts with decaying exploration noise (and a
    decaying fraction of fresh global probes), updates the critic, then
    updates the actor with the critic's chain gradient plus distillation
    toward the best allocation observed so far per environment. The final
    polish fraction refits the critic on noise-free policy samples so its
    candidate ranking is sharp at evaluation time. Returns
    (denoiser, value_net, per-epoch mean quality curve). Deterministic for
    a fixed config and corpus.
    """
    envs = environments_from(corpus, budget, chan, coding)
    n_max = config.n_max if config.n_max is not None else max(e.n for e in envs)
    if max(e.n for e in envs) > n_max:
        raise ValueError("corpus contains records with more triplets than n_max")
    dim = env_dim(n_max)

    seeds = np.random.SeedSequence(config.seed).spawn(5)
    denoiser = DenoiserNet(n_max, dim, config.denoiser_hidden, config.t_emb_dim,
                           seed=np.random.default_rng(seeds[0]))
    value_net = ValueNet(n_max, dim, config.critic_hidden, seed=np.random.default_rng(seeds[1]))
    schedule = NoiseSchedule.linear(config.steps, config.beta_start, config.beta_end)
    rng_batch = np.random.default_rng(seeds[2])
    rng_chain = np.random.default_rng(seeds[3])
    rng_explore = np.random.default_rng(seeds[4])
    opt_actor = Adam(denoiser.params, config.actor_lr)
    opt_critic = Adam(value_net.params, config.critic_lr)

    env_mat_all, mask_all = encode_batch(envs, n_max)
    n_env = len(envs)
    envs_per_epoch = max(1, config.batch_size // config.candidates)
    warmup = int(round(config.warmup_frac * config.epochs))
    # Final critic-only phase on noise-free policy samples, so candidate
    # ranking at evaluation time is accurate where the policy actually lives.
    polish_start = config.epochs - int(round(config.polish_frac * config.epochs))

    # Best allocation logits observed per environment; rewards are
    # deterministic in (env, logits), so champions only ever improve.
    champion_logits = np.zeros((n_env, n_max))
    champion_reward = np.full(n_env, -np.inf)

    def remember(idx, logits, rewards):
        for j, i in enumerate(idx):
            if rewards[j] > champion_reward[i]:
                champion_reward[i] = rewards[j]
                champion_logits[i] = logits[j]

    def critic_fit(env_mat, behavior, mask, rewards, updates):
        for _ in range(updates):
            _, grads, _ = _critic_loss_mats(value_net, env_mat, behavior, mask, rewards)
            if not all(np.all(np.isfinite(g)) for g in grads):
                logger.warning("train: non-finite critic gradient, skipping update")
                return
            opt_critic.step(value_net.params, grads)

    curve: list[float] = []
    for epoch in range(config.epochs):
        if epoch < warmup:
            idx = rng_batch.integers(0, n_env, size=config.batch_size)
            env_mat, mask = env_mat_all[idx], mask_all[idx]
            behavior = _sample_global_logits(rng_explore, config.batch_size, n_max,
                                             config.global_scale)
            rewards = env_rewards([envs[i] for i in idx], behavior, mask, n_max)
            remember(idx, behavior, rewards)
            curve.append(float(rewards.mean()))
            critic_fit(env_mat, behavior, mask, rewards, 2)
            continue

        if epoch >= polish_start:
            idx = rng_batch.integers(0, n_env, size=config.batch_size)
            env_mat, mask = env_mat_all[idx], mask_all[idx]
            x0 = reverse_sample_batch(env_mat, denoiser, schedule, rng_chain)
            rewards = env_rewards([envs[i] for i in idx], x0, mask, n_max)
            remember(idx, x0, rewards)
            curve.append(float(rewards.mean()))
            critic_fit(env_mat, x0, mask, rewards, config.critic_updates)
            continue

        env_idx = rng_batch.integers(0, n_env, size=envs_per_epoch)
        idx = np.repeat(env_idx, config.candidates)
        env_mat, mask = env_mat_all[idx], mask_all[idx]
        batch = len(idx)

        x0, caches = reverse_sample_batch(env_mat, denoiser, schedule, rng_chain, with_cache=True)
        progress = (epoch - warmup) / max(polish_start - 1 - warmup, 1)
        std = config.exploration_std * (1.0 - progress) + config.exploration_floor
        behavior = x0 + std * rng_explore.standard_normal(x0.shape)
        probe = rng_explore.random(batch) < config.global_frac * (1.0 - progress)
        behavior = np.where(probe[:, None],
                            _sample_global_logits(rng_explore, batch, n_max, config.global_scale),
                            behavior)
        rewards = env_rewards([envs[i] for i in idx], behavior, mask, n_max)
        remember(idx, behavior, rewards)
        # The curve tracks the policy's own samples; exploration probes
        # train the critic but would mask the policy's progress.
        curve.append(float(env_rewards([envs[i] for i in idx], x0, mask, n_max).mean()))

        critic_fit(env_mat, behavior, mask, rewards, config.critic_updates)

        q, qcache = value_net.forward(env_mat, x0, mask)
        _, g_x0 = value_net.backward(qcache, np.full(q.shape, -1.0 / q.size))
        actor_grads = chain_backward(caches, denoiser, schedule, g_x0)
        _, distill_grads = denoise_match_grads(denoiser, schedule, env_mat_all[env_idx],
                                               champion_logits[env_idx], rng_explore)
        combined = [a + config.distill_weight * d for a, d in zip(actor_grads, distill_grads)]
        if all(np.all(np.isfinite(g)) for g in combined):
            opt_actor.step(denoiser.params, combined)
        else:
            logger.warning("train: non-finite actor gradient at epoch %d, skipping", epoch)

    return denoiser, value_net, curve


def evaluate_policy(denoiser: DenoiserNet, schedule: NoiseSchedule, envs: list[Environment],
                    seed, samples: int = 16, value_net: ValueNet | None = None):
    """Mean quality of the policy over environments, without exploration noise.

    Each environment is sampled ``samples`` times through the chain. With a
    ``value_net`` the critic picks the candidate to transmit per environment
    (the deployed decision rule); without one the sample qualities are
    averaged. Returns (overall mean, per-environment values).
    """
    n_max = denoiser.n_max
    env_mat, mask = encode_batch(envs, n_max)
    rng = _as_rng(seed)
    rep_envs = [e for e in envs for _ in range(samples)]
    rep_mat = np.repeat(env_mat, samples, axis=0)
    rep_mask = np.repeat(mask, samples, axis=0)
    logits = reverse_sample_batch(rep_mat, denoiser, schedule, rng)
    rewards = env_rewards(rep_envs, logits, rep_mask, n_max)
    by_env = rewards.reshape(len(envs), samples)
    if value_net is None:
        per_env = by_env.mean(axis=1)
    else:
        scores, _ = value_net.forward(rep_mat, logits, rep_mask)
        pick = scores.reshape(len(envs), samples).argmax(axis=1)
        per_env = by_env[np.arange(len(envs)), pick]
    return float(per_env.mean()), per_env


def save_checkpoint(path, denoiser: DenoiserNet, value_net: ValueNet,
                    schedule: NoiseSchedule, config: TrainConfig) -> None:
    """Write nets, schedule, and the training config to a versioned .npz."""
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "n_max": denoiser.n_max,
        "env_dim": denoiser.env_dim,
        "t_emb_dim": denoiser.t_emb_dim,
        "denoiser_sizes": denoiser.mlp.sizes,
        "critic_sizes": value_net.mlp.sizes,
        "train_config": asdict(config),
    }
    arrays = {"betas": schedule.betas}
    for i, p in enumerate(denoiser.params):
        arrays[f"denoiser_{i}"] = p
    for i, p in enumerate(value_net.params):
        arrays[f"critic_{i}"] = p
    np.savez(Path(path), meta=json.dumps(meta), **arrays)


def load_checkpoint(path):
    """Restore (denoiser, value_net, schedule, config) from a checkpoint."""
    with np.load(Path(path), allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"{path}: not a checkpoint file")
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {meta.get('version')}")
        cfg_dict = dict(meta["train_config"])
        for key in ("denoiser_hidden", "critic_hidden", "global_scale"):
            cfg_dict[key] = tuple(cfg_dict[key])
        config = TrainConfig(**cfg_dict)
        denoiser = DenoiserNet(meta["n_max"], meta["env_dim"],
                               tuple(meta["denoiser_sizes"][1:-1]), meta["t_emb_dim"], seed=0)
        value_net = ValueNet(meta["n_max"], meta["env_dim"],
                             tuple(meta["critic_sizes"][1:-1]), seed=0)
        for i in range(len(denoiser.params)):
            denoiser.params[i] = data[f"denoiser_{i}"].copy()
        for i in range(len(value_net.params)):
            value_net.params[i] = data[f"critic_{i}"].copy()
        schedule = NoiseSchedule.from_betas(data["betas"])
    return denoiser, value_net, schedule, config

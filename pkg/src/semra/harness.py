"""Experiment runner: seeded sweeps over schemes, budgets, and denoising steps.

Three experiment kinds mirror the study's figures: training-convergence
curves at a fixed budget, a power sweep comparing final qualities across
schemes, and convergence curves across budgets with a convergence-epoch
estimate. Results land in a CSV with fixed columns plus one SVG chart per
experiment; identical configs reproduce identical bytes.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import svgchart
from .allocator import Budget, equal_allocation, importance_allocation
from .channel import ChannelParams, CodingParams, draw_pathloss_gains
from .corpus import Corpus, load_corpus, synth_corpus
from .diffusion import (
    NoiseSchedule,
    TrainConfig,
    environments_from,
    evaluate_policy,
    train,
)
from .pg import evaluate_pg_policy, pg_baseline_train
from .quality import quality_upper_bound, transmission_quality

CSV_HEADER = "scheme,T,budget_w,seed,epoch,mean_quality"
SCHEMES = ("equal", "importance", "diffusion", "pg")
EXPERIMENTS = ("convergence", "power_sweep", "budget_convergence")

# Convergence epoch: first epoch whose curve value is within this relative
# margin of the mean over the final tail epochs.
CONVERGENCE_MARGIN = 0.02
CONVERGENCE_TAIL = 20

OUT_DIR_ENV_VAR = "SEMRA_OUT_DIR"


class ConfigError(ValueError):
    """Raised for invalid experiment configuration files."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    corpus_path: str | None = None
    synth_images: int = 6
    synth_triplets: int = 4
    synth_seed: int = 11
    users: int = 4
    noise_power: float = 1e-5
    gain_low: float = 1e-7
    gain_high: float = 1e-6
    fading: str = "rayleigh"
    l_t: int = 512
    l_e: int = 26
    budgets_w: tuple[float, ...] = (2000.0,)
    schemes: tuple[str, ...] = ("equal", "importance", "diffusion")
    t_list: tuple[int, ...] = (12,)
    epochs: int = 600
    batch_size: int = 48
    candidates: int = 4
    actor_lr: float = 2e-4
    critic_lr: float = 1e-3
    exploration_std: float = 0.3
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    eval_samples: int = 16
    out_dir: str = "results"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not self.budgets_w or not self.schemes or not self.seeds or not self.t_list:
            raise ConfigError("budgets_w, schemes, t_list, and seeds must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; valid: {SCHEMES}")
        if any(b <= 0 for b in self.budgets_w):
            raise ConfigError("budgets must be > 0")
        if self.users < 1:
            raise ConfigError("users must be >= 1")

    def coding(self) -> CodingParams:
        return CodingParams(self.l_t, self.l_e)

    def train_config(self, seed: int, steps: int) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            candidates=self.candidates,
            actor_lr=self.actor_lr,
            critic_lr=self.critic_lr,
            exploration_std=self.exploration_std,
            seed=seed,
            steps=steps,
        )


_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}
_TUPLE_KEYS = {"budgets_w": float, "schemes": str, "t_list": int, "seeds": int}


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Parse a TOML experiment file; relative corpus paths resolve against it."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from None
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    if "experiment" not in raw:
        raise ConfigError(f"{path}: missing required key 'experiment'")
    kwargs = {}
    for key, value in raw.items():
        if key in _TUPLE_KEYS:
            if not isinstance(value, list):
                raise ConfigError(f"{path}: {key} must be a list")
            kwargs[key] = tuple(_TUPLE_KEYS[key](v) for v in value)
        else:
            kwargs[key] = value
    config = ExperimentConfig(**kwargs)
    if config.corpus_path is not None and not Path(config.corpus_path).is_absolute():
        config = replace(config, corpus_path=str((path.parent / config.corpus_path).resolve()))
    return config


def corpus_for(config: ExperimentConfig) -> Corpus:
    if config.corpus_path is not None:
        return load_corpus(config.corpus_path)
    return synth_corpus(config.synth_images, config.synth_triplets, config.synth_seed)


def channel_for(config: ExperimentConfig, seed: int) -> ChannelParams:
    """Per-seed channel realization: one gain draw per user."""
    gains = draw_pathloss_gains(config.users, seed=seed, low=config.gain_low,
                                high=config.gain_high)
    return ChannelParams(config.noise_power, gains, config.fading)


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    t: int | None
    budget_w: float
    seed: int
    epoch: int
    mean_quality: float


@dataclass
class SweepResult:
    kind: str
    rows: list[SweepRow] = field(default_factory=list)


def _static_mean_quality(scheme: str, corpus: Corpus, chan: ChannelParams,
                         coding: CodingParams, budget_w: float, users: int) -> float:
    per_user = Budget(budget_w / users)
    totals = []
    for rec in corpus.records:
        for u in range(users):
            chan_u = chan.for_user(u)
            if scheme == "equal":
                alloc = equal_allocation(rec.n, per_user)
            else:
                alloc = importance_allocation(rec.importances(), per_user)
            totals.append(transmission_quality(rec, alloc, chan_u, coding).total)
    return float(np.mean(totals))


def _run_point(args) -> list[SweepRow]:
    """One sweep job: (scheme, steps, budget, seed) -> rows. Top level so the
    process pool can pickle it."""
    config, scheme, steps, budget_w, seed, want_curve = args
    corpus = corpus_for(config)
    chan = channel_for(config, seed)
    coding = config.coding()
    if scheme in ("equal", "importance"):
        q = _static_mean_quality(scheme, corpus, chan, coding, budget_w, config.users)
        return [SweepRow(scheme, None, budget_w, seed, 0, q)]
    budget = Budget(budget_w)
    envs = environments_from(corpus, budget, chan, coding)
    if scheme == "pg":
        policy, curve = pg_baseline_train(corpus, budget, chan, coding,
                                          config.train_config(seed, steps or 1))
        final, _ = evaluate_pg_policy(policy, envs, seed=seed)
        t_col = None
    else:
        tc = config.train_config(seed, steps)
        denoiser, value_net, curve = train(corpus, budget, chan, coding, tc)
        schedule = NoiseSchedule.linear(tc.steps, tc.beta_start, tc.beta_end)
        final, _ = evaluate_policy(denoiser, schedule, envs, seed=seed,
                                   samples=config.eval_samples, value_net=value_net)
        t_col = steps
    if want_curve:
        return [SweepRow(scheme, t_col, budget_w, seed, ep, q) for ep, q in enumerate(curve)]
    final_epoch = max(len(curve) - 1, 0)
    return [SweepRow(scheme, t_col, budget_w, seed, final_epoch, final)]


def _run_points(points, jobs: int) -> list[SweepRow]:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_point, points))
    else:
        chunks = [_run_point(p) for p in points]
    rows = [row for chunk in chunks for row in chunk]
    _check_quality_bounds(points[0][0], rows)
    rows.sort(key=lambda r: (r.scheme, r.t if r.t is not None else -1, r.budget_w, r.seed, r.epoch))
    return rows


def _check_quality_bounds(config: ExperimentConfig, rows: list[SweepRow]) -> None:
    """Re-check the delegated metric bound at the emission boundary."""
    corpus = corpus_for(config)
    bound = max(quality_upper_bound(rec) for rec in corpus.records)
    for row in rows:
        if not -1e-9 <= row.mean_quality <= bound + 1e-9:
            raise RuntimeError(
                f"quality {row.mean_quality} outside [0, {bound}] for {row}")


def run_convergence(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Training curves per denoising-step count at one budget (plus the pg
    baseline when requested)."""
    trained = [s for s in config.schemes if s in ("diffusion", "pg")]
    if not trained:
        raise ConfigError("convergence experiment needs 'diffusion' and/or 'pg' in schemes")
    if len(config.budgets_w) != 1:
        raise ConfigError("convergence experiment expects exactly one budget")
    budget_w = config.budgets_w[0]
    points = []
    for seed in config.seeds:
        if "diffusion" in trained:
            for steps in config.t_list:
                points.append((config, "diffusion", steps, budget_w, seed, True))
        if "pg" in trained:
            points.append((config, "pg", None, budget_w, seed, True))
    return SweepResult("convergence", _run_points(points, jobs))


def run_power_sweep(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Final quality per scheme across a budget sweep; trained schemes are
    retrained from scratch at every budget point."""
    if len(config.budgets_w) < 2:
        raise ConfigError("power_sweep experiment needs at least two budgets")
    points = []
    for seed in config.seeds:
        for budget_w in config.budgets_w:
            for scheme in config.schemes:
                if scheme == "diffusion":
                    for steps in config.t_list:
                        points.append((config, scheme, steps, budget_w, seed, False))
                else:
                    points.append((config, scheme, None, budget_w, seed, False))
    return SweepResult("power_sweep", _run_points(points, jobs))


def run_budget_convergence(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Full diffusion training curves at each budget."""
    if "diffusion" not in config.schemes:
        raise ConfigError("budget_convergence experiment needs 'diffusion' in schemes")
    if len(config.budgets_w) < 2:
        raise ConfigError("budget_convergence experiment needs at least two budgets")
    points = []
    for seed in config.seeds:
        for budget_w in config.budgets_w:
            for steps in config.t_list:
                points.append((config, "diffusion", steps, budget_w, seed, True))
    return SweepResult("budget_convergence", _run_points(points, jobs))


def convergence_epoch(curve) -> int:
    """First epoch within the convergence margin of the final-tail mean."""
    curve = np.asarray(curve, dtype=float)
    if curve.size == 0:
        raise ValueError("empty curve")
    tail = curve[-min(CONVERGENCE_TAIL, curve.size):].mean()
    margin = CONVERGENCE_MARGIN * abs(tail)
    hits = np.flatnonzero(np.abs(curve - tail) <= margin)
    return int(hits[0]) if hits.size else int(curve.size - 1)


def convergence_report(result: SweepResult) -> dict:
    """Convergence-epoch estimate per (scheme, T, budget, seed) curve."""
    curves: dict[tuple, list[SweepRow]] = {}
    for row in result.rows:
        curves.setdefault((row.scheme, row.t, row.budget_w, row.seed), []).append(row)
    report = {}
    for key, rows in sorted(curves.items(), key=lambda kv: (kv[0][0], kv[0][1] or -1, kv[0][2], kv[0][3])):
        rows.sort(key=lambda r: r.epoch)
        values = [r.mean_quality for r in rows]
        if len(values) > 1:
            report[key] = convergence_epoch(values)
    return report


def _format_value(x: float) -> str:
    return repr(float(x))


def emit_outputs(result: SweepResult, out_dir: str | Path) -> list[Path]:
    """Write results.csv and the experiment's SVG chart; returns the paths.

    Deterministic: re-emitting the same result overwrites with identical
    bytes. An empty result produces a header-only CSV and no SVG.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in result.rows:
        writer.writerow([
            row.scheme,
            "" if row.t is None else str(row.t),
            _format_value(row.budget_w),
            str(row.seed),
            str(row.epoch),
            _format_value(row.mean_quality),
        ])
    csv_path.write_text(buf.getvalue())
    paths = [csv_path]
    if result.rows:
        svg_path = out_dir / f"{result.kind}.svg"
        svg_path.write_text(_chart_for(result))
        paths.append(svg_path)
    return paths


def _mean_series(rows: list[SweepRow], x_attr: str) -> tuple[list[float], list[float]]:
    """Mean of mean_quality grouped by the x attribute (epoch or budget)."""
    groups: dict[float, list[float]] = {}
    for row in rows:
        groups.setdefault(getattr(row, x_attr), []).append(row.mean_quality)
    xs = sorted(groups)
    return xs, [float(np.mean(groups[x])) for x in xs]


def _chart_for(result: SweepResult) -> str:
    series: dict[str, tuple[list[float], list[float]]] = {}
    if result.kind == "power_sweep":
        for scheme in sorted({r.scheme for r in result.rows}):
            scheme_rows = [r for r in result.rows if r.scheme == scheme]
            ts = sorted({r.t for r in scheme_rows}, key=lambda t: t if t is not None else -1)
            for t in ts:
                label = scheme if t is None or len(ts) == 1 else f"{scheme} T={t}"
                series[label] = _mean_series([r for r in scheme_rows if r.t == t], "budget_w")
        xlabel = "total transmit power (W)"
    elif result.kind == "budget_convergence":
        for budget in sorted({r.budget_w for r in result.rows}):
            label = f"{budget / 1000.0:g} kW"
            series[label] = _mean_series([r for r in result.rows if r.budget_w == budget], "epoch")
        xlabel = "epoch"
    else:
        for scheme, t in sorted({(r.scheme, r.t) for r in result.rows},
                                key=lambda st: (st[0], st[1] if st[1] is not None else -1)):
            label = scheme if t is None else f"{scheme} T={t}"
            series[label] = _mean_series(
                [r for r in result.rows if r.scheme == scheme and r.t == t], "epoch")
        xlabel = "epoch"
    return svgchart.line_chart(series, title=f"{result.kind}", xlabel=xlabel,
                               ylabel="mean semantic transmission quality")


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    if config.experiment == "convergence":
        return run_convergence(config, jobs)
    if config.experiment == "power_sweep":
        return run_power_sweep(config, jobs)
    return run_budget_convergence(config, jobs)


def resolve_out_dir(config: ExperimentConfig, cli_out: str | None) -> Path:
    """Flag beats environment variable beats config value."""
    if cli_out:
        return Path(cli_out)
    env = os.environ.get(OUT_DIR_ENV_VAR)
    if env:
        return Path(env)
    return Path(config.out_dir)

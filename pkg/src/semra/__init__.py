"""Semantic-aware downlink power allocation: simulator and optimizer.

Models transmission of image semantic triplets over fading channels, scores
allocations with an importance-weighted delivery metric, and learns
per-triplet power allocations with a conditional diffusion policy.
"""

from .allocator import (
    Budget,
    equal_allocation,
    grid_oracle,
    importance_allocation,
    softmax_allocation,
    softmax_fractions,
)
from .channel import (
    ChannelParams,
    CodingParams,
    bit_error_prob,
    draw_pathloss_gains,
    mc_drop_prob,
    snr,
    triplet_drop_prob,
)
from .corpus import (
    Corpus,
    CorpusError,
    ImageRecord,
    Provenance,
    SemanticTriplet,
    load_corpus,
    normalize_importance,
    save_corpus,
    synth_corpus,
)
from .diffusion import (
    DenoiserNet,
    Environment,
    NoiseSchedule,
    TrainConfig,
    ValueNet,
    actor_step,
    critic_loss,
    encode_environment,
    environments_from,
    evaluate_policy,
    forward_noising,
    load_checkpoint,
    reverse_sample,
    save_checkpoint,
    train,
)
from .pg import GaussianPolicy, pg_baseline_train
from .quality import QualityReport, aggregate_users, quality_upper_bound, transmission_quality

__version__ = "0.1.0"

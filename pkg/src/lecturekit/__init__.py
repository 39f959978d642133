"""lecturekit: deterministic building blocks for automated lecture-video generation."""

__version__ = "0.1.0"

from .adaptation import (
    AdaptationConfig,
    StageManifest,
    UtteranceRecord,
    adaptation_schedule,
    balanced_batches,
    split_adaptation_set,
)
from .attention import attention_loss, diagonality_score, penalty_matrix
from .deck import SlideDeck, parse_deck
from .frameplan import AugmentParams, FramePlan, apply_plan, plan, validate_plan
from .frontend import Lexicon, encode_infer, encode_train, load_lexicon
from .mel import MelConfig, Waveform, mel_filterbank, mel_spectrogram
from .metrics import (
    MosSample,
    SpeakerEmbedding,
    cosine_similarity,
    mean_speaker_similarity,
    mos_with_ci,
)
from .pipeline import (
    CompositionLayout,
    PipelineConfig,
    TimelineManifest,
    compose_command,
    run_pipeline,
)
from .textnorm import NormResult, normalize, number_to_words

__all__ = [
    "AdaptationConfig",
    "AugmentParams",
    "CompositionLayout",
    "FramePlan",
    "Lexicon",
    "MelConfig",
    "MosSample",
    "NormResult",
    "PipelineConfig",
    "SlideDeck",
    "SpeakerEmbedding",
    "StageManifest",
    "TimelineManifest",
    "UtteranceRecord",
    "Waveform",
    "adaptation_schedule",
    "apply_plan",
    "attention_loss",
    "balanced_batches",
    "compose_command",
    "cosine_similarity",
    "diagonality_score",
    "encode_infer",
    "encode_train",
    "load_lexicon",
    "mean_speaker_similarity",
    "mel_filterbank",
    "mel_spectrogram",
    "mos_with_ci",
    "normalize",
    "number_to_words",
    "parse_deck",
    "penalty_matrix",
    "plan",
    "run_pipeline",
    "split_adaptation_set",
    "validate_plan",
]

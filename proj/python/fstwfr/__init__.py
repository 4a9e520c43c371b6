"""Rank-pooled log-mel features, GMM anomaly scoring and r tuning."""

from ._core import (
    AudioClip,
    Caption,
    ClipMetadata,
    Error,
    GmmFitConfig,
    GmmModel,
    SilenceRemovalConfig,
    SpectrogramConfig,
    TuningConfig,
    TuningResult,
    auc,
    decode_wav,
    default_template,
    fit_gmm,
    log_mel,
    objective,
    parse_label,
    pauc,
    ranking,
    remove_silence,
    render_caption,
    to_anomaly_caption,
    tune_r,
    twfr,
    weights,
    write_wav,
)
from ._core import __version__

__all__ = [
    "AudioClip",
    "Caption",
    "ClipMetadata",
    "Error",
    "GmmFitConfig",
    "GmmModel",
    "SilenceRemovalConfig",
    "SpectrogramConfig",
    "TuningConfig",
    "TuningResult",
    "auc",
    "decode_wav",
    "default_template",
    "fit_gmm",
    "log_mel",
    "objective",
    "parse_label",
    "pauc",
    "ranking",
    "remove_silence",
    "render_caption",
    "to_anomaly_caption",
    "tune_r",
    "twfr",
    "weights",
    "write_wav",
]

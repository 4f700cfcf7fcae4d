from .synthetic import SynthParams
from .synthetic import SynthGenerator
from .synthetic import synth_models
from .synthetic import synth_generate
from .synthetic import mixture_sample
from .synthetic import feature_covariance_diagonal
from .noise import NoiseProfile
from .noise import noise_profile_preset
from .noise import noise_level_for_client
from .noise import add_label_noise
from .noise import add_irrelevant_data
from .noise import apply_noise
from .shard import shard_partition

__all__ = [
    "SynthParams",
    "SynthGenerator",
    "synth_models",
    "synth_generate",
    "mixture_sample",
    "feature_covariance_diagonal",
    "NoiseProfile",
    "noise_profile_preset",
    "noise_level_for_client",
    "add_label_noise",
    "add_irrelevant_data",
    "apply_noise",
    "shard_partition",
]

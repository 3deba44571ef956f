"""Skeleton Dataset Package.

Keypoint loading, cleaning, clip trimming, synthetic data and triplet sampling.
"""

from .keypoint_cleaner import clean_frames, normalize, pad_missing, preprocess_directory, trim_clips
from .keypoint_loader import KeypointFormat, load_clip, load_manifest, load_raw_sequence, save_clip, write_manifest
from .skeleton_models import DatasetIndex, MotionClip, RawSequence, TripletSample
from .synthetic_generator import SyntheticMotionGenerator, build_synthetic_dataset, synth_generate
from .triplet_sampler import TripletSampler, sample_triplet, split_identities

__all__ = [
    'DatasetIndex', 'MotionClip', 'RawSequence', 'TripletSample',
    'KeypointFormat', 'load_raw_sequence', 'load_clip', 'save_clip', 'load_manifest', 'write_manifest',
    'clean_frames', 'pad_missing', 'trim_clips', 'normalize', 'preprocess_directory',
    'SyntheticMotionGenerator', 'synth_generate', 'build_synthetic_dataset',
    'TripletSampler', 'sample_triplet', 'split_identities',
]

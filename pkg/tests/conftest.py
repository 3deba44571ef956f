"""
Pytest configuration and shared fixtures
"""
import numpy as np
import pytest
import torch

from src.config.run_config import DatasetConfig, RunConfig, TrainConfig
from src.config.skeleton_config import NUM_JOINTS
from src.data_processing.skeleton.skeleton_models import MotionClip, RawSequence
from src.data_processing.skeleton.synthetic_generator import build_synthetic_dataset


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(0)


@pytest.fixture
def tiny_config():
    """Desk-scale architecture on a small grid with short training."""
    config = RunConfig.desk_scale()
    return config.model_copy(update={
        'train': TrainConfig(batch_size=4, max_epochs=2, triplets_per_epoch=8, checkpoint_every=1,
                             autoencoder_lr=5e-4, discriminator_lr=1e-3),
        'dataset': DatasetConfig(n_ids=3, n_test_ids=2, n_contents=3, clips_per_cell=2),
    })


@pytest.fixture(scope='session')
def synthetic_dataset():
    """Small synthetic grid: 3 train ids, 2 test ids, 3 contents, plus new-subject clips."""
    return build_synthetic_dataset(DatasetConfig(n_ids=3, n_test_ids=2, n_contents=3, clips_per_cell=2))


@pytest.fixture
def random_clip(rng):
    """A random BODY_25 clip of 64 frames."""
    return MotionClip(data=rng.normal(size=(2 * NUM_JOINTS, 64)), id_label='a', mc_label='x', clip_id='rand')


def make_sequence(n_frames: int, rng: np.random.Generator, subject_id='s0', content_id=None) -> RawSequence:
    """Fully detected random sequence with a non-degenerate torso."""
    frames = np.concatenate([rng.uniform(10, 500, size=(n_frames, NUM_JOINTS, 2)),
                             np.ones((n_frames, NUM_JOINTS, 1))], axis=-1)
    return RawSequence(frames=frames, subject_id=subject_id, content_id=content_id)


@pytest.fixture
def sequence_factory(rng):
    def factory(n_frames: int, **labels) -> RawSequence:
        return make_sequence(n_frames, rng, **labels)
    return factory


@pytest.fixture(autouse=True)
def seed_torch():
    """Every test starts from the same torch RNG state."""
    torch.manual_seed(0)
    yield

"""Tests for the run configuration models."""
import json

import pytest
from pydantic import ValidationError

from src.config.run_config import (
    DISCRIMINATOR_LAST_CHANNELS,
    DecoderConfig,
    DiscriminatorConfig,
    EncoderConfig,
    EvalConfig,
    ModelConfig,
    RunConfig,
    TrainConfig,
)


def test_defaults_match_full_scale_constants():
    config = RunConfig()
    assert config.model.mc_encoder.last_channels == 128
    assert config.model.id_encoder.last_channels == 144
    assert config.model.projection_channels == 144
    assert config.model.latent_length == 8
    assert config.model.decoder.alpha == 0.9
    assert config.model.discriminator.channels[-1] == 256
    assert config.train.batch_size == 128
    assert (config.train.autoencoder_lr, config.train.discriminator_lr) == (1e-4, 2e-4)
    assert config.train.betas == (0.5, 0.999)
    assert config.losses.lambda_rec == 10.0 and config.losses.lambda_id == 6.0


def test_unknown_keys_rejected():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({'train': {'batch_sise': 8}})
    with pytest.raises(ValidationError):
        RunConfig.model_validate({'colour': 'red'})


def test_encoder_stride_product_enforced():
    with pytest.raises(ValidationError):
        EncoderConfig(strides=[1, 2, 1, 2, 1, 1, 1, 1])
    with pytest.raises(ValidationError):
        EncoderConfig(strides=[2, 2, 2])


def test_encoder_channel_schedule_ends_at_last_channels():
    schedule = EncoderConfig(first_channels=64, last_channels=144).channel_schedule()
    assert len(schedule) == 8
    assert schedule[0] == 64 and schedule[-1] == 144
    assert schedule == sorted(schedule)


def test_decoder_alpha_range():
    with pytest.raises(ValidationError):
        DecoderConfig(alpha=1.5)
    assert DecoderConfig(alpha=0.0).alpha == 0.0


def test_decoder_block_count_must_match_channels():
    with pytest.raises(ValidationError):
        DecoderConfig(num_blocks=2, channels=[64, 32, 16])


def test_model_rejects_mismatched_widths():
    with pytest.raises(ValidationError):
        ModelConfig(num_joints=15)
    with pytest.raises(ValidationError):
        ModelConfig(clip_length=60)


def test_projection_channels_without_head():
    with pytest.raises(ValidationError):
        ModelConfig(use_projection_head=False, projection_channels=100)
    assert ModelConfig(use_projection_head=False, projection_channels=144).projection_channels == 144


def test_discriminator_lengths_must_agree():
    with pytest.raises(ValidationError):
        DiscriminatorConfig(channels=[16, 32], strides=[2, 2, 2])


def test_discriminator_default_width_and_positive_channels():
    assert DiscriminatorConfig().channels[-1] == DISCRIMINATOR_LAST_CHANNELS == 256
    with pytest.raises(ValidationError):
        DiscriminatorConfig(channels=[16, 0], strides=[2, 2])
    with pytest.raises(ValidationError):
        DiscriminatorConfig(channels=[], strides=[])


def test_negative_learning_rate_rejected():
    with pytest.raises(ValidationError):
        TrainConfig(autoencoder_lr=-1e-4)
    assert TrainConfig(autoencoder_lr=0.0).autoencoder_lr == 0.0


def test_embedder_spec_validated():
    assert EvalConfig(embedder='external:/tmp/model.pt').embedder.startswith('external:')
    with pytest.raises(ValidationError):
        EvalConfig(embedder='gaitgraph')


def test_clip_length_must_agree():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({'dataset': {'clip_length': 128}})


def test_with_seed_replaces_every_seed():
    config = RunConfig().with_seed(7)
    assert config.train.seed == config.dataset.seed == config.eval.seed == 7


def test_desk_scale_round_trip(tmp_path):
    config = RunConfig.desk_scale()
    assert config.train.batch_size == 16
    assert config.model.mc_encoder.last_channels == 32
    assert config.model.discriminator.channels[-1] == 64
    assert config.train.triplets_per_epoch == 192
    assert config.eval.embedder_sees_reconstructions

    path = tmp_path / 'run_config.json'
    config.save(path)
    assert RunConfig.load(path) == config
    assert json.loads(path.read_text())['train']['max_epochs'] == 300

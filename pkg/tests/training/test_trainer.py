"""Tests for the training loop, checkpoints and inference entry points."""
import hashlib

import numpy as np
import pytest
import torch

from src.config.run_config import TrainConfig
from src.data_processing.skeleton.skeleton_models import MotionClip
from src.data_processing.skeleton.triplet_sampler import TripletSampler
from src.errors import ConfigurationError
from src.modeling.clip_tensors import clips_to_tensor
from src.modeling.losses.retarget_losses import TrainingDivergenceError
from src.training.checkpoint import LATEST_NAME, CheckpointError, load_checkpoint, save_checkpoint
from src.training.metrics_logger import METRICS_NAME, epoch_summary, read_metrics
from src.training.trainer import (
    create_training_state,
    fit,
    load_model,
    lr_at_epoch,
    retarget,
    state_to_checkpoint,
    train_step,
)


@pytest.mark.parametrize('epoch,factor', [(0, 1.0), (399, 1.0), (400, 0.5), (799, 0.5), (800, 0.25), (1999, 1 / 16)])
def test_lr_schedule(epoch, factor):
    ae_lr, d_lr = lr_at_epoch(TrainConfig(), epoch)
    assert ae_lr == pytest.approx(1e-4 * factor)
    assert d_lr == pytest.approx(2e-4 * factor)


def test_lr_schedule_rejects_negative_epoch():
    with pytest.raises(ValueError):
        lr_at_epoch(TrainConfig(), -1)


def _run_steps(config, dataset, n_steps):
    state = create_training_state(config)
    sampler = TripletSampler(dataset.train())
    rng = np.random.default_rng(0)
    records = [train_step(sampler.sample_batch(4, rng), state, sampler).to_record() for _ in range(n_steps)]
    return state, records


def test_seeded_runs_are_identical(tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    _, first = _run_steps(tiny_config, index, 10)
    _, second = _run_steps(tiny_config, index, 10)
    assert first == second
    assert set(first[0]) == {'rec', 'adv', 'mc_rec', 'mc_tri', 'id_rec', 'id_tri', 'total', 'd_loss'}


def test_zero_learning_rate_step_is_noop(tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    config = tiny_config.model_copy(update={
        'train': tiny_config.train.model_copy(update={'autoencoder_lr': 0.0, 'discriminator_lr': 0.0}),
    })
    state = create_training_state(config)
    before = {k: v.clone() for k, v in state.model.state_dict().items()}
    d_before = {k: v.clone() for k, v in state.discriminator.state_dict().items()}
    sampler = TripletSampler(index.train())
    train_step(sampler.sample_batch(4, np.random.default_rng(0)), state, sampler)
    for key, value in state.model.state_dict().items():
        assert torch.equal(value, before[key]), key
    for key, value in state.discriminator.state_dict().items():
        assert torch.equal(value, d_before[key]), key
    assert all(p.requires_grad for p in state.discriminator.parameters())


def test_divergence_names_step(tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    state = create_training_state(tiny_config)
    with torch.no_grad():
        state.model.synthesis.stats.fc1.weight.fill_(float('nan'))
    sampler = TripletSampler(index.train())
    with pytest.raises(TrainingDivergenceError, match='Step 0'):
        train_step(sampler.sample_batch(2, np.random.default_rng(0)), state, sampler)


def test_checkpoint_round_trip_is_bit_exact(tmp_path, tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    state, _ = _run_steps(tiny_config, index, 2)
    path = save_checkpoint(state_to_checkpoint(state, manifest_digest='abc'), tmp_path / LATEST_NAME)

    checkpoint = load_checkpoint(tmp_path)
    assert checkpoint.manifest_digest == 'abc'
    assert checkpoint.run_config == tiny_config
    restored = load_model(path)

    held_out = clips_to_tensor(list(index.test().clips())[:4])
    state.model.eval()
    with torch.no_grad():
        torch.testing.assert_close(restored.reconstruct(held_out), state.model.reconstruct(held_out), rtol=0, atol=0)


def test_checkpoint_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / 'missing.pt')
    bad = tmp_path / 'bad.pt'
    bad.write_bytes(b'not a checkpoint')
    with pytest.raises(CheckpointError):
        load_checkpoint(bad)


def test_fit_writes_artifacts(tmp_path, tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    checkpoint = fit(index, tiny_config, tmp_path)
    assert checkpoint.epoch == 2
    assert (tmp_path / LATEST_NAME).exists()
    assert [h['epoch'] for h in checkpoint.history] == [0, 1]

    metrics = read_metrics(tmp_path / METRICS_NAME)
    assert len(metrics) == 4
    assert metrics['step'].tolist() == [1, 2, 3, 4]
    assert len(epoch_summary(metrics)) == 2


def test_resume_matches_uninterrupted_run(tmp_path, tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    full = fit(index, tiny_config, tmp_path / 'full')
    fit(index, tiny_config, tmp_path / 'split', max_epochs=1)
    resumed = fit(index, tiny_config, tmp_path / 'split', resume_from=tmp_path / 'split')

    assert resumed.epoch == full.epoch
    for key, value in full.model_state.items():
        assert torch.equal(resumed.model_state[key], value), key
    split_steps = read_metrics(tmp_path / 'split')['step'].tolist()
    assert split_steps == read_metrics(tmp_path / 'full')['step'].tolist()
    assert resumed.step == full.step == split_steps[-1]


def test_retarget_labels(tiny_config, synthetic_dataset):
    index, new_subject = synthetic_dataset
    state, _ = _run_steps(tiny_config, index, 1)
    source = list(index.train().clips())[0]
    out = retarget(source, new_subject[1], state.model)
    assert out.data.shape == source.data.shape
    assert out.id_label == new_subject[1].id_label
    assert out.mc_label == source.mc_label
    assert out.clip_id == f"{source.clip_id}_as_{new_subject[1].clip_id}"


def test_retarget_rejects_wrong_clip_length(tiny_config, synthetic_dataset):
    index, new_subject = synthetic_dataset
    state, _ = _run_steps(tiny_config, index, 1)
    source = list(index.train().clips())[0]
    longer = MotionClip(np.concatenate([source.data, source.data[:, :8]], axis=1), clip_id='long')
    assert longer.data.shape[1] == 72
    with pytest.raises(ConfigurationError, match='72 frames'):
        retarget(longer, new_subject[0], state.model)
    with pytest.raises(ConfigurationError):
        retarget(source, longer, state.model)


def test_checkpoint_records_step(tmp_path, tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    checkpoint = fit(index, tiny_config, tmp_path, max_epochs=1)
    assert checkpoint.step == len(read_metrics(tmp_path)) > 0
    assert load_checkpoint(tmp_path).step == checkpoint.step


def _digest(module: torch.nn.Module) -> str:
    h = hashlib.sha256()
    for name, tensor in sorted(module.state_dict().items()):
        h.update(name.encode())
        h.update(tensor.detach().cpu().numpy().tobytes())
    return h.hexdigest()


def test_updates_are_isolated(monkeypatch, tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    state = create_training_state(tiny_config)
    sampler = TripletSampler(index.train())
    batch = sampler.sample_batch(4, np.random.default_rng(0))
    phase = ['before_d_step']
    grads = []
    for owner, module in (('G', state.model), ('D', state.discriminator)):
        for p in module.parameters():
            p.register_hook(lambda g, owner=owner: grads.append((owner, phase[0])))

    digests = {}
    d_step, g_step = state.opt_d.step, state.opt_g.step

    def checked_d_step(*args, **kwargs):
        g_before, d_before = _digest(state.model), _digest(state.discriminator)
        out = d_step(*args, **kwargs)
        digests['g_unchanged_by_d'] = g_before == _digest(state.model)
        digests['d_changed_by_d'] = d_before != _digest(state.discriminator)
        phase[0] = 'after_d_step'
        return out

    def checked_g_step(*args, **kwargs):
        g_before, d_before = _digest(state.model), _digest(state.discriminator)
        out = g_step(*args, **kwargs)
        digests['d_unchanged_by_g'] = d_before == _digest(state.discriminator)
        digests['g_changed_by_g'] = g_before != _digest(state.model)
        return out

    monkeypatch.setattr(state.opt_d, 'step', checked_d_step)
    monkeypatch.setattr(state.opt_g, 'step', checked_g_step)
    train_step(batch, state, sampler)

    assert digests == {'g_unchanged_by_d': True, 'd_changed_by_d': True,
                       'd_unchanged_by_g': True, 'g_changed_by_g': True}
    # The discriminator loss never reaches the generator, the generator loss never reaches D
    assert ('D', 'before_d_step') in grads and ('G', 'after_d_step') in grads
    assert ('G', 'before_d_step') not in grads
    assert ('D', 'after_d_step') not in grads


def test_decoder_runs_nine_times_per_triplet_batch(tiny_config, synthetic_dataset):
    index, _ = synthetic_dataset
    state = create_training_state(tiny_config)
    sampler = TripletSampler(index.train())
    batch = sampler.sample_batch(4, np.random.default_rng(0))
    calls = []
    handle = state.model.synthesis.decoder.register_forward_hook(
        lambda module, inputs, output: calls.append(output.shape[0])
    )
    try:
        train_step(batch, state, sampler)
    finally:
        handle.remove()
    assert calls == [len(batch)] * 9

"""Three-branch adversarial training loop.

Each step encodes the three branches of every triplet, synthesizes the 3x3
grid M^{j|k} = S(f_mc^j, f_bar_id^k), re-encodes all nine syntheses and
applies one discriminator update followed by one generator update.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from src.config.run_config import RunConfig, TrainConfig
from src.config.runtime_config import runtime_config
from src.data_processing.skeleton.skeleton_models import DatasetIndex, MotionClip, TripletSample
from src.data_processing.skeleton.triplet_sampler import TripletSampler
from src.errors import ConfigurationError
from src.modeling.adversary.discriminator import MotionDiscriminator
from src.modeling.clip_tensors import clips_to_tensor, tensor_to_clips
from src.modeling.layers import init_weights
from src.modeling.losses.retarget_losses import (
    LossReport,
    TrainingDivergenceError,
    adversarial_losses,
    batch_all_triplet,
    id_reconstruction,
    mc_reconstruction,
    motion_reconstruction,
    total_loss,
)
from src.modeling.retarget_model import RetargetModel

from .checkpoint import LATEST_NAME, Checkpoint, load_checkpoint, save_checkpoint
from .metrics_logger import METRICS_NAME, MetricsLogger

logger = logging.getLogger(__name__)

DTYPES = {'float32': torch.float32, 'float64': torch.float64}


@dataclass
class TrainingState:
    """Everything the loop mutates."""
    model: RetargetModel
    discriminator: MotionDiscriminator
    opt_g: torch.optim.Adam
    opt_d: torch.optim.Adam
    config: RunConfig
    epoch: int = 0
    step: int = 0

    @property
    def dtype(self) -> torch.dtype:
        return DTYPES[self.config.train.precision]

    @property
    def device(self) -> str:
        return runtime_config.device


def lr_at_epoch(config: TrainConfig, epoch: int) -> Tuple[float, float]:
    """Step-decayed (autoencoder, discriminator) learning rates."""
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    factor = config.lr_gamma ** (epoch // config.lr_step_epochs)
    return config.autoencoder_lr * factor, config.discriminator_lr * factor


def set_learning_rates(state: TrainingState, epoch: int) -> Tuple[float, float]:
    ae_lr, d_lr = lr_at_epoch(state.config.train, epoch)
    for group in state.opt_g.param_groups:
        group['lr'] = ae_lr
    for group in state.opt_d.param_groups:
        group['lr'] = d_lr
    return ae_lr, d_lr


def configure_torch() -> None:
    """Thread count and deterministic kernels from the runtime settings."""
    torch.set_num_threads(runtime_config.num_threads)
    if runtime_config.deterministic:
        torch.use_deterministic_algorithms(True, warn_only=True)


def create_training_state(config: RunConfig) -> TrainingState:
    """Seeded initialization of both networks and their optimizers."""
    configure_torch()
    torch.manual_seed(config.train.seed)
    dtype = DTYPES[config.train.precision]

    model = RetargetModel(config.model).to(device=runtime_config.device, dtype=dtype)
    discriminator = MotionDiscriminator(config.model.discriminator)
    init_weights(discriminator, config.model.discriminator.negative_slope)
    discriminator = discriminator.to(device=runtime_config.device, dtype=dtype)

    train = config.train
    opt_g = torch.optim.Adam(model.parameters(), lr=train.autoencoder_lr,
                             betas=tuple(train.betas), weight_decay=train.weight_decay)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=train.discriminator_lr,
                             betas=tuple(train.betas), weight_decay=train.weight_decay)
    return TrainingState(model=model, discriminator=discriminator, opt_g=opt_g, opt_d=opt_d, config=config)


def _grid_tensor(state: TrainingState, clips: Sequence[MotionClip]) -> torch.Tensor:
    return clips_to_tensor(clips, dtype=state.dtype, device=state.device)


def train_step(batch: List[TripletSample], state: TrainingState, sampler: TripletSampler) -> LossReport:
    """One discriminator update then one generator update on a batch of triplets.

    Raises:
        TrainingDivergenceError: If a loss term is not finite (names the term and step)
    """
    model, discriminator = state.model, state.discriminator
    weights = state.config.losses
    gan_form = state.config.train.gan_form
    model.train()
    discriminator.train()

    branches = [_grid_tensor(state, [t.branches[b] for t in batch]) for b in range(3)]
    truths = [sampler.ground_truth(t) for t in batch]
    grid_truth = [[_grid_tensor(state, [truth[j][k] for truth in truths]) for k in range(3)] for j in range(3)]

    bundles = [model.encode(x) for x in branches]
    grid_sys = [[model.synthesize(bundles[j].f_mc, bundles[k].f_bar_id) for k in range(3)] for j in range(3)]
    real = torch.cat(branches)
    fake = torch.cat([cell for row in grid_sys for cell in row])

    # Discriminator
    real_scores = discriminator(real)
    d_loss, _ = adversarial_losses(real_scores, discriminator(fake.detach()), gan_form)
    state.opt_d.zero_grad()
    d_loss.backward()
    state.opt_d.step()

    # Generator
    discriminator.requires_grad_(False)
    try:
        _, adv = adversarial_losses(real_scores.detach(), discriminator(fake), gan_form)

        resynth = [[model.encode(cell) for cell in row] for row in grid_sys]
        id_rec = sum(id_reconstruction(bundles, resynth[j]) for j in range(3)) / 3
        mc_rec = sum(
            mc_reconstruction([b.f_mc for b in bundles], [resynth[j][k].f_mc for j in range(3)])
            for k in range(3)
        ) / 3

        h_id = torch.cat([b.h_id for b in bundles])
        f_mc = torch.cat([b.f_mc for b in bundles])
        id_labels = [t.branches[b].id_label for b in range(3) for t in batch]
        mc_labels = [t.branches[b].mc_label for b in range(3) for t in batch]
        id_tri = batch_all_triplet(h_id, id_labels, weights.delta, 1.0 / h_id.shape[1])
        mc_tri = batch_all_triplet(f_mc, mc_labels, weights.delta, 1.0 / (f_mc.shape[1] * f_mc.shape[2]))

        rec = motion_reconstruction(grid_sys, grid_truth)
        try:
            report = total_loss(rec, adv, mc_rec, mc_tri, id_rec, id_tri, weights, d_loss=d_loss.detach())
        except TrainingDivergenceError as e:
            raise TrainingDivergenceError(f"Step {state.step}: {e}") from e

        state.opt_g.zero_grad()
        report.total.backward()
        state.opt_g.step()
    finally:
        discriminator.requires_grad_(True)

    state.step += 1
    return report


def _batches(items: List, size: int) -> List[List]:
    return [items[n:n + size] for n in range(0, len(items), size)]


def state_to_checkpoint(state: TrainingState, manifest_digest: Optional[str] = None,
                        history: Optional[List[dict]] = None) -> Checkpoint:
    return Checkpoint(
        model_state={k: v.detach().cpu().clone() for k, v in state.model.state_dict().items()},
        discriminator_state={k: v.detach().cpu().clone() for k, v in state.discriminator.state_dict().items()},
        optimizer_states={'generator': state.opt_g.state_dict(), 'discriminator': state.opt_d.state_dict()},
        epoch=state.epoch,
        step=state.step,
        config=state.config.model_dump(mode='json'),
        manifest_digest=manifest_digest,
        history=list(history or []),
    )


def restore_state(checkpoint: Checkpoint, config: Optional[RunConfig] = None) -> TrainingState:
    """Rebuild a TrainingState from a checkpoint (config defaults to its snapshot)."""
    state = create_training_state(config or checkpoint.run_config)
    state.model.load_state_dict(checkpoint.model_state)
    state.discriminator.load_state_dict(checkpoint.discriminator_state)
    state.opt_g.load_state_dict(checkpoint.optimizer_states['generator'])
    state.opt_d.load_state_dict(checkpoint.optimizer_states['discriminator'])
    state.epoch = checkpoint.epoch
    state.step = checkpoint.step
    return state


def load_model(checkpoint: Union[Checkpoint, str, Path]) -> RetargetModel:
    """Generator from a checkpoint, in eval mode at the checkpoint's precision."""
    if not isinstance(checkpoint, Checkpoint):
        checkpoint = load_checkpoint(checkpoint)
    config = checkpoint.run_config
    model = RetargetModel(config.model).to(dtype=DTYPES[config.train.precision])
    model.load_state_dict(checkpoint.model_state)
    return model.eval()


def fit(dataset: DatasetIndex, config: RunConfig, out_dir: Union[str, Path],
        resume_from: Optional[Union[str, Path]] = None, max_epochs: Optional[int] = None,
        manifest_digest: Optional[str] = None) -> Checkpoint:
    """Train on the train split of dataset.

    Args:
        dataset: Grid of clips; only identities in the train split are used
        config: Run configuration
        out_dir: Directory for checkpoint_latest.pt and metrics.jsonl
        resume_from: Checkpoint to continue from
        max_epochs: Overrides config.train.max_epochs
        manifest_digest: Recorded in every checkpoint

    Returns:
        The final checkpoint (also written to out_dir)
    """
    out_dir = Path(out_dir)
    train_cfg = config.train
    max_epochs = train_cfg.max_epochs if max_epochs is None else max_epochs

    history: List[dict] = []
    if resume_from is not None:
        checkpoint = load_checkpoint(resume_from)
        state = restore_state(checkpoint, config)
        history = list(checkpoint.history)
        logger.info(f"Resumed from {resume_from} at epoch {state.epoch}")
    else:
        state = create_training_state(config)

    sampler = TripletSampler(dataset.train())
    n_triplets = train_cfg.triplets_per_epoch or len(dataset.train())
    metrics = MetricsLogger(out_dir / METRICS_NAME, append=resume_from is not None)
    checkpoint_path = out_dir / LATEST_NAME

    for epoch in range(state.epoch, max_epochs):
        ae_lr, d_lr = set_learning_rates(state, epoch)
        rng = np.random.default_rng([train_cfg.seed, epoch])
        triplets = sampler.sample_batch(n_triplets, rng)

        records = []
        for batch in _batches(triplets, train_cfg.batch_size):
            report = train_step(batch, state, sampler)
            record = report.to_record()
            metrics.log(state.step, epoch, record, ae_lr, d_lr)
            records.append(record)

        state.epoch = epoch + 1
        epoch_means = {key: float(np.mean([r[key] for r in records])) for key in records[0]}
        history.append({'epoch': epoch, **epoch_means})
        logger.info(
            f"Epoch {epoch}: total {epoch_means['total']:.4f} rec {epoch_means['rec']:.4f} "
            f"adv {epoch_means['adv']:.4f} d {epoch_means['d_loss']:.4f} lr {ae_lr:.2e}/{d_lr:.2e}"
        )
        if state.epoch % train_cfg.checkpoint_every == 0 and state.epoch < max_epochs:
            save_checkpoint(state_to_checkpoint(state, manifest_digest, history), checkpoint_path)

    checkpoint = state_to_checkpoint(state, manifest_digest, history)
    save_checkpoint(checkpoint, checkpoint_path)
    return checkpoint


def retarget_tensors(model: RetargetModel, source: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Batched inference without gradients.

    Raises:
        ConfigurationError: If a clip length differs from the model's clip_length
    """
    expected = model.config.clip_length
    for name, x in (('source', source), ('target', target)):
        if x.shape[-1] != expected:
            raise ConfigurationError(f"{name} clip has {x.shape[-1]} frames, model expects {expected}")
    with torch.no_grad():
        return model.retarget(source, target)


def retarget(source: MotionClip, target: MotionClip, checkpoint: Union[Checkpoint, RetargetModel, str, Path]) -> MotionClip:
    """Motion content of source performed with the identity of target.

    Raises:
        ConfigurationError: If the clips do not match the checkpoint's shapes
    """
    model = checkpoint if isinstance(checkpoint, RetargetModel) else load_model(checkpoint)
    dtype = next(model.parameters()).dtype
    out = retarget_tensors(model, clips_to_tensor([source], dtype), clips_to_tensor([target], dtype))
    return tensor_to_clips(
        out,
        id_label=target.id_label,
        mc_label=source.mc_label,
        clip_id=f"{source.clip_id}_as_{target.clip_id}",
        fps=source.fps,
    )[0]

"""Training loop, checkpoints and metrics."""

from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .trainer import TrainingState, create_training_state, fit, load_model, lr_at_epoch, retarget, train_step

__all__ = [
    'Checkpoint', 'CheckpointError', 'load_checkpoint', 'save_checkpoint',
    'TrainingState', 'create_training_state', 'fit', 'load_model', 'lr_at_epoch', 'retarget', 'train_step',
]

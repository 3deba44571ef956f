from .retarget_losses import (
    LossReport,
    TrainingDivergenceError,
    UndefinedBatchError,
    adversarial_losses,
    batch_all_triplet,
    id_reconstruction,
    id_triplet,
    mc_reconstruction,
    mc_triplet,
    motion_reconstruction,
    total_loss,
)

__all__ = [
    'LossReport', 'TrainingDivergenceError', 'UndefinedBatchError', 'adversarial_losses',
    'batch_all_triplet', 'id_reconstruction', 'id_triplet', 'mc_reconstruction', 'mc_triplet',
    'motion_reconstruction', 'total_loss',
]

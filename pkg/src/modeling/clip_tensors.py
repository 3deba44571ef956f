"""Conversion between MotionClip objects and batch-first tensors."""
from typing import List, Sequence

import numpy as np
import torch

from src.data_processing.skeleton.skeleton_models import MotionClip


def clips_to_tensor(clips: Sequence[MotionClip], dtype: torch.dtype = torch.float32,
                    device: str = 'cpu') -> torch.Tensor:
    """Stack clips into a (B, 2J, T) tensor."""
    return torch.as_tensor(np.stack([clip.data for clip in clips]), dtype=dtype, device=device)


def tensor_to_clips(batch: torch.Tensor, like: Sequence[MotionClip] = None, **labels) -> List[MotionClip]:
    """Turn a (B, 2J, T) tensor back into clips.

    Labels are copied from `like` when given, else taken from keyword arguments.
    """
    data = batch.detach().cpu().to(torch.float64).numpy()
    if like is None:
        return [MotionClip(data=d, **labels) for d in data]
    return [ref.with_data(d) for ref, d in zip(like, data)]

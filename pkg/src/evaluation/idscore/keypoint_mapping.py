"""Keypoint layout conversion for gait embedders.

BODY_25 (25 joints) -> 15-joint subset -> COCO-17. The 15 -> 17 step is either
a learned per-frame perceptron or a deterministic linear head model.
"""
import logging
from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from src.config.skeleton_config import (
    COCO_17_JOINTS,
    COCO_FACE_FROM_BODY_25,
    COCO_FACE_OFFSETS,
    COCO_FROM_BODY_25,
    NECK,
    NUM_JOINTS,
    SUBSET_15,
)
from src.data_processing.skeleton.skeleton_models import MotionClip
from src.errors import ConfigurationError, RetargetError

logger = logging.getLogger(__name__)

NUM_SUBSET = len(SUBSET_15)
NUM_COCO = len(COCO_17_JOINTS)


class ArityError(RetargetError):
    """Raised when a clip has the wrong number of joints for a mapping."""
    pass


def _check_joints(clip: MotionClip, expected: int, step: str) -> None:
    if clip.num_joints != expected:
        raise ArityError(f"{step} expects {expected} joints, clip {clip.clip_id} has {clip.num_joints}")


def _select_joints(clip: MotionClip, joints: Sequence[int]) -> MotionClip:
    xy = clip.xy()[:, list(joints)]
    return clip.with_data(np.concatenate([xy[:, :, 0].T, xy[:, :, 1].T], axis=0))


def map_25_to_15(clip: MotionClip) -> MotionClip:
    """Keep BODY_25 joints 0..14 (nose through ankles) in order."""
    _check_joints(clip, NUM_JOINTS, "map_25_to_15")
    return _select_joints(clip, SUBSET_15)


def scatter_15_to_25(clip15: MotionClip, base: MotionClip) -> MotionClip:
    """Write the 15 subset joints back into a copy of a full BODY_25 clip."""
    _check_joints(clip15, NUM_SUBSET, "scatter_15_to_25")
    _check_joints(base, NUM_JOINTS, "scatter_15_to_25")
    xy = base.xy().copy()
    xy[:, SUBSET_15] = clip15.xy()
    return base.with_data(np.concatenate([xy[:, :, 0].T, xy[:, :, 1].T], axis=0))


# Position of each shared COCO joint inside the 15-joint subset
_COCO_FROM_SUBSET = {name: SUBSET_15.index(j) for name, j in COCO_FROM_BODY_25.items()}
_SUBSET_NOSE = SUBSET_15.index(0)
_SUBSET_NECK = SUBSET_15.index(NECK)
_SUBSET_LSHOULDER = SUBSET_15.index(COCO_FROM_BODY_25['left_shoulder'])
_SUBSET_RSHOULDER = SUBSET_15.index(COCO_FROM_BODY_25['right_shoulder'])


def baseline_map_15_to_17(clip15: MotionClip) -> MotionClip:
    """Deterministic 15 -> 17 mapping.

    Shared joints are copied; eyes and ears are placed by a linear head model
    joint = nose + up * (nose - neck) + side * (LShoulder - RShoulder).
    """
    _check_joints(clip15, NUM_SUBSET, "map_15_to_17")
    xy = clip15.xy()
    nose = xy[:, _SUBSET_NOSE]
    up = nose - xy[:, _SUBSET_NECK]
    side = xy[:, _SUBSET_LSHOULDER] - xy[:, _SUBSET_RSHOULDER]

    coco = np.zeros((xy.shape[0], NUM_COCO, 2))
    for n, name in enumerate(COCO_17_JOINTS):
        if name in _COCO_FROM_SUBSET:
            coco[:, n] = xy[:, _COCO_FROM_SUBSET[name]]
        else:
            offset = COCO_FACE_OFFSETS[name]
            coco[:, n] = nose + offset['up'] * up + offset['side'] * side
    return MotionClip.from_xy(coco, id_label=clip15.id_label, mc_label=clip15.mc_label,
                              clip_id=clip15.clip_id, fps=clip15.fps)


def coco_from_body25(clip: MotionClip) -> MotionClip:
    """Reference COCO-17 clip read directly off a full BODY_25 clip (mapper targets)."""
    _check_joints(clip, NUM_JOINTS, "coco_from_body25")
    lookup = {**COCO_FROM_BODY_25, **COCO_FACE_FROM_BODY_25}
    return _select_joints(clip, [lookup[name] for name in COCO_17_JOINTS])


class KeypointMapper(nn.Module):
    """Per-frame 30 -> 34 regression: linear path plus a one-hidden-layer perceptron, no biases."""

    def __init__(self, hidden: int = 64, negative_slope: float = 0.2):
        super().__init__()
        self.negative_slope = negative_slope
        self.linear = nn.Linear(2 * NUM_SUBSET, 2 * NUM_COCO, bias=False)
        self.fc1 = nn.Linear(2 * NUM_SUBSET, hidden, bias=False)
        self.fc2 = nn.Linear(hidden, 2 * NUM_COCO, bias=False)
        self.trained = False

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        """(F, 30) -> (F, 34)."""
        return self.linear(frames) + self.fc2(F.leaky_relu(self.fc1(frames), self.negative_slope))

    def map_clip(self, clip15: MotionClip) -> MotionClip:
        _check_joints(clip15, NUM_SUBSET, "map_15_to_17")
        dtype = self.linear.weight.dtype
        with torch.no_grad():
            out = self(torch.as_tensor(clip15.data.T, dtype=dtype)).to(torch.float64).numpy()
        return MotionClip(data=out.T, id_label=clip15.id_label, mc_label=clip15.mc_label,
                          clip_id=clip15.clip_id, fps=clip15.fps)


def map_15_to_17(clip15: MotionClip, mapper: Optional[KeypointMapper] = None,
                 use_baseline: bool = False) -> MotionClip:
    """Map a 15-joint clip to COCO-17.

    Raises:
        ConfigurationError: If no trained mapper is given and the baseline is off
    """
    if use_baseline:
        return baseline_map_15_to_17(clip15)
    if mapper is None or not mapper.trained:
        raise ConfigurationError("15 -> 17 mapping needs a trained mapper or use_baseline=True")
    return mapper.map_clip(clip15)


def to_coco17(clip: MotionClip, mapper: Optional[KeypointMapper] = None, use_baseline: bool = False) -> MotionClip:
    """BODY_25 -> 15 -> COCO-17."""
    return map_15_to_17(map_25_to_15(clip), mapper, use_baseline)


def fit_keypoint_mapper(clips: Sequence[MotionClip], epochs: int = 300, seed: int = 0,
                        lr: float = 1e-3, hidden: int = 64) -> KeypointMapper:
    """Train the 15 -> 17 mapper on frames of full BODY_25 clips.

    Inputs are the 15 subset joints, targets the COCO-17 layout read off the
    same frame (eyes and ears from the BODY_25 eye and ear joints).
    """
    if not clips:
        raise ValueError("fit_keypoint_mapper needs at least one clip")
    torch.manual_seed(seed)
    inputs = torch.as_tensor(np.concatenate([map_25_to_15(c).data.T for c in clips]), dtype=torch.float32)
    targets = torch.as_tensor(np.concatenate([coco_from_body25(c).data.T for c in clips]), dtype=torch.float32)

    mapper = KeypointMapper(hidden=hidden)
    # Least-squares start for the linear path; the perceptron starts silent
    with torch.no_grad():
        mapper.linear.weight.copy_(torch.linalg.lstsq(inputs, targets).solution.T)
        mapper.fc2.weight.zero_()
    optimizer = torch.optim.Adam(mapper.parameters(), lr=lr)
    for epoch in range(epochs):
        optimizer.zero_grad()
        loss = F.l1_loss(mapper(inputs), targets)
        loss.backward()
        optimizer.step()
        if epoch % 100 == 0:
            logger.debug(f"Mapper epoch {epoch}: L1 {loss.item():.5f}")

    mapper.trained = True
    mapper.eval()
    with torch.no_grad():
        final = F.l1_loss(mapper(inputs), targets).item()
    logger.info(f"Fitted keypoint mapper on {inputs.shape[0]} frames, final L1 {final:.5f}")
    return mapper

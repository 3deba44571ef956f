"""Keypoint Cleaning.

Turns raw pose-estimation output into normalized fixed-length clips:
- drop frames with more than a third of the joints missing
- fill the remaining gaps from the five frames before and after
- cut non-overlapping windows of T frames
- center on the mid-hip and scale by the torso length
"""
import logging
from pathlib import Path
from typing import Hashable, List, Optional, Union

import numpy as np

from src.config.skeleton_config import MID_HIP, NECK, NUM_JOINTS
from src.errors import RetargetError

from .keypoint_loader import KeypointFormat, load_raw_sequence
from .skeleton_models import DatasetIndex, MotionClip, RawSequence

logger = logging.getLogger(__name__)

PAD_WINDOW = 5
MAX_MISSING = NUM_JOINTS // 3


class UnreconstructableJointError(RetargetError):
    """Raised when a missing joint is absent from the whole sequence."""
    pass


class DegeneratePoseError(RetargetError):
    """Raised when a clip has zero mean torso length."""
    pass


def clean_frames(seq: RawSequence) -> RawSequence:
    """Keep frames with at most floor(J / 3) missing joints, in order."""
    missing_counts = seq.missing.sum(axis=1)
    keep = missing_counts <= MAX_MISSING
    dropped = int((~keep).sum())
    if dropped:
        logger.debug(f"Dropped {dropped} of {len(seq)} frames for subject {seq.subject_id}")
    return seq.with_frames(seq.frames[keep])


def pad_missing(seq: RawSequence) -> RawSequence:
    """Fill missing joints from neighbouring frames.

    Each missing joint becomes the confidence-weighted mean of its present
    occurrences in [t - 5, t + 5] excluding t. If the window has none, the
    nearest present occurrence in the whole sequence is used (earlier frame
    wins a tie). Present joints are returned unchanged.

    Raises:
        ValueError: If a frame still has more than floor(J / 3) missing joints
        UnreconstructableJointError: If a joint is missing in every frame
    """
    frames = seq.frames
    missing = seq.missing
    over = np.flatnonzero(missing.sum(axis=1) > MAX_MISSING)
    if over.size:
        raise ValueError(f"Frame {int(over[0])} has too many missing joints; run clean_frames first")

    padded = frames.copy()
    n_frames = frames.shape[0]
    for t, j in np.argwhere(missing):
        lo, hi = max(0, t - PAD_WINDOW), min(n_frames, t + PAD_WINDOW + 1)
        window = [s for s in range(lo, hi) if s != t and not missing[s, j]]
        if window:
            weights = frames[window, j, 2]
            padded[t, j, :2] = weights @ frames[window, j, :2] / weights.sum()
            padded[t, j, 2] = weights.mean()
            continue

        present = np.flatnonzero(~missing[:, j])
        if present.size == 0:
            raise UnreconstructableJointError(
                f"Joint {int(j)} missing at frame {int(t)} and in every other frame"
            )
        nearest = present[np.argmin(np.abs(present - t))]
        padded[t, j] = frames[nearest, j]

    return seq.with_frames(padded)


def normalize(clip: MotionClip) -> MotionClip:
    """Center on the mid-hip temporal mean and divide by the mean torso length.

    Raises:
        DegeneratePoseError: If the mean neck-to-mid-hip distance is zero
    """
    xy = clip.xy()
    center = xy[:, MID_HIP].mean(axis=0)
    torso = np.linalg.norm(xy[:, NECK] - xy[:, MID_HIP], axis=-1).mean()
    if not np.isfinite(torso) or torso <= 0:
        raise DegeneratePoseError(f"Clip {clip.clip_id} has a degenerate torso (mean length {torso})")
    normalized = (xy - center) / torso
    return clip.with_data(np.concatenate([normalized[:, :, 0].T, normalized[:, :, 1].T], axis=0))


def trim_clips(seq: RawSequence, T: int = 64, apply_normalization: bool = True) -> List[MotionClip]:
    """Cut consecutive non-overlapping windows of T frames; the remainder is dropped.

    Clips inherit subject_id as ID label. The MC label is content_id when
    given, otherwise the window index, since aligned recordings share the same
    choreography at the same position.
    """
    clips = []
    for k in range(len(seq) // T):
        window = seq.frames[k * T:(k + 1) * T, :, :2]
        clip = MotionClip.from_xy(
            window,
            id_label=seq.subject_id,
            mc_label=seq.content_id if seq.content_id is not None else k,
            clip_id=f"{seq.subject_id}_{k:04d}",
            fps=seq.fps,
        )
        clips.append(normalize(clip) if apply_normalization else clip)
    return clips


def preprocess_sequence(seq: RawSequence, T: int = 64) -> List[MotionClip]:
    """clean -> pad -> trim for one sequence."""
    cleaned = clean_frames(seq)
    if len(cleaned) == 0:
        logger.warning(f"Subject {seq.subject_id}: no valid frames after cleaning")
        return []
    return trim_clips(pad_missing(cleaned), T=T)


def preprocess_directory(root: Union[str, Path], T: int = 64, fps: float = 30.0,
                         format: Union[str, KeypointFormat] = KeypointFormat.OPENPOSE_JSON_DIR,
                         content_id: Optional[Hashable] = None) -> DatasetIndex:
    """Preprocess every subject under root into one DatasetIndex.

    For openpose_json_dir input each subdirectory of root is one subject; for
    clip_container input each container file is one sequence.
    """
    root = Path(root)
    fmt = KeypointFormat(format)
    if fmt is KeypointFormat.OPENPOSE_JSON_DIR:
        sources = sorted(p for p in root.iterdir() if p.is_dir())
        if not sources and any(root.glob('*.json')):
            sources = [root]
    else:
        sources = sorted(root.glob('*.txt')) if root.is_dir() else [root]

    index = DatasetIndex()
    for source in sources:
        seq = load_raw_sequence(source, fmt, fps=fps, content_id=content_id)
        clips = preprocess_sequence(seq, T=T)
        for clip in clips:
            index.add(clip)
        logger.info(f"{source.name}: {len(seq)} frames -> {len(clips)} clips")
    return index

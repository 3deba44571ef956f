"""Keypoint data models.

=== ARRAY LAYOUT ===
RawSequence.frames is (F, J, 3) with columns [x, y, confidence].
MotionClip.data is (2J, T) with rows [x_0..x_{J-1}, y_0..y_{J-1}].
A joint is missing when its confidence is 0 or it sits exactly at the origin,
whatever its confidence.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, Hashable, Iterator, List, Optional, Tuple

import numpy as np

from src.config.skeleton_config import NUM_JOINTS

TRAIN = 'train'
TEST = 'test'


@dataclass
class RawSequence:
    """Per-frame keypoints with confidences, before cleaning."""
    frames: np.ndarray
    fps: float = 30.0
    subject_id: Hashable = None
    content_id: Optional[Hashable] = None

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64).reshape(-1, NUM_JOINTS, 3)
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def missing(self) -> np.ndarray:
        """Boolean (F, J) mask of missing joints."""
        x, y, conf = self.frames[:, :, 0], self.frames[:, :, 1], self.frames[:, :, 2]
        return (conf <= 0.0) | ((x == 0.0) & (y == 0.0))

    def with_frames(self, frames: np.ndarray) -> 'RawSequence':
        return replace(self, frames=frames)


@dataclass
class MotionClip:
    """A (2J x T) keypoint clip, the unit every model component consumes."""
    data: np.ndarray
    id_label: Hashable = None
    mc_label: Hashable = None
    clip_id: Optional[str] = None
    fps: float = 30.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[0] % 2 != 0:
            raise ValueError(f"Clip data must be (2J, T), got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError(f"Clip {self.clip_id} contains non-finite coordinates")

    @property
    def num_joints(self) -> int:
        return self.data.shape[0] // 2

    @property
    def num_frames(self) -> int:
        return self.data.shape[1]

    def xy(self) -> np.ndarray:
        """Coordinates as (T, J, 2)."""
        j = self.num_joints
        return np.stack([self.data[:j].T, self.data[j:].T], axis=-1)

    @classmethod
    def from_xy(cls, xy: np.ndarray, **labels) -> 'MotionClip':
        """Build a clip from (T, J, 2) coordinates."""
        xy = np.asarray(xy, dtype=np.float64)
        return cls(data=np.concatenate([xy[:, :, 0].T, xy[:, :, 1].T], axis=0), **labels)

    def with_data(self, data: np.ndarray) -> 'MotionClip':
        return replace(self, data=data)


@dataclass
class TripletSample:
    """Three clips: m1/m2 share MC, m2/m3 share ID."""
    m1: MotionClip
    m2: MotionClip
    m3: MotionClip

    def __post_init__(self):
        if self.m1.mc_label != self.m2.mc_label or self.m1.id_label == self.m2.id_label:
            raise ValueError("m1 and m2 must share the MC label and differ in ID label")
        if self.m2.id_label != self.m3.id_label or self.m2.mc_label == self.m3.mc_label:
            raise ValueError("m2 and m3 must share the ID label and differ in MC label")

    @property
    def branches(self) -> Tuple[MotionClip, MotionClip, MotionClip]:
        return (self.m1, self.m2, self.m3)


@dataclass
class DatasetIndex:
    """Grid of clips keyed by (id_label, mc_label) with an identity-level split."""
    grid: Dict[Tuple[Hashable, Hashable], List[MotionClip]] = field(default_factory=dict)
    split: Dict[Hashable, str] = field(default_factory=dict)

    def __post_init__(self):
        for id_label in self.id_labels:
            self.split.setdefault(id_label, TRAIN)

    def add(self, clip: MotionClip, split: Optional[str] = None) -> None:
        self.grid.setdefault((clip.id_label, clip.mc_label), []).append(clip)
        if split is not None:
            self.split[clip.id_label] = split
        else:
            self.split.setdefault(clip.id_label, TRAIN)

    @property
    def id_labels(self) -> List[Hashable]:
        return sorted({key[0] for key in self.grid}, key=str)

    @property
    def mc_labels(self) -> List[Hashable]:
        return sorted({key[1] for key in self.grid}, key=str)

    def cell(self, id_label: Hashable, mc_label: Hashable) -> List[MotionClip]:
        return self.grid.get((id_label, mc_label), [])

    def clips(self) -> Iterator[MotionClip]:
        """All clips in deterministic (id, mc, position) order."""
        for key in sorted(self.grid, key=lambda k: (str(k[0]), str(k[1]))):
            yield from self.grid[key]

    def clips_for_id(self, id_label: Hashable) -> List[MotionClip]:
        return [clip for clip in self.clips() if clip.id_label == id_label]

    def __len__(self) -> int:
        return sum(len(cell) for cell in self.grid.values())

    def subset(self, split: str) -> 'DatasetIndex':
        """Index restricted to identities of one split."""
        keep = {id_label for id_label, side in self.split.items() if side == split}
        return DatasetIndex(
            grid={key: list(clips) for key, clips in self.grid.items() if key[0] in keep},
            split={id_label: side for id_label, side in self.split.items() if id_label in keep},
        )

    def train(self) -> 'DatasetIndex':
        return self.subset(TRAIN)

    def test(self) -> 'DatasetIndex':
        return self.subset(TEST)

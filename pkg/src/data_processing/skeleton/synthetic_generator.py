"""Synthetic identity x content motion grid.

A 25-joint stick figure with fixed bone lengths is animated by joint-angle
trajectories. Content c fixes the trajectory shape (frequency, waveform,
per-joint amplitude and phase); identity i restyles every content the same
way (per-limb amplitude scaling, a phase offset and a static posture bias).
All three are linear in a few per-identity traits shared through fixed
loadings, so styles of unseen identities stay inside the span of the
training identities. Identity lives in the motion dynamics, never in the
bone lengths.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from src.config.run_config import DatasetConfig
from src.config.skeleton_config import BODY_25_PARENTS, NUM_JOINTS

from .keypoint_cleaner import normalize
from .skeleton_models import TEST, TRAIN, DatasetIndex, MotionClip

logger = logging.getLogger(__name__)

# Rest pose: absolute bone direction in degrees (image coordinates, -90 = up) and length in pixels
REST_POSE = {
    1: (-90, 50), 0: (-90, 25),
    2: (180, 20), 3: (100, 28), 4: (90, 25),
    5: (0, 20), 6: (80, 28), 7: (90, 25),
    9: (180, 10), 10: (92, 40), 11: (90, 38),
    12: (0, 10), 13: (88, 40), 14: (90, 38),
    15: (-120, 5), 16: (-60, 5), 17: (160, 5), 18: (20, 5),
    19: (20, 10), 20: (90, 3), 21: (160, 5),
    22: (160, 10), 23: (90, 3), 24: (20, 5),
}

# Animated joints, the limb group each belongs to, and its amplitude range in degrees
ANIMATED_JOINTS = [
    (1, 'torso', (5, 12)),
    (0, 'torso', (5, 15)),
    (3, 'right_arm', (20, 60)),
    (4, 'right_arm', (10, 40)),
    (6, 'left_arm', (20, 60)),
    (7, 'left_arm', (10, 40)),
    (10, 'right_leg', (10, 30)),
    (11, 'right_leg', (5, 25)),
    (13, 'left_leg', (10, 30)),
    (14, 'left_leg', (5, 25)),
]
LIMB_GROUPS = ['torso', 'right_arm', 'left_arm', 'right_leg', 'left_leg']
ROOT_POSITION = np.array([256.0, 300.0])
N_WAVEFORMS = 3

# Seed-sequence tags keep identity, content and noise streams independent
_IDENTITY_TAG, _CONTENT_TAG, _NOISE_TAG, _LOADING_TAG = 1, 2, 3, 4
N_STYLE_TRAITS = 3


def _waveform(kind: int, phase: np.ndarray) -> np.ndarray:
    if kind == 0:
        return np.sin(phase)
    if kind == 1:
        return (2.0 / np.pi) * np.arcsin(np.sin(phase))
    return np.tanh(2.5 * np.sin(phase)) / np.tanh(2.5)


class SyntheticMotionGenerator:
    """Deterministic generator of identity-styled stick-figure motion."""

    def __init__(self, seed: int = 0, T: int = 64, noise_deg: float = 1.5, fps: float = 30.0):
        self.seed = seed
        self.T = T
        self.noise_deg = noise_deg
        self.fps = fps
        self._group_of = np.array([LIMB_GROUPS.index(group) for _, group, _ in ANIMATED_JOINTS])
        self._loadings = self.style_loadings()

    def content_params(self, c: int) -> Dict[str, np.ndarray]:
        """Trajectory shape of content c."""
        rng = np.random.default_rng([self.seed, _CONTENT_TAG, c])
        low = np.array([lo for _, _, (lo, _) in ANIMATED_JOINTS], dtype=np.float64)
        high = np.array([hi for _, _, (_, hi) in ANIMATED_JOINTS], dtype=np.float64)
        return {
            'frequency': np.float64(1 + c % 3),
            'waveform': np.int64((c // 3) % N_WAVEFORMS),
            'amplitude': np.deg2rad(rng.uniform(low, high)),
            'phase': rng.uniform(0.0, 2 * np.pi, size=len(ANIMATED_JOINTS)),
            'root_amplitude': rng.uniform(3.0, 8.0, size=2),
            'root_phase': rng.uniform(0.0, 2 * np.pi, size=2),
        }

    def style_loadings(self) -> Dict[str, np.ndarray]:
        """Fixed maps from identity traits to log-amplitude scale, phase offset and bias (degrees)."""
        rng = np.random.default_rng([self.seed, _LOADING_TAG])
        return {
            'scale': rng.uniform(-0.3, 0.3, size=(len(LIMB_GROUPS), N_STYLE_TRAITS)),
            'phase_offset': rng.uniform(-0.25, 0.25, size=N_STYLE_TRAITS),
            'bias': rng.uniform(-8.0, 8.0, size=(len(ANIMATED_JOINTS), N_STYLE_TRAITS)),
        }

    def identity_style(self, i: int) -> Dict[str, np.ndarray]:
        """Style transform of identity i."""
        rng = np.random.default_rng([self.seed, _IDENTITY_TAG, i])
        traits = rng.uniform(-1.0, 1.0, size=N_STYLE_TRAITS)
        return {
            'traits': traits,
            'scale': np.exp(self._loadings['scale'] @ traits),
            'phase_offset': np.float64(self._loadings['phase_offset'] @ traits),
            'bias': np.deg2rad(self._loadings['bias'] @ traits),
        }

    def content_trajectory(self, c: int, phase_shift: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """Unstyled joint angles (T, A) and root offsets (T, 2) of content c."""
        params = self.content_params(c)
        t = np.arange(self.T)[:, None] / self.T
        base = 2 * np.pi * params['frequency'] * t + phase_shift
        angles = params['amplitude'] * _waveform(params['waveform'], base + params['phase'])
        root = params['root_amplitude'] * _waveform(params['waveform'], base + params['root_phase'])
        return angles, root

    def identity_angles(self, i: int, c: int) -> Tuple[np.ndarray, np.ndarray]:
        """Noise-free angles and root offsets of identity i performing content c."""
        style = self.identity_style(i)
        angles, root = self.content_trajectory(c, phase_shift=style['phase_offset'])
        styled = style['bias'] + style['scale'][self._group_of] * angles
        return styled, style['scale'][0] * root

    def strip_identity_style(self, angles: np.ndarray, i: int) -> np.ndarray:
        """Undo the bias and amplitude scaling of identity i."""
        style = self.identity_style(i)
        return (angles - style['bias']) / style['scale'][self._group_of]

    @staticmethod
    def forward_kinematics(angles: np.ndarray, root: np.ndarray) -> np.ndarray:
        """Joint positions (T, J, 2) from animated angle offsets (T, A) and root offsets (T, 2)."""
        n_frames = angles.shape[0]
        offsets = np.zeros((n_frames, NUM_JOINTS))
        for a, (joint, _, _) in enumerate(ANIMATED_JOINTS):
            offsets[:, joint] = angles[:, a]

        positions = np.zeros((n_frames, NUM_JOINTS, 2))
        absolute = np.zeros((n_frames, NUM_JOINTS))
        for joint, parent in BODY_25_PARENTS.items():
            if parent < 0:
                positions[:, joint] = ROOT_POSITION + root
                continue
            rest_angle, length = REST_POSE[joint]
            parent_rest = REST_POSE[parent][0] if parent in REST_POSE else 0.0
            absolute[:, joint] = absolute[:, parent] + np.deg2rad(rest_angle - parent_rest) + offsets[:, joint]
            direction = np.stack([np.cos(absolute[:, joint]), np.sin(absolute[:, joint])], axis=-1)
            positions[:, joint] = positions[:, parent] + length * direction
        return positions

    def clip(self, i: int, c: int, k: int = 0, id_label=None, mc_label=None) -> MotionClip:
        """k-th noisy clip of identity i performing content c, normalized."""
        angles, root = self.identity_angles(i, c)
        rng = np.random.default_rng([self.seed, _NOISE_TAG, i, c, k])
        angles = angles + rng.normal(0.0, np.deg2rad(self.noise_deg), size=angles.shape)
        xy = self.forward_kinematics(angles, root)
        clip = MotionClip.from_xy(
            xy,
            id_label=id_label if id_label is not None else f"id{i:03d}",
            mc_label=mc_label if mc_label is not None else f"mc{c:03d}",
            clip_id=f"syn_i{i:03d}_c{c:03d}_k{k:02d}",
            fps=self.fps,
        )
        return normalize(clip)


def synth_generate(n_ids: int, n_contents: int, T: int = 64, seed: int = 0,
                   clips_per_cell: int = 2, noise_deg: float = 1.5, first_id: int = 0) -> DatasetIndex:
    """Generate a fully populated (identity x content) grid.

    Args:
        n_ids: Number of identities (>= 2)
        n_contents: Number of contents (>= 2)
        T: Clip length
        seed: Generator seed
        clips_per_cell: Noisy clips per (identity, content) cell
        noise_deg: Std of the per-clip joint-angle noise in degrees
        first_id: Index of the first identity, to draw disjoint identity sets

    Returns:
        DatasetIndex with every identity in the train split
    """
    if n_ids < 2 or n_contents < 2:
        raise ValueError(f"Need at least 2 identities and 2 contents, got {n_ids} x {n_contents}")

    generator = SyntheticMotionGenerator(seed=seed, T=T, noise_deg=noise_deg)
    index = DatasetIndex()
    for i in range(first_id, first_id + n_ids):
        for c in range(n_contents):
            for k in range(clips_per_cell):
                index.add(generator.clip(i, c, k))
    logger.info(f"Generated {len(index)} synthetic clips ({n_ids} ids x {n_contents} contents)")
    return index


def build_synthetic_dataset(config: DatasetConfig) -> Tuple[DatasetIndex, List[MotionClip]]:
    """Train/test grid plus clips of one extra, never-indexed subject.

    Train identities come first, then n_test_ids test identities; the new
    subject used by the crossing stage is the identity after those.
    """
    total_ids = config.n_ids + config.n_test_ids
    index = synth_generate(
        total_ids, config.n_contents, T=config.clip_length, seed=config.seed,
        clips_per_cell=config.clips_per_cell, noise_deg=config.noise_deg,
    )
    for n, id_label in enumerate(index.id_labels):
        index.split[id_label] = TRAIN if n < config.n_ids else TEST

    generator = SyntheticMotionGenerator(seed=config.seed, T=config.clip_length, noise_deg=config.noise_deg)
    new_subject = [generator.clip(total_ids, c) for c in range(config.n_contents)]
    return index, new_subject

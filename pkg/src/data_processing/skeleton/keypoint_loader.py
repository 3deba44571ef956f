"""Keypoint file I/O.

Reads OpenPose per-frame JSON output and the project's clip container, and
persists a DatasetIndex as clip files plus a CSV manifest.

Clip container layout (text, one file per clip):
    # MOTIONCLIP v1
    # {"joints": 25, "frames": 64, "id_label": ..., "mc_label": ..., "fps": 30.0, "clip_id": ...}
    <2J rows of T decimal numbers, row-major>
"""
import hashlib
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Hashable, List, Optional, Union

import numpy as np
import pandas as pd

from src.config.skeleton_config import NUM_JOINTS
from src.errors import RetargetError

from .skeleton_models import DatasetIndex, MotionClip, RawSequence

logger = logging.getLogger(__name__)

CLIP_MAGIC = 'MOTIONCLIP v1'
CLIP_SUFFIX = '.clip.txt'
MANIFEST_NAME = 'manifest.csv'
VALUES_PER_FRAME = NUM_JOINTS * 3


class KeypointFormatError(RetargetError):
    """Raised when a keypoint record or clip file is malformed."""
    pass


class EmptyInputError(RetargetError):
    """Raised when an input directory holds no frame records."""
    pass


class KeypointFormat(str, Enum):
    OPENPOSE_JSON_DIR = 'openpose_json_dir'
    CLIP_CONTAINER = 'clip_container'


def _frame_values(record: Union[dict, list], frame_name: str) -> np.ndarray:
    """Extract the flat 75-number keypoint array from one frame record."""
    if isinstance(record, dict):
        if 'people' in record:
            people = record['people']
            if not people:
                # Nothing detected: an all-missing frame that cleaning will drop
                return np.zeros(VALUES_PER_FRAME)
            values = people[0].get('pose_keypoints_2d')
        else:
            values = record.get('keypoints', record.get('pose_keypoints_2d'))
    else:
        values = record

    if values is None:
        raise KeypointFormatError(f"Frame {frame_name}: no keypoint array found")
    try:
        values = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise KeypointFormatError(f"Frame {frame_name}: non-numeric keypoints ({e})")
    if values.ndim != 1 or values.size != VALUES_PER_FRAME:
        raise KeypointFormatError(
            f"Frame {frame_name}: expected {VALUES_PER_FRAME} numbers, got {values.size}"
        )
    return values


def _load_openpose_dir(path: Path, fps: float, subject_id: Hashable,
                       content_id: Optional[Hashable]) -> RawSequence:
    files = sorted(path.glob('*.json'))
    if not files:
        raise EmptyInputError(f"No frame records found in {path}")

    frames = []
    for frame_file in files:
        try:
            record = json.loads(frame_file.read_text())
        except json.JSONDecodeError as e:
            raise KeypointFormatError(f"Frame {frame_file.name}: invalid JSON ({e})")
        frames.append(_frame_values(record, frame_file.name).reshape(NUM_JOINTS, 3))

    frames = np.stack(frames)
    # OpenPose writes (0, 0, 0) for undetected joints
    undetected = (frames[:, :, 0] == 0) & (frames[:, :, 1] == 0)
    frames[undetected, 2] = 0.0
    if np.any(frames[:, :, 2] < 0) or np.any(frames[:, :, 2] > 1):
        bad = int(np.argwhere((frames[:, :, 2] < 0) | (frames[:, :, 2] > 1))[0, 0])
        raise KeypointFormatError(f"Frame {files[bad].name}: confidence outside [0, 1]")

    logger.debug(f"Loaded {len(files)} frames from {path}")
    return RawSequence(
        frames=frames,
        fps=fps,
        subject_id=subject_id if subject_id is not None else path.name,
        content_id=content_id,
    )


def load_raw_sequence(path: Union[str, Path], format: Union[str, KeypointFormat] = KeypointFormat.OPENPOSE_JSON_DIR,
                      fps: float = 30.0, subject_id: Hashable = None,
                      content_id: Optional[Hashable] = None) -> RawSequence:
    """Load a keypoint sequence.

    Args:
        path: Directory of per-frame JSON records, or a clip container file
        format: Which of the two layouts path holds
        fps: Frame rate for directory input (containers carry their own)
        subject_id: Identity label; defaults to the directory name
        content_id: Optional content label

    Returns:
        RawSequence with frames in file-name order

    Raises:
        KeypointFormatError: If a record is malformed
        EmptyInputError: If the directory has no records
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Keypoint input not found: {path}")

    fmt = KeypointFormat(format)
    if fmt is KeypointFormat.OPENPOSE_JSON_DIR:
        return _load_openpose_dir(path, fps, subject_id, content_id)

    clip = load_clip(path)
    frames = np.concatenate([clip.xy(), np.ones((clip.num_frames, clip.num_joints, 1))], axis=-1)
    return RawSequence(
        frames=frames,
        fps=clip.fps,
        subject_id=clip.id_label if subject_id is None else subject_id,
        content_id=clip.mc_label if content_id is None else content_id,
    )


def save_raw_sequence(seq: RawSequence, out_dir: Union[str, Path], prefix: str = 'frame') -> List[Path]:
    """Write a sequence as OpenPose-style per-frame JSON records."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    paths = []
    for i, frame in enumerate(seq.frames):
        record = {
            'version': 1.3,
            'people': [{
                'person_id': [-1],
                'pose_keypoints_2d': [float(v) for v in frame.reshape(-1)],
            }],
        }
        frame_path = out_dir / f"{prefix}_{i:012d}_keypoints.json"
        frame_path.write_text(json.dumps(record))
        paths.append(frame_path)
    return paths


def save_clip(clip: MotionClip, path: Union[str, Path]) -> Path:
    """Write a clip container file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        'joints': clip.num_joints,
        'frames': clip.num_frames,
        'id_label': clip.id_label,
        'mc_label': clip.mc_label,
        'fps': clip.fps,
        'clip_id': clip.clip_id,
    }
    np.savetxt(path, clip.data, fmt='%.17g', header=f"{CLIP_MAGIC}\n{json.dumps(header)}", comments='# ')
    return path


def load_clip(path: Union[str, Path]) -> MotionClip:
    """Read a clip container file."""
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        magic = f.readline().lstrip('# ').strip()
        header_line = f.readline().lstrip('# ').strip()

    if magic != CLIP_MAGIC:
        raise KeypointFormatError(f"{path.name}: not a clip container (header {magic!r})")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as e:
        raise KeypointFormatError(f"{path.name}: unreadable header ({e})")

    data = np.loadtxt(path, comments='#', ndmin=2)
    expected = (2 * header['joints'], header['frames'])
    if data.shape != expected:
        raise KeypointFormatError(f"{path.name}: expected shape {expected}, got {data.shape}")

    return MotionClip(
        data=data,
        id_label=header.get('id_label'),
        mc_label=header.get('mc_label'),
        clip_id=header.get('clip_id'),
        fps=header.get('fps', 30.0),
    )


def write_manifest(index: DatasetIndex, out_dir: Union[str, Path]) -> Path:
    """Write every clip as a container file and list them in manifest.csv."""
    out_dir = Path(out_dir)
    clip_dir = out_dir / 'clips'

    rows = []
    for n, clip in enumerate(index.clips()):
        clip_id = clip.clip_id or f"clip_{n:06d}"
        clip_path = clip_dir / f"{clip_id}{CLIP_SUFFIX}"
        save_clip(clip, clip_path)
        rows.append({
            'id_label': clip.id_label,
            'mc_label': clip.mc_label,
            'clip_path': str(clip_path.relative_to(out_dir)),
            'split': index.split[clip.id_label],
        })

    manifest_path = out_dir / MANIFEST_NAME
    pd.DataFrame(rows, columns=['id_label', 'mc_label', 'clip_path', 'split']).to_csv(manifest_path, index=False)
    logger.info(f"Wrote manifest with {len(rows)} clips to {manifest_path}")
    return manifest_path


def load_manifest(manifest_path: Union[str, Path]) -> DatasetIndex:
    """Rebuild a DatasetIndex from manifest.csv and its clip files."""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"Manifest not found: {manifest_path}")

    df = pd.read_csv(manifest_path, dtype=str)
    missing_cols = [col for col in ['clip_path', 'split'] if col not in df.columns]
    if missing_cols:
        raise KeypointFormatError(f"Manifest missing columns: {missing_cols}")

    index = DatasetIndex()
    for _, row in df.iterrows():
        # Typed labels come from the clip header, not the CSV
        clip = load_clip(manifest_path.parent / row['clip_path'])
        index.add(clip, split=row['split'])
    logger.info(f"Loaded {len(index)} clips from {manifest_path}")
    return index


def index_digest(index: DatasetIndex) -> str:
    """sha256 over labels, split and coordinates of every clip."""
    digest = hashlib.sha256()
    for clip in index.clips():
        digest.update(repr((clip.id_label, clip.mc_label, index.split[clip.id_label])).encode())
        digest.update(np.ascontiguousarray(clip.data).tobytes())
    return digest.hexdigest()

"""Stick-figure rendering of motion clips.

Draws the BODY_25 limb graph as colored line segments, one PNG per frame.
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from src.config.skeleton_config import BODY_25_LIMBS, NUM_JOINTS
from src.data_processing.skeleton.skeleton_models import MotionClip
from src.errors import ConfigurationError

from .style_config import COLORS, DIMENSIONS

logger = logging.getLogger(__name__)


def _view_bounds(xy: np.ndarray, padding: float) -> Tuple[float, float, float, float]:
    """Square window around every joint of every frame."""
    lo, hi = xy.reshape(-1, 2).min(axis=0), xy.reshape(-1, 2).max(axis=0)
    center = (lo + hi) / 2
    half = max(hi - lo) / 2 * (1 + 2 * padding) or 1.0
    return center[0] - half, center[0] + half, center[1] - half, center[1] + half


def render_frame(xy: np.ndarray, bounds: Tuple[float, float, float, float], path: Path,
                 size: Tuple[int, int] = (512, 512)) -> Path:
    """Draw one (J, 2) pose. Image y grows downwards, as in keypoint coordinates."""
    frame = DIMENSIONS['frame']
    fig = plt.figure(figsize=(size[0] / frame['dpi'], size[1] / frame['dpi']), dpi=frame['dpi'])
    ax = fig.add_axes([0, 0, 1, 1])
    ax.set_facecolor(COLORS['background'])
    for group, limbs in BODY_25_LIMBS.items():
        for a, b in limbs:
            ax.plot(xy[[a, b], 0], xy[[a, b], 1], color=COLORS['limbs'][group],
                    linewidth=frame['line_width'], solid_capstyle='round')
    ax.scatter(xy[:, 0], xy[:, 1], s=frame['joint_size'], color=COLORS['joint'], zorder=3)
    x0, x1, y0, y1 = bounds
    ax.set_xlim(x0, x1)
    ax.set_ylim(y1, y0)
    ax.set_aspect('equal')
    ax.axis('off')
    fig.savefig(path, dpi=frame['dpi'], facecolor=COLORS['background'])
    plt.close(fig)
    return path


def render_clip(clip: MotionClip, out_dir: Union[str, Path], prefix: str = 'frame',
                size: Optional[Tuple[int, int]] = None) -> List[Path]:
    """Render every frame of a BODY_25 clip; returns the image paths in frame order."""
    if clip.num_joints != NUM_JOINTS:
        raise ConfigurationError(f"Renderer draws BODY_25 clips, got {clip.num_joints} joints")
    size = size or (DIMENSIONS['frame']['width'], DIMENSIONS['frame']['height'])
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    xy = clip.xy()
    bounds = _view_bounds(xy, DIMENSIONS['frame']['padding'])
    paths = [render_frame(xy[t], bounds, out_dir / f"{prefix}_{t:04d}.png", size) for t in range(clip.num_frames)]
    logger.info(f"Rendered {len(paths)} frames to {out_dir}")
    return paths

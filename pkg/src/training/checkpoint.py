"""Checkpoint persistence.

A checkpoint is one torch file holding a format version, named state dicts
for the generator and discriminator, both optimizer states, the epoch
counter, the run configuration and the digest of the training manifest.
Writes go to a temporary file that is renamed into place, so an interrupted
run always leaves the previous checkpoint readable.
"""
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import torch

from src.config.run_config import RunConfig
from src.errors import RetargetError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
LATEST_NAME = 'checkpoint_latest.pt'


class CheckpointError(RetargetError):
    """Raised when a checkpoint file is unreadable or from another format."""
    pass


@dataclass
class Checkpoint:
    model_state: Dict[str, torch.Tensor]
    discriminator_state: Dict[str, torch.Tensor]
    optimizer_states: Dict[str, Dict[str, Any]]
    epoch: int
    config: Dict[str, Any]
    step: int = 0
    manifest_digest: Optional[str] = None
    history: List[Dict[str, float]] = field(default_factory=list)
    format_version: int = FORMAT_VERSION

    @property
    def run_config(self) -> RunConfig:
        return RunConfig.model_validate(self.config)


def save_checkpoint(checkpoint: Checkpoint, path: Union[str, Path]) -> Path:
    """Atomically write checkpoint to path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_name(path.name + '.tmp')
    torch.save(asdict(checkpoint), tmp_path)
    os.replace(tmp_path, path)
    logger.info(f"Saved checkpoint at epoch {checkpoint.epoch} to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """Read a checkpoint written by save_checkpoint.

    Raises:
        FileNotFoundError: If path does not exist
        CheckpointError: If the file is corrupt or from another format version
    """
    path = Path(path)
    if path.is_dir():
        path = path / LATEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")

    try:
        payload = torch.load(path, map_location='cpu', weights_only=True)
    except Exception as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}")

    if not isinstance(payload, dict) or payload.get('format_version') != FORMAT_VERSION:
        version = payload.get('format_version') if isinstance(payload, dict) else None
        raise CheckpointError(f"{path}: unsupported checkpoint format {version!r}, expected {FORMAT_VERSION}")
    try:
        return Checkpoint(**payload)
    except TypeError as e:
        raise CheckpointError(f"{path}: malformed checkpoint ({e})")

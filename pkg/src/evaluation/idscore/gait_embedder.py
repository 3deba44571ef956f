"""Gait embedders used by the IDScore protocol.

Any object with `dim` and `embed_batch(clips) -> (n, dim)` array can score
identities. Two implementations ship: a small temporal-convolution identity
classifier trained here, and a wrapper around an external TorchScript model.
"""
import logging
from pathlib import Path
from typing import Hashable, List, Optional, Protocol, Sequence, Union, runtime_checkable

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from src.config.run_config import EvalConfig
from src.config.skeleton_config import COCO_17_JOINTS
from src.data_processing.skeleton.skeleton_models import MotionClip
from src.errors import ConfigurationError, RetargetError
from src.modeling.clip_tensors import clips_to_tensor
from src.modeling.layers import init_weights
from src.modeling.losses.retarget_losses import batch_all_triplet

logger = logging.getLogger(__name__)

COCO_CHANNELS = 2 * len(COCO_17_JOINTS)
EXTERNAL_PREFIX = 'external:'


class EmbedderFitError(RetargetError):
    """Raised when the baseline embedder cannot be trained."""
    pass


@runtime_checkable
class GaitEmbedder(Protocol):
    dim: int

    def embed_batch(self, clips: Sequence[MotionClip]) -> np.ndarray:
        ...


class BaselineGaitEmbedder(nn.Module):
    """Temporal-convolution identity classifier; the layer before the classifier is the embedding."""

    def __init__(self, n_classes: int, channels: int = 64, dim: int = 64, negative_slope: float = 0.2):
        super().__init__()
        self.dim = dim
        self.negative_slope = negative_slope
        self.convs = nn.ModuleList([
            nn.Conv1d(COCO_CHANNELS, channels, 5, padding=2),
            nn.Conv1d(channels, channels, 5, stride=2, padding=2),
            nn.Conv1d(channels, channels, 3, stride=2, padding=1),
        ])
        self.embedding = nn.Linear(channels, dim)
        self.classifier = nn.Linear(dim, n_classes)

    def features(self, x: torch.Tensor) -> torch.Tensor:
        for conv in self.convs:
            x = F.leaky_relu(conv(x), self.negative_slope)
        return self.embedding(x.mean(dim=-1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.classifier(F.leaky_relu(self.features(x), self.negative_slope))

    def embed_batch(self, clips: Sequence[MotionClip]) -> np.ndarray:
        self.eval()
        with torch.no_grad():
            return self.features(clips_to_tensor(clips)).numpy().astype(np.float64)

    def embed(self, clip: MotionClip) -> np.ndarray:
        return self.embed_batch([clip])[0]


def baseline_embedder_fit(clips: Sequence[MotionClip], config: Optional[EvalConfig] = None,
                          batch_size: int = 32, lr: float = 1e-3) -> BaselineGaitEmbedder:
    """Train the baseline embedder on labeled COCO-17 clips.

    Loss is cross-entropy on the identity plus a batch-all triplet term on the
    L2-normalized embeddings.

    Raises:
        EmbedderFitError: If fewer than two identities are present
    """
    config = config or EvalConfig()
    labels: List[Hashable] = sorted({clip.id_label for clip in clips}, key=str)
    if len(labels) < 2:
        raise EmbedderFitError(f"Need >= 2 identities to fit the embedder, got {len(labels)}")
    if clips[0].num_joints != len(COCO_17_JOINTS):
        raise EmbedderFitError(f"Embedder expects COCO-17 clips, got {clips[0].num_joints} joints")

    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    x = clips_to_tensor(clips)
    y = torch.tensor([labels.index(clip.id_label) for clip in clips])

    model = BaselineGaitEmbedder(len(labels), config.embedder_channels, config.embedding_dim)
    init_weights(model)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    model.train()
    for epoch in range(config.embedder_epochs):
        order = torch.randperm(len(clips), generator=generator)
        for start in range(0, len(clips), batch_size):
            idx = order[start:start + batch_size]
            loss = F.cross_entropy(model(x[idx]), y[idx])
            batch_labels = y[idx].tolist()
            if len(set(batch_labels)) >= 2 and len(batch_labels) > len(set(batch_labels)):
                embeddings = F.normalize(model.features(x[idx]), dim=-1)
                loss = loss + batch_all_triplet(embeddings, batch_labels, delta=0.2)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        if epoch % 20 == 0:
            logger.debug(f"Embedder epoch {epoch}: loss {loss.item():.4f}")

    logger.info(f"Fitted baseline embedder on {len(clips)} clips of {len(labels)} identities")
    return model.eval()


class ExternalGaitEmbedder:
    """TorchScript module mapping (1, 34, T) to (1, D)."""

    def __init__(self, path: Union[str, Path]):
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"External embedder not found: {path}")
        self.module = torch.jit.load(str(path), map_location='cpu')
        self.module.eval()
        self.dim = None

    def embed(self, clip: MotionClip) -> np.ndarray:
        with torch.no_grad():
            out = self.module(clips_to_tensor([clip]))
        out = out.reshape(-1).numpy().astype(np.float64)
        if self.dim is None:
            self.dim = out.shape[0]
        elif out.shape[0] != self.dim:
            raise ConfigurationError(f"External embedder changed dimension from {self.dim} to {out.shape[0]}")
        return out

    def embed_batch(self, clips: Sequence[MotionClip]) -> np.ndarray:
        return np.stack([self.embed(clip) for clip in clips])


def build_embedder(spec: str, train_clips: Sequence[MotionClip], config: Optional[EvalConfig] = None) -> GaitEmbedder:
    """'baseline' trains on train_clips; 'external:<path>' loads a TorchScript model."""
    if spec == 'baseline':
        return baseline_embedder_fit(train_clips, config)
    if spec.startswith(EXTERNAL_PREFIX):
        return ExternalGaitEmbedder(spec[len(EXTERNAL_PREFIX):])
    raise ConfigurationError(f"Unknown embedder {spec!r}; use 'baseline' or 'external:<path>'")

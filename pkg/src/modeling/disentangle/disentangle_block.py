"""Disentanglement Block.

Splits a motion clip into a motion-content feature (what is performed) and an
identity feature (how this subject performs it).

=== ENCODERS ===
Both encoders stack eight temporal convolutions; three of them use stride 2 so
the latent width is T / 8. The MC encoder standardizes every layer with
instance normalization, which strips per-channel statistics and with them the
subject's style. The ID encoder has the same layout without normalization and
is pooled over time.

=== PROJECTION ===
The pooled identity vector is projected by a two-layer head without biases;
the triplet objective acts on the projection.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from src.config.run_config import DOWNSAMPLE_FACTOR, EncoderConfig, ModelConfig
from src.errors import ConfigurationError
from src.modeling.layers import instance_norm

logger = logging.getLogger(__name__)


@dataclass
class LatentBundle:
    """Encoder outputs for a batch of clips.

    f_mc: (B, C_mc, N)   f_id: (B, C_id, N)   f_bar_id: (B, C_id, 1)   h_id: (B, C_p, 1)
    """
    f_mc: torch.Tensor
    f_id: torch.Tensor
    f_bar_id: torch.Tensor
    h_id: torch.Tensor

    def detach(self) -> 'LatentBundle':
        return LatentBundle(*(t.detach() for t in (self.f_mc, self.f_id, self.f_bar_id, self.h_id)))


class TemporalEncoder(nn.Module):
    """Eight-layer temporal convolution stack."""

    def __init__(self, config: EncoderConfig, use_instance_norm: bool):
        super().__init__()
        self.config = config
        self.use_instance_norm = use_instance_norm
        channels = [config.in_channels] + config.channel_schedule()
        self.layers = nn.ModuleList([
            nn.Conv1d(c_in, c_out, config.kernel_size, stride=stride,
                      padding=config.kernel_size // 2, bias=not use_instance_norm)
            for c_in, c_out, stride in zip(channels[:-1], channels[1:], config.strides)
        ])

    @property
    def out_channels(self) -> int:
        return self.config.last_channels

    def check_input(self, x: torch.Tensor) -> None:
        if x.dim() != 3 or x.shape[1] != self.config.in_channels:
            raise ConfigurationError(
                f"Encoder expects (B, {self.config.in_channels}, T), got {tuple(x.shape)}"
            )
        if x.shape[-1] % DOWNSAMPLE_FACTOR != 0:
            raise ConfigurationError(f"Clip width {x.shape[-1]} is not divisible by {DOWNSAMPLE_FACTOR}")

    def layer_forward(self, i: int, x: torch.Tensor, normalize: bool = True) -> torch.Tensor:
        """conv -> LeakyReLU -> (IN) for layer i."""
        x = F.leaky_relu(self.layers[i](x), self.config.negative_slope)
        if self.use_instance_norm and normalize:
            x = instance_norm(x, self.config.eps)
        return x

    def activations(self, x: torch.Tensor) -> List[torch.Tensor]:
        """Output of every layer, in order."""
        self.check_input(x)
        outputs = []
        for i in range(len(self.layers)):
            x = self.layer_forward(i, x)
            outputs.append(x)
        return outputs

    def forward(self, x: torch.Tensor, start: int = 0) -> torch.Tensor:
        if start == 0:
            self.check_input(x)
        for i in range(start, len(self.layers)):
            x = self.layer_forward(i, x)
        return x


class ProjectionHead(nn.Module):
    """h = W2 LeakyReLU(W1 f), no biases."""

    def __init__(self, in_channels: int, out_channels: int, negative_slope: float = 0.2):
        super().__init__()
        self.negative_slope = negative_slope
        self.w1 = nn.Linear(in_channels, out_channels, bias=False)
        self.w2 = nn.Linear(out_channels, out_channels, bias=False)

    def forward(self, f_bar_id: torch.Tensor) -> torch.Tensor:
        if f_bar_id.shape[1] != self.w1.in_features:
            raise ConfigurationError(
                f"Projection expects {self.w1.in_features} channels, got {f_bar_id.shape[1]}"
            )
        v = f_bar_id.reshape(f_bar_id.shape[0], -1)
        h = self.w2(F.leaky_relu(self.w1(v), self.negative_slope))
        return h.unsqueeze(-1)


class DisentanglementBlock(nn.Module):
    """MC encoder, ID encoder and projection head."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.mc_encoder = TemporalEncoder(config.mc_encoder, use_instance_norm=True)
        self.id_encoder = TemporalEncoder(config.id_encoder, use_instance_norm=False)
        self.projection = (
            ProjectionHead(config.id_encoder.last_channels, config.projection_channels,
                           config.id_encoder.negative_slope)
            if config.use_projection_head else None
        )

    def encode_mc(self, x: torch.Tensor) -> torch.Tensor:
        return self.mc_encoder(x)

    def encode_id(self, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        f_id = self.id_encoder(x)
        return f_id, f_id.mean(dim=-1, keepdim=True)

    def project_id(self, f_bar_id: torch.Tensor) -> torch.Tensor:
        """Project the pooled identity feature; identity when the head is disabled."""
        if f_bar_id.dim() == 3 and f_bar_id.shape[-1] != 1:
            # A full sequence was passed; the head only ever sees the pooled vector
            f_bar_id = f_bar_id.mean(dim=-1, keepdim=True)
        if self.projection is None:
            return f_bar_id
        return self.projection(f_bar_id)

    def forward(self, x: torch.Tensor) -> LatentBundle:
        f_mc = self.encode_mc(x)
        f_id, f_bar_id = self.encode_id(x)
        return LatentBundle(f_mc=f_mc, f_id=f_id, f_bar_id=f_bar_id, h_id=self.project_id(f_bar_id))

    def encode(self, x: torch.Tensor) -> LatentBundle:
        return self(x)

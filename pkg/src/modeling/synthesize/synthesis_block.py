"""Motion Synthesis Block.

Fuses a motion-content feature with identity statistics through AdaIN and
decodes the result back to keypoint space with progressive-growing blocks.

=== PG DECODER ===
Two streams run side by side: features h and a keypoint-space stream y of
width 2J. y starts as ToImage(fused). Every block applies conv -> LeakyReLU ->
linear x2 upsampling to h and then blends

    y <- alpha * ToImage_b(h) + (1 - alpha) * up(y)

Before the final block the upsampled AdaIN output is added to h together with
(1 - alpha) * FromImage(y). ToImage and FromImage are kernel-size-1 convolutions.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import torch
import torch.nn as nn
import torch.nn.functional as F

from src.config.run_config import DecoderConfig, ModelConfig
from src.errors import ConfigurationError
from src.modeling.layers import adain

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-4


@dataclass
class StyleStats:
    """Per-channel target statistics, each (B, C_mc, 1); sigma > 0."""
    mu: torch.Tensor
    sigma: torch.Tensor


class IdentityStatsMLP(nn.Module):
    """Two-layer perceptron f_bar_id -> (mu, sigma)."""

    def __init__(self, in_channels: int, out_channels: int, hidden: Optional[int] = None,
                 negative_slope: float = 0.2):
        super().__init__()
        hidden = hidden or 2 * out_channels
        self.out_channels = out_channels
        self.negative_slope = negative_slope
        self.fc1 = nn.Linear(in_channels, hidden)
        self.fc2 = nn.Linear(hidden, 2 * out_channels)

    def forward(self, f_bar_id: torch.Tensor) -> StyleStats:
        v = f_bar_id.reshape(f_bar_id.shape[0], -1)
        out = self.fc2(F.leaky_relu(self.fc1(v), self.negative_slope))
        mu, raw_sigma = out[:, :self.out_channels], out[:, self.out_channels:]
        sigma = F.softplus(raw_sigma) + SIGMA_FLOOR
        return StyleStats(mu=mu.unsqueeze(-1), sigma=sigma.unsqueeze(-1))


def _upsample(x: torch.Tensor, factor: int) -> torch.Tensor:
    if factor == 1:
        return x
    return F.interpolate(x, scale_factor=factor, mode='linear', align_corners=False)


class PGDecoder(nn.Module):
    """Progressive-growing decoder from (B, C_mc, N) to (B, 2J, N * 2^blocks)."""

    def __init__(self, config: DecoderConfig, in_channels: int, out_channels: int, use_pg_blocks: bool = True):
        super().__init__()
        self.config = config
        self.alpha = config.alpha
        self.factor = config.upsample_factor
        self.use_pg_blocks = use_pg_blocks

        widths = [in_channels] + list(config.channels)
        self.blocks = nn.ModuleList([
            nn.Conv1d(c_in, c_out, config.kernel_size, padding=config.kernel_size // 2)
            for c_in, c_out in zip(widths[:-1], widths[1:])
        ])
        if use_pg_blocks:
            self.to_image = nn.ModuleList([nn.Conv1d(c, out_channels, 1) for c in widths])
            final_in = widths[-2]
            self.from_image = nn.Conv1d(out_channels, final_in, 1)
            self.skip = nn.Conv1d(in_channels, final_in, 1)
        else:
            self.to_image = nn.ModuleList([nn.Conv1d(widths[-1], out_channels, 1)])

    def _block(self, b: int, h: torch.Tensor) -> torch.Tensor:
        return _upsample(F.leaky_relu(self.blocks[b](h), self.config.negative_slope), self.factor)

    def forward(self, fused: torch.Tensor, y0: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Decode fused features; y0 overrides the initial keypoint-space stream."""
        if fused.shape[1] != self.blocks[0].in_channels:
            raise ConfigurationError(
                f"Decoder expects {self.blocks[0].in_channels} channels, got {fused.shape[1]}"
            )
        h = fused
        if not self.use_pg_blocks:
            for b in range(len(self.blocks)):
                h = self._block(b, h)
            return self.to_image[0](h)

        alpha = self.alpha
        last = len(self.blocks) - 1
        y = self.to_image[0](fused) if y0 is None else y0
        for b in range(len(self.blocks)):
            if b == last:
                h = h + self.skip(_upsample(fused, self.factor ** b)) + (1 - alpha) * self.from_image(y)
            h = self._block(b, h)
            y = alpha * self.to_image[b + 1](h) + (1 - alpha) * _upsample(y, self.factor)
        return y


class SynthesisBlock(nn.Module):
    """id_stats -> AdaIN -> PG decoder."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        c_mc = config.mc_encoder.last_channels
        self.eps = config.decoder.eps
        self.use_adain = config.use_adain
        self.stats = IdentityStatsMLP(config.id_encoder.last_channels, c_mc, config.decoder.stats_hidden,
                                      config.decoder.negative_slope)
        self.decoder = PGDecoder(config.decoder, c_mc, 2 * config.num_joints, config.use_pg_blocks)

    def id_stats(self, f_bar_id: torch.Tensor) -> StyleStats:
        return self.stats(f_bar_id)

    def fuse(self, f_mc: torch.Tensor, f_bar_id: torch.Tensor) -> torch.Tensor:
        stats = self.id_stats(f_bar_id)
        if self.use_adain:
            return adain(f_mc, stats.mu, stats.sigma, self.eps)
        return f_mc + stats.mu

    def forward(self, f_mc: torch.Tensor, f_bar_id: torch.Tensor) -> torch.Tensor:
        if f_mc.shape[0] != f_bar_id.shape[0]:
            raise ConfigurationError(f"Batch mismatch: {f_mc.shape[0]} MC vs {f_bar_id.shape[0]} ID features")
        return self.decoder(self.fuse(f_mc, f_bar_id))

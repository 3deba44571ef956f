"""Temporal-convolution discriminator scoring motion realism."""
import torch
import torch.nn as nn
import torch.nn.functional as F

from src.config.run_config import DiscriminatorConfig
from src.errors import ConfigurationError


class MotionDiscriminator(nn.Module):
    """Strided conv stack -> global temporal mean -> one unbounded score per clip.

    No normalization across the batch, so a clip's score never depends on
    the other clips it is batched with.
    """

    def __init__(self, config: DiscriminatorConfig):
        super().__init__()
        self.config = config
        widths = [config.in_channels] + list(config.channels)
        self.layers = nn.ModuleList([
            nn.Conv1d(c_in, c_out, config.kernel_size, stride=stride, padding=config.kernel_size // 2)
            for c_in, c_out, stride in zip(widths[:-1], widths[1:], config.strides)
        ])
        self.head = nn.Linear(widths[-1], 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 3 or x.shape[1] != self.config.in_channels:
            raise ConfigurationError(
                f"Discriminator expects (B, {self.config.in_channels}, T), got {tuple(x.shape)}"
            )
        for layer in self.layers:
            x = F.leaky_relu(layer(x), self.config.negative_slope)
        return self.head(x.mean(dim=-1)).squeeze(-1)


def discriminate(clip_data: torch.Tensor, discriminator: MotionDiscriminator) -> torch.Tensor:
    """Scores for a (B, 2J, T) batch or a single (2J, T) clip."""
    if clip_data.dim() == 2:
        return discriminator(clip_data.unsqueeze(0))[0]
    return discriminator(clip_data)

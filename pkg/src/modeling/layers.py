"""Normalization primitives and weight initialization shared by every network.

Tensors are batch-first, shaped (B, C, N) with N the temporal axis.
"""
import torch
import torch.nn as nn


def instance_norm(x: torch.Tensor, eps: float = 1e-5) -> torch.Tensor:
    """Standardize each channel of each sample over time (population variance)."""
    mean = x.mean(dim=-1, keepdim=True)
    var = x.var(dim=-1, unbiased=False, keepdim=True)
    return (x - mean) / torch.sqrt(var + eps)


def adain(x: torch.Tensor, mu: torch.Tensor, sigma: torch.Tensor, eps: float = 1e-5) -> torch.Tensor:
    """Restyle x with target statistics: sigma * IN(x) + mu.

    mu and sigma are (B, C) or (B, C, 1).
    """
    if mu.dim() == x.dim() - 1:
        mu, sigma = mu.unsqueeze(-1), sigma.unsqueeze(-1)
    return sigma * instance_norm(x, eps) + mu


def init_weights(module: nn.Module, negative_slope: float = 0.2) -> None:
    """Kaiming-normal (fan-in) init for conv and linear weights, zero biases."""
    for m in module.modules():
        if isinstance(m, (nn.Conv1d, nn.Linear)):
            nn.init.kaiming_normal_(m.weight, a=negative_slope, mode='fan_in', nonlinearity='leaky_relu')
            if m.bias is not None:
                nn.init.zeros_(m.bias)

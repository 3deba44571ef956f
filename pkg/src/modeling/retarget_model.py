"""Generator: disentanglement block followed by the synthesis block."""
import logging
from typing import Optional

import torch
import torch.nn as nn

from src.config.run_config import ModelConfig
from src.modeling.disentangle.disentangle_block import DisentanglementBlock, LatentBundle
from src.modeling.layers import init_weights
from src.modeling.synthesize.synthesis_block import SynthesisBlock

logger = logging.getLogger(__name__)


class RetargetModel(nn.Module):
    """M_sys = S(f_mc(source), f_bar_id(target))."""

    def __init__(self, config: Optional[ModelConfig] = None):
        super().__init__()
        self.config = config or ModelConfig()
        self.disentangle = DisentanglementBlock(self.config)
        self.synthesis = SynthesisBlock(self.config)
        init_weights(self, self.config.mc_encoder.negative_slope)

    def encode(self, x: torch.Tensor) -> LatentBundle:
        return self.disentangle(x)

    def synthesize(self, f_mc: torch.Tensor, f_bar_id: torch.Tensor) -> torch.Tensor:
        return self.synthesis(f_mc, f_bar_id)

    def reconstruct(self, x: torch.Tensor) -> torch.Tensor:
        bundle = self.encode(x)
        return self.synthesize(bundle.f_mc, bundle.f_bar_id)

    def retarget(self, source: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        """Motion content of source performed with the identity of target."""
        return self.synthesize(self.encode(source).f_mc, self.encode(target).f_bar_id)

    def forward(self, source: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        return self.retarget(source, target)

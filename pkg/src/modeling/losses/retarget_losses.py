"""Training objectives.

Triplet hinges (pairwise and batch-all), latent reconstruction of the
re-encoded syntheses, motion reconstruction over the 3x3 grid, adversarial
terms and their weighted total. Every function works on batch-first tensors
and averages over the batch.
"""
import logging
import math
from dataclasses import dataclass, fields
from typing import Dict, Hashable, Literal, Optional, Sequence, Tuple

import torch
import torch.nn.functional as F

from src.config.run_config import LossWeights
from src.errors import MissingGroundTruthError, RetargetError
from src.modeling.disentangle.disentangle_block import LatentBundle

logger = logging.getLogger(__name__)


class UndefinedBatchError(RetargetError):
    """Raised when a batch holds no (anchor, positive, negative) triple."""
    pass


class TrainingDivergenceError(RetargetError):
    """Raised when a loss term is not finite."""
    pass


def _flat(x: torch.Tensor) -> torch.Tensor:
    return x.reshape(x.shape[0], -1)


def _scaled_distance(a: torch.Tensor, b: torch.Tensor, scale: float) -> torch.Tensor:
    return scale * torch.linalg.vector_norm(_flat(a) - _flat(b), dim=-1)


def id_triplet(h1: torch.Tensor, h2: torch.Tensor, h3: torch.Tensor, delta: float = 0.2) -> torch.Tensor:
    """Hinge with anchor h2, positive h3 (same ID) and negative h1; distances scaled by 1/C_p."""
    scale = 1.0 / h2.shape[1]
    pos = _scaled_distance(h2, h3, scale)
    neg = _scaled_distance(h2, h1, scale)
    return F.relu(pos - neg + delta).mean()


def mc_triplet(f1: torch.Tensor, f2: torch.Tensor, f3: torch.Tensor, delta: float = 0.2) -> torch.Tensor:
    """Hinge with anchor f2, positive f1 (same MC) and negative f3; distances scaled by 1/(C_mc N_mc)."""
    scale = 1.0 / (f2.shape[1] * f2.shape[2])
    pos = _scaled_distance(f2, f1, scale)
    neg = _scaled_distance(f2, f3, scale)
    return F.relu(pos - neg + delta).mean()


def batch_all_triplet(embeddings: torch.Tensor, labels: Sequence[Hashable], delta: float = 0.2,
                      distance_scale: float = 1.0) -> torch.Tensor:
    """Mean hinge over every valid triple with strictly positive loss (BA+).

    A triple (a, p, n) is valid when a != p, label[a] == label[p] and
    label[n] != label[a]. Returns zero when every valid triple meets the margin.

    Raises:
        UndefinedBatchError: If no valid triple exists
    """
    if len(labels) != embeddings.shape[0]:
        raise ValueError(f"{embeddings.shape[0]} embeddings but {len(labels)} labels")

    flat = _flat(embeddings)
    dist = distance_scale * torch.linalg.vector_norm(flat[:, None, :] - flat[None, :, :], dim=-1)

    codes = {label: n for n, label in enumerate(dict.fromkeys(labels))}
    ids = torch.tensor([codes[label] for label in labels], device=flat.device)
    same = ids[:, None] == ids[None, :]
    eye = torch.eye(len(labels), dtype=torch.bool, device=flat.device)
    # valid[a, p, n]
    valid = (same & ~eye)[:, :, None] & (~same)[:, None, :]
    if not bool(valid.any()):
        raise UndefinedBatchError(f"No valid triple among {len(labels)} embeddings with {len(codes)} labels")

    hinge = F.relu(dist[:, :, None] - dist[:, None, :] + delta)[valid]
    positive = hinge > 0
    if not bool(positive.any()):
        return hinge.sum() * 0.0
    return hinge[positive].mean()


def id_reconstruction(bundles_real: Sequence[LatentBundle], bundles_resynth: Sequence[LatentBundle]) -> torch.Tensor:
    """(1/3) * [pooled-feature L1 + sequence-feature L1 + projection L1], each averaged over branches."""
    n = len(bundles_real)
    pooled = sum(F.l1_loss(r.f_bar_id, s.f_bar_id) for r, s in zip(bundles_real, bundles_resynth)) / n
    sequence = sum(F.l1_loss(r.f_id, s.f_id) for r, s in zip(bundles_real, bundles_resynth)) / n
    projected = sum(F.l1_loss(r.h_id, s.h_id) for r, s in zip(bundles_real, bundles_resynth)) / n
    return (pooled + sequence + projected) / 3.0


def mc_reconstruction(f_mc_real: Sequence[torch.Tensor], f_mc_resynth: Sequence[torch.Tensor]) -> torch.Tensor:
    """Mean elementwise L1 between real and re-encoded MC features, averaged over branches."""
    return sum(F.l1_loss(r, s) for r, s in zip(f_mc_real, f_mc_resynth)) / len(f_mc_real)


def motion_reconstruction(grid_sys: Sequence[Sequence[torch.Tensor]],
                          grid_truth: Sequence[Sequence[Optional[torch.Tensor]]]) -> torch.Tensor:
    """Mean elementwise L1 over the nine (content j, identity k) syntheses.

    Raises:
        MissingGroundTruthError: If a ground-truth cell is None
    """
    total = 0.0
    count = 0
    for j, (row_sys, row_truth) in enumerate(zip(grid_sys, grid_truth)):
        for k, (sys, truth) in enumerate(zip(row_sys, row_truth)):
            if truth is None:
                raise MissingGroundTruthError(f"No ground truth for grid cell (content {j}, identity {k})")
            total = total + F.l1_loss(sys, truth)
            count += 1
    return total / count


def adversarial_losses(real_scores: torch.Tensor, fake_scores: torch.Tensor,
                       gan_form: Literal['lsgan', 'log'] = 'lsgan') -> Tuple[torch.Tensor, torch.Tensor]:
    """Discriminator and generator losses.

    lsgan: d = 1/2 mean((real - 1)^2) + 1/2 mean(fake^2), g = 1/2 mean((fake - 1)^2)
    log:   d = 1/2 BCE(real, 1) + 1/2 BCE(fake, 0), g = 1/2 BCE(fake, 1), scores as logits
    """
    if gan_form == 'lsgan':
        d_loss = 0.5 * ((real_scores - 1) ** 2).mean() + 0.5 * (fake_scores ** 2).mean()
        g_loss = 0.5 * ((fake_scores - 1) ** 2).mean()
    elif gan_form == 'log':
        d_loss = 0.5 * F.binary_cross_entropy_with_logits(real_scores, torch.ones_like(real_scores)) \
            + 0.5 * F.binary_cross_entropy_with_logits(fake_scores, torch.zeros_like(fake_scores))
        g_loss = 0.5 * F.binary_cross_entropy_with_logits(fake_scores, torch.ones_like(fake_scores))
    else:
        raise ValueError(f"Unknown gan_form: {gan_form}")
    return d_loss, g_loss


@dataclass
class LossReport:
    """Every generator term plus the weighted total and the discriminator loss."""
    rec: torch.Tensor
    adv: torch.Tensor
    mc_rec: torch.Tensor
    mc_tri: torch.Tensor
    id_rec: torch.Tensor
    id_tri: torch.Tensor
    total: torch.Tensor
    d_loss: Optional[torch.Tensor] = None

    def to_record(self) -> Dict[str, float]:
        """Plain floats for logging."""
        record = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                record[f.name] = float(value.detach()) if torch.is_tensor(value) else float(value)
        return record


def total_loss(rec, adv, mc_rec, mc_tri, id_rec, id_tri, weights: Optional[LossWeights] = None,
               d_loss=None) -> LossReport:
    """Weighted sum rec*l_rec + adv*l_adv + l_mc*(mc_rec + mc_tri) + l_id*(id_rec + id_tri).

    Raises:
        TrainingDivergenceError: If any term is NaN or infinite
    """
    weights = weights or LossWeights()
    terms = dict(rec=rec, adv=adv, mc_rec=mc_rec, mc_tri=mc_tri, id_rec=id_rec, id_tri=id_tri)
    if d_loss is not None:
        terms['d_loss'] = d_loss
    for name, value in terms.items():
        if not math.isfinite(float(value.detach() if torch.is_tensor(value) else value)):
            raise TrainingDivergenceError(f"Loss term {name} is not finite ({float(value)})")

    total = (weights.lambda_rec * rec + weights.lambda_adv * adv
             + weights.lambda_mc * (mc_rec + mc_tri) + weights.lambda_id * (id_rec + id_tri))
    return LossReport(total=total, **terms)

"""IDScore Analysis.

Measures how much identity a retargeting model preserves and how completely it
transfers a new one. Test clips are split per identity into a gallery (known
identities) and probes. Three stages are ranked against the raw gallery:

=== STAGES ===
raw:   probes as recorded
rec:   probes reconstructed, retarget(m, m)
cross: probes given the identity of an unregistered subject, retarget(m, new)

IDScore_k = Rank_k(rec) - Rank_k(cross): high when reconstructions keep their
identity and crossed motions stop looking like the original subject.
"""
import logging
from pathlib import Path
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from src.config.run_config import EvalConfig
from src.data_processing.skeleton.skeleton_models import DatasetIndex, MotionClip
from src.errors import RetargetError
from src.modeling.clip_tensors import clips_to_tensor, tensor_to_clips
from src.modeling.retarget_model import RetargetModel
from src.training.trainer import retarget_tensors

from .gait_embedder import GaitEmbedder, build_embedder
from .keypoint_mapping import KeypointMapper, fit_keypoint_mapper, to_coco17

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['rank1_rec', 'rank1_cross', 'idscore1', 'rank5_rec', 'rank5_cross', 'idscore5',
                  'rank1_raw', 'rank5_raw']


class SplitError(RetargetError):
    """Raised when a test identity cannot appear on both gallery and probe sides."""
    pass


class EvaluationError(RetargetError):
    """Raised when ranking is impossible (empty gallery or probe set)."""
    pass


class ProtocolViolationError(RetargetError):
    """Raised when the new subject is registered in the gallery."""
    pass


class RankReport(BaseModel):
    """Rank-1 and rank-5 identification rates."""
    rank1: float = Field(ge=0.0, le=1.0)
    rank5: float = Field(ge=0.0, le=1.0)

    @model_validator(mode='after')
    def validate_order(self) -> 'RankReport':
        if self.rank1 > self.rank5:
            raise ValueError(f"rank1 ({self.rank1}) exceeds rank5 ({self.rank5})")
        return self


class IDScoreReport(BaseModel):
    """Reconstruction and crossing ranks with their differences."""
    rec: RankReport
    cross: RankReport
    raw: Optional[RankReport] = None
    idscore1: float
    idscore5: float

    @classmethod
    def from_ranks(cls, rec: RankReport, cross: RankReport, raw: Optional[RankReport] = None) -> 'IDScoreReport':
        return cls(rec=rec, cross=cross, raw=raw,
                   idscore1=rec.rank1 - cross.rank1, idscore5=rec.rank5 - cross.rank5)

    def to_row(self) -> Dict[str, Optional[float]]:
        return {
            'rank1_rec': self.rec.rank1,
            'rank1_cross': self.cross.rank1,
            'idscore1': self.idscore1,
            'rank5_rec': self.rec.rank5,
            'rank5_cross': self.cross.rank5,
            'idscore5': self.idscore5,
            'rank1_raw': self.raw.rank1 if self.raw else None,
            'rank5_raw': self.raw.rank5 if self.raw else None,
        }


def split_gallery_probe(test_set: DatasetIndex, seed: int = 0,
                        gallery_fraction: float = 0.5) -> Tuple[List[MotionClip], List[MotionClip]]:
    """Clip-disjoint gallery/probe split with every identity on both sides.

    Raises:
        SplitError: If an identity has fewer than two clips
    """
    rng = np.random.default_rng(seed)
    gallery, probe = [], []
    for id_label in test_set.id_labels:
        clips = test_set.clips_for_id(id_label)
        if len(clips) < 2:
            raise SplitError(f"Identity {id_label} has {len(clips)} clip(s); need >= 2 for gallery and probe")
        order = rng.permutation(len(clips))
        n_gallery = min(len(clips) - 1, max(1, int(round(gallery_fraction * len(clips)))))
        gallery.extend(clips[n] for n in sorted(order[:n_gallery]))
        probe.extend(clips[n] for n in sorted(order[n_gallery:]))
    return gallery, probe


def rank_from_embeddings(gallery_embeddings: np.ndarray, gallery_labels: Sequence[Hashable],
                         probe_embeddings: np.ndarray, probe_labels: Sequence[Hashable]) -> RankReport:
    """Rank-1/5 over Euclidean distance of L2-normalized embeddings.

    Ties are broken by ascending gallery position.
    """
    if len(gallery_labels) == 0:
        raise EvaluationError("Gallery is empty")
    if len(probe_labels) == 0:
        raise EvaluationError("Probe set is empty")

    def unit(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        return x / np.where(norms > 0, norms, 1.0)

    g, p = unit(gallery_embeddings), unit(probe_embeddings)
    dist = np.linalg.norm(p[:, None, :] - g[None, :, :], axis=-1)
    gallery_labels = np.asarray(gallery_labels, dtype=object)

    hits = {1: 0, 5: 0}
    for n, label in enumerate(probe_labels):
        ranked = gallery_labels[np.argsort(dist[n], kind='stable')]
        for k in hits:
            hits[k] += int(any(ranked[:k] == label))
    return RankReport(rank1=hits[1] / len(probe_labels), rank5=hits[5] / len(probe_labels))


def rank_metrics(embedder: GaitEmbedder, gallery: Sequence[MotionClip], probe: Sequence[MotionClip]) -> RankReport:
    """Identify every probe against the gallery (both already in COCO-17)."""
    if not gallery:
        raise EvaluationError("Gallery is empty")
    if not probe:
        raise EvaluationError("Probe set is empty")
    return rank_from_embeddings(
        embedder.embed_batch(gallery), [c.id_label for c in gallery],
        embedder.embed_batch(probe), [c.id_label for c in probe],
    )


def _retarget_clips(model: RetargetModel, sources: Sequence[MotionClip], target: Optional[MotionClip]) -> List[MotionClip]:
    """Retarget each source to target, or reconstruct it when target is None."""
    dtype = next(model.parameters()).dtype
    x = clips_to_tensor(sources, dtype)
    y = x if target is None else clips_to_tensor([target], dtype).expand(len(sources), -1, -1)
    return tensor_to_clips(retarget_tensors(model, x, y), like=sources)


def reconstruction_set(model: RetargetModel, index: DatasetIndex, batch_size: int = 64) -> List[MotionClip]:
    """retarget(m, m) of every clip in index, keeping the source labels."""
    clips = list(index.clips())
    out: List[MotionClip] = []
    for start in range(0, len(clips), batch_size):
        out.extend(_retarget_clips(model, clips[start:start + batch_size], None))
    return out


def evaluate_idscore(model: RetargetModel, test_set: DatasetIndex, new_subject_clip: MotionClip,
                     embedder: GaitEmbedder, to_coco: Callable[[MotionClip], MotionClip],
                     seed: int = 0, gallery_fraction: float = 0.5,
                     split: Optional[Tuple[List[MotionClip], List[MotionClip]]] = None) -> IDScoreReport:
    """Raw, reconstruction and crossing ranks on the test split.

    Crossed probes keep their true identity label, so a hit means the crossed
    motion was still recognized as its source subject.

    Raises:
        ProtocolViolationError: If the new subject's identity is in the gallery
    """
    gallery, probe = split or split_gallery_probe(test_set, seed, gallery_fraction)
    gallery_ids = {clip.id_label for clip in gallery}
    if new_subject_clip.id_label in gallery_ids:
        raise ProtocolViolationError(f"New subject {new_subject_clip.id_label} is registered in the gallery")

    model.eval()
    stages = {
        'raw': list(probe),
        'rec': _retarget_clips(model, probe, None),
        'cross': _retarget_clips(model, probe, new_subject_clip),
    }
    gallery_coco = [to_coco(clip) for clip in gallery]
    ranks = {}
    for stage, clips in stages.items():
        ranks[stage] = rank_metrics(embedder, gallery_coco, [to_coco(clip) for clip in clips])
        logger.info(f"IDScore {stage}: rank1 {ranks[stage].rank1:.4f} rank5 {ranks[stage].rank5:.4f}")

    return IDScoreReport.from_ranks(rec=ranks['rec'], cross=ranks['cross'], raw=ranks['raw'])


def run_idscore_protocol(model: RetargetModel, dataset: DatasetIndex, new_subject_clip: MotionClip,
                         config: Optional[EvalConfig] = None) -> IDScoreReport:
    """Full protocol: split, keypoint mapper, embedder fit, three-stage ranking.

    The baseline embedder is trained on the train identities plus the test
    gallery (the registered identities); probes and the new subject stay unseen.
    With embedder_sees_reconstructions it also sees the model's reconstructions
    of train-identity clips, so generator artifacts carry no identity evidence.
    """
    config = config or EvalConfig()
    test_set = dataset.test()
    if not test_set.id_labels:
        raise EvaluationError("Dataset has no test identities")
    gallery, probe = split_gallery_probe(test_set, config.seed, config.gallery_fraction)

    mapper: Optional[KeypointMapper] = None
    if not config.use_baseline_mapper:
        mapper = fit_keypoint_mapper(list(dataset.train().clips()), epochs=config.mapper_epochs, seed=config.seed)

    def to_coco(clip: MotionClip) -> MotionClip:
        return to_coco17(clip, mapper, use_baseline=config.use_baseline_mapper)

    embedder_train = [to_coco(c) for c in dataset.train().clips()] + [to_coco(c) for c in gallery]
    if config.embedder_sees_reconstructions:
        model.eval()
        embedder_train += [to_coco(c) for c in reconstruction_set(model, dataset.train())]
    embedder = build_embedder(config.embedder, embedder_train, config)
    return evaluate_idscore(model, test_set, new_subject_clip, embedder, to_coco, split=(gallery, probe))


def write_report(report: IDScoreReport, path: Union[str, Path]) -> Path:
    """One-row CSV with the rank and IDScore columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([report.to_row()], columns=REPORT_COLUMNS).to_csv(path, index=False)
    logger.info(f"Wrote IDScore report to {path}")
    return path

"""IDScore evaluation protocol."""

from .gait_embedder import BaselineGaitEmbedder, ExternalGaitEmbedder, GaitEmbedder, baseline_embedder_fit, build_embedder
from .idscore_analyzer import (
    IDScoreReport,
    RankReport,
    evaluate_idscore,
    rank_metrics,
    run_idscore_protocol,
    split_gallery_probe,
    write_report,
)
from .keypoint_mapping import KeypointMapper, fit_keypoint_mapper, map_15_to_17, map_25_to_15, to_coco17

__all__ = [
    'BaselineGaitEmbedder', 'ExternalGaitEmbedder', 'GaitEmbedder', 'baseline_embedder_fit', 'build_embedder',
    'IDScoreReport', 'RankReport', 'evaluate_idscore', 'rank_metrics', 'run_idscore_protocol',
    'split_gallery_probe', 'write_report',
    'KeypointMapper', 'fit_keypoint_mapper', 'map_15_to_17', 'map_25_to_15', 'to_coco17',
]

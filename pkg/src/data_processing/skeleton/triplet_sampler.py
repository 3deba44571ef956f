"""Triplet sampling over the (identity x content) grid.

A triplet (m1, m2, m3) needs two identities a != b sharing two contents
c != c': m1 = (a, c), m2 = (b, c), m3 = (b, c'). The 3x3 ground-truth grid
additionally needs (a, c'), which is why pairs are only eligible when both
identities cover both contents.
"""
import logging
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Tuple

import numpy as np

from src.errors import MissingGroundTruthError, RetargetError

from .skeleton_models import TEST, TRAIN, DatasetIndex, MotionClip, TripletSample

logger = logging.getLogger(__name__)


class InsufficientDiversityError(RetargetError):
    """Raised when the grid cannot satisfy the triplet label constraints."""
    pass


class TripletSampler:
    """Seeded triplet draws and ground-truth lookup on one DatasetIndex."""

    def __init__(self, index: DatasetIndex):
        self.index = index
        self.id_labels = index.id_labels
        if len(self.id_labels) < 2 or len(index.mc_labels) < 2:
            raise InsufficientDiversityError(
                f"Need >= 2 identities and >= 2 contents, got "
                f"{len(self.id_labels)} x {len(index.mc_labels)}"
            )

        contents = {
            id_label: {mc for (i, mc), clips in index.grid.items() if i == id_label and clips}
            for id_label in self.id_labels
        }
        # partners[b] = [(a, shared contents)] for every eligible a != b
        self.partners: Dict[Hashable, List[Tuple[Hashable, List[Hashable]]]] = {}
        for a, b in combinations(self.id_labels, 2):
            shared = sorted(contents[a] & contents[b], key=str)
            if len(shared) >= 2:
                self.partners.setdefault(a, []).append((b, shared))
                self.partners.setdefault(b, []).append((a, shared))

        self.anchors = [id_label for id_label in self.id_labels if id_label in self.partners]
        if not self.anchors:
            raise InsufficientDiversityError("No two identities share two populated contents")

    def sample(self, rng: np.random.Generator) -> TripletSample:
        """Draw one triplet; deterministic for a given generator state."""
        b = self.anchors[rng.integers(len(self.anchors))]
        a, shared = self.partners[b][rng.integers(len(self.partners[b]))]
        c, c_other = (shared[n] for n in rng.choice(len(shared), size=2, replace=False))

        def pick(id_label, mc_label) -> MotionClip:
            cell = self.index.cell(id_label, mc_label)
            return cell[rng.integers(len(cell))]

        return TripletSample(m1=pick(a, c), m2=pick(b, c), m3=pick(b, c_other))

    def sample_batch(self, batch_size: int, rng: np.random.Generator) -> List[TripletSample]:
        return [self.sample(rng) for _ in range(batch_size)]

    def ground_truth(self, triplet: TripletSample) -> List[List[MotionClip]]:
        """Real clips M^{j|k}: content of branch j performed by identity of branch k.

        A branch clip is reused when it lies in the requested cell (always on
        the diagonal); otherwise the first clip of the cell is taken.

        Raises:
            MissingGroundTruthError: If a required cell is empty
        """
        branches = triplet.branches
        grid = []
        for j in range(3):
            row = []
            for k in range(3):
                mc_label, id_label = branches[j].mc_label, branches[k].id_label
                in_cell = [m for m in (branches[k], branches[j]) if (m.id_label, m.mc_label) == (id_label, mc_label)]
                if in_cell:
                    row.append(in_cell[0])
                    continue
                cell = self.index.cell(id_label, mc_label)
                if not cell:
                    raise MissingGroundTruthError(f"No clip of identity {id_label} performing content {mc_label}")
                row.append(cell[0])
            grid.append(row)
        return grid


def sample_triplet(index: DatasetIndex, rng: np.random.Generator) -> TripletSample:
    """Draw one triplet from index."""
    return TripletSampler(index).sample(rng)


def split_identities(index: DatasetIndex, n_test: Optional[int] = None,
                     test_fraction: Optional[float] = None, seed: int = 0) -> DatasetIndex:
    """Assign an identity-disjoint train/test split.

    Args:
        index: Dataset to split (existing assignment is discarded)
        n_test: Number of test identities
        test_fraction: Alternative to n_test, rounded to the nearest identity
        seed: Shuffle seed

    Returns:
        DatasetIndex sharing the clips of index with a fresh split
    """
    id_labels = index.id_labels
    if n_test is None:
        n_test = int(round((test_fraction or 0.0) * len(id_labels)))
    if n_test < 0 or len(id_labels) - n_test < 2:
        raise InsufficientDiversityError(
            f"Cannot hold out {n_test} of {len(id_labels)} identities and keep >= 2 for training"
        )

    order = np.random.default_rng(seed).permutation(len(id_labels))
    test_ids = {id_labels[n] for n in order[:n_test]}
    split = {id_label: TEST if id_label in test_ids else TRAIN for id_label in id_labels}
    logger.info(f"Split {len(id_labels)} identities into {len(id_labels) - n_test} train / {n_test} test")
    return DatasetIndex(grid=dict(index.grid), split=split)

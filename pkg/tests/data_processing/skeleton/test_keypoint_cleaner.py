"""Tests for frame cleaning, padding, trimming and normalization."""
import numpy as np
import pytest

from src.config.skeleton_config import MID_HIP, NECK, NUM_JOINTS
from src.data_processing.skeleton.keypoint_cleaner import (
    DegeneratePoseError,
    UnreconstructableJointError,
    clean_frames,
    normalize,
    pad_missing,
    preprocess_sequence,
    trim_clips,
)
from src.data_processing.skeleton.skeleton_models import MotionClip, RawSequence


def _drop_joints(seq: RawSequence, frame: int, joints) -> None:
    seq.frames[frame, list(joints), :] = 0.0


def test_clean_frames_boundary(sequence_factory):
    seq = sequence_factory(3)
    _drop_joints(seq, 0, range(8))  # 8 missing: kept
    _drop_joints(seq, 1, range(9))  # 9 missing: removed
    cleaned = clean_frames(seq)
    assert len(cleaned) == 2
    np.testing.assert_array_equal(cleaned.frames[0], seq.frames[0])
    np.testing.assert_array_equal(cleaned.frames[1], seq.frames[2])


def test_clean_frames_counts_over_threshold(sequence_factory, rng):
    seq = sequence_factory(100)
    over = rng.choice(100, size=13, replace=False)
    for t in over:
        _drop_joints(seq, t, rng.choice(NUM_JOINTS, size=rng.integers(9, NUM_JOINTS + 1), replace=False))
    for t in set(range(100)) - set(over):
        _drop_joints(seq, t, rng.choice(NUM_JOINTS, size=rng.integers(0, 9), replace=False))

    expected = [t for t in range(100) if (seq.frames[t, :, 2] <= 0).sum() <= 8]
    cleaned = clean_frames(seq)
    assert len(cleaned) == 87
    np.testing.assert_array_equal(cleaned.frames, seq.frames[expected])


def test_clean_frames_may_return_empty(sequence_factory):
    seq = sequence_factory(2)
    _drop_joints(seq, 0, range(NUM_JOINTS))
    _drop_joints(seq, 1, range(10))
    assert len(clean_frames(seq)) == 0


def test_pad_missing_identity_without_gaps(sequence_factory):
    seq = sequence_factory(20)
    np.testing.assert_array_equal(pad_missing(seq).frames, seq.frames)


def test_pad_missing_constant_window(sequence_factory):
    seq = sequence_factory(11)
    seq.frames[:, 3, :2] = 0.5
    _drop_joints(seq, 5, [3])
    padded = pad_missing(seq)
    np.testing.assert_allclose(padded.frames[5, 3, :2], [0.5, 0.5])
    assert padded.frames[5, 3, 2] > 0


def test_pad_missing_neighbour_mean(sequence_factory):
    seq = sequence_factory(11)
    seq.frames[:, 4, 2] = 0.0
    seq.frames[4, 4] = [0.0, 1.0, 1.0]
    seq.frames[6, 4] = [1.0, 0.0, 1.0]
    padded = pad_missing(seq)
    np.testing.assert_allclose(padded.frames[5, 4, :2], [0.5, 0.5])


def test_pad_missing_confidence_weighted(sequence_factory):
    seq = sequence_factory(11)
    seq.frames[:, 2, 2] = 0.0
    seq.frames[4, 2] = [0.0, 2.0, 0.25]
    seq.frames[6, 2] = [1.0, 2.0, 0.75]
    padded = pad_missing(seq)
    np.testing.assert_allclose(padded.frames[5, 2, :2], [0.75, 2.0])


def test_pad_missing_skips_origin_neighbours(sequence_factory):
    seq = sequence_factory(11)
    seq.frames[:, 6, 2] = 0.0
    seq.frames[4, 6] = [0.0, 0.0, 0.9]
    seq.frames[6, 6] = [3.0, 4.0, 0.5]
    padded = pad_missing(seq)
    np.testing.assert_allclose(padded.frames[5, 6, :2], [3.0, 4.0])
    np.testing.assert_allclose(padded.frames[4, 6, :2], [3.0, 4.0])


def test_pad_missing_falls_back_to_nearest_outside_window(sequence_factory):
    seq = sequence_factory(30)
    seq.frames[:, 7, 2] = 0.0
    seq.frames[20, 7] = [3.0, 4.0, 1.0]
    padded = pad_missing(seq)
    np.testing.assert_allclose(padded.frames[0, 7, :2], [3.0, 4.0])
    assert not padded.missing.any()


def test_pad_missing_present_joints_unchanged(sequence_factory):
    seq = sequence_factory(15)
    _drop_joints(seq, 7, [0, 1, 2])
    padded = pad_missing(seq)
    present = ~seq.missing
    np.testing.assert_array_equal(padded.frames[present], seq.frames[present])


def test_pad_missing_unreconstructable(sequence_factory):
    seq = sequence_factory(12)
    seq.frames[:, 9, 2] = 0.0
    with pytest.raises(UnreconstructableJointError, match='Joint 9'):
        pad_missing(seq)


def test_pad_missing_requires_cleaning(sequence_factory):
    seq = sequence_factory(5)
    _drop_joints(seq, 2, range(12))
    with pytest.raises(ValueError):
        pad_missing(seq)


@pytest.mark.parametrize('n_frames,expected', [(640, 10), (63, 0), (64, 1), (130, 2)])
def test_trim_clip_counts(sequence_factory, n_frames, expected):
    clips = trim_clips(sequence_factory(n_frames, subject_id='s1'), T=64)
    assert len(clips) == expected
    assert all(c.num_frames == 64 and c.num_joints == NUM_JOINTS for c in clips)
    assert all(c.id_label == 's1' for c in clips)


def test_trim_clips_are_sequential_windows(sequence_factory):
    seq = sequence_factory(200, subject_id='s2')
    clips = trim_clips(seq, T=64, apply_normalization=False)
    for k, clip in enumerate(clips):
        np.testing.assert_array_equal(clip.xy(), seq.frames[k * 64:(k + 1) * 64, :, :2])
        assert clip.mc_label == k


def test_trim_clips_content_label(sequence_factory):
    clips = trim_clips(sequence_factory(128, content_id='waltz'), T=64)
    assert [c.mc_label for c in clips] == ['waltz', 'waltz']


def test_clip_bookkeeping_matches_subject_count(sequence_factory):
    # 81 clips per subject: 5184 frames plus a short remainder
    clips = trim_clips(sequence_factory(81 * 64 + 40), T=64, apply_normalization=False)
    assert len(clips) == 81
    assert 91 * len(clips) == 7371


def _clip(rng) -> MotionClip:
    return MotionClip.from_xy(rng.uniform(0, 100, size=(64, NUM_JOINTS, 2)), clip_id='c')


def test_normalize_centers_and_scales(rng):
    out = normalize(_clip(rng)).xy()
    np.testing.assert_allclose(out[:, MID_HIP].mean(axis=0), [0.0, 0.0], atol=1e-12)
    torso = np.linalg.norm(out[:, NECK] - out[:, MID_HIP], axis=-1).mean()
    assert torso == pytest.approx(1.0)


def test_normalize_idempotent(rng):
    once = normalize(_clip(rng))
    np.testing.assert_allclose(normalize(once).data, once.data, atol=1e-12)


def test_normalize_translation_invariant(rng):
    clip = _clip(rng)
    shifted = MotionClip.from_xy(clip.xy() + np.array([3.0, -7.0]))
    np.testing.assert_allclose(normalize(shifted).data, normalize(clip).data, atol=1e-10)


def test_normalize_scale_invariant(rng):
    clip = _clip(rng)
    scaled = MotionClip.from_xy(clip.xy() * 2.0)
    np.testing.assert_allclose(normalize(scaled).data, normalize(clip).data, atol=1e-10)


def test_normalize_degenerate_torso():
    xy = np.ones((64, NUM_JOINTS, 2))
    with pytest.raises(DegeneratePoseError):
        normalize(MotionClip.from_xy(xy))


def test_preprocess_sequence_pipeline(sequence_factory):
    seq = sequence_factory(140)
    _drop_joints(seq, 3, range(12))
    _drop_joints(seq, 10, [5])
    clips = preprocess_sequence(seq, T=64)
    # 139 frames survive cleaning
    assert len(clips) == 2


def test_joints_at_origin_count_as_missing(sequence_factory):
    seq = sequence_factory(3)
    seq.frames[1, :9, :2] = 0.0
    seq.frames[1, :9, 2] = 0.9
    assert seq.missing[1].sum() == 9
    cleaned = clean_frames(seq)
    assert len(cleaned) == 2
    np.testing.assert_array_equal(cleaned.frames[1], seq.frames[2])

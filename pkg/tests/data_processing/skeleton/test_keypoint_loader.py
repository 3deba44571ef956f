"""Tests for keypoint and clip file I/O."""
import json

import numpy as np
import pandas as pd
import pytest

from src.config.skeleton_config import NUM_JOINTS
from src.data_processing.skeleton.keypoint_cleaner import preprocess_directory
from src.data_processing.skeleton.keypoint_loader import (
    EmptyInputError,
    KeypointFormat,
    KeypointFormatError,
    index_digest,
    load_clip,
    load_manifest,
    load_raw_sequence,
    save_clip,
    save_raw_sequence,
    write_manifest,
)
from src.data_processing.skeleton.skeleton_models import TEST, TRAIN, DatasetIndex, MotionClip


def _write_frames(directory, records):
    directory.mkdir(parents=True, exist_ok=True)
    for n, record in enumerate(records):
        (directory / f"frame_{n:012d}_keypoints.json").write_text(json.dumps(record))


def test_load_three_frame_directory(tmp_path, rng):
    records = [{'people': [{'pose_keypoints_2d': rng.uniform(0, 1, size=75).tolist()}]} for _ in range(3)]
    _write_frames(tmp_path / 'subject', records)
    seq = load_raw_sequence(tmp_path / 'subject')
    assert seq.frames.shape == (3, NUM_JOINTS, 3)
    assert seq.subject_id == 'subject'
    np.testing.assert_allclose(seq.frames[1].reshape(-1), records[1]['people'][0]['pose_keypoints_2d'])


def test_bare_list_records(tmp_path):
    _write_frames(tmp_path / 's', [list(np.linspace(0.1, 1.0, 75))])
    assert load_raw_sequence(tmp_path / 's').frames.shape == (1, NUM_JOINTS, 3)


def test_wrong_arity_names_frame(tmp_path):
    _write_frames(tmp_path / 's', [[1.0] * 75, [1.0] * 74])
    with pytest.raises(KeypointFormatError, match='frame_000000000001'):
        load_raw_sequence(tmp_path / 's')


def test_empty_directory(tmp_path):
    (tmp_path / 'empty').mkdir()
    with pytest.raises(EmptyInputError):
        load_raw_sequence(tmp_path / 'empty')


def test_missing_path():
    with pytest.raises(FileNotFoundError):
        load_raw_sequence('/nonexistent/keypoints')


def test_undetected_joints_become_missing(tmp_path):
    values = np.ones(75)
    values[3:6] = 0.0
    _write_frames(tmp_path / 's', [{'people': [{'pose_keypoints_2d': values.tolist()}]}])
    seq = load_raw_sequence(tmp_path / 's')
    assert seq.missing[0, 1]
    assert seq.missing.sum() == 1


def test_no_person_frame_is_all_missing(tmp_path):
    _write_frames(tmp_path / 's', [{'people': []}, [1.0] * 75])
    seq = load_raw_sequence(tmp_path / 's')
    assert seq.missing[0].all()
    assert not seq.missing[1].any()


def test_raw_round_trip(tmp_path, sequence_factory):
    seq = sequence_factory(6, subject_id='s')
    save_raw_sequence(seq, tmp_path / 's')
    loaded = load_raw_sequence(tmp_path / 's')
    np.testing.assert_array_equal(loaded.frames, seq.frames)


def test_clip_container_round_trip(tmp_path, random_clip):
    path = save_clip(random_clip, tmp_path / 'clip.clip.txt')
    loaded = load_clip(path)
    np.testing.assert_array_equal(loaded.data, random_clip.data)
    assert (loaded.id_label, loaded.mc_label, loaded.clip_id) == ('a', 'x', 'rand')


def test_clip_container_labels_keep_type(tmp_path, random_clip):
    clip = MotionClip(data=random_clip.data, id_label=3, mc_label=7)
    loaded = load_clip(save_clip(clip, tmp_path / 'c.clip.txt'))
    assert loaded.id_label == 3 and loaded.mc_label == 7


def test_clip_container_rejects_foreign_file(tmp_path):
    path = tmp_path / 'bad.clip.txt'
    path.write_text('1 2 3\n')
    with pytest.raises(KeypointFormatError):
        load_clip(path)


def test_clip_container_as_raw_input(tmp_path, random_clip):
    path = save_clip(random_clip, tmp_path / 'c.clip.txt')
    seq = load_raw_sequence(path, KeypointFormat.CLIP_CONTAINER)
    assert len(seq) == 64
    assert seq.subject_id == 'a' and seq.content_id == 'x'
    assert not seq.missing.any()


def test_manifest_round_trip(tmp_path, synthetic_dataset):
    index, _ = synthetic_dataset
    manifest = write_manifest(index, tmp_path)
    df = pd.read_csv(manifest)
    assert list(df.columns) == ['id_label', 'mc_label', 'clip_path', 'split']
    assert len(df) == len(index)

    loaded = load_manifest(tmp_path)
    assert len(loaded) == len(index)
    assert loaded.split == index.split
    assert index_digest(loaded) == index_digest(index)


def test_manifest_missing():
    with pytest.raises(FileNotFoundError):
        load_manifest('/nonexistent/data')


def test_digest_changes_with_split(synthetic_dataset):
    index, _ = synthetic_dataset
    flipped = DatasetIndex(grid=dict(index.grid),
                           split={i: TEST if s == TRAIN else TRAIN for i, s in index.split.items()})
    assert index_digest(flipped) != index_digest(index)


def test_preprocess_directory(tmp_path, sequence_factory):
    for subject in ['alice', 'bob']:
        save_raw_sequence(sequence_factory(130, subject_id=subject), tmp_path / subject)
    index = preprocess_directory(tmp_path, T=64)
    assert index.id_labels == ['alice', 'bob']
    assert len(index) == 4
    assert index.mc_labels == [0, 1]

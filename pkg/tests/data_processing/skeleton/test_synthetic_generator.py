"""Tests for the synthetic identity x content grid."""
import numpy as np
import pytest

from src.config.run_config import DatasetConfig
from src.config.skeleton_config import NUM_JOINTS
from src.data_processing.skeleton.synthetic_generator import (
    N_STYLE_TRAITS,
    SyntheticMotionGenerator,
    build_synthetic_dataset,
    synth_generate,
)


def test_grid_arithmetic():
    index = synth_generate(6, 8, T=64, seed=0, clips_per_cell=2)
    assert len(index) == 96
    assert len(index.id_labels) == 6 and len(index.mc_labels) == 8
    assert all(len(index.cell(i, c)) == 2 for i in index.id_labels for c in index.mc_labels)


def test_clip_shape_and_labels():
    clip = SyntheticMotionGenerator(seed=0).clip(2, 5, 1)
    assert clip.data.shape == (2 * NUM_JOINTS, 64)
    assert (clip.id_label, clip.mc_label) == ('id002', 'mc005')
    assert clip.clip_id == 'syn_i002_c005_k01'


def test_determinism():
    a = SyntheticMotionGenerator(seed=3).clip(1, 2)
    b = SyntheticMotionGenerator(seed=3).clip(1, 2)
    np.testing.assert_array_equal(a.data, b.data)


def test_seed_changes_output():
    a = SyntheticMotionGenerator(seed=0).clip(1, 2)
    b = SyntheticMotionGenerator(seed=1).clip(1, 2)
    assert not np.array_equal(a.data, b.data)


def test_cell_clips_differ_by_noise_only():
    gen = SyntheticMotionGenerator(seed=0)
    a, b = gen.clip(0, 0, 0), gen.clip(0, 0, 1)
    assert not np.array_equal(a.data, b.data)
    assert np.abs(a.data - b.data).mean() < 0.2


def test_identity_style_inverts_to_shared_content():
    gen = SyntheticMotionGenerator(seed=0)
    for i, j in [(0, 1), (2, 5)]:
        styled_i, _ = gen.identity_angles(i, 4)
        styled_j, _ = gen.identity_angles(j, 4)
        assert not np.allclose(styled_i, styled_j)

        base_i, _ = gen.content_trajectory(4, phase_shift=gen.identity_style(i)['phase_offset'])
        base_j, _ = gen.content_trajectory(4, phase_shift=gen.identity_style(j)['phase_offset'])
        np.testing.assert_allclose(gen.strip_identity_style(styled_i, i), base_i, atol=1e-12)
        np.testing.assert_allclose(gen.strip_identity_style(styled_j, j), base_j, atol=1e-12)


def test_bone_lengths_do_not_depend_on_identity():
    gen = SyntheticMotionGenerator(seed=0)
    lengths = []
    for i in range(3):
        angles, root = gen.identity_angles(i, 0)
        xy = gen.forward_kinematics(angles, root)
        lengths.append(np.linalg.norm(xy[:, 4] - xy[:, 3], axis=-1))
    np.testing.assert_allclose(lengths[0], lengths[1])
    np.testing.assert_allclose(lengths[0], lengths[2])


def test_contents_are_distinct():
    gen = SyntheticMotionGenerator(seed=0)
    a, _ = gen.content_trajectory(0)
    b, _ = gen.content_trajectory(1)
    assert not np.allclose(a, b)


def test_rejects_degenerate_grid():
    with pytest.raises(ValueError):
        synth_generate(1, 8)
    with pytest.raises(ValueError):
        synth_generate(4, 1)


def test_build_dataset_split_and_new_subject():
    config = DatasetConfig(n_ids=3, n_test_ids=2, n_contents=4, clips_per_cell=2)
    index, new_subject = build_synthetic_dataset(config)
    assert index.train().id_labels == ['id000', 'id001', 'id002']
    assert index.test().id_labels == ['id003', 'id004']
    assert len(new_subject) == 4
    assert {clip.id_label for clip in new_subject} == {'id005'}
    assert 'id005' not in index.id_labels


def test_identity_styles_share_a_low_dimensional_trait_space():
    gen = SyntheticMotionGenerator(seed=0)
    styles = [gen.identity_style(i) for i in range(12)]
    stacked = np.stack([
        np.concatenate([np.log(s['scale']), [s['phase_offset']], s['bias']]) for s in styles
    ])
    assert np.linalg.matrix_rank(stacked, tol=1e-9) == N_STYLE_TRAITS
    assert all(np.all(s['scale'] > 0) for s in styles)

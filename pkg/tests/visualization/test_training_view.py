"""Tests for the loss-curve chart."""
import json

from src.visualization.training_view import create_loss_curves, write_loss_curves
from src.training.metrics_logger import read_metrics


def _write_metrics(path, n_epochs=3, steps_per_epoch=2):
    with open(path, 'w', encoding='utf-8') as f:
        step = 0
        for epoch in range(n_epochs):
            for _ in range(steps_per_epoch):
                step += 1
                record = {'step': step, 'epoch': epoch, 'rec': 1.0 / step, 'adv': 0.25, 'total': 2.0 / step,
                          'd_loss': 0.5, 'ae_lr': 1e-4, 'd_lr': 2e-4, 'logged_at': '2024-01-01T00:00:00'}
                f.write(json.dumps(record) + '\n')
    return path


def test_loss_curves_one_trace_per_logged_term(tmp_path):
    fig = create_loss_curves(read_metrics(_write_metrics(tmp_path / 'metrics.jsonl')))
    assert [trace.name for trace in fig.data] == ['total', 'rec', 'adv', 'd_loss']
    assert list(fig.data[0].x) == [0, 1, 2]
    assert fig.layout.yaxis.type == 'log'


def test_write_loss_curves(tmp_path):
    metrics = _write_metrics(tmp_path / 'metrics.jsonl')
    out = write_loss_curves(metrics, tmp_path / 'charts' / 'loss_curves.html')
    assert out.exists()
    assert 'Training losses' in out.read_text(encoding='utf-8')

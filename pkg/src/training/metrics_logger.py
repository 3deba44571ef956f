"""Per-step metrics log (JSON lines)."""
import json
from datetime import datetime
from pathlib import Path
from typing import Dict, Union

import pandas as pd

METRICS_NAME = 'metrics.jsonl'


class MetricsLogger:
    """Appends one JSON record per training step."""

    def __init__(self, path: Union[str, Path], append: bool = False):
        """Initialize the log.

        Args:
            path: File to write
            append: Keep existing records (resumed runs)
        """
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not append and self.path.exists():
            self.path.unlink()

    def log(self, step: int, epoch: int, losses: Dict[str, float], ae_lr: float, d_lr: float) -> None:
        record = {
            'step': step,
            'epoch': epoch,
            **losses,
            'ae_lr': ae_lr,
            'd_lr': d_lr,
            'logged_at': datetime.now().isoformat(),
        }
        with open(self.path, 'a', encoding='utf-8') as f:
            f.write(json.dumps(record) + '\n')


def read_metrics(path: Union[str, Path]) -> pd.DataFrame:
    """Load a metrics log into a DataFrame, one row per step."""
    path = Path(path)
    if path.is_dir():
        path = path / METRICS_NAME
    return pd.read_json(path, lines=True)


def epoch_summary(metrics: pd.DataFrame) -> pd.DataFrame:
    """Mean of every numeric column per epoch."""
    numeric = metrics.drop(columns=['logged_at'], errors='ignore')
    return numeric.groupby('epoch').mean(numeric_only=True).drop(columns=['step'], errors='ignore')

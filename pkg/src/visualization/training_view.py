"""Training loss curves."""
from pathlib import Path
from typing import Union

import pandas as pd
import plotly.graph_objects as go

from src.training.metrics_logger import epoch_summary, read_metrics

from .style_config import COLORS, DIMENSIONS, FONTS


def create_loss_curves(metrics: pd.DataFrame) -> go.Figure:
    """Per-epoch mean of every loss term, log-scaled."""
    summary = epoch_summary(metrics)
    fig = go.Figure()
    for term, color in COLORS['losses'].items():
        if term in summary.columns:
            fig.add_trace(go.Scatter(x=summary.index, y=summary[term], mode='lines', name=term,
                                     line=dict(color=color)))

    fig.update_layout(
        title=dict(text='Training losses', font=dict(size=FONTS['primary']['sizes']['title'])),
        font=dict(family=FONTS['primary']['family'], size=FONTS['primary']['sizes']['body'],
                  color=COLORS['text']['primary']),
        paper_bgcolor=COLORS['background'],
        plot_bgcolor=COLORS['background'],
        width=DIMENSIONS['standalone']['width'],
        height=DIMENSIONS['standalone']['height'],
        margin=DIMENSIONS['standalone']['margin'],
        xaxis_title='epoch',
        yaxis_title='loss',
        yaxis_type='log',
    )
    return fig


def write_loss_curves(metrics_path: Union[str, Path], out_path: Union[str, Path]) -> Path:
    """Read a metrics log and write its loss curves as standalone HTML."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    create_loss_curves(read_metrics(metrics_path)).write_html(out_path)
    return out_path

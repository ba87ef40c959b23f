"""Deterministic SVG plots of sweep results."""

import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

from systems.persistence import load_csv, numeric_column

logger = logging.getLogger(__name__)

SVG_STYLE = {
    'svg.hashsalt': 'parlens',
    'svg.fonttype': 'none',
    'font.family': 'DejaVu Sans',
}
SVG_METADATA = {'Date': None, 'Creator': None}
POINTS_GID = 'points'


def _save(fig, out_path: str):
    fig.savefig(out_path, format='svg', metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote {out_path}")


def fit_line(x: np.ndarray, y: np.ndarray):
    """Least-squares (slope, intercept), or None when x is constant."""
    if len(x) < 2 or np.ptp(x) == 0:
        return None
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def correlation_label(x: np.ndarray, y: np.ndarray) -> str:
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return 'r = n/a'
    return f"r = {stats.pearsonr(x, y).statistic:.3f}"


def scatter_figure(x, y, x_label: str, y_label: str):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(x, y, linestyle='none', marker='o', markersize=6, color='tab:blue',
            alpha=0.8, gid=POINTS_GID)
    line = fit_line(x, y)
    if line is not None:
        slope, intercept = line
        xs = np.array([x.min(), x.max()])
        ax.plot(xs, slope * xs + intercept, color='tab:red', linewidth=1.5, gid='fit')
    ax.annotate(correlation_label(x, y), xy=(0.02, 0.95), xycoords='axes fraction',
                va='top', gid='annotation')
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_scatter(csv_path: str, x_col: str, y_col: str, out_path: str):
    """Scatter of two numeric CSV columns with a fit line and annotated r."""
    frame = load_csv(csv_path, required=(x_col, y_col))
    frame = frame.dropna(subset=[x_col, y_col])
    x = numeric_column(frame, x_col)
    y = numeric_column(frame, y_col)
    with plt.rc_context(SVG_STYLE):
        _save(scatter_figure(x, y, x_col, y_col), out_path)
    return len(x)


def render_histogram(csv_path: str, column: str, out_path: str, bins: int = 10,
                     value_range=(0.0, 1.0)):
    """Histogram of one column (SI by default range)."""
    frame = load_csv(csv_path, required=(column,))
    values = numeric_column(frame.dropna(subset=[column]), column)
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        ax.hist(values, bins=bins, range=value_range, color='tab:blue', edgecolor='black',
                gid='bars')
        ax.set_xlabel(column)
        ax.set_ylabel('count')
        fig.tight_layout()
        _save(fig, out_path)
    return len(values)

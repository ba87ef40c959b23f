"""Analysis package - statistics, sweeps, and plots."""

from .stats import pearson, spearman, logistic_fit, logistic_predict

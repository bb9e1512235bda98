"""Empirical-distribution statistics shared by the simulation checks:
Kolmogorov-Smirnov distances, their critical values, and plain
correlation/covariance estimators."""

from __future__ import annotations

import math

import numpy as np


def ks_distance(samples, cdf) -> float:
    """Two-sided KS statistic of ``samples`` against a scalar CDF callable."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = s.size
    if n == 0:
        raise ValueError("ks_distance needs at least one sample")
    f = np.array([cdf(x) for x in s], dtype=np.float64)
    below = np.arange(0, n, dtype=np.float64) / n
    above = np.arange(1, n + 1, dtype=np.float64) / n
    return float(max(np.max(above - f), np.max(f - below)))


def ks_uniform(samples) -> float:
    return ks_distance(samples, lambda x: min(1.0, max(0.0, x)))


def ks_two_sample(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample critical value at level ``alpha`` (DKW form)."""
    if n < 1 or not 0.0 < alpha < 1.0:
        raise ValueError("need n >= 1 and alpha in (0, 1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("pearson needs two equal-length samples, size >= 2")
    return float(np.corrcoef(x, y)[0, 1])


def covariance_with_se(x, y) -> tuple[float, float]:
    """Sample covariance and the plug-in standard error of that estimate."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("covariance needs two equal-length samples, size >= 2")
    prods = (x - x.mean()) * (y - y.mean())
    cov = float(prods.mean())
    se = float(prods.std(ddof=1) / math.sqrt(prods.size))
    return cov, se

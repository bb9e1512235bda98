"""Monte Carlo layer for the max-gap law.

A draw of the maximum gap M is assembled piece by piece: stick-breaking
lengths L_1, L_2, ... and one excursion-maximum draw per stick give
candidates sqrt(L_i) * M3_i, and M is their supremum.  Truncation is safe
because the not-yet-seen remainder of the sequence has total length
`residual` and its contribution is stochastically below
sqrt(residual) * tail_guard with overwhelming probability.

Randomness layout is fixed: each sample consumes one row of 2 * 128 uniforms
(w_1, u_1, w_2, u_2, ...), generated in chunks of 256 samples from
SeedSequence([seed, chunk_index]).  The layout makes results byte-identical
across thread counts and across the compiled/pure backends.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .excursion_max import M3Law, default_law

_CHUNK = 256          # samples per deterministic chunk
_MAX_STICKS = 128     # per-sample stick budget; residual < 2^-128 is unreachable
_LOOP_CAP = 10_000


@dataclass(frozen=True)
class MSampleConfig:
    residual_eps: float = 1e-12
    tail_guard: float = 6.0
    seed: int = 0
    n_samples: int = 1

    def __post_init__(self) -> None:
        if not (0.0 < self.residual_eps < 0.5):
            raise ValueError("residual_eps must lie in (0, 0.5)")
        if self.tail_guard < 4.0:
            raise ValueError("tail_guard must be at least 4")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")


def sample_m(rng: np.random.Generator, config: MSampleConfig | None = None,
             law: M3Law | None = None) -> float:
    """One draw of M from an external generator."""
    cfg = config or MSampleConfig()
    law = law or default_law()
    u = rng.random((1, 2 * _MAX_STICKS))
    out = _kernels.sample_m_block(u, cfg.tail_guard, cfg.residual_eps,
                                  law.small_y_cutoff, law.control.abs_tol,
                                  law.control.max_terms)
    return float(out[0])


def _chunk_args(cfg: MSampleConfig, law: M3Law) -> list[tuple]:
    seed = cfg.seed % 2**64
    n = cfg.n_samples
    args = []
    c = 0
    while n > 0:
        m = min(_CHUNK, n)
        args.append((seed, c, m, cfg.tail_guard, cfg.residual_eps,
                     law.small_y_cutoff, law.control.abs_tol,
                     law.control.max_terms))
        n -= m
        c += 1
    return args


def _sample_chunk(args: tuple) -> np.ndarray:
    seed, c, m, tail_guard, residual_eps, cutoff, abs_tol, max_terms = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, c]))
    u = rng.random((m, 2 * _MAX_STICKS))
    return _kernels.sample_m_block(u, tail_guard, residual_eps,
                                   cutoff, abs_tol, max_terms)


def sample_m_many(config: MSampleConfig, n_threads: int = 1,
                  law: M3Law | None = None) -> np.ndarray:
    """config.n_samples draws, deterministic in (seed, n_samples) only.

    Chunks are independently seeded, so any thread count and any scheduling
    produce identical output.
    """
    if n_threads < 1:
        raise ValueError("n_threads must be positive")
    law = law or default_law()
    args = _chunk_args(config, law)
    if n_threads == 1 or len(args) == 1:
        parts = [_sample_chunk(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=n_threads) as ex:
            parts = list(ex.map(_sample_chunk, args, chunksize=8))
    return np.concatenate(parts)


def _product_factor(x: float, length: float, law: M3Law) -> float:
    # x / sqrt(length) >= 50 would underflow the series to an exact 1 anyway
    arg = x / math.sqrt(length)
    if arg >= 50.0:
        return 1.0
    return law.f3_cdf(arg)


def mc_cdf(x: float, n_processes: int, rng: np.random.Generator,
           config: MSampleConfig | None = None,
           law: M3Law | None = None) -> float:
    """Estimate F(x) = E prod_i F3(x / sqrt(L_i)) over stick sequences.

    Each replication consumes stick-break draws only (no quantile draws), the
    same count regardless of x, so estimates at different x from identically
    seeded generators share randomness and are monotone in x.
    """
    if x <= 0.0:
        raise ValueError("mc_cdf requires x > 0")
    cfg = config or MSampleConfig()
    law = law or default_law()
    total = 0.0
    for _ in range(n_processes):
        prod = 1.0
        residual = 1.0
        for _ in range(_LOOP_CAP):
            if residual < cfg.residual_eps:
                break
            w = rng.random()
            if w == 0.0:
                continue
            length = residual * w
            residual *= 1.0 - w
            prod *= _product_factor(x, length, law)
        # remaining sticks are bracketed by one stick of half the residual:
        # factors for the true tail lie between F3 at the full residual and 1
        prod *= 0.5 * (1.0 + _product_factor(x, residual, law))
        total += prod
    return total / n_processes


def mc_pdf(x: float, n_processes: int, rng: np.random.Generator,
           config: MSampleConfig | None = None,
           law: M3Law | None = None) -> float:
    """Density estimate: differentiate the product across sticks,

        f(x) = E sum_i (1/sqrt(L_i)) f3(x/sqrt(L_i)) prod_{j!=i} F3(x/sqrt(L_j)),

    sharing the draw pattern of mc_cdf so that finite differences of mc_cdf
    under common random numbers converge to mc_pdf."""
    if x <= 0.0:
        raise ValueError("mc_pdf requires x > 0")
    cfg = config or MSampleConfig()
    law = law or default_law()
    total = 0.0
    for _ in range(n_processes):
        lengths = []
        residual = 1.0
        for _ in range(_LOOP_CAP):
            if residual < cfg.residual_eps:
                break
            w = rng.random()
            if w == 0.0:
                continue
            lengths.append(residual * w)
            residual *= 1.0 - w
        factors = [_product_factor(x, l, law) for l in lengths]
        tail_factor = 0.5 * (1.0 + _product_factor(x, residual, law))
        k = len(lengths)
        prefix = [1.0] * (k + 1)
        for i in range(k):
            prefix[i + 1] = prefix[i] * factors[i]
        suffix = [1.0] * (k + 1)
        for i in range(k - 1, -1, -1):
            suffix[i] = suffix[i + 1] * factors[i]
        acc = 0.0
        for i in range(k):
            arg = x / math.sqrt(lengths[i])
            if arg >= 50.0:
                continue
            dens = law.f3_pdf(arg)
            if dens > 0.0:
                acc += dens / math.sqrt(lengths[i]) * prefix[i] * suffix[i + 1]
        total += acc * tail_factor
    return total / n_processes

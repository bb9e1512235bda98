"""Uniform stick-breaking of [0,1] and size-biased permutations.

A stick sequence is a finite prefix of lengths L_1, L_2, ... obtained by
repeatedly breaking off a uniform fraction of the remaining mass, together
with the unbroken residual, so consumers can bound truncation error exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class StickSequence:
    lengths: tuple[float, ...]
    residual: float

    def __post_init__(self) -> None:
        if any(l <= 0.0 for l in self.lengths):
            raise ValueError("stick lengths must be positive")
        if not 0.0 <= self.residual < 1.0:
            raise ValueError("residual must lie in [0, 1)")
        if abs(sum(self.lengths) + self.residual - 1.0) > 1e-12:
            raise ValueError("lengths plus residual must sum to 1")


@dataclass(frozen=True)
class CountRule:
    k: int


@dataclass(frozen=True)
class ResidualRule:
    eps: float


StopRule = Union[CountRule, ResidualRule]


def count(k: int) -> CountRule:
    """Stop after exactly k sticks."""
    if k < 1:
        raise ValueError("count rule requires k >= 1")
    return CountRule(k)


def residual_below(eps: float) -> ResidualRule:
    """Stop once the unbroken mass drops below eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("residual_below requires eps in (0, 1)")
    return ResidualRule(eps)


def _uniform_open(rng: np.random.Generator) -> float:
    w = float(rng.random())
    while w == 0.0:  # probability 2^-53; keep lengths strictly positive
        w = float(rng.random())
    return w


def sample_sticks(rng: np.random.Generator, stop_rule: StopRule) -> StickSequence:
    lengths: list[float] = []
    residual = 1.0
    if isinstance(stop_rule, CountRule):
        for _ in range(stop_rule.k):
            w = _uniform_open(rng)
            lengths.append(residual * w)
            residual *= 1.0 - w
    elif isinstance(stop_rule, ResidualRule):
        it = 0
        while residual >= stop_rule.eps and it < 10_000:
            w = _uniform_open(rng)
            lengths.append(residual * w)
            residual *= 1.0 - w
            it += 1
    else:
        raise TypeError("stop_rule must come from count() or residual_below()")
    return StickSequence(tuple(lengths), residual)


def ranked(sticks: StickSequence) -> tuple[float, ...]:
    """Lengths in decreasing order (stable, for reproducibility on ties)."""
    return tuple(sorted(sticks.lengths, reverse=True))


def size_biased_permutation(
    lengths: Sequence[float], rng: np.random.Generator
) -> tuple[float, ...]:
    """Reorder by repeatedly picking an element with probability proportional
    to its length among those remaining."""
    pool = [float(l) for l in lengths]
    if any(l <= 0.0 for l in pool):
        raise ValueError("lengths must be positive")
    if sum(pool) > 1.0 + 1e-12:
        raise ValueError("lengths must sum to at most 1")
    out: list[float] = []
    while pool:
        total = sum(pool)
        target = rng.random() * total
        acc = 0.0
        pick = len(pool) - 1  # guard against accumulated rounding
        for i, l in enumerate(pool):
            acc += l
            if target < acc:
                pick = i
                break
        out.append(pool.pop(pick))
    return tuple(out)

"""The model fitness criterion: bias-corrected Hellinger distance between the
discretized samples, compared against the 8 eps^2 threshold.

The partition is always built from the MODEL sample; the mother sample is
only counted into its bins.  The conclusion is one-sided: the verdict is
"close" when the inequality holds and "not-shown-close" otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
import json
import math

import numpy as np
from scipy.special import kolmogorov

from hellfit.dataset import Dataset
from hellfit.divergence import hellinger
from hellfit.partition import (
    PartitionSpec,
    build_moving_partition,
    count_into_bins,
    free_param_count,
    model_pmf,
)


@dataclass(frozen=True)
class FitnessReport:
    hellinger_hat: float
    p_prime: int
    n1: int
    n2: int
    bias_n1: float
    bias_n2: float
    lhs: float
    epsilon: float
    threshold: float
    verdict: str  # "close" | "not-shown-close"
    implied_epsilon: float
    implied_bayes_error: float
    zero_bins: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def bias_correction(p_prime: int, n1: int, n2: int) -> tuple[float, float]:
    """(p'/(2 n1), sqrt(8 p'/n2))."""
    if p_prime < 1 or n1 < 1 or n2 < 1:
        raise ValueError("p_prime, n1 and n2 must be positive")
    return p_prime / (2.0 * n1), math.sqrt(8.0 * p_prime / n2)


def implied_epsilon(lhs: float) -> float:
    """Solve 8 eps^2 = lhs for eps."""
    if lhs < 0:
        raise ValueError("lhs must be >= 0")
    return math.sqrt(lhs / 8.0)


def evaluate_fitness(
    mother: Dataset, model: Dataset, spec: PartitionSpec, epsilon: float
) -> FitnessReport:
    """Full criterion pipeline on two samples."""
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must be in (0, 0.5)")
    if mother.k != model.k:
        raise ValueError(f"dimension mismatch: mother k={mother.k}, model k={model.k}")
    tree = build_moving_partition(model, spec)
    counts = count_into_bins(tree, mother)
    m1_hat = counts / mother.n
    m2_hat = model_pmf(tree)
    d_hat = hellinger(m1_hat, m2_hat)
    p_prime = free_param_count(tree)
    bias_n1, bias_n2 = bias_correction(p_prime, mother.n, model.n)
    lhs = d_hat + bias_n1 + bias_n2
    threshold = 8.0 * epsilon**2
    eps_implied = implied_epsilon(lhs)
    return FitnessReport(
        hellinger_hat=d_hat,
        p_prime=p_prime,
        n1=mother.n,
        n2=model.n,
        bias_n1=bias_n1,
        bias_n2=bias_n2,
        lhs=lhs,
        epsilon=epsilon,
        threshold=threshold,
        verdict="close" if lhs < threshold else "not-shown-close",
        implied_epsilon=eps_implied,
        implied_bayes_error=0.5 - eps_implied,
        zero_bins=int(np.count_nonzero(counts == 0)),
    )


def ks_two_sample(x, y) -> tuple[float, float]:
    """Two-sided two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    The p-value uses the limiting Kolmogorov distribution evaluated at
    sqrt(nx ny / (nx + ny)) times the statistic.
    """
    x = np.sort(np.asarray(x, dtype=float).ravel())
    y = np.sort(np.asarray(y, dtype=float).ravel())
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side="right") / x.size
    cdf_y = np.searchsorted(y, pooled, side="right") / y.size
    statistic = float(np.max(np.abs(cdf_x - cdf_y)))
    effective = x.size * y.size / (x.size + y.size)
    p_value = float(kolmogorov(math.sqrt(effective) * statistic))
    return statistic, p_value

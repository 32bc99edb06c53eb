"""Detectors for deciding whether a training set was poisoned.

Detectors are ordered by oracle access. A Type-1 detector sees the raw
training set plus a fresh clean sample; a Type-2 detector sees the clean
distribution itself; a Type-3 detector additionally sees the backdoor
distribution, turning the task into a binary likelihood-ratio test between
the clean product law and the contaminated product law. Adapters reduce a
weaker-oracle detector to a stronger-oracle interface without changing its
risk.

Verdict polarity: 1 flags the training set as drawn from the contaminated
mixture, 0 as clean. Ties in the likelihood ratio and the threshold tests
resolve to 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import (
    Categorical,
    DistributionPair,
    SymbolDataset,
    draw_symbols,
    mix,
    tv_to_type,
)
from .errors import AlphabetMismatchError, ImpossibleSampleError, ParameterError
from .rng import Domain, substream


class Verdict(enum.IntEnum):
    """Binary detector output; BACKDOORED means "contaminated mixture"."""

    CLEAN = 0
    BACKDOORED = 1


@dataclass(frozen=True)
class KsResult:
    """Outcome of a one-sample Kolmogorov-Smirnov test."""

    statistic: float
    p_value: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.statistic <= 1.0:
            raise ParameterError("KS statistic must lie in [0, 1]")
        if not 0.0 <= self.p_value <= 1.0:
            raise ParameterError("p-value must lie in [0, 1]")


def np_type3(d: SymbolDataset, pair: DistributionPair) -> Verdict:
    """Likelihood-ratio (Neyman-Pearson) detector with full knowledge.

    Returns BACKDOORED iff the log likelihood ratio of the contaminated
    mixture against the clean distribution is >= 0 over the dataset.
    Symbols impossible under one hypothesis short-circuit the verdict;
    symbols impossible under both raise :class:`ImpossibleSampleError`.
    """
    p0 = pair.p0.probs
    p1 = mix(pair).probs
    x = d.symbols
    q0 = p0[x]
    q1 = p1[x]
    both_zero = (q0 == 0.0) & (q1 == 0.0)
    if np.any(both_zero):
        bad = int(x[both_zero][0])
        raise ImpossibleSampleError(
            f"symbol {bad} has zero probability under both hypotheses"
        )
    if np.any(q1 == 0.0):
        return Verdict.CLEAN
    if np.any(q0 == 0.0):
        return Verdict.BACKDOORED
    llr = float(np.log(q1).sum() - np.log(q0).sum())
    return Verdict.BACKDOORED if llr >= 0.0 else Verdict.CLEAN


def type2_tv(
    d: SymbolDataset, p0: Categorical, gamma: float, beta: float
) -> Verdict:
    """Threshold the TV distance between the dataset's type and p0.

    Flags BACKDOORED when TV(p0, S_N) >= gamma * (1 - beta) / 2, with
    equality counting as a flag.
    """
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0, 1], got {gamma}")
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"beta must be in [0, 1), got {beta}")
    threshold = gamma * (1.0 - beta) / 2.0
    distance = tv_to_type(p0, d)
    return Verdict.BACKDOORED if distance >= threshold else Verdict.CLEAN


def type1_tv(
    d: SymbolDataset, d_clean: SymbolDataset, gamma: float, beta: float
) -> Verdict:
    """Type-1 analogue of :func:`type2_tv`: compare two empirical types.

    The clean reference distribution is replaced by the type of an
    independently collected clean dataset.
    """
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must be in (0, 1], got {gamma}")
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"beta must be in [0, 1), got {beta}")
    if d.alphabet_size != d_clean.alphabet_size:
        raise AlphabetMismatchError("datasets disagree on alphabet size")
    t = np.bincount(d.symbols, minlength=d.alphabet_size) / len(d)
    t_clean = np.bincount(d_clean.symbols, minlength=d.alphabet_size) / len(d_clean)
    distance = 0.5 * float(np.abs(t - t_clean).sum())
    threshold = gamma * (1.0 - beta) / 2.0
    return Verdict.BACKDOORED if distance >= threshold else Verdict.CLEAN


def ks_statistic(values: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample KS statistic against a reference CDF.

    D_n = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n) over the order
    statistics. ``cdf`` must accept an ndarray and return values in [0, 1].
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n < 1:
        raise ParameterError("KS statistic requires at least one observation")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    upper = i / n - f
    lower = f - (i - 1) / n
    return float(max(upper.max(), lower.max()))


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution.

    Alternating series 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2),
    truncated when terms fall below 1e-10 and clamped to [0, 1]. For
    lam below 1e-3 the value is 1 to double precision.
    """
    if lam <= 1e-3:
        return 1.0
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-10:
            break
        total += sign * term
        sign = -sign
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_pvalue(statistic: float, n: int) -> float:
    """Asymptotic p-value for the one-sample KS statistic.

    Applies the standard small-sample correction
    lam = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * D_n before evaluating the
    Kolmogorov survival function. The exact finite-n distribution is out
    of scope.
    """
    if n < 1:
        raise ParameterError("sample count must be >= 1")
    root_n = math.sqrt(n)
    lam = (root_n + 0.12 + 0.11 / root_n) * statistic
    return kolmogorov_sf(lam)


def ood_risk_exact(
    f: Callable[[int], int] | Sequence[int],
    p0: Categorical,
    pb: Categorical,
) -> float:
    """Exact out-of-distribution risk of a binary labeling of the alphabet.

    (1/2) Pr{f(X0) = 1} + (1/2) Pr{f(X1) = 0} with X0 ~ p0 and X1 ~ pb,
    computed by summing masses. ``f`` may be a callable on symbols or a
    length-K array of labels.
    """
    k = p0.alphabet_size
    if pb.alphabet_size != k:
        raise ParameterError("p0 and pb must share an alphabet")
    if callable(f):
        labels = np.asarray([int(f(x)) for x in range(k)])
    else:
        labels = np.asarray(f, dtype=int)
        if labels.size != k:
            raise ParameterError("label vector must cover the full alphabet")
    if not np.all((labels == 0) | (labels == 1)):
        raise ParameterError("labels must be 0 or 1")
    flagged = labels == 1
    return 0.5 * float(p0.probs[flagged].sum()) + 0.5 * float(pb.probs[~flagged].sum())


class AdaptedType2:
    """Type-2 detector built from a Type-1 detector.

    On each call it draws an internal clean dataset of size ``m`` from the
    supplied distribution and delegates to the wrapped detector. Without an
    explicit generator the draw is repeated identically (deterministic given
    the construction seed); risk-estimation harnesses pass per-trial
    generators to realize a fresh clean draw per trial.
    """

    def __init__(
        self,
        g1: Callable[[SymbolDataset, SymbolDataset], int],
        p0: Categorical,
        m: int,
        seed: int = 0,
    ) -> None:
        if m < 1:
            raise ParameterError("internal clean sample size must be >= 1")
        self._g1 = g1
        self._p0 = p0
        self._m = m
        self._seed = seed

    def __call__(
        self,
        d: SymbolDataset,
        p0: Categorical,
        rng: np.random.Generator | None = None,
    ) -> Verdict:
        if rng is None:
            rng = substream(self._seed, Domain.ADAPTER)
        d_clean = SymbolDataset(draw_symbols(p0, self._m, rng), p0.alphabet_size)
        return Verdict(int(self._g1(d, d_clean)))


def adapt_type2_from_type1(
    g1: Callable[[SymbolDataset, SymbolDataset], int],
    p0: Categorical,
    m: int,
    seed: int = 0,
) -> AdaptedType2:
    """Lift a Type-1 detector to the Type-2 interface by sampling p0 itself."""
    return AdaptedType2(g1, p0, m, seed)


def adapt_type3_from_type2(
    g2: Callable[..., int],
) -> Callable[..., Verdict]:
    """Lift a Type-2 detector to the Type-3 interface; pb is ignored."""

    def g3(
        d: SymbolDataset,
        p0: Categorical,
        pb: Categorical,
        rng: np.random.Generator | None = None,
    ) -> Verdict:
        if isinstance(g2, AdaptedType2):
            return Verdict(int(g2(d, p0, rng)))
        return Verdict(int(g2(d, p0)))

    return g3

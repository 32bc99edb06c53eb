"""Executable attacker constructions.

Two adversaries live here. The first targets a projection-based defense on
a Gaussian binary-classification task: samples are (y, z) with label
y in {-1, +1} and features z = y*1 + sigma*w. A defense projects each
sample to f(x) = v . (y z), which is Normal(mu, sigma^2) with mu = v . 1,
and runs a goodness-of-fit test. Knowing v, the attacker flips labels and
shifts features by a vector delta chosen so v . delta = -2 mu, which leaves
the law of f(x) unchanged while moving the trained decision boundary.

The second adversary defeats any fixed detector that must work from the
clean distribution alone: it draws a dataset whose marginal law is exactly
the clean uniform distribution, yet which, conditioned on a hidden anchor
set, is an i.i.d. contaminated sample. Its guaranteed risk floor is
exp(-N^2 / (M - N)) / 2 with M anchors and N training samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr

from .detectors import KsResult, ks_pvalue, ks_statistic
from .distributions import Categorical, SymbolDataset
from .errors import DegenerateDirectionError, DegenerateFitError, ParameterError
from .harness import RiskEstimate, wilson_interval
from .rng import Domain, substream


def toy_delta(v: np.ndarray, k: int) -> np.ndarray:
    """Backdoor shift delta = 2/sqrt(K - mu^2) * (1 - mu v) - 2 mu v.

    ``v`` must be a unit vector; mu = v . 1 must satisfy mu^2 < K. The
    returned vector satisfies v . delta = -2 mu, which is exactly what
    preserves the projection statistics under the label flip.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size != k:
        raise ParameterError(f"direction must be a length-{k} vector")
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
        raise ParameterError("direction must be a unit vector")
    mu = float(v.sum())
    if mu * mu >= k:
        raise DegenerateDirectionError(
            f"mu^2 = {mu * mu:.6f} >= K = {k}; no valid shift for this direction"
        )
    ones = np.ones(k)
    return (2.0 / math.sqrt(k - mu * mu)) * (ones - mu * v) - 2.0 * mu * v


@dataclass(frozen=True)
class ToyConfig:
    """Parameter bundle for the Gaussian toy attack.

    ``mu`` and ``delta`` are derived from ``v``; construct via
    :meth:`from_direction`, which normalizes the direction first.
    """

    k: int
    sigma: float
    gamma: float
    n: int
    v: np.ndarray
    mu: float = field(init=False)
    delta: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ParameterError("dimension must be >= 2")
        if self.sigma < 0.0:
            # sigma = 0 is tolerated for noiseless sampling checks; the KS
            # defense itself requires a positive sigma
            raise ParameterError("sigma must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError("gamma must be in [0, 1]")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        v = np.asarray(self.v, dtype=float)
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
            raise ParameterError("v must be a unit vector; use from_direction")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "mu", float(v.sum()))
        delta = toy_delta(v, self.k)
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def from_direction(
        cls, v: Sequence[float], sigma: float, gamma: float, n: int
    ) -> "ToyConfig":
        arr = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ParameterError("direction must be nonzero")
        return cls(k=arr.size, sigma=sigma, gamma=gamma, n=n, v=arr / norm)


@dataclass(frozen=True)
class LabeledSample:
    """A label in {-1, +1} and a feature vector in R^K."""

    y: int
    z: np.ndarray


def _draw_clean(config: ToyConfig, n: int, rng: np.random.Generator) -> list[LabeledSample]:
    y = rng.integers(0, 2, n) * 2 - 1
    w = rng.standard_normal((n, config.k))
    z = y[:, None] * np.ones(config.k) + config.sigma * w
    return [LabeledSample(int(y[i]), z[i]) for i in range(n)]


def toy_sample_clean(config: ToyConfig, n: int, seed: int) -> list[LabeledSample]:
    """Draw n clean samples: y uniform on {-1, +1}, z = y*1 + sigma*w."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return _draw_clean(config, n, substream(seed, Domain.TOY_CLEAN))


def toy_backdoor(s: LabeledSample, config: ToyConfig) -> LabeledSample:
    """Flip the label and shift the features by y*delta."""
    return LabeledSample(-s.y, s.z + s.y * config.delta)


def toy_poison(
    clean: list[LabeledSample], gamma: float, config: ToyConfig, seed: int
) -> list[LabeledSample]:
    """Independently replace each sample by its backdoored version at rate gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError("gamma must be in [0, 1]")
    rng = substream(seed, Domain.TOY_POISON)
    replace = rng.random(len(clean)) < gamma
    return [
        toy_backdoor(s, config) if replace[i] else s for i, s in enumerate(clean)
    ]


def projections(data: list[LabeledSample], config: ToyConfig) -> np.ndarray:
    """Detector statistics f(x) = v . (y z) for each sample."""
    return np.array([s.y * float(config.v @ s.z) for s in data])


def toy_ks_defense(data: list[LabeledSample], config: ToyConfig) -> KsResult:
    """Project the dataset and KS-test it against Normal(mu, sigma^2)."""
    if not data:
        raise ParameterError("defense requires a nonempty dataset")
    if config.sigma == 0.0:
        raise ParameterError("the KS defense requires a positive sigma")
    f = projections(data, config)
    cdf = lambda x: ndtr((x - config.mu) / config.sigma)  # noqa: E731
    stat = ks_statistic(f, cdf)
    return KsResult(statistic=stat, p_value=ks_pvalue(stat, f.size), n=f.size)


@dataclass(frozen=True)
class LinearClassifier:
    """sign(w . z + b) classifier fitted by least squares."""

    w: np.ndarray
    b: float

    def predict(self, z: np.ndarray) -> int:
        return 1 if float(self.w @ z) + self.b >= 0.0 else -1

    def predict_many(self, zs: np.ndarray) -> np.ndarray:
        scores = zs @ self.w + self.b
        return np.where(scores >= 0.0, 1, -1)


def toy_train_classifier(data: list[LabeledSample]) -> LinearClassifier:
    """Least-squares fit of the labels on the features, with intercept."""
    labels = np.array([s.y for s in data], dtype=float)
    if np.all(labels == labels[0]):
        raise DegenerateFitError("training data contains a single class")
    zs = np.array([s.z for s in data], dtype=float)
    design = np.hstack([zs, np.ones((len(data), 1))])
    coef, *_ = np.linalg.lstsq(design, labels, rcond=None)
    return LinearClassifier(w=coef[:-1], b=float(coef[-1]))


@dataclass(frozen=True)
class ToyAttackReport:
    """End-to-end outcome of one seeded toy-attack run."""

    p_value: float
    ks_statistic: float
    clean_accuracy: float
    attack_success_rate: float

    def to_jsonable(self) -> dict:
        return {
            "p_value": self.p_value,
            "ks_statistic": self.ks_statistic,
            "clean_accuracy": self.clean_accuracy,
            "attack_success_rate": self.attack_success_rate,
        }


def toy_attack_report(
    config: ToyConfig, seed: int, eval_samples: int = 2000
) -> ToyAttackReport:
    """Run the full pipeline: sample, poison, test, train, evaluate.

    The attack success rate is the fraction of freshly backdoored samples
    that the poisoned-data classifier assigns to their flipped target label;
    clean accuracy is measured on fresh clean samples.
    """
    clean = toy_sample_clean(config, config.n, seed)
    poisoned = toy_poison(clean, config.gamma, config, seed)
    ks = toy_ks_defense(poisoned, config)
    clf = toy_train_classifier(poisoned)

    fresh = _draw_clean(config, eval_samples, substream(seed, Domain.TOY_EVAL))
    zs = np.array([s.z for s in fresh])
    ys = np.array([s.y for s in fresh])
    clean_accuracy = float(np.mean(clf.predict_many(zs) == ys))

    backdoored = [toy_backdoor(s, config) for s in fresh]
    zb = np.array([s.z for s in backdoored])
    yb = np.array([s.y for s in backdoored])
    attack_success = float(np.mean(clf.predict_many(zb) == yb))

    return ToyAttackReport(
        p_value=ks.p_value,
        ks_statistic=ks.statistic,
        clean_accuracy=clean_accuracy,
        attack_success_rate=attack_success,
    )


@dataclass(frozen=True)
class ImpossibilityConfig:
    """Parameters of the marginally-clean adversarial sampler.

    ``m`` anchors are drawn uniformly; the construction needs at least one,
    and the risk floor is informative when m exceeds the dataset size n.
    """

    k: int
    beta: float
    gamma: float
    n: int
    m: int = field(init=False)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError("alphabet size must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError("beta must be in [0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError("gamma must be in [0, 1]")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        m = math.floor(self.beta * self.k)
        if m < 1:
            raise ParameterError(
                f"floor(beta * k) = {m}; the construction needs at least one anchor"
            )
        object.__setattr__(self, "m", m)


def _draw_given_anchors(
    anchors: np.ndarray, config: ImpossibilityConfig, rng: np.random.Generator
) -> np.ndarray:
    x0 = rng.integers(0, config.k, config.n)
    g = rng.random(config.n) < config.gamma
    v = rng.integers(0, config.m, config.n)
    return np.where(g, anchors[v], x0)


def imposs_conditional_sampler(
    anchors: Sequence[int], config: ImpossibilityConfig, seed: int
) -> SymbolDataset:
    """Sample conditioned on a fixed anchor vector.

    Given the anchors, symbols are i.i.d. from the mixture
    (1 - gamma) * uniform + gamma * (uniform on the anchor multiset).
    """
    anchors = np.asarray(anchors, dtype=np.int64)
    if anchors.size != config.m:
        raise ParameterError(f"expected {config.m} anchors, got {anchors.size}")
    rng = substream(seed, Domain.PROBE_SAMPLER)
    return SymbolDataset(_draw_given_anchors(anchors, config, rng), config.k)


def imposs_sampler(config: ImpossibilityConfig, seed: int) -> SymbolDataset:
    """Draw one adversarial dataset.

    Each symbol is marginally uniform on the alphabet, so no statistic of
    the dataset distinguishes it from clean data in expectation; yet
    conditioned on the hidden anchors it is an i.i.d. contaminated sample
    whose backdoor distribution is far from uniform.
    """
    rng = substream(seed, Domain.PROBE_SAMPLER)
    anchors = rng.integers(0, config.k, config.m)
    return SymbolDataset(_draw_given_anchors(anchors, config, rng), config.k)


def imposs_risk_floor(n: int, m: int) -> float:
    """Guaranteed risk floor exp(-n^2 / (m - n)) / 2 of any fixed detector."""
    if m <= n:
        raise ParameterError("the floor requires m > n")
    return 0.5 * math.exp(-(n * n) / (m - n))


def imposs_probe(
    detector: Callable[[SymbolDataset, Categorical], int],
    config: ImpossibilityConfig,
    trials: int,
    seed: int,
) -> RiskEstimate:
    """Monte-Carlo risk of a clean-distribution detector against the sampler.

    J = 0 trials feed the detector genuine uniform i.i.d. data, J = 1 trials
    feed it the adversarial construction; the detector receives the uniform
    distribution as its clean reference in both cases.
    """
    if trials < 100:
        raise ParameterError("at least 100 trials are required")
    if config.m <= config.n:
        raise ParameterError(
            f"informative regime needs floor(beta*k) = {config.m} > n = {config.n}"
        )
    p0 = Categorical.uniform(config.k)
    errors = 0
    for t in range(trials):
        rng = substream(seed, Domain.PROBE, t)
        j = int(rng.integers(0, 2))
        if j == 0:
            symbols = rng.integers(0, config.k, config.n)
        else:
            anchors = rng.integers(0, config.k, config.m)
            symbols = _draw_given_anchors(anchors, config, rng)
        d = SymbolDataset(symbols, config.k)
        errors += int(detector(d, p0)) != j
    return wilson_interval(errors, trials)

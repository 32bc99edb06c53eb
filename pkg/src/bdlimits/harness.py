"""Monte-Carlo risk estimation and experiment orchestration.

The risk of a detector is the probability that its verdict disagrees with
the fair coin J that selected whether the training set was drawn from the
clean product law (J = 0) or from the contaminated mixture law (J = 1).
Estimates carry a 99% Wilson interval.

Every trial runs on its own substream derived from (master seed, domain,
trial index), so aggregates are bit-identical regardless of scheduling or
parallelism degree; results are merged in trial-index order.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .detectors import np_type3, type1_tv, type2_tv
from .distributions import (
    Categorical,
    DistributionPair,
    SymbolDataset,
    draw_symbols,
    mix,
    tv_to_type,
)
from .errors import ConfigurationError, ParameterError
from .rng import Domain, substream

#: two-sided 99% normal quantile used by the Wilson interval
_Z99 = 2.5758293035489004

#: A detector as seen by the risk harness: dataset, problem instance, and a
#: per-trial generator for randomized detectors.
TrialDetector = Callable[[SymbolDataset, DistributionPair, np.random.Generator], int]


@dataclass(frozen=True)
class RiskEstimate:
    """Monte-Carlo estimate of a detector's risk with a 99% Wilson interval."""

    p_hat: float
    ci_low: float
    ci_high: float
    trials: int

    def __post_init__(self) -> None:
        if not self.ci_low <= self.p_hat <= self.ci_high:
            raise ParameterError("confidence interval must contain the point estimate")

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low

    def to_jsonable(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "trials": self.trials,
        }


def wilson_interval(errors: int, trials: int, z: float = _Z99) -> RiskEstimate:
    """Wilson score interval; well behaved near risks of 0 and 1."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if not 0 <= errors <= trials:
        raise ParameterError("error count outside [0, trials]")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    # the interval contains p exactly; the min/max against p only absorbs
    # float rounding at the endpoints
    return RiskEstimate(
        p_hat=p,
        ci_low=max(0.0, min(center - half, p)),
        ci_high=min(1.0, max(center + half, p)),
        trials=trials,
    )


class Flavor(str, Enum):
    """Which question the generalized detector answers.

    MBD asks whether the model's training set was poisoned (target j),
    SBD and OOD ask whether the probe sample is backdoored (target i).
    """

    MBD = "mbd"
    SBD = "sbd"
    OOD = "ood"

    def target(self, j: int, i: int) -> int:
        return j if self is Flavor.MBD else i


@dataclass(frozen=True)
class JointPrior:
    """Distribution of (J, I) on {0,1}^2; cell (j, i) has mass p_ji."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self) -> None:
        cells = (self.p00, self.p01, self.p10, self.p11)
        if any(c < 0.0 for c in cells):
            raise ParameterError("prior cells must be nonnegative")
        if abs(sum(cells) - 1.0) > 1e-12:
            raise ParameterError("prior cells must sum to 1")

    def cells(self) -> tuple[tuple[int, int, float], ...]:
        return (
            (0, 0, self.p00),
            (0, 1, self.p01),
            (1, 0, self.p10),
            (1, 1, self.p11),
        )

    def validate_for(self, flavor: Flavor) -> None:
        """Reject priors putting mass on cells the flavor declares irrelevant."""
        if flavor is Flavor.MBD and (self.p01 > 0.0 or self.p11 > 0.0):
            raise ConfigurationError("MBD prior must not weight backdoored probes")
        if flavor is Flavor.SBD and self.p01 > 0.0:
            raise ConfigurationError(
                "SBD prior must not weight a clean model with a backdoored probe"
            )
        if flavor is Flavor.OOD and (self.p10 > 0.0 or self.p11 > 0.0):
            raise ConfigurationError("OOD prior must not weight backdoored models")

    @classmethod
    def mbd_default(cls) -> "JointPrior":
        return cls(0.5, 0.0, 0.5, 0.0)

    @classmethod
    def sbd_default(cls) -> "JointPrior":
        return cls(0.5, 0.0, 0.25, 0.25)

    @classmethod
    def ood_default(cls) -> "JointPrior":
        return cls(0.5, 0.5, 0.0, 0.0)


@dataclass(frozen=True)
class TrainerStub:
    """Stand-in training algorithm: additive-smoothed symbol frequencies.

    Deterministic given the dataset; the smoothed frequency vector plays the
    role of the trained parameters.
    """

    smoothing: float = 1.0

    def __call__(self, d: SymbolDataset) -> Categorical:
        counts = np.bincount(d.symbols, minlength=d.alphabet_size).astype(float)
        counts += self.smoothing
        return Categorical(counts / counts.sum())


def np_trial_detector() -> TrialDetector:
    """Full-knowledge likelihood-ratio detector in harness form."""

    def run(d: SymbolDataset, pair: DistributionPair, rng: np.random.Generator) -> int:
        return int(np_type3(d, pair))

    return run


def type2_trial_detector() -> TrialDetector:
    """Type-distance detector in harness form, thresholded from the pair's knobs."""

    def run(d: SymbolDataset, pair: DistributionPair, rng: np.random.Generator) -> int:
        return int(type2_tv(d, pair.p0, pair.gamma, pair.beta))

    return run


def type1_trial_detector(m: int) -> TrialDetector:
    """Type-1 detector in harness form; draws its m clean samples per trial."""
    if m < 1:
        raise ParameterError("m must be >= 1")

    def run(d: SymbolDataset, pair: DistributionPair, rng: np.random.Generator) -> int:
        d_clean = SymbolDataset(draw_symbols(pair.p0, m, rng), pair.alphabet_size)
        return int(type1_tv(d, d_clean, pair.gamma, pair.beta))

    return run


def type2_callable_trial_detector(g2: Callable[..., int]) -> TrialDetector:
    """Wrap a (dataset, p0[, rng]) detector for the harness.

    Detectors produced by :func:`bdlimits.detectors.adapt_type2_from_type1`
    receive the per-trial generator; plain deterministic callables do not.
    """
    from .detectors import AdaptedType2

    if isinstance(g2, AdaptedType2):

        def run(d: SymbolDataset, pair: DistributionPair, rng: np.random.Generator) -> int:
            return int(g2(d, pair.p0, rng))

    else:

        def run(d: SymbolDataset, pair: DistributionPair, rng: np.random.Generator) -> int:
            return int(g2(d, pair.p0))

    return run


DETECTORS: dict[str, Callable[[], TrialDetector]] = {
    "np": np_trial_detector,
    "type2-tv": type2_trial_detector,
}


def _risk_trial(
    detector: TrialDetector,
    pair: DistributionPair,
    n: int,
    seed: int,
    index: int,
    p1: Categorical,
) -> bool:
    """Run one labeled trial; True when the verdict disagrees with J."""
    rng = substream(seed, Domain.RISK, index)
    j = int(rng.integers(0, 2))
    law = pair.p0 if j == 0 else p1
    d = SymbolDataset(draw_symbols(law, n, rng), pair.alphabet_size)
    return int(detector(d, pair, rng)) != j


def estimate_risk(
    detector: TrialDetector,
    pair: DistributionPair,
    n: int,
    trials: int,
    seed: int,
) -> RiskEstimate:
    """Unbiased Monte-Carlo estimate of the detector's risk on the pair."""
    if trials < 100:
        raise ParameterError("at least 100 trials are required")
    if n < 1:
        raise ParameterError("n must be >= 1")
    p1 = mix(pair)
    errors = sum(
        _risk_trial(detector, pair, n, seed, i, p1) for i in range(trials)
    )
    return wilson_interval(errors, trials)


def estimate_conditional_errors(
    detector: TrialDetector,
    pair: DistributionPair,
    n: int,
    trials: int,
    seed: int,
) -> tuple[RiskEstimate, RiskEstimate]:
    """Estimate the two conditional error rates separately.

    Returns (false-backdoor rate, missed-backdoor rate): the probability of
    flagging a clean set and of clearing a contaminated one. Their average
    matches the unconditional risk.
    """
    if trials < 100:
        raise ParameterError("at least 100 trials are required per branch")
    p1 = mix(pair)
    estimates = []
    for j, law in ((0, pair.p0), (1, p1)):
        errors = 0
        for i in range(trials):
            rng = substream(seed, Domain.CONDITIONAL, j, i)
            d = SymbolDataset(draw_symbols(law, n, rng), pair.alphabet_size)
            errors += int(detector(d, pair, rng)) != j
        estimates.append(wilson_interval(errors, trials))
    return estimates[0], estimates[1]


#: Generalized detector: trained parameters, fresh clean data, probe sample.
GeneralizedDetector = Callable[
    [Categorical, SymbolDataset, int, np.random.Generator], int
]


def estimate_generalized_risk(
    detector: GeneralizedDetector,
    pair: DistributionPair,
    n: int,
    m: int,
    prior: JointPrior,
    target: Flavor,
    trainer: TrainerStub,
    trials: int,
    seed: int,
) -> RiskEstimate:
    """Risk of a detector scoring (trained params, clean data, probe sample).

    Per trial: draw (j, i) from the prior, train on a clean or contaminated
    set of size n, draw m fresh clean samples, draw the probe from the clean
    distribution (i = 0) or the backdoor distribution itself (i = 1), and
    compare the verdict with the flavor's target t(j, i).
    """
    if trials < 100:
        raise ParameterError("at least 100 trials are required")
    if n < 1 or m < 1:
        raise ParameterError("n and m must be >= 1")
    prior.validate_for(target)
    p1 = mix(pair)
    cells = prior.cells()
    weights = np.array([c[2] for c in cells])
    errors = 0
    for t in range(trials):
        rng = substream(seed, Domain.GENERALIZED, t)
        j, i, _ = cells[int(rng.choice(4, p=weights))]
        train_law = pair.p0 if j == 0 else p1
        theta = trainer(SymbolDataset(draw_symbols(train_law, n, rng), pair.alphabet_size))
        d_prime = SymbolDataset(draw_symbols(pair.p0, m, rng), pair.alphabet_size)
        probe_law = pair.p0 if i == 0 else pair.pb
        x = int(draw_symbols(probe_law, 1, rng)[0])
        errors += int(detector(theta, d_prime, x, rng)) != target.target(j, i)
    return wilson_interval(errors, trials)


def type0_tv_detector(gamma: float, beta: float) -> Callable[[Categorical, SymbolDataset], int]:
    """Demonstration Type-0 detector: TV between trained parameters and the
    type of the fresh clean data, thresholded like the type-distance test."""
    threshold = gamma * (1.0 - beta) / 2.0

    def run(theta: Categorical, d_prime: SymbolDataset) -> int:
        return int(tv_to_type(theta, d_prime) >= threshold)

    return run


def type0_demo_risk(
    detector0: Callable[[Categorical, SymbolDataset], int],
    pair: DistributionPair,
    n: int,
    m: int,
    trainer: TrainerStub,
    trials: int,
    seed: int,
) -> RiskEstimate:
    """Risk of a detector that only sees trained parameters and clean data."""
    if trials < 100:
        raise ParameterError("at least 100 trials are required")
    p1 = mix(pair)
    errors = 0
    for t in range(trials):
        rng = substream(seed, Domain.TYPE0, t)
        j = int(rng.integers(0, 2))
        law = pair.p0 if j == 0 else p1
        theta = trainer(SymbolDataset(draw_symbols(law, n, rng), pair.alphabet_size))
        d_prime = SymbolDataset(draw_symbols(pair.p0, m, rng), pair.alphabet_size)
        errors += int(detector0(theta, d_prime)) != j
    return wilson_interval(errors, trials)


@dataclass(frozen=True)
class BenchmarkInstance:
    """A fixed, well-separated problem instance for detector comparisons."""

    label: str
    pair: DistributionPair
    n: int
    m: int


def benchmark_instances() -> tuple[BenchmarkInstance, ...]:
    """Three small instances with admissible pairs, used for ordering checks."""
    return (
        BenchmarkInstance(
            "k2",
            DistributionPair(
                Categorical(np.array([0.85, 0.15])),
                Categorical(np.array([0.10, 0.90])),
                gamma=0.9,
                beta=0.30,
            ),
            n=10,
            m=40,
        ),
        BenchmarkInstance(
            "k3",
            DistributionPair(
                Categorical(np.array([0.70, 0.20, 0.10])),
                Categorical(np.array([0.05, 0.15, 0.80])),
                gamma=0.8,
                beta=0.40,
            ),
            n=12,
            m=48,
        ),
        BenchmarkInstance(
            "k4",
            DistributionPair(
                Categorical(np.array([0.40, 0.40, 0.10, 0.10])),
                Categorical(np.array([0.05, 0.05, 0.45, 0.45])),
                gamma=1.0,
                beta=0.35,
            ),
            n=8,
            m=32,
        ),
    )


def config_hash(config: dict) -> str:
    """Stable 16-hex-digit digest of a JSON-serializable configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def bayes_probe_detector(pair: DistributionPair) -> GeneralizedDetector:
    """Score only the probe sample: flag it when pb is at least as likely as p0."""

    def run(theta: Categorical, d_prime: SymbolDataset, x: int, rng: np.random.Generator) -> int:
        return int(pair.pb.probs[x] >= pair.p0.probs[x])

    return run


def run_experiment(config: dict) -> dict:
    """Execute one experiment described by a JSON config document.

    Expected keys: ``detector``, ``trials``, ``seed``, ``n``, and either a
    ``pair`` object ({p0, pb, gamma, beta}) or ``k``/``gamma``/``beta`` for a
    uniform-vs-point-mass instance. ``flavor`` defaults to "mbd"; "sbd" and
    "ood" run the generalized risk with the "bayes-probe" detector and the
    flavor's default prior, using ``m`` clean samples (default n).
    """
    try:
        detector_name = config["detector"]
        n = int(config["n"])
        trials = int(config["trials"])
        seed = int(config["seed"])
        if "pair" in config:
            pair = DistributionPair.from_jsonable(config["pair"])
        else:
            k = int(config["k"])
            probs = np.zeros(k)
            probs[0] = 1.0
            pair = DistributionPair(
                Categorical(np.full(k, 1.0 / k)),
                Categorical(probs),
                float(config["gamma"]),
                float(config["beta"]),
            )
        m = int(config.get("m", n))
        flavor = Flavor(config.get("flavor", "mbd"))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"bad experiment config: {exc}") from exc

    if flavor is Flavor.MBD:
        if detector_name not in DETECTORS:
            raise ConfigurationError(f"unknown detector {detector_name!r}")
        estimate = estimate_risk(DETECTORS[detector_name](), pair, n, trials, seed)
    else:
        if detector_name != "bayes-probe":
            raise ConfigurationError(
                f"flavor {flavor.value!r} supports only the 'bayes-probe' detector"
            )
        prior = JointPrior.sbd_default() if flavor is Flavor.SBD else JointPrior.ood_default()
        estimate = estimate_generalized_risk(
            bayes_probe_detector(pair), pair, n, m, prior, flavor,
            TrainerStub(), trials, seed,
        )
    return {
        "config": config,
        "config_hash": config_hash(config),
        "risk": estimate.to_jsonable(),
    }


def append_result(path: str, record: dict) -> bool:
    """Append a record to a JSON-lines results file, deduplicating by config hash.

    Returns False (and writes nothing) when a record with the same
    ``config_hash`` field is already present.
    """
    digest = record.get("config_hash")
    if digest is not None and os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    existing = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if existing.get("config_hash") == digest:
                    return False
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return True

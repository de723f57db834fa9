"""Seeded hidden-orientation ensemble simulator.

Each trial draws the orientation sign from a counter-based generator
keyed by (seed, trial index) — a splitmix64-style mix of the counter —
so trial i's draw never depends on how trials are batched: serial runs,
chunked runs, and multi-worker runs are bit-identical by construction.

For every supported experiment the per-trial product point is
(f, sign_i * w): the scalar f is the same for both orientations, the
oriented components flip with the sign.  The report therefore carries

  * scalar_mean        = f exactly (mean of a constant),
  * oriented_mean      = w * mean(sign), which tends to zero at the CLT
    rate under the symmetric distribution,
  * oriented_sigma     = |w_j| * stderr(sign) per component,
  * sign_channel_mean  = mean of a literal +/-1 extracted per trial.

The sign channel is an interpretation, not part of the model contract:
no rule for reading a single +/-1 off a multivector-valued point is
specified anywhere, so this module takes the sign of the scalar part when
|scalar| > 1e-12 and otherwise the sign of the largest-magnitude oriented
component, and reports the channel's deviation from scalar_mean as a
first-class field rather than asserting anything about it.

Orientation sums are integers, so block accumulation is exact and the
result is independent of scheduling without any floating-point care.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lrmodel
from .geometry import require_unit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

BLOCK = 1 << 16


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def counter_uniform(seed: int, indices: np.ndarray) -> np.ndarray:
    """Uniform [0,1) doubles keyed by (seed, index); pure function of both."""
    idx = np.asarray(indices, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (idx + np.uint64(1)) * _GAMMA
    return (_mix64(z) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class PlusMinusDistribution:
    """Two-point distribution over orientations {+1, -1}."""

    weight_plus: float = 0.5

    def __post_init__(self):
        w = float(self.weight_plus)
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"weight_plus must lie in [0, 1], got {w!r}")
        object.__setattr__(self, "weight_plus", w)

    @property
    def weights(self) -> tuple[float, float]:
        return (self.weight_plus, 1.0 - self.weight_plus)

    def to_json_obj(self) -> dict:
        return {"kind": "uniform_pm", "weight_plus": self.weight_plus}


class LambdaStream:
    """Counter-based orientation stream: sample(i) depends only on (seed, i)."""

    def __init__(self, seed: int, distribution: PlusMinusDistribution | None = None):
        self.seed = int(seed)
        self.distribution = distribution or PlusMinusDistribution()

    def sample_block(self, start: int, stop: int) -> np.ndarray:
        u = counter_uniform(self.seed, np.arange(start, stop, dtype=np.uint64))
        return np.where(u < self.distribution.weight_plus, 1, -1).astype(np.int8)

    def sample(self, index: int) -> int:
        return int(self.sample_block(index, index + 1)[0])


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingletExperiment:
    a: np.ndarray
    b: np.ndarray
    kind: str = field(default="singlet", init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", require_unit(self.a))
        object.__setattr__(self, "b", require_unit(self.b))

    def product_point(self, table=None) -> lrmodel.DecompositionResult:
        return lrmodel.singlet_product_point(self.a, self.b)

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class ChshExperiment:
    a: np.ndarray
    ap: np.ndarray
    b: np.ndarray
    bp: np.ndarray
    kind: str = field(default="chsh", init=False)

    def __post_init__(self):
        for name in ("a", "ap", "b", "bp"):
            object.__setattr__(self, name, require_unit(getattr(self, name)))

    def product_point(self, table=None) -> lrmodel.DecompositionResult:
        return lrmodel.chsh_product_point(self.a, self.ap, self.b, self.bp)

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, **{k: list(getattr(self, k)) for k in ("a", "ap", "b", "bp")}}


@dataclass(frozen=True)
class Ghz4Experiment:
    n1: np.ndarray
    n2: np.ndarray
    n3: np.ndarray
    n4: np.ndarray
    kind: str = field(default="ghz4", init=False)

    def __post_init__(self):
        for name in ("n1", "n2", "n3", "n4"):
            object.__setattr__(self, name, require_unit(getattr(self, name)))

    def product_point(self, table=None) -> lrmodel.DecompositionResult:
        return lrmodel.ghz4_product_point(self.n1, self.n2, self.n3, self.n4, table)

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, **{k: list(getattr(self, k)) for k in ("n1", "n2", "n3", "n4")}}


@dataclass(frozen=True)
class Ghz3Experiment:
    n1: np.ndarray
    n2: np.ndarray
    n3: np.ndarray
    alpha: float
    delta: float
    kind: str = field(default="ghz3", init=False)

    def __post_init__(self):
        for name in ("n1", "n2", "n3"):
            object.__setattr__(self, name, require_unit(getattr(self, name)))

    def product_point(self, table=None) -> lrmodel.DecompositionResult:
        return lrmodel.ghz3_product_point(self.n1, self.n2, self.n3, self.alpha, self.delta, table)

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind, **{k: list(getattr(self, k)) for k in ("n1", "n2", "n3")}}
        obj.update(alpha=self.alpha, delta=self.delta)
        return obj


def experiment_from_json_obj(obj: dict):
    kind = obj["kind"]
    if kind == "singlet":
        return SingletExperiment(obj["a"], obj["b"])
    if kind == "chsh":
        return ChshExperiment(obj["a"], obj["ap"], obj["b"], obj["bp"])
    if kind == "ghz4":
        return Ghz4Experiment(obj["n1"], obj["n2"], obj["n3"], obj["n4"])
    if kind == "ghz3":
        return Ghz3Experiment(obj["n1"], obj["n2"], obj["n3"], obj["alpha"], obj["delta"])
    raise ValueError(f"unknown experiment kind {kind!r}")


# ---------------------------------------------------------------------------
# ensemble runner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleConfig:
    experiment: object
    trials: int
    seed: int
    distribution: PlusMinusDistribution = field(default_factory=PlusMinusDistribution)
    table: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    def to_json_obj(self) -> dict:
        return {
            "experiment": self.experiment.to_json_obj(),
            "trials": self.trials,
            "seed": self.seed,
            "distribution": self.distribution.to_json_obj(),
            "table": self.table,
        }


@dataclass(frozen=True)
class EnsembleReport:
    scalar_mean: float
    oriented_mean: tuple
    oriented_sigma: tuple
    sign_channel_mean: float
    sign_channel_deviation: float
    trials: int
    seed: int
    config: dict

    def to_json_obj(self) -> dict:
        return {
            "scalar_mean": self.scalar_mean,
            "oriented_mean": list(self.oriented_mean),
            "oriented_sigma": list(self.oriented_sigma),
            "sign_channel_mean": self.sign_channel_mean,
            "sign_channel_deviation": self.sign_channel_deviation,
            "trials": self.trials,
            "seed": self.seed,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)


def _orientation_sum(stream: LambdaStream, trials: int, workers: int) -> int:
    """Exact sum of the +/-1 draws over [0, trials) in fixed blocks.

    Block sums are integers, so the total is exact and identical no matter
    how blocks are distributed over workers.
    """
    spans = [(lo, min(lo + BLOCK, trials)) for lo in range(0, trials, BLOCK)]

    def block_sum(span):
        lo, hi = span
        return int(stream.sample_block(lo, hi).sum(dtype=np.int64))

    if workers <= 1 or len(spans) == 1:
        sums = [block_sum(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(block_sum, spans))
    return sum(sums)


def run_ensemble(config: EnsembleConfig, workers: int = 1) -> EnsembleReport:
    """Average the per-trial product point (f, sign_i * w) over the ensemble.

    The scalar component of every trial's point is the same f, so
    scalar_mean is f exactly; the oriented mean is w * mean(sign).
    """
    point = config.experiment.product_point(config.table)
    f, w = point.f, point.oriented
    n = config.trials

    stream = LambdaStream(config.seed, config.distribution)
    s1 = _orientation_sum(stream, n, workers)
    mean_sign = s1 / n
    # Per-trial oriented component is sign_i * w_j; sample std of sign_i is
    # sqrt((1 - mean^2) * n / (n - 1)).
    if n > 1:
        std_sign = math.sqrt(max(0.0, (1.0 - mean_sign**2) * n / (n - 1)))
    else:
        std_sign = 0.0
    stderr_sign = std_sign / math.sqrt(n)

    oriented_mean = tuple(float(c) for c in mean_sign * w)
    oriented_sigma = tuple(float(abs(c)) * stderr_sign for c in w)

    if abs(f) > 1e-12:
        sign_channel = math.copysign(1.0, f)
    else:
        j = int(np.argmax(np.abs(w))) if np.any(w != 0.0) else 0
        sign_channel = math.copysign(1.0, w[j]) * mean_sign if w[j] != 0.0 else 0.0

    return EnsembleReport(
        scalar_mean=float(f),
        oriented_mean=oriented_mean,
        oriented_sigma=oriented_sigma,
        sign_channel_mean=float(sign_channel),
        sign_channel_deviation=float(sign_channel - f),
        trials=n,
        seed=config.seed,
        config=config.to_json_obj(),
    )

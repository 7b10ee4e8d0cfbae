"""Bayesian surprise over discretised feature streams.

Each feature is binned into ``K`` equal-width bins and modelled as a
categorical variable with a Dirichlet prior. Every observation increments
one concentration parameter; its surprise is the KL divergence of the
updated Dirichlet from the one before the update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import digamma, gammaln

from .errors import DimensionMismatch, EmptyDataError

DEGENERATE_SPAN = 1e-12

FEATURES = (
    "area",
    "real_surface_perimeter",
    "occlusion",
    "variance",
    "skewness",
    "circularity",
)


@dataclass(frozen=True, eq=False)
class BinningSpec:
    k: int
    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return self.hi - self.lo < DEGENERATE_SPAN

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.k

    @property
    def edges(self) -> np.ndarray:
        return self.lo + self.width * np.arange(self.k + 1)


@dataclass(frozen=True, eq=False)
class DirichletParams:
    alpha: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float).reshape(-1)
        if len(a) < 1 or not np.all(a > 0) or not np.all(np.isfinite(a)):
            raise ValueError(f"concentration parameters must be finite and > 0, got {a}")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def k(self) -> int:
        return len(self.alpha)

    def mean(self) -> np.ndarray:
        return self.alpha / self.alpha.sum()


def compute_bin_edges(values, k: int) -> BinningSpec:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise EmptyDataError("cannot bin an empty feature column")
    if not np.all(np.isfinite(v)):
        raise ValueError("feature values must be finite")
    if k < 2:
        raise ValueError("K must be at least 2")
    return BinningSpec(int(k), float(v.min()), float(v.max()))


def assign_bin(value: float, spec: BinningSpec) -> int:
    """Bin index of ``value``; the last bin is closed and out-of-range
    values clamp to the first or last bin."""
    if spec.degenerate:
        return 0
    idx = math.floor((value - spec.lo) / spec.width)
    return min(max(idx, 0), spec.k - 1)


def uniform_prior(k: int) -> DirichletParams:
    if k < 2:
        raise ValueError("K must be at least 2")
    return DirichletParams(np.ones(int(k)))


def posterior_update(params: DirichletParams, bin_index: int) -> DirichletParams:
    if not 0 <= bin_index < params.k:
        raise IndexError(f"bin {bin_index} outside 0..{params.k - 1}")
    a = params.alpha.copy()
    a[bin_index] += 1.0
    return DirichletParams(a)


def _check_dims(a: DirichletParams, b: DirichletParams):
    if a.k != b.k:
        raise DimensionMismatch(f"K mismatch: {a.k} vs {b.k}")


def dirichlet_kl(post: DirichletParams, prior: DirichletParams) -> float:
    """KL(Dir(post) || Dir(prior)) in nats, clamped at zero."""
    _check_dims(post, prior)
    a, b = post.alpha, prior.alpha
    a0, b0 = a.sum(), b.sum()
    kl = (gammaln(a0) - gammaln(b0) - np.sum(gammaln(a) - gammaln(b))
          + np.sum((a - b) * (digamma(a) - digamma(a0))))
    return max(float(kl), 0.0)


def categorical_kl(post: DirichletParams, prior: DirichletParams) -> float:
    """KL between the mean categorical distributions of two Dirichlets."""
    _check_dims(post, prior)
    p, q = post.mean(), prior.mean()
    return max(float(np.sum(p * np.log(p / q))), 0.0)


_KL = {"dirichlet": dirichlet_kl, "categorical": categorical_kl}


@dataclass
class DirichletFeatureModel:
    """Running Dirichlet model for one feature."""

    feature: str
    binning: BinningSpec
    prior: DirichletParams
    current: DirichletParams = None
    observation_count: int = 0

    def __post_init__(self):
        if self.current is None:
            self.current = self.prior

    def observe(self, value: float, mode: str = "dirichlet") -> float:
        """Update with one value and return its surprise."""
        before = self.current
        self.current = posterior_update(before, assign_bin(value, self.binning))
        self.observation_count += 1
        return _KL[mode](self.current, before)


@dataclass(frozen=True)
class SurpriseConfig:
    """Options for :func:`surprise_series`.

    ``weights`` defaults to 1.0 per feature. With ``normalize`` each
    feature's series is divided by its own maximum before weighting; this is
    folded into the effective weights reported on the result. ``value_range``
    maps a feature to a fixed ``(lo, hi)`` used instead of the data range.
    """

    k: int = 10
    weights: Mapping[str, float] | None = None
    mode: str = "dirichlet"
    normalize: bool = False
    value_range: Mapping[str, tuple[float, float]] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SurpriseSeries:
    steps: int
    per_feature: dict
    combined: np.ndarray
    weights: dict
    models: dict = field(default_factory=dict, repr=False)


def surprise_series(features: np.ndarray, names: Sequence[str] = FEATURES,
                    config: SurpriseConfig = SurpriseConfig()) -> SurpriseSeries:
    """Per-step, per-feature surprise for a ``steps x features`` matrix."""
    if config.mode not in _KL:
        raise ValueError(f"unknown surprise mode {config.mode!r}")
    m = np.asarray(features, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0:
        raise EmptyDataError("feature matrix must have at least one step")
    if m.shape[1] != len(names):
        raise DimensionMismatch(f"{m.shape[1]} columns for {len(names)} feature names")
    if not np.all(np.isfinite(m)):
        raise ValueError("feature values must be finite")

    weights = {n: 1.0 for n in names}
    if config.weights is not None:
        unknown = set(config.weights) - set(names)
        if unknown:
            raise ValueError(f"weights for unknown features: {sorted(unknown)}")
        weights.update({n: float(w) for n, w in config.weights.items()})
    if any(w < 0 for w in weights.values()):
        raise ValueError("weights must be non-negative")

    steps = m.shape[0]
    models = {}
    for j, name in enumerate(names):
        if name in config.value_range:
            lo, hi = config.value_range[name]
            spec = BinningSpec(config.k, float(lo), float(hi))
        else:
            spec = compute_bin_edges(m[:, j], config.k)
        models[name] = DirichletFeatureModel(name, spec, uniform_prior(config.k))

    per_feature = {n: np.empty(steps) for n in names}
    for t in range(steps):
        for j, name in enumerate(names):
            per_feature[name][t] = models[name].observe(m[t, j], config.mode)

    if config.normalize:
        for n in names:
            peak = per_feature[n].max()
            if peak > 0:
                weights[n] = weights[n] / peak
    combined = np.zeros(steps)
    for n in names:
        combined += weights[n] * per_feature[n]
    return SurpriseSeries(steps, per_feature, combined, weights, models)

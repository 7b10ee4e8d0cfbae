"""Peak selection on surprise series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PeakParams:
    threshold_sigma: float = 1.5
    min_separation: int = 5
    max_peaks: int = 12

    def __post_init__(self):
        if self.threshold_sigma < 0:
            raise ValueError("threshold_sigma must be >= 0")
        if self.min_separation < 1:
            raise ValueError("min_separation must be >= 1")
        if self.max_peaks < 0:
            raise ValueError("max_peaks must be >= 0")


def detect_peaks(series, params: PeakParams = PeakParams()) -> list[int]:
    """Indices of prominent strict local maxima, in index order.

    A candidate must exceed both neighbours (only the left one at the last
    index) and reach ``mean + threshold_sigma * std`` of the whole series.
    Candidates are accepted greedily from the largest value down, skipping
    any closer than ``min_separation`` steps to an accepted one, up to
    ``max_peaks``. Index 0 is never a peak: every series starts with the
    spike of the first update against the uniform prior.
    """
    s = np.asarray(series, dtype=float).reshape(-1)
    if s.size == 0:
        raise ValueError("series must not be empty")
    n = len(s)
    threshold = s.mean() + params.threshold_sigma * s.std()
    cand = []
    for t in range(1, n):
        if s[t] <= s[t - 1] or (t + 1 < n and s[t] <= s[t + 1]):
            continue
        if s[t] >= threshold:
            cand.append(t)
    cand.sort(key=lambda t: (-s[t], t))
    chosen = []
    for t in cand:
        if len(chosen) >= params.max_peaks:
            break
        if all(abs(t - c) >= params.min_separation for c in chosen):
            chosen.append(t)
    return sorted(chosen)

"""Result containers shared by the measure and optimizer modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

METHODS = (
    "pure_closed_form",
    "nondegenerate_closed_form",
    "qubit_c_closed_form",
    "optimizer",
    "bound_only",
)


@dataclass
class MeasureResult:
    """Value of a nonlocality measure plus how it was obtained."""

    value: float
    method: str
    optimal_measurement: Any = None
    bounds: dict[str, float] | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class MarginalSpectrum:
    """Sorted marginal eigenvalues with a degeneracy verdict."""

    eigenvalues: np.ndarray
    degenerate: bool
    gap_tolerance: float


def marginal_spectrum(eigenvalues, gap_tolerance: float) -> MarginalSpectrum:
    """Flag a spectrum degenerate when any adjacent gap is below tolerance.

    The tolerance is relative to max(1, spectral range).
    """
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    scale = max(1.0, float(w[-1] - w[0])) if w.size else 1.0
    gaps = np.diff(w)
    degenerate = bool(w.size > 1 and np.any(gaps < gap_tolerance * scale))
    return MarginalSpectrum(eigenvalues=w, degenerate=degenerate, gap_tolerance=gap_tolerance)

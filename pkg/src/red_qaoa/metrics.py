"""Landscape comparison: min-max normalisation, MSE, optimum distances, ratios."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .landscape import BETA_PERIOD, GAMMA_PERIOD, EnergyLandscape


class DegenerateLandscapeError(ValueError):
    pass


class LandscapeMismatchError(ValueError):
    pass


def normalize_energies(energies) -> np.ndarray:
    e = np.asarray(energies, dtype=float)
    lo, hi = e.min(), e.max()
    if not hi > lo:
        raise DegenerateLandscapeError("cannot normalise a constant landscape")
    return (e - lo) / (hi - lo)


def normalize_landscape(landscape: EnergyLandscape) -> EnergyLandscape:
    return landscape.with_energies(normalize_energies(landscape.energies))


def _check_same_points(a: EnergyLandscape, b: EnergyLandscape) -> None:
    if a.p != b.p or a.spec != b.spec or a.params.shape != b.params.shape:
        raise LandscapeMismatchError("landscapes were sampled with different specs")
    if not np.array_equal(a.params, b.params):
        raise LandscapeMismatchError("landscapes were sampled at different parameter points")


def mse(a: EnergyLandscape, b: EnergyLandscape, normalize: bool = True) -> float:
    """Mean squared pointwise difference of the (min-max normalised) energies."""
    _check_same_points(a, b)
    ea, eb = a.energies, b.energies
    if normalize:
        ea, eb = normalize_energies(ea), normalize_energies(eb)
    d = ea - eb
    return float(np.mean(d * d))


def approximation_ratio(achieved: float, ground_truth: int) -> float:
    if ground_truth <= 0:
        raise ValueError("approximation ratio undefined for a graph without edges")
    return achieved / ground_truth


def torus_distance(x, y) -> np.ndarray:
    """Periodic distance between flat ``[gammas, betas]`` rows (broadcasts)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    p = x.shape[-1] // 2
    periods = np.array([GAMMA_PERIOD] * p + [BETA_PERIOD] * p)
    d = np.abs(x - y) % periods
    d = np.minimum(d, periods - d)
    return np.sqrt(np.sum(d * d, axis=-1))


def optimal_point_distance(a: EnergyLandscape, b: EnergyLandscape, top_k: int = 1) -> float:
    """Mean distance from each of ``a``'s top-k maxima to the nearest of ``b``'s."""
    _check_same_points(a, b)
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    top_a = a.params[np.argsort(-a.energies, kind="stable")[:top_k]]
    top_b = b.params[np.argsort(-b.energies, kind="stable")[:top_k]]
    dists = torus_distance(top_a[:, None, :], top_b[None, :, :])
    return float(dists.min(axis=1).mean())


@dataclass
class ComparisonReport:
    mse: float
    point_count: int
    optimal_distance: float
    normalization: dict = field(default_factory=dict)

    @property
    def mse_percent(self) -> float:
        return 100.0 * self.mse

    def to_json(self) -> dict:
        return {
            "mse": self.mse,
            "mse_percent": self.mse_percent,
            "point_count": self.point_count,
            "optimal_distance": self.optimal_distance,
            "normalization": self.normalization,
        }


def compare_landscapes(a: EnergyLandscape, b: EnergyLandscape, top_k: int = 1) -> ComparisonReport:
    value = mse(a, b)
    return ComparisonReport(
        mse=value,
        point_count=len(a),
        optimal_distance=optimal_point_distance(a, b, top_k),
        normalization={
            "a": {"min": float(a.energies.min()), "max": float(a.energies.max())},
            "b": {"min": float(b.energies.min()), "max": float(b.energies.max())},
        },
    )

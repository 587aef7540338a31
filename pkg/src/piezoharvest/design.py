"""Beam length tuning and piezo patch placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from ._csv import write_rows
from .beam import SectionModel, cantilever_lambdas, mode_curvature
from .errors import DomainError

__all__ = [
    "DesignTarget",
    "PlacementResult",
    "length_for_frequency",
    "placement_objective",
    "optimal_patch_start",
]

QUADRATURE_POINTS = 201


@dataclass(frozen=True)
class DesignTarget:
    target_frequency: float  # Hz
    mode_index: int = 1
    section_model: SectionModel = SectionModel.UNIFORM_BILAYER

    def __post_init__(self):
        if not (math.isfinite(self.target_frequency) and self.target_frequency > 0):
            raise DomainError(f"target_frequency must be > 0, got {self.target_frequency!r}")
        if int(self.mode_index) != self.mode_index or self.mode_index < 1:
            raise DomainError(f"mode_index must be >= 1, got {self.mode_index!r}")
        object.__setattr__(self, "section_model", SectionModel(self.section_model))


@dataclass(frozen=True)
class PlacementResult:
    patch_start: float  # m
    objective_value: float  # 1/m
    starts: np.ndarray = field(repr=False)
    profile: np.ndarray = field(repr=False)


def length_for_frequency(section, target):
    """Substrate length whose mode `target.mode_index` resonates at the target.

    Inverts omega = lam^2 sqrt(EI / (m L^4)) for L. The section is per unit
    length, so it does not change with L.
    """
    lam = cantilever_lambdas(target.mode_index)[-1]
    ratio = (section.flexural_rigidity / section.mass_per_length) ** 0.25
    return lam * ratio / math.sqrt(2 * math.pi * target.target_frequency)


def placement_objective(geometry, mode, patch_start, points=QUADRATURE_POINTS):
    """Integral of |W''| over [patch_start, patch_start + piezo_length].

    Composite Simpson on `points` samples (odd count, at least 201).
    """
    span = geometry.piezo_length
    if patch_start < 0 or patch_start + span > geometry.length * (1 + 1e-12):
        raise DomainError(
            f"patch [{patch_start!r}, {patch_start + span!r}] m does not fit on a "
            f"{geometry.length!r} m beam"
        )
    if span == 0:
        return 0.0
    points = max(int(points), QUADRATURE_POINTS)
    points += 1 - points % 2
    x = np.linspace(patch_start, min(patch_start + span, geometry.length), points)
    return float(simpson(np.abs(mode_curvature(mode, x)), x=x))


def optimal_patch_start(geometry, mode, grid_points=101):
    """Grid search for the patch position capturing the most curvature.

    Ties resolve toward the clamp (smallest start).
    """
    if int(grid_points) != grid_points or grid_points < 2:
        raise DomainError(f"grid_points must be an integer >= 2, got {grid_points!r}")
    last = max(geometry.length - geometry.piezo_length, 0.0)
    starts = np.linspace(0.0, last, int(grid_points))
    profile = np.array([placement_objective(geometry, mode, s) for s in starts])
    best = int(np.argmax(profile))
    return PlacementResult(float(starts[best]), float(profile[best]), starts, profile)


def placement_to_csv(result, stream):
    write_rows(
        stream,
        ["patch_start_m", "objective_per_m"],
        zip(result.starts, result.profile),
    )

"""Analytic modal model of a two-layer (substrate + piezo) cantilever.

Section properties follow the mid-plane bilayer model: the neutral axis is
kept at the substrate mid-plane and the piezo layer contributes through its
offset from it. Mode shapes are the classic clamped-free Euler-Bernoulli
eigenfunctions

    W(x) = sin(y) - sinh(y) + beta * (cos(y) - cosh(y)),   y = lam * x / L

left unnormalized.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "LayerSpec",
    "BeamGeometry",
    "SectionModel",
    "CompositeSection",
    "ModeSolution",
    "section_properties",
    "cantilever_lambdas",
    "frequency_residual",
    "mode_beta",
    "natural_frequencies",
    "mode_shape",
    "mode_slope",
    "mode_curvature",
    "mode_derivative",
]


def _positive(name, value, allow_zero=False):
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"{name} must be finite and {bound}, got {value!r}")


@dataclass(frozen=True)
class LayerSpec:
    """One material layer: Young's modulus [Pa], density [kg/m^3], thickness [m].

    Thickness may be zero so that a vanishing piezo layer can be expressed;
    `BeamGeometry` insists on a non-zero substrate.
    """

    youngs_modulus: float
    density: float
    thickness: float

    def __post_init__(self):
        _positive("youngs_modulus", self.youngs_modulus)
        _positive("density", self.density)
        _positive("thickness", self.thickness, allow_zero=True)


@dataclass(frozen=True)
class BeamGeometry:
    """Cantilever of length `length` clamped at x = 0, piezo patch on top.

    The patch spans [piezo_start, piezo_start + piezo_length] measured from
    the clamp. Both layers share `width`.
    """

    length: float
    width: float
    substrate: LayerSpec
    piezo: LayerSpec
    piezo_start: float = 0.0
    piezo_length: float = 0.0

    def __post_init__(self):
        _positive("length", self.length)
        _positive("width", self.width)
        _positive("substrate.thickness", self.substrate.thickness)
        _positive("piezo_start", self.piezo_start, allow_zero=True)
        _positive("piezo_length", self.piezo_length, allow_zero=True)
        end = self.piezo_start + self.piezo_length
        if end > self.length * (1 + 1e-12):
            raise DomainError(
                f"piezo patch ends at {end!r} m, beyond the free end at {self.length!r} m"
            )

    @property
    def patch_end(self):
        return self.piezo_start + self.piezo_length

    def with_length(self, length):
        return BeamGeometry(
            length, self.width, self.substrate, self.piezo, self.piezo_start, self.piezo_length
        )

    def with_patch_start(self, start):
        return BeamGeometry(
            self.length, self.width, self.substrate, self.piezo, start, self.piezo_length
        )


class SectionModel(str, enum.Enum):
    BARE_SUBSTRATE = "bare-substrate"
    UNIFORM_BILAYER = "uniform-bilayer"


@dataclass(frozen=True)
class CompositeSection:
    mass_per_length: float  # kg/m
    flexural_rigidity: float  # N m^2

    def __post_init__(self):
        _positive("mass_per_length", self.mass_per_length)
        _positive("flexural_rigidity", self.flexural_rigidity)


@dataclass(frozen=True)
class ModeSolution:
    """A single bending mode of a cantilever of length `length`."""

    index: int
    lam: float
    beta: float
    omega: float  # rad/s
    frequency: float  # Hz
    length: float  # m


def section_properties(geometry, model=SectionModel.UNIFORM_BILAYER):
    """Mass per unit length and flexural rigidity of the beam cross-section.

    ``bare-substrate`` ignores the piezo layer. ``uniform-bilayer`` treats
    the patch as covering the whole span, with the piezo layer's second
    moment taken about the substrate mid-plane.
    """
    model = SectionModel(model)
    b = geometry.width
    sub, pz = geometry.substrate, geometry.piezo
    hb, hp = sub.thickness, pz.thickness

    mass = b * sub.density * hb
    rigidity = b * sub.youngs_modulus * hb**3 / 12.0
    if model is SectionModel.UNIFORM_BILAYER and hp > 0:
        mass += b * pz.density * hp
        rigidity += b * (pz.youngs_modulus / 3.0) * ((hb / 2 + hp) ** 3 - hb**3 / 8)
    return CompositeSection(mass, rigidity)


def frequency_residual(lam):
    """Clamped-free frequency equation divided by cosh: cos(lam) + 1/cosh(lam).

    Has the same roots as 1 + cos(lam) cosh(lam) but stays O(1) for large lam.
    """
    return math.cos(lam) + 1.0 / math.cosh(lam) if lam < 710 else math.cos(lam)


@lru_cache(maxsize=64)
def _lambdas(count, tolerance):
    step = math.pi / 8
    roots = []
    a, fa = 0.0, frequency_residual(0.0)
    while len(roots) < count:
        b = a + step
        fb = frequency_residual(b)
        if fa * fb < 0:
            lo, hi, flo = a, b, fa
            while hi - lo > tolerance:
                mid = 0.5 * (lo + hi)
                fm = frequency_residual(mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
        a, fa = b, fb
    return tuple(roots)


def cantilever_lambdas(count, tolerance=1e-12):
    """First `count` positive roots of 1 + cos(lam) cosh(lam) = 0.

    Brackets are found by scanning the scaled residual at a step of pi/8 and
    refined by bisection until the bracket is narrower than `tolerance`.
    """
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    if not tolerance > 0:
        raise DomainError(f"tolerance must be > 0, got {tolerance!r}")
    return list(_lambdas(int(count), float(tolerance)))


def _beta_offset_terms(lam):
    """Return (c, d) with beta + 1 = -c * 2 exp(-lam) / d.

    c = cos + sin + exp(-lam), d = 2 exp(-lam) (sinh - sin). Both stay
    bounded for any lam, which is what keeps the mode shape free of
    sinh/cosh cancellation at high mode numbers.
    """
    e = math.exp(-lam)
    c = math.cos(lam) + math.sin(lam) + e
    d = 1.0 - e * e - 2.0 * math.sin(lam) * e
    return c, d


def mode_beta(lam):
    """Shape coefficient that satisfies the free-end conditions for root `lam`.

    Equals (cos lam + cosh lam) / (sin lam - sinh lam); tends to -1 as lam grows.
    """
    c, d = _beta_offset_terms(lam)
    return -1.0 - c * 2.0 * math.exp(-lam) / d


def natural_frequencies(section, length, count, tolerance=1e-12):
    """Bending modes 1..count of a uniform cantilever, ascending in frequency."""
    _positive("length", length)
    scale = math.sqrt(section.flexural_rigidity / (section.mass_per_length * length**4))
    modes = []
    for k, lam in enumerate(cantilever_lambdas(count, tolerance), start=1):
        omega = lam**2 * scale
        modes.append(ModeSolution(k, lam, mode_beta(lam), omega, omega / (2 * math.pi), length))
    return modes


def _check_x(mode, x):
    arr = np.asarray(x, dtype=float)
    slack = 1e-12 * mode.length
    if np.any(~np.isfinite(arr)) or np.any(arr < -slack) or np.any(arr > mode.length + slack):
        raise DomainError(f"x must lie in [0, {mode.length!r}] m")
    return np.clip(arr, 0.0, mode.length)


def mode_derivative(mode, x, order=0):
    """d^order W / dx^order at positions `x` (scalar or array), order 0..3.

    Hyperbolic terms are rearranged as
        sinh y + beta cosh y = -exp(-y) + (beta + 1) cosh y
    with (beta + 1) cosh y evaluated as a ratio of decaying exponentials.
    """
    if order not in (0, 1, 2, 3):
        raise DomainError(f"order must be 0..3, got {order!r}")
    xs = _check_x(mode, x)
    lam, beta = mode.lam, mode.beta
    y = lam * xs / mode.length
    c, d = _beta_offset_terms(lam)
    growth = np.exp(y - lam) / d
    em = np.exp(-y)
    dcosh = -c * growth * (1.0 + em * em)  # (beta + 1) cosh y
    dsinh = -c * growth * (1.0 - em * em)  # (beta + 1) sinh y
    s, co = np.sin(y), np.cos(y)

    if order == 0:
        val = s + beta * co + em - dcosh
    elif order == 1:
        val = co - beta * s - em - dsinh
    elif order == 2:
        val = -s - beta * co + em - dcosh
    else:
        val = -co + beta * s - em - dsinh
    val = val * (lam / mode.length) ** order
    return float(val) if val.ndim == 0 else val


def mode_shape(mode, x):
    """Unnormalized deflection W_k(x)."""
    return mode_derivative(mode, x, 0)


def mode_slope(mode, x):
    return mode_derivative(mode, x, 1)


def mode_curvature(mode, x):
    """W_k''(x) in 1/m^2; proportional to bending strain at x."""
    return mode_derivative(mode, x, 2)

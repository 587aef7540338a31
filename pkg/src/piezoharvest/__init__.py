"""Design and simulation tools for cantilever piezoelectric acoustic energy harvesters."""

__version__ = "0.1.0"

from .acoustics import (
    ForcedResponse,
    PiezoCoupling,
    combine_incoherent,
    modal_forced_response,
    pressure_to_spl,
    spl_to_pressure,
)
from .beam import (
    BeamGeometry,
    CompositeSection,
    LayerSpec,
    ModeSolution,
    SectionModel,
    cantilever_lambdas,
    mode_curvature,
    mode_shape,
    mode_slope,
    natural_frequencies,
    section_properties,
)
from .design import DesignTarget, PlacementResult, length_for_frequency, optimal_patch_start, placement_objective
from .errors import ConfigError, DomainError, WavParseError
from .rectifier import (
    PiezoEquivalent,
    RectifierStorage,
    SteadyState,
    TransientTrace,
    simulate_rectifier,
    steady_state_metrics,
)
from .spectrum import DominantTone, Spectrum, Window, dominant_harmonic, power_spectrum
from .wav import AudioClip, load_wav, read_wav, write_wav

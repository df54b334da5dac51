"""Remote localization of underwater nodes with airborne optoacoustic ranging."""

from .errors import (
    CollinearGeometryError,
    ConfigurationError,
    ConvergenceError,
    DegenerateMotionError,
    DomainError,
    GeometryError,
    InsufficientMeasurementsError,
    MeasurementInconsistentError,
    OptolocError,
    OutOfValidityError,
)
from .geometry import Measurement, Position3D
from .harness import RunResult, emit_results, generate_nodes, rmse, run_scenario, sweep_area
from .localization import MotionLog, StaticFix, localize_dynamic, multilaterate_static, residual_norm
from .propagation import (
    AbsorptionCoefficient,
    AbsorptionModel,
    WaterEnv,
    absorption,
    received_sil,
    relaxation_frequency,
    schulkin_marsh_absorption,
    thorp_absorption,
    transmission_loss,
)
from .ranging import RangeEstimate, distance_from_tl, lambert_w0, tl_from_message
from .scenario import Bounds, Scenario, default_dynamic_scenario
from .source_link import (
    LaserParams,
    LocalizationMessage,
    ReceivedMessage,
    SourceModel,
    emit_pulse_sl,
    estimate_distance,
    mean_sil,
    normalized_energy,
    plasma_max_length,
    plasma_position,
    transmit,
)

__version__ = "0.1.0"

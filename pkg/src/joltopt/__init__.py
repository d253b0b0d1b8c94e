"""Joint optimization of UAV stop points, reflecting-surface phase shifts
and visiting tours for energy-efficient IoT data collection.

The pipeline: `scenario` holds problem instances and units, `channel`
models the cascaded reflected link with quantized phase shifts, `energy`
assigns devices to stops and scores solutions, `awoa` searches stop-point
sets, `ersom` learns closed tours, `jolt` ties them together, and `cli`
exposes everything as commands.
"""

from .awoa import (
    AwoaConfig,
    CoefficientSet,
    SearchState,
    awoa_step,
    linear_a,
    nonlinear_a,
    partial_mutation,
    woa_preset,
    woa_update,
)
from .channel import (
    ArrayResponse,
    LinkBudget,
    PhaseVector,
    array_responses,
    best_link_budget,
    distances,
    effective_gain,
    link_budget,
    quantize_phases,
    rate_from_gain,
    rate_matrix,
)
from .energy import (
    Assignment,
    Deployment,
    EnergyReport,
    assign_devices,
    check_solution,
    evaluate,
    measure,
    report_to_json,
)
from .errors import (
    ConstraintViolationError,
    DegenerateGeometryError,
    InitializationError,
    InstanceLookupError,
    InvalidPermutationError,
    JoltoptError,
    ParameterError,
    SizeLimitError,
    TsplibParseError,
    UnreachableDeviceError,
    UnsupportedFormatError,
)
from .ersom import (
    ErsomConfig,
    Ring,
    Tour,
    brute_force_tour,
    run_ersom,
    run_rsom,
)
from .jolt import (
    Incumbent,
    JoltConfig,
    JoltResult,
    jolt_run,
    propose_neighbors,
    write_run_artifacts,
)
from .scenario import (
    DEFAULTS,
    KNOWN_OPTIMA,
    MB_BITS,
    AreaBounds,
    PointSet,
    PowerParams,
    RadioParams,
    Scenario,
    bundled_instances,
    dbm_to_watts,
    generate_scenario,
    load_bundled,
    load_tsplib,
    make_rng,
    scenario_from_points,
    tour_length,
)

__version__ = "0.1.0"

__all__ = [
    "AreaBounds",
    "ArrayResponse",
    "Assignment",
    "AwoaConfig",
    "CoefficientSet",
    "ConstraintViolationError",
    "DEFAULTS",
    "DegenerateGeometryError",
    "Deployment",
    "EnergyReport",
    "ErsomConfig",
    "Incumbent",
    "InitializationError",
    "InstanceLookupError",
    "InvalidPermutationError",
    "JoltConfig",
    "JoltResult",
    "JoltoptError",
    "KNOWN_OPTIMA",
    "LinkBudget",
    "MB_BITS",
    "ParameterError",
    "PhaseVector",
    "PointSet",
    "PowerParams",
    "RadioParams",
    "Ring",
    "Scenario",
    "SearchState",
    "SizeLimitError",
    "Tour",
    "TsplibParseError",
    "UnreachableDeviceError",
    "UnsupportedFormatError",
    "array_responses",
    "assign_devices",
    "awoa_step",
    "best_link_budget",
    "brute_force_tour",
    "bundled_instances",
    "check_solution",
    "dbm_to_watts",
    "distances",
    "effective_gain",
    "evaluate",
    "generate_scenario",
    "jolt_run",
    "linear_a",
    "link_budget",
    "load_bundled",
    "load_tsplib",
    "make_rng",
    "measure",
    "nonlinear_a",
    "partial_mutation",
    "propose_neighbors",
    "quantize_phases",
    "rate_from_gain",
    "rate_matrix",
    "report_to_json",
    "run_ersom",
    "run_rsom",
    "scenario_from_points",
    "tour_length",
    "woa_preset",
    "woa_update",
    "write_run_artifacts",
]

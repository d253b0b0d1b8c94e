"""Problem instances: device fields, IRS pose, radio/power constants, and
TSPLIB point sets.

Units are fixed package-wide: meters, seconds, watts, hertz, bits. Data
sizes are stored in bits (1 MB = 1e6 bytes = 8e6 bits). Noise power is
entered in dBm (the conventional tabulation) and converted to watts once at
construction.

Randomness: every seedable entry point builds a ``numpy.random.Generator``
on the MT19937 bit generator (Mersenne Twister, a twisted generalized
feedback shift register). MT19937 is stable across numpy versions and
platforms, so a seed fully determines every artifact.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (
    InstanceLookupError,
    InvalidPermutationError,
    ParameterError,
    TsplibParseError,
    UnsupportedFormatError,
)

SCHEMA_VERSION = 1
MB_BITS = 8e6  # 1 MB = 1e6 bytes

# Default constants (simulation-parameter table). Noise is deliberately the
# tabulated -250 dBm = 1e-28 W: physically implausible, but benchmark
# results are orderings, never absolute energies, so the value is kept
# verbatim. See README "Units and conventions".
DEFAULTS = {
    "uav_altitude_m": 200.0,
    "irs_height_m": 100.0,
    "capacity": 5,
    "bandwidth_hz": 1e6,
    "noise_power_dbm": -250.0,
    "tx_power_w": 0.1,
    "path_loss_1": 0.01,
    "path_loss_2": 0.01,
    "wavelength_m": 0.1,
    "element_spacing_m": 0.05,
    "num_elements": 16,
    "phase_levels": 8,
    "hover_power_w": 1000.0,
    "flight_power_w": 1283.0,
    "weight_hover": 10000.0,
    "weight_fly": 0.5,
    "area_x_min": 0.0,
    "area_x_max": 1000.0,
    "area_y_min": 0.0,
    "area_y_max": 1000.0,
    "data_mb_min": 1.0,
    "data_mb_max": 1000.0,
    # k_min/k_max default to ceil(N/capacity) and N when left as None.
    "k_min": None,
    "k_max": None,
}


def make_rng(seed) -> np.random.Generator:
    """Seeded Generator on the MT19937 bit generator.

    `seed` may be an integer or a ``numpy.random.SeedSequence``.
    """
    return np.random.Generator(np.random.MT19937(seed))


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class RadioParams:
    """Link-budget constants shared by every device/stop pair."""

    bandwidth_hz: float = DEFAULTS["bandwidth_hz"]
    noise_power_w: float = dbm_to_watts(DEFAULTS["noise_power_dbm"])
    tx_power_w: float = DEFAULTS["tx_power_w"]
    path_loss_1: float = DEFAULTS["path_loss_1"]
    path_loss_2: float = DEFAULTS["path_loss_2"]
    wavelength_m: float = DEFAULTS["wavelength_m"]
    element_spacing_m: float = DEFAULTS["element_spacing_m"]
    num_elements: int = DEFAULTS["num_elements"]
    phase_levels: int = DEFAULTS["phase_levels"]

    def __post_init__(self):
        for name in (
            "bandwidth_hz",
            "noise_power_w",
            "tx_power_w",
            "path_loss_1",
            "path_loss_2",
            "wavelength_m",
            "element_spacing_m",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        if not (isinstance(self.num_elements, int) and self.num_elements >= 1):
            raise ParameterError(f"num_elements must be a positive integer, got {self.num_elements!r}")
        if not (isinstance(self.phase_levels, int) and self.phase_levels >= 2):
            raise ParameterError(f"phase_levels must be an integer >= 2, got {self.phase_levels!r}")
        if self.element_spacing_m > self.wavelength_m:
            raise ParameterError(
                f"element_spacing_m ({self.element_spacing_m}) must not exceed "
                f"wavelength_m ({self.wavelength_m})"
            )


@dataclass(frozen=True)
class PowerParams:
    """UAV power draw and the objective's weight factors."""

    hover_power_w: float = DEFAULTS["hover_power_w"]
    flight_power_w: float = DEFAULTS["flight_power_w"]
    weight_hover: float = DEFAULTS["weight_hover"]
    weight_fly: float = DEFAULTS["weight_fly"]

    def __post_init__(self):
        for name in ("hover_power_w", "flight_power_w"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive, got {value!r}")
        for name in ("weight_hover", "weight_fly"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class AreaBounds:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ParameterError(f"degenerate area bounds {self}")

    def contains(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        return (
            (xy[:, 0] >= self.x_min)
            & (xy[:, 0] <= self.x_max)
            & (xy[:, 1] >= self.y_min)
            & (xy[:, 1] <= self.y_max)
        )

    def clamp(self, xy: np.ndarray) -> np.ndarray:
        out = np.array(xy, dtype=float, copy=True)
        out[..., 0] = np.clip(out[..., 0], self.x_min, self.x_max)
        out[..., 1] = np.clip(out[..., 1], self.y_min, self.y_max)
        return out

    @property
    def diagonal(self) -> float:
        return math.hypot(self.x_max - self.x_min, self.y_max - self.y_min)


@dataclass(frozen=True)
class Scenario:
    """One complete problem instance. Immutable after construction."""

    device_xy: np.ndarray  # (N, 2) meters
    data_bits: np.ndarray  # (N,)
    irs_position: tuple[float, float, float]  # (x, y, height) meters
    uav_altitude_m: float
    area: AreaBounds
    capacity: int  # max devices per stop point
    k_min: int
    k_max: int
    radio: RadioParams = field(default_factory=RadioParams)
    power: PowerParams = field(default_factory=PowerParams)

    def __post_init__(self):
        object.__setattr__(self, "device_xy", np.asarray(self.device_xy, dtype=float))
        object.__setattr__(self, "data_bits", np.asarray(self.data_bits, dtype=float))
        n = len(self.device_xy)
        if n < 1 or self.device_xy.shape != (n, 2):
            raise ParameterError("device_xy must be a non-empty (N, 2) array")
        if self.data_bits.shape != (n,):
            raise ParameterError("data_bits must match device count")
        if not np.all(self.data_bits > 0):
            raise ParameterError("every data size must be positive")
        if not np.all(self.area.contains(self.device_xy)):
            raise ParameterError("every device must lie inside the area bounds")
        if not (self.uav_altitude_m > self.irs_position[2] >= 0):
            raise ParameterError(
                f"need uav_altitude_m > irs height >= 0, got "
                f"{self.uav_altitude_m} and {self.irs_position[2]}"
            )
        if not (isinstance(self.capacity, int) and self.capacity >= 1):
            raise ParameterError(f"capacity must be a positive integer, got {self.capacity!r}")
        if not (1 <= self.k_min <= self.k_max):
            raise ParameterError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.k_max < math.ceil(n / self.capacity):
            raise ParameterError(
                f"k_max={self.k_max} cannot cover {n} devices at capacity {self.capacity}"
            )

    @property
    def n_devices(self) -> int:
        return len(self.device_xy)

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "scenario",
            "uav_altitude_m": float(self.uav_altitude_m),
            "irs_position_m": {
                "x": float(self.irs_position[0]),
                "y": float(self.irs_position[1]),
                "height": float(self.irs_position[2]),
            },
            "area_m": {
                "x_min": self.area.x_min,
                "x_max": self.area.x_max,
                "y_min": self.area.y_min,
                "y_max": self.area.y_max,
            },
            "capacity": self.capacity,
            "k_bounds": {"k_min": self.k_min, "k_max": self.k_max},
            "radio": {
                "bandwidth_hz": self.radio.bandwidth_hz,
                "noise_power_w": self.radio.noise_power_w,
                "tx_power_w": self.radio.tx_power_w,
                "path_loss_1": self.radio.path_loss_1,
                "path_loss_2": self.radio.path_loss_2,
                "wavelength_m": self.radio.wavelength_m,
                "element_spacing_m": self.radio.element_spacing_m,
                "num_elements": self.radio.num_elements,
                "phase_levels": self.radio.phase_levels,
            },
            "power": {
                "hover_power_w": self.power.hover_power_w,
                "flight_power_w": self.power.flight_power_w,
                "weight_hover": self.power.weight_hover,
                "weight_fly": self.power.weight_fly,
            },
            "devices": [
                {
                    "x_m": float(x),
                    "y_m": float(y),
                    "data_bits": float(bits),
                }
                for (x, y), bits in zip(self.device_xy, self.data_bits)
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "Scenario":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ParameterError(f"unsupported schema_version {doc.get('schema_version')!r}")
        if doc.get("kind") != "scenario":
            raise ParameterError(f"not a scenario document: kind={doc.get('kind')!r}")
        radio = RadioParams(**doc["radio"])
        power = PowerParams(**doc["power"])
        area = AreaBounds(**doc["area_m"])
        devices = doc["devices"]
        return Scenario(
            device_xy=np.array([[d["x_m"], d["y_m"]] for d in devices]),
            data_bits=np.array([d["data_bits"] for d in devices]),
            irs_position=(
                doc["irs_position_m"]["x"],
                doc["irs_position_m"]["y"],
                doc["irs_position_m"]["height"],
            ),
            uav_altitude_m=doc["uav_altitude_m"],
            area=area,
            capacity=doc["capacity"],
            k_min=doc["k_bounds"]["k_min"],
            k_max=doc["k_bounds"]["k_max"],
            radio=radio,
            power=power,
        )


def _resolve_params(n_devices: int, overrides: dict | None) -> dict:
    params = dict(DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ParameterError(f"unknown override key {key!r}")
        params[key] = value
    if params["k_min"] is None:
        params["k_min"] = math.ceil(n_devices / int(params["capacity"]))
    if params["k_max"] is None:
        params["k_max"] = n_devices
    return params


def _build_scenario(device_xy, data_bits, params: dict) -> Scenario:
    area = AreaBounds(
        params["area_x_min"], params["area_x_max"],
        params["area_y_min"], params["area_y_max"],
    )
    radio = RadioParams(
        bandwidth_hz=float(params["bandwidth_hz"]),
        noise_power_w=dbm_to_watts(float(params["noise_power_dbm"])),
        tx_power_w=float(params["tx_power_w"]),
        path_loss_1=float(params["path_loss_1"]),
        path_loss_2=float(params["path_loss_2"]),
        wavelength_m=float(params["wavelength_m"]),
        element_spacing_m=float(params["element_spacing_m"]),
        num_elements=int(params["num_elements"]),
        phase_levels=int(params["phase_levels"]),
    )
    power = PowerParams(
        hover_power_w=float(params["hover_power_w"]),
        flight_power_w=float(params["flight_power_w"]),
        weight_hover=float(params["weight_hover"]),
        weight_fly=float(params["weight_fly"]),
    )
    irs = (
        0.5 * (area.x_min + area.x_max),
        0.5 * (area.y_min + area.y_max),
        float(params["irs_height_m"]),
    )
    return Scenario(
        device_xy=device_xy,
        data_bits=data_bits,
        irs_position=irs,
        uav_altitude_m=float(params["uav_altitude_m"]),
        area=area,
        capacity=int(params["capacity"]),
        k_min=int(params["k_min"]),
        k_max=int(params["k_max"]),
        radio=radio,
        power=power,
    )


def generate_scenario(n_devices: int, seed, overrides: dict | None = None) -> Scenario:
    """Random device field over the configured area.

    Devices are uniform over the area; data sizes uniform in
    [data_mb_min, data_mb_max] MB, stored in bits. The IRS sits at the area
    center at `irs_height_m`. Identical (n_devices, seed, overrides) yield
    bit-identical scenarios.
    """
    if n_devices < 1:
        raise ParameterError(f"n_devices must be >= 1, got {n_devices}")
    params = _resolve_params(n_devices, overrides)
    rng = make_rng(seed)
    xs = rng.uniform(params["area_x_min"], params["area_x_max"], n_devices)
    ys = rng.uniform(params["area_y_min"], params["area_y_max"], n_devices)
    data_mb = rng.uniform(params["data_mb_min"], params["data_mb_max"], n_devices)
    return _build_scenario(
        np.column_stack([xs, ys]), data_mb * MB_BITS, params
    )


def scenario_from_points(points: "PointSet", seed, overrides: dict | None = None) -> Scenario:
    """Benchmark derivation: instance coordinates become device locations.

    The area becomes the instance bounding box (so every device is inside),
    the IRS sits at the box center, and data sizes are drawn per seed. Any
    remaining parameters follow the usual defaults/overrides.
    """
    xy = np.asarray(points.points, dtype=float)
    n = len(xy)
    params = _resolve_params(n, overrides)
    auto = {
        "area_x_min": float(xy[:, 0].min()),
        "area_x_max": float(xy[:, 0].max()),
        "area_y_min": float(xy[:, 1].min()),
        "area_y_max": float(xy[:, 1].max()),
    }
    for key, value in auto.items():
        if key not in (overrides or {}):
            params[key] = value
    rng = make_rng(seed)
    data_mb = rng.uniform(params["data_mb_min"], params["data_mb_max"], n)
    return _build_scenario(xy, data_mb * MB_BITS, params)


# ---------------------------------------------------------------------------
# TSPLIB point sets


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray  # (K, 2)
    name: str = ""
    known_optimum: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
            raise ParameterError("points must be a (K, 2) array with K >= 1")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("point coordinates must be finite")

    def __len__(self) -> int:
        return len(self.points)


# Registered benchmark optima (real-valued Euclidean tour lengths).
KNOWN_OPTIMA = {
    "att48": 33523.71,
    "eil101": 642.30,
    "tsp225": 3859.00,
}

_SUPPORTED_EDGE_TYPES = {"EUC_2D", "ATT"}


def load_tsplib(source) -> PointSet:
    """Parse the NODE_COORD_SECTION subset of TSPLIB-95.

    `source` is a text stream, a path string, or the raw text. Supported
    edge-weight types: EUC_2D and ATT (coordinates are read as plain 2-D
    points either way; tour lengths in this package are always real-valued
    Euclidean). Raises with the offending line number on malformed input.
    """
    if isinstance(source, str):
        if "\n" in source:
            stream = io.StringIO(source)
        else:
            stream = open(source, "r", encoding="utf-8")
    else:
        stream = source
    try:
        return _parse_tsplib(stream)
    finally:
        if isinstance(source, str):
            stream.close()


def _parse_tsplib(stream) -> PointSet:
    name = ""
    dimension = None
    edge_type = None
    coords: list[tuple[float, float]] = []
    in_coords = False
    coord_line = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if in_coords:
            if line.upper() == "EOF":
                break
            parts = line.split()
            if len(parts) != 3:
                raise TsplibParseError(f"expected 'index x y', got {line!r}", lineno)
            try:
                coords.append((float(parts[1]), float(parts[2])))
            except ValueError:
                raise TsplibParseError(f"non-numeric coordinate in {line!r}", lineno)
            coord_line = lineno
            continue
        if line.upper() == "EOF":
            break
        if line.upper().startswith("NODE_COORD_SECTION"):
            if edge_type is None:
                raise TsplibParseError("missing EDGE_WEIGHT_TYPE before coordinates", lineno)
            in_coords = True
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().upper()
            value = value.strip()
            if key == "NAME":
                name = value
            elif key == "DIMENSION":
                try:
                    dimension = int(value)
                except ValueError:
                    raise TsplibParseError(f"bad DIMENSION {value!r}", lineno)
            elif key == "EDGE_WEIGHT_TYPE":
                edge_type = value.upper()
                if edge_type not in _SUPPORTED_EDGE_TYPES:
                    raise UnsupportedFormatError(
                        f"unsupported EDGE_WEIGHT_TYPE {value!r} "
                        f"(supported: {sorted(_SUPPORTED_EDGE_TYPES)})",
                        lineno,
                    )
            continue
        raise TsplibParseError(f"unrecognized line {line!r}", lineno)
    if not in_coords:
        raise TsplibParseError("missing NODE_COORD_SECTION")
    if not coords:
        raise TsplibParseError("NODE_COORD_SECTION contains no coordinates", coord_line)
    if dimension is not None and len(coords) != dimension:
        raise TsplibParseError(
            f"DIMENSION says {dimension} points but {len(coords)} parsed", coord_line
        )
    return PointSet(
        points=np.array(coords, dtype=float),
        name=name,
        known_optimum=KNOWN_OPTIMA.get(name),
    )


def bundled_instances() -> list[str]:
    root = resources.files("joltopt").joinpath("data")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".tsp"))


def load_bundled(name: str) -> PointSet:
    """Load one of the instances shipped inside the package."""
    root = resources.files("joltopt").joinpath("data")
    candidate = root.joinpath(f"{name}.tsp")
    if not candidate.is_file():
        raise InstanceLookupError(name, bundled_instances())
    with candidate.open("r", encoding="utf-8") as handle:
        return _parse_tsplib(handle)


def serialize_pointset(ps: PointSet) -> str:
    header = [
        f"NAME : {ps.name}" if ps.name else "NAME : unnamed",
        "TYPE : TSP",
        f"DIMENSION : {len(ps)}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        "NODE_COORD_SECTION",
    ]
    body = [
        f"{i + 1} {float(x)!r} {float(y)!r}" for i, (x, y) in enumerate(ps.points)
    ]
    return "\n".join(header + body + ["EOF"]) + "\n"


def tour_length(points, order) -> float:
    """Closed-tour Euclidean length: the segment from the last stop back to
    the first is always included (the visiting order is a ring)."""
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    order = np.asarray(order, dtype=int)
    k = len(pts)
    if sorted(order.tolist()) != list(range(k)):
        raise InvalidPermutationError(
            f"order must be a permutation of 0..{k - 1}, got {order.tolist()}"
        )
    if k < 2:
        return 0.0
    route = pts[order]
    diffs = route - np.roll(route, -1, axis=0)
    return float(np.hypot(diffs[:, 0], diffs[:, 1]).sum())


__all__ = [
    "AreaBounds",
    "DEFAULTS",
    "KNOWN_OPTIMA",
    "MB_BITS",
    "PointSet",
    "PowerParams",
    "RadioParams",
    "SCHEMA_VERSION",
    "Scenario",
    "bundled_instances",
    "dbm_to_watts",
    "generate_scenario",
    "load_bundled",
    "load_tsplib",
    "make_rng",
    "scenario_from_points",
    "serialize_pointset",
    "tour_length",
]

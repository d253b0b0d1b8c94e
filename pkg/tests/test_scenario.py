"""Scenario construction, parameter resolution, TSPLIB parsing, seeding."""

import io
import json
import math

import numpy as np
import pytest

from joltopt.errors import (
    InstanceLookupError,
    ParameterError,
    TsplibParseError,
    UnsupportedFormatError,
)
from joltopt.scenario import (
    DEFAULTS,
    KNOWN_OPTIMA,
    MB_BITS,
    AreaBounds,
    PointSet,
    Scenario,
    bundled_instances,
    dbm_to_watts,
    generate_scenario,
    load_bundled,
    load_tsplib,
    make_rng,
    scenario_from_points,
    serialize_pointset,
    tour_length,
)

from oracles import closed_tour_length


def test_defaults_resolution():
    sc = generate_scenario(20, seed=0)
    assert sc.n_devices == 20
    assert sc.capacity == 5
    assert sc.k_min == 4  # ceil(20 / 5)
    assert sc.k_max == 20
    assert sc.uav_altitude_m == 200.0
    assert sc.irs_position == (500.0, 500.0, 100.0)
    assert sc.radio.num_elements == 16
    assert sc.radio.phase_levels == 8
    assert sc.power.weight_hover == 10000.0
    assert sc.power.weight_fly == 0.5


def test_k_min_ceiling_non_divisible():
    sc = generate_scenario(21, seed=0)
    assert sc.k_min == 5


def test_unknown_override_key_rejected():
    with pytest.raises(ParameterError, match="unknown"):
        generate_scenario(5, seed=0, overrides={"capaciy": 3})


def test_overrides_applied():
    sc = generate_scenario(10, seed=0, overrides={"capacity": 2, "weight_fly": 7.5})
    assert sc.capacity == 2
    assert sc.k_min == 5
    assert sc.power.weight_fly == 7.5


def test_generate_scenario_deterministic():
    a = generate_scenario(15, seed=42)
    b = generate_scenario(15, seed=42)
    assert np.array_equal(a.device_xy, b.device_xy)
    assert np.array_equal(a.data_bits, b.data_bits)


def test_devices_inside_area_and_data_in_range():
    sc = generate_scenario(200, seed=7)
    assert np.all(sc.area.contains(sc.device_xy))
    assert np.all(sc.data_bits >= DEFAULTS["data_mb_min"] * MB_BITS)
    assert np.all(sc.data_bits <= DEFAULTS["data_mb_max"] * MB_BITS)


def test_noise_floor_is_dbm_converted():
    sc = generate_scenario(5, seed=0)
    assert sc.radio.noise_power_w == pytest.approx(10.0 ** ((-250.0 - 30.0) / 10.0), rel=0, abs=0)
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)


def test_scenario_validation_errors():
    xy = np.array([[0.0, 0.0], [1.0, 1.0]])
    area = AreaBounds(0.0, 10.0, 0.0, 10.0)
    with pytest.raises(ParameterError, match="data"):
        Scenario(device_xy=xy, data_bits=np.array([1.0]), irs_position=(5, 5, 1),
                 uav_altitude_m=2.0, area=area, capacity=1, k_min=2, k_max=2)
    with pytest.raises(ParameterError, match="irs height"):
        Scenario(device_xy=xy, data_bits=np.array([1.0, 1.0]), irs_position=(5, 5, 3.0),
                 uav_altitude_m=2.0, area=area, capacity=1, k_min=2, k_max=2)
    with pytest.raises(ParameterError, match="k_min"):
        Scenario(device_xy=xy, data_bits=np.array([1.0, 1.0]), irs_position=(5, 5, 1),
                 uav_altitude_m=2.0, area=area, capacity=1, k_min=3, k_max=2)
    with pytest.raises(ParameterError, match="cover"):
        Scenario(device_xy=xy, data_bits=np.array([1.0, 1.0]), irs_position=(5, 5, 1),
                 uav_altitude_m=2.0, area=area, capacity=1, k_min=1, k_max=1)
    with pytest.raises(ParameterError, match="inside"):
        Scenario(device_xy=np.array([[0.0, 0.0], [20.0, 1.0]]),
                 data_bits=np.array([1.0, 1.0]), irs_position=(5, 5, 1),
                 uav_altitude_m=2.0, area=area, capacity=2, k_min=1, k_max=2)


def test_area_bounds_helpers():
    area = AreaBounds(0.0, 10.0, -5.0, 5.0)
    assert area.diagonal == pytest.approx(math.hypot(10.0, 10.0))
    pts = np.array([[-1.0, 0.0], [3.0, 7.0], [5.0, 0.0]])
    assert area.contains(pts).tolist() == [False, False, True]
    clamped = area.clamp(pts)
    assert clamped.tolist() == [[0.0, 0.0], [3.0, 5.0], [5.0, 0.0]]
    with pytest.raises(ParameterError):
        AreaBounds(1.0, 0.0, 0.0, 1.0)


def test_scenario_json_round_trip():
    sc = generate_scenario(8, seed=3, overrides={"capacity": 3})
    text = sc.to_json()
    back = Scenario.from_json(text)
    assert back.n_devices == 8
    assert back.capacity == 3
    assert np.array_equal(back.device_xy, sc.device_xy)
    assert np.array_equal(back.data_bits, sc.data_bits)
    assert back.to_json() == text
    payload = json.loads(text)
    assert payload["schema_version"] == 1


def test_make_rng_is_mt19937_and_seed_stable():
    rng = make_rng(123)
    assert isinstance(rng.bit_generator, np.random.MT19937)
    a = make_rng(123).integers(0, 1000, 5)
    b = make_rng(123).integers(0, 1000, 5)
    assert np.array_equal(a, b)
    # SeedSequence input is accepted as-is
    c = make_rng(np.random.SeedSequence(123)).integers(0, 1000, 5)
    assert np.array_equal(a, c)


def test_scenario_from_points_geometry():
    pts = PointSet(points=np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 2.0], [0.0, 2.0]]))
    sc = scenario_from_points(pts, seed=0, overrides={"uav_altitude_m": 50.0, "irs_height_m": 10.0})
    assert sc.n_devices == 4
    assert sc.area.x_max == 4.0 and sc.area.y_max == 2.0
    assert sc.irs_position[:2] == (2.0, 1.0)
    assert np.array_equal(sc.device_xy, pts.points)


# ---------------------------------------------------------------------------
# TSPLIB parsing


MINI_TSP = """NAME : mini
TYPE : TSP
COMMENT : three points
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0.0 0.0
2 3.0 0.0
3 0.0 4.0
EOF
"""


def test_parse_euc2d_basic():
    ps = load_tsplib(io.StringIO(MINI_TSP))
    assert ps.name == "mini"
    assert len(ps) == 3
    assert ps.points.tolist() == [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]


def test_parse_rejects_dimension_mismatch():
    bad = MINI_TSP.replace("DIMENSION : 3", "DIMENSION : 4")
    with pytest.raises(TsplibParseError, match="DIMENSION"):
        load_tsplib(io.StringIO(bad))


def test_parse_rejects_unsupported_metric():
    bad = MINI_TSP.replace("EUC_2D", "GEO")
    with pytest.raises(UnsupportedFormatError):
        load_tsplib(io.StringIO(bad))


def test_parse_ignores_unknown_header_keys():
    extra = MINI_TSP.replace("TYPE : TSP", "TYPE : TSP\nDISPLAY_DATA_TYPE : COORD_DISPLAY")
    ps = load_tsplib(io.StringIO(extra))
    assert len(ps) == 3


def test_bundled_instances_load_and_registry():
    names = bundled_instances()
    assert set(names) == {"att48", "eil101", "tsp225"}
    for name, (size, opt) in {
        "att48": (48, 33523.71),
        "eil101": (101, 642.30),
        "tsp225": (225, 3859.00),
    }.items():
        ps = load_bundled(name)
        assert len(ps) == size
        assert ps.known_optimum == opt
        assert KNOWN_OPTIMA[name] == opt


def test_load_bundled_unknown_name():
    with pytest.raises(InstanceLookupError):
        load_bundled("berlin52")


def test_serialize_pointset_round_trip():
    ps = load_bundled("att48")
    text = serialize_pointset(ps)
    back = load_tsplib(io.StringIO(text))
    assert np.array_equal(back.points, ps.points)
    assert back.name == ps.name


def test_tour_length_matches_oracle():
    rng = make_rng(5)
    pts = rng.uniform(0, 100, (7, 2))
    order = [3, 1, 6, 0, 2, 5, 4]
    assert tour_length(pts, order) == pytest.approx(closed_tour_length(pts, order), rel=1e-12)


def test_tour_length_requires_permutation():
    pts = np.zeros((3, 2))
    from joltopt.errors import InvalidPermutationError

    with pytest.raises(InvalidPermutationError):
        tour_length(pts, [0, 1, 1])

"""Assignment, energy accounting, and the independent solution checker.

The greedy assignment is cross-checked against a from-scratch reimplementation
of the same rule (max-rate placement, then min-gap shedding); energy terms are
recomposed by hand from the assignment and compared at tight tolerance.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from joltopt.channel import rate_matrix
from joltopt.energy import (
    Deployment,
    assign_devices,
    check_solution,
    evaluate,
    flight_energy,
    hover_energy,
    measure,
    transmission_energy,
)
from joltopt.errors import ConstraintViolationError, UnreachableDeviceError
from joltopt.scenario import AreaBounds, Scenario, make_rng

AREA = AreaBounds(0.0, 1000.0, 0.0, 1000.0)


def build_scenario(device_xy, data_bits, capacity, k_min=1, k_max=8):
    return Scenario(
        device_xy=np.asarray(device_xy, dtype=float),
        data_bits=np.asarray(data_bits, dtype=float),
        irs_position=(500.0, 500.0, 100.0),
        uav_altitude_m=200.0,
        area=AREA,
        capacity=capacity,
        k_min=k_min,
        k_max=k_max,
    )


def small_setup():
    """Four devices, two stops, capacity two: one shed cascade."""
    sc = build_scenario(
        [[100.0, 200.0], [300.0, 800.0], [700.0, 700.0], [900.0, 100.0]],
        [8e6, 1.6e7, 4e6, 2.4e7],
        capacity=2,
    )
    dep = Deployment(np.array([[450.0, 500.0], [800.0, 300.0]]))
    return sc, dep


def greedy_oracle(rates, cap):
    """Reference assignment: same rule, plain loops."""
    n, k = rates.shape
    assigned = list(np.argmax(rates, axis=1))
    load = [assigned.count(j) for j in range(k)]
    for j in range(k):
        while load[j] > cap:
            members = [i for i in range(n) if assigned[i] == j]
            open_cols = [c for c in range(k) if load[c] < cap]
            best = None
            for i in members:
                alt = open_cols[int(np.argmax([rates[i, c] for c in open_cols]))]
                gap = rates[i, j] - rates[i, alt]
                if best is None or gap < best[0]:
                    best = (gap, i, alt)
            _, dev, target = best
            assigned[dev] = target
            load[j] -= 1
            load[target] += 1
    return assigned, load


# ---------------------------------------------------------------------------
# Deployment


def test_deployment_promotes_single_stop():
    dep = Deployment(np.array([300.0, 400.0]))
    assert dep.stops.shape == (1, 2)
    assert dep.k == 1


def test_deployment_validate_bounds_and_count():
    sc, _ = small_setup()
    with pytest.raises(ConstraintViolationError, match="C5"):
        Deployment(np.array([[-1.0, 500.0], [800.0, 300.0]])).validate(sc)
    with pytest.raises(ConstraintViolationError, match="C6"):
        Deployment(np.array([[450.0, 1000.5], [800.0, 300.0]])).validate(sc)
    err = None
    try:
        Deployment(np.full((9, 2), 500.0)).validate(sc)
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == "C7"


# ---------------------------------------------------------------------------
# Assignment


def test_assign_matches_independent_greedy_oracle():
    sc = build_scenario(
        [[100.0, 100.0], [200.0, 900.0], [400.0, 400.0], [550.0, 450.0],
         [600.0, 800.0], [850.0, 200.0], [950.0, 950.0]],
        [1e7] * 7,
        capacity=2,
    )
    dep = Deployment(np.array([[480.0, 520.0], [300.0, 300.0], [700.0, 600.0], [900.0, 900.0]]))
    got = assign_devices(sc, dep)
    expected, load = greedy_oracle(got.rates, sc.capacity)
    assert got.device_to_stop.tolist() == expected
    assert got.incidence.sum(axis=0).tolist() == load


def test_assign_random_scenarios_agree_with_oracle():
    rng = make_rng(411)
    for _ in range(25):
        n = int(rng.integers(4, 11))
        cap = int(rng.integers(1, 4))
        k = math.ceil(n / cap)
        sc = build_scenario(
            rng.uniform(0.0, 1000.0, size=(n, 2)),
            rng.uniform(1e6, 1e8, size=n),
            capacity=cap,
            k_max=max(8, k),
        )
        dep = Deployment(rng.uniform(0.0, 1000.0, size=(k, 2)))
        try:
            got = assign_devices(sc, dep)
        except ConstraintViolationError as e:
            assert e.constraint == "C4"
            _, load = greedy_oracle(rate_matrix(sc, dep.stops)[0], cap)
            assert min(load) == 0
            continue
        expected, _ = greedy_oracle(got.rates, cap)
        assert got.device_to_stop.tolist() == expected
        col = got.incidence.sum(axis=0)
        assert col.max() <= cap and col.min() >= 1


def test_assign_rejects_insufficient_capacity():
    sc, _ = small_setup()  # 4 devices, capacity 2
    err = None
    try:
        assign_devices(sc, Deployment(np.array([[450.0, 500.0]])))
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == "C3"


def test_assign_rejects_more_stops_than_devices():
    sc = build_scenario([[250.0, 250.0], [750.0, 750.0]], [1e7, 1e7], capacity=5)
    err = None
    try:
        assign_devices(sc, Deployment(np.array([[400.0, 500.0], [600.0, 500.0], [500.0, 400.0]])))
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == "C4"


def test_assign_rejects_surplus_stop_left_empty():
    # five devices fit under one stop, so the second never gets a member
    sc = build_scenario(rate_grid := [[x, 250.0] for x in (100.0, 300.0, 500.0, 700.0, 900.0)],
                        [1e7] * 5, capacity=5)
    err = None
    try:
        assign_devices(sc, Deployment(np.array([[500.0, 480.0], [900.0, 900.0]])))
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == "C4"
    assert len(rate_grid) == 5


def test_assign_shed_tie_moves_smallest_device_index():
    # co-located devices have identical rate rows; the tie resolves to device 0
    sc = build_scenario([[400.0, 500.0], [400.0, 500.0]], [1e7, 1e7], capacity=1)
    dep = Deployment(np.array([[480.0, 500.0], [900.0, 900.0]]))
    got = assign_devices(sc, dep)
    assert got.device_to_stop.tolist() == [1, 0]


# ---------------------------------------------------------------------------
# Energy terms


def test_transmission_energy_formula():
    sc, dep = small_setup()
    asg = assign_devices(sc, dep)
    per_device, total = transmission_energy(sc, asg)
    picked = asg.device_to_stop
    for i in range(4):
        t = sc.data_bits[i] / asg.rates[i, picked[i]]
        assert math.isclose(per_device[i], sc.radio.tx_power_w * t, rel_tol=1e-12)
    assert math.isclose(total, per_device.sum(), rel_tol=1e-12)


def test_hover_waits_for_slowest_upload():
    sc, dep = small_setup()
    asg = assign_devices(sc, dep)
    times = sc.data_bits / asg.rates[np.arange(4), asg.device_to_stop]
    hover, e_hov = hover_energy(sc, asg)
    for j in range(dep.k):
        members = np.flatnonzero(asg.device_to_stop == j)
        assert math.isclose(hover[j], times[members].max(), rel_tol=1e-12)
    assert math.isclose(e_hov, sc.power.hover_power_w * hover.sum(), rel_tol=1e-12)


def test_flight_energy_scales_tour_length():
    sc, dep = small_setup()
    length, e_fly = flight_energy(sc, dep, (1, 0))
    expected = 2.0 * math.dist(dep.stops[0], dep.stops[1])
    assert math.isclose(length, expected, rel_tol=1e-12)
    assert math.isclose(e_fly, sc.power.flight_power_w * expected, rel_tol=1e-12)


def test_single_stop_run_has_zero_flight_energy():
    sc = build_scenario([[250.0, 250.0], [750.0, 750.0]], [1e7, 2e7], capacity=5)
    dep = Deployment(np.array([[500.0, 500.1]]))
    _, report = measure(sc, dep, (0,))
    assert report.e_fly == 0.0 and report.tour_length_m == 0.0
    assert report.objective > 0.0


def test_measure_report_recomposes_by_hand():
    sc, dep = small_setup()
    asg, report = measure(sc, dep, (0, 1))
    times = sc.data_bits / asg.rates[np.arange(4), asg.device_to_stop]
    e_iot = sc.radio.tx_power_w * times.sum()
    hover = np.zeros(2)
    np.maximum.at(hover, asg.device_to_stop, times)
    e_hov = sc.power.hover_power_w * hover.sum()
    e_fly = sc.power.flight_power_w * 2.0 * math.dist(dep.stops[0], dep.stops[1])
    assert math.isclose(report.e_iot, e_iot, rel_tol=1e-12)
    assert math.isclose(report.e_hov, e_hov, rel_tol=1e-12)
    assert math.isclose(report.e_fly, e_fly, rel_tol=1e-12)
    objective = e_iot + sc.power.weight_hover * e_hov + sc.power.weight_fly * e_fly
    assert math.isclose(report.objective, objective, rel_tol=1e-12)


def test_measure_rejects_bad_tour():
    sc, dep = small_setup()
    err = None
    try:
        measure(sc, dep, (0, 0))
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == "C8"


def test_evaluate_matches_measure():
    sc, dep = small_setup()
    _, report = measure(sc, dep, (0, 1))
    assert evaluate(sc, dep, (0, 1)).objective == report.objective


def test_transmission_flags_zero_rate_link():
    sc, dep = small_setup()
    asg = assign_devices(sc, dep)
    rates = asg.rates.copy()
    rates[0, asg.device_to_stop[0]] = 0.0
    broken = replace(asg, rates=rates)
    with pytest.raises(UnreachableDeviceError, match="device 0"):
        transmission_energy(sc, broken)


# ---------------------------------------------------------------------------
# Independent checker


def checked_solution():
    sc, dep = small_setup()
    asg, report = measure(sc, dep, (1, 0))
    return sc, dep, asg, report


def test_check_solution_accepts_production_output():
    sc, dep, asg, report = checked_solution()
    check_solution(sc, dep, asg, (1, 0), report)


def expect_constraint(code, fn):
    err = None
    try:
        fn()
    except ConstraintViolationError as e:
        err = e
    assert err is not None and err.constraint == code, err


def test_check_solution_flags_tampered_objective():
    sc, dep, asg, report = checked_solution()
    bad = replace(report, objective=report.objective * 1.001)
    expect_constraint("C1", lambda: check_solution(sc, dep, asg, (1, 0), bad))


def test_check_solution_flags_tampered_rate():
    sc, dep, asg, report = checked_solution()
    rates = asg.rates.copy()
    rates[2, asg.device_to_stop[2]] *= 1.01
    expect_constraint("C1", lambda: check_solution(sc, dep, replace(asg, rates=rates), (1, 0), report))


def test_check_solution_flags_double_assignment():
    sc, dep, asg, report = checked_solution()
    inc = asg.incidence.copy()
    inc[0] = 1
    expect_constraint("C2", lambda: check_solution(sc, dep, replace(asg, incidence=inc), (1, 0), report))


def test_check_solution_flags_capacity_overflow():
    sc, dep, asg, report = checked_solution()
    inc = asg.incidence.copy()
    crowded = int(np.argmax(inc.sum(axis=0)))
    mover = int(np.flatnonzero(inc[:, crowded] == 0)[0])
    inc[mover] = 0
    inc[mover, crowded] = 1
    expect_constraint("C3", lambda: check_solution(sc, dep, replace(asg, incidence=inc), (1, 0), report))


def test_check_solution_flags_empty_stop():
    # fabricated three-stop incidence that leaves the last column empty
    sc, _ = small_setup()
    dep = Deployment(np.array([[450.0, 500.0], [800.0, 300.0], [200.0, 200.0]]))
    rates, _, levels = rate_matrix(sc, dep.stops)
    asg = assign_devices(sc, Deployment(dep.stops[:2]))
    inc = np.zeros((4, 3), dtype=np.int8)
    inc[np.arange(4), asg.device_to_stop] = 1
    fabricated = replace(asg, incidence=inc, rates=rates, phase_levels=levels)
    expect_constraint("C4", lambda: check_solution(sc, dep, fabricated, (0, 1, 2)))


def test_check_solution_flags_non_permutation_tour():
    sc, dep, asg, report = checked_solution()
    expect_constraint("C8", lambda: check_solution(sc, dep, asg, (0, 0), report))


def test_check_solution_flags_out_of_range_level():
    sc, dep, asg, report = checked_solution()
    levels = asg.phase_levels.copy()
    levels[0, 0, 0] = asg.levels
    expect_constraint("C9", lambda: check_solution(sc, dep, replace(asg, phase_levels=levels), (1, 0), report))


def test_check_solution_flags_unquantized_phase_choice():
    sc, dep, asg, report = checked_solution()
    levels = asg.phase_levels.copy()
    j = asg.device_to_stop[1]
    levels[1, j, 3] = (levels[1, j, 3] + 1) % asg.levels
    expect_constraint("C9", lambda: check_solution(sc, dep, replace(asg, phase_levels=levels), (1, 0), report))

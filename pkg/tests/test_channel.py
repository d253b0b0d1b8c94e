"""Cascade geometry, quantized phase selection, and rate computation."""

import math

import numpy as np
import pytest

from joltopt.channel import (
    ArrayResponse,
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
from joltopt.errors import DegenerateGeometryError, ParameterError
from joltopt.scenario import AreaBounds, RadioParams, Scenario, generate_scenario, make_rng

from oracles import (
    exhaustive_phase_max,
    per_element_best_levels,
    phasor_gain,
)

IRS = (500.0, 500.0, 100.0)


def radio(**kw):
    base = dict(num_elements=4, phase_levels=8)
    base.update(kw)
    return RadioParams(**base)


def test_distances_hand_computed():
    # stop 300m west of the panel at 200m altitude, device 400m east
    d1, d2 = distances((200.0, 500.0, 200.0), (900.0, 500.0), IRS)
    assert d1 == pytest.approx(math.sqrt(300.0**2 + 100.0**2), rel=1e-15)
    assert d2 == pytest.approx(math.sqrt(400.0**2 + 100.0**2), rel=1e-15)


def test_degenerate_positions_raise():
    with pytest.raises(DegenerateGeometryError):
        distances((500.0, 500.0, 100.0), (0.0, 0.0), IRS)
    with pytest.raises(DegenerateGeometryError):
        distances((0.0, 0.0, 200.0), (500.0, 500.0), (500.0, 500.0, 0.0))


def test_leg_magnitudes_are_sqrt_alpha_over_distance():
    r = radio()
    resp_u, resp_d = array_responses((200.0, 500.0, 200.0), (900.0, 500.0), IRS, r)
    d1, d2 = distances((200.0, 500.0, 200.0), (900.0, 500.0), IRS)
    assert resp_u.magnitude == pytest.approx(math.sqrt(r.path_loss_1) / d1, rel=1e-15)
    assert resp_d.magnitude == pytest.approx(math.sqrt(r.path_loss_2) / d2, rel=1e-15)


def test_leg_phase_progression_linear_in_element_index():
    r = radio(num_elements=6)
    resp_u, _ = array_responses((200.0, 500.0, 200.0), (900.0, 500.0), IRS, r)
    d1, _ = distances((200.0, 500.0, 200.0), (900.0, 500.0), IRS)
    cos_aoa = (IRS[0] - 200.0) / d1
    step = -(2.0 * math.pi / r.wavelength_m) * r.element_spacing_m * cos_aoa
    expect = np.mod(step * np.arange(6), 2.0 * math.pi)
    assert resp_u.phases == pytest.approx(expect, rel=1e-12)


def test_quantize_matches_per_element_scan():
    rng = make_rng(31)
    for levels in (2, 4, 8):
        for _ in range(25):
            m = int(rng.integers(1, 7))
            ph_u = rng.uniform(0, 2 * math.pi, m)
            ph_d = rng.uniform(0, 2 * math.pi, m)
            resp_u = ArrayResponse(magnitude=1.0, phases=ph_u)
            resp_d = ArrayResponse(magnitude=1.0, phases=ph_d)
            got = quantize_phases(resp_u, resp_d, levels).level_indices
            want = per_element_best_levels(ph_u + ph_d, levels)
            assert got.tolist() == want


def test_half_way_tie_takes_smaller_angle():
    # pi/8 sits exactly between levels 0 and 1 of an 8-level grid (the
    # fraction is exact in floats); the lower neighbor wins
    resp_u = ArrayResponse(magnitude=1.0, phases=np.array([math.pi / 8.0]))
    resp_d = ArrayResponse(magnitude=1.0, phases=np.array([0.0]))
    assert quantize_phases(resp_u, resp_d, 8).level_indices.tolist() == [0]
    # past the midpoint of the last cell the selection wraps to level 0
    resp_u = ArrayResponse(magnitude=1.0, phases=np.array([2.0 * math.pi - math.pi / 16.0]))
    assert quantize_phases(resp_u, resp_d, 8).level_indices.tolist() == [0]


def test_effective_gain_matches_phasor_oracle():
    rng = make_rng(8)
    for _ in range(40):
        m = int(rng.integers(1, 6))
        levels = int(rng.choice([2, 4, 8]))
        ph_u = rng.uniform(0, 2 * math.pi, m)
        ph_d = rng.uniform(0, 2 * math.pi, m)
        resp_u = ArrayResponse(magnitude=0.7, phases=ph_u)
        resp_d = ArrayResponse(magnitude=1.3, phases=ph_d)
        pv = quantize_phases(resp_u, resp_d, levels)
        thetas = 2.0 * math.pi * pv.level_indices / levels
        want = 0.7 * 1.3 * phasor_gain(thetas - (ph_u + ph_d))
        assert effective_gain(resp_u, resp_d, pv) == pytest.approx(want, rel=1e-12)


def test_quantized_selection_attains_cos_bound():
    """Per-element residual is at most pi/levels, so the combined gain is
    at least cos(pi/levels) * M * |h1| * |h2|."""
    rng = make_rng(77)
    for _ in range(200):
        m = int(rng.choice([1, 4, 16]))
        levels = int(rng.choice([2, 4, 8]))
        ph_u = rng.uniform(0, 2 * math.pi, m)
        ph_d = rng.uniform(0, 2 * math.pi, m)
        resp_u = ArrayResponse(magnitude=1.0, phases=ph_u)
        resp_d = ArrayResponse(magnitude=1.0, phases=ph_d)
        pv = quantize_phases(resp_u, resp_d, levels)
        gain = effective_gain(resp_u, resp_d, pv)
        assert gain >= math.cos(math.pi / levels) * m - 1e-9


def test_single_element_gain_exact():
    resp_u = ArrayResponse(magnitude=0.25, phases=np.array([1.234]))
    resp_d = ArrayResponse(magnitude=4.0, phases=np.array([5.01]))
    pv = quantize_phases(resp_u, resp_d, 8)
    # one element: the anchored residual is exactly zero, no rounding
    assert effective_gain(resp_u, resp_d, pv) == 1.0


def test_contracted_selection_not_above_exhaustive_max():
    rng = make_rng(4)
    for _ in range(20):
        m = int(rng.integers(2, 5))
        levels = 4
        ph_u = rng.uniform(0, 2 * math.pi, m)
        ph_d = rng.uniform(0, 2 * math.pi, m)
        resp_u = ArrayResponse(magnitude=1.0, phases=ph_u)
        resp_d = ArrayResponse(magnitude=1.0, phases=ph_d)
        pv = quantize_phases(resp_u, resp_d, levels)
        got = effective_gain(resp_u, resp_d, pv)
        best = exhaustive_phase_max((ph_u + ph_d).tolist(), levels)
        assert got <= best + 1e-9


def test_rate_from_gain_shannon_form():
    r = radio()
    gain = 3e-4
    snr = r.tx_power_w * gain * gain / r.noise_power_w
    assert rate_from_gain(gain, r) == pytest.approx(r.bandwidth_hz * math.log2(1 + snr), rel=1e-15)


def test_link_budget_fields_consistent():
    r = radio()
    stop = (100.0, 250.0, 200.0)
    device = (800.0, 650.0)
    budget, pv = best_link_budget(stop, device, IRS, r)
    d1, d2 = distances(stop, device, IRS)
    assert budget.distance_uav_irs == pytest.approx(d1)
    assert budget.distance_irs_device == pytest.approx(d2)
    assert budget.rate_bps == pytest.approx(rate_from_gain(budget.effective_gain, r), rel=1e-15)
    redo = link_budget(stop, device, IRS, r, pv)
    assert redo.effective_gain == budget.effective_gain


def test_phase_vector_validation():
    with pytest.raises(ParameterError):
        PhaseVector(levels=1, level_indices=np.array([0]))
    with pytest.raises(ParameterError):
        PhaseVector(levels=4, level_indices=np.array([4]))


def test_rate_matrix_matches_scalar_path():
    sc = generate_scenario(9, seed=2)
    rng = make_rng(6)
    stops = np.column_stack([rng.uniform(0, 1000, 4), rng.uniform(0, 1000, 4)])
    rates, gains, levels = rate_matrix(sc, stops)
    assert rates.shape == (9, 4)
    assert levels.shape == (9, 4, sc.radio.num_elements)
    for i in range(9):
        for j in range(4):
            stop3 = (stops[j, 0], stops[j, 1], sc.uav_altitude_m)
            budget, pv = best_link_budget(stop3, sc.device_xy[i], sc.irs_position, sc.radio)
            assert np.array_equal(levels[i, j], pv.level_indices)
            assert gains[i, j] == pytest.approx(budget.effective_gain, rel=1e-12)
            assert rates[i, j] == pytest.approx(budget.rate_bps, rel=1e-12)


def test_rate_matrix_rejects_device_on_irs():
    # a ground-level panel with a device at its foot collapses the
    # device leg to zero length; stops can never collapse because the
    # altitude must sit strictly above the panel
    sc = Scenario(
        device_xy=np.array([[500.0, 500.0], [600.0, 400.0]]),
        data_bits=np.array([1e6, 2e6]),
        irs_position=(500.0, 500.0, 0.0),
        uav_altitude_m=200.0,
        area=AreaBounds(0.0, 1000.0, 0.0, 1000.0),
        capacity=5,
        k_min=1,
        k_max=2,
    )
    with pytest.raises(DegenerateGeometryError):
        rate_matrix(sc, np.array([[100.0, 100.0]]))

import math

import numpy as np
import pytest

from schwarzflow.darcy import (
    darcy_residual,
    fundamental_solution,
    normal_velocity,
    solve_pressure,
    source_points,
    evolution_law_residual,
    verification_report,
)
from schwarzflow.dynamics import SinkSpec, evolve, perturb_frozen
from schwarzflow.errors import CollocationError, DomainError
from schwarzflow.families import FamilyState, boundary_sample, contains

T, H = 0.25, 1e-3

CASES = {
    "disk": (FamilyState("disk", (1.0,)), (SinkSpec(0, 1.0),), [0.2 + 0.1j, -0.3j, 0.4]),
    "limacon": (FamilyState("limacon", (0.2, 1.0)), (SinkSpec(0, 1.0),), [0.2 + 0.1j, -0.3j, 0.4]),
    "neumann": (FamilyState("neumann_oval", (2.0, 1.0)), (SinkSpec(-1, 0.5), SinkSpec(1, 0.5)),
                [0.3j, 0.2 + 0.5j, -0.2]),
}


def _traj(name):
    state, sinks, _ = CASES[name]
    return evolve(state, sinks, 0.5, steps=10)


def test_fundamental_solution_constants():
    assert fundamental_solution(3)(1.0) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    assert fundamental_solution(4)(1.0) == pytest.approx(1 / (4 * math.pi**2), rel=1e-15)
    assert fundamental_solution(2)(math.e) == pytest.approx(-1 / (2 * math.pi), rel=1e-15)
    with pytest.raises(ValueError):
        fundamental_solution(1)


def test_fundamental_solution_flux_is_minus_one():
    # -integral over the unit sphere of dK/dr equals 1
    for n in (2, 3, 4, 5):
        K = fundamental_solution(n)
        r, h = 1.0, 1e-6
        dKdr = (K(r + h) - K(r - h)) / (2 * h)
        area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert -dKdr * area == pytest.approx(1.0, rel=1e-8)


def test_disk_pressure_closed_form():
    r0, Q = 1.3, 0.8
    sol = solve_pressure(boundary_sample(FamilyState("disk", (r0,)), 64), [SinkSpec(0, Q)], 32)
    z = np.array([0.1, 0.5j, -0.7 + 0.3j, 1.0])
    exact = Q / (2 * math.pi) * np.log(np.abs(z) / r0)
    assert np.max(np.abs(sol(z) - exact)) <= 1e-9


def test_neumann_collocation_residual_within_threshold():
    st = FamilyState("neumann_oval", (2.0, 1.0))
    sinks = [SinkSpec(-1, 0.5), SinkSpec(1, 0.5)]
    sol = solve_pressure(boundary_sample(st, 128), sinks, 64)
    assert sol.boundary_residual <= 1e-6 * 1.0 / (2 * math.pi)


def test_collocation_converges_monotonically():
    st = FamilyState("limacon", (0.3, 1.0))
    sample = boundary_sample(st, 128)
    res = [solve_pressure(sample, [SinkSpec(0, 1.0)], n, threshold=1.0).boundary_residual for n in (16, 32, 64)]
    assert res[0] > res[1] > res[2]


def test_collocation_error_raised_when_underresolved():
    st = FamilyState("limacon", (0.45, 1.0))
    with pytest.raises(CollocationError, match="sources"):
        solve_pressure(boundary_sample(st, 32), [SinkSpec(0, 1.0)], 8)


def test_sources_lie_off_the_domain():
    st = FamilyState("limacon", (0.3, 1.0))
    sample = boundary_sample(st, 64)
    assert not np.any(contains(st, source_points(sample, 32)))
    assert np.all(contains(st, source_points(sample, 32, inward=True)))
    with pytest.raises(ValueError):
        source_points(sample, 65)


def test_ellipse_exterior_far_field():
    st = FamilyState("ellipse", (2.0, 1.0))
    Q = 1.0
    sol = solve_pressure(boundary_sample(st, 128), [SinkSpec("infinity", Q)], 64, exterior=True)
    assert sol.exterior
    z = 1e4 * np.exp(1j * np.array([0.1, 1.0, 2.5]))
    # the source strengths sum to zero, so only the log term survives far away
    assert np.max(np.abs(sol.dz(z) * z + Q / (4 * math.pi))) <= 1e-6
    assert abs(sol.coefficients.sum()) <= 1e-10


@pytest.mark.parametrize("name", sorted(CASES))
def test_suction_pressure_negative_inside(name):
    state, sinks, _ = CASES[name]
    sol = solve_pressure(boundary_sample(state, 128), sinks, 64)
    rng = np.random.default_rng(0)
    z = rng.uniform(-3, 3, 4000) + 1j * rng.uniform(-3, 3, 4000)
    z = z[contains(state, z)]
    z = z[np.min(np.abs(z[:, None] - np.array([s.location for s in sinks])[None, :]), axis=1) > 1e-3]
    assert len(z) > 100
    assert np.all(sol(z) < 0)


def test_no_sinks_no_motion():
    traj = evolve(FamilyState("limacon", (0.2, 1.0)), [], 0.5, steps=5)
    assert all(s.params == (0.2, 1.0) for s in traj.states)
    sample = boundary_sample(traj.states[0], 64)
    assert np.max(np.abs(normal_velocity(traj, T, H, sample))) <= 1e-12
    sol = solve_pressure(sample, [], 32)
    assert np.max(np.abs(sol(np.array([0.1, 0.2j])))) <= 1e-12


@pytest.mark.parametrize("name", sorted(CASES))
def test_darcy_and_evolution_law_residuals(name):
    traj = _traj(name)
    pts = CASES[name][2]
    assert darcy_residual(traj, T, H) <= 1e-3
    assert evolution_law_residual(traj, T, H, pts) <= 1e-3


def test_disk_residuals_tight():
    traj = _traj("disk")
    assert evolution_law_residual(traj, T, H, CASES["disk"][2]) <= 1e-6
    assert darcy_residual(traj, T, H) <= 1e-6


def test_ellipse_residuals():
    traj = evolve(FamilyState("ellipse", (2.0, 1.0)), [SinkSpec("infinity", 1.0)], 1.0, steps=4)
    assert darcy_residual(traj, 0.5, H) <= 1e-3
    assert evolution_law_residual(traj, 0.5, H, [3 + 1j, -4j, 5]) <= 1e-6


@pytest.mark.parametrize("name", ["limacon", "neumann"])
def test_evolution_law_residual_is_second_order(name):
    traj = _traj(name)
    pts = CASES[name][2]
    r = [evolution_law_residual(traj, T, h, pts) for h in (4e-2, 2e-2, 1e-2)]
    for coarse, fine in zip(r, r[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_darcy_residual_is_second_order_above_collocation_floor():
    traj = _traj("limacon")
    r = [darcy_residual(traj, T, h) for h in (4e-2, 2e-2, 1e-2)]
    for coarse, fine in zip(r, r[1:]):
        assert 3.5 <= coarse / fine <= 4.5


@pytest.mark.parametrize("name", ["limacon", "neumann"])
def test_sensitivity_to_frozen_coefficient(name):
    traj = _traj(name)
    pts = CASES[name][2]
    key = next(iter(traj.frozen_constraints))
    base = evolution_law_residual(traj, T, H, pts)
    bent = evolution_law_residual(perturb_frozen(traj, key, 1e-2), T, H, pts)
    assert bent >= 10 * base
    assert darcy_residual(perturb_frozen(traj, key, 1e-2), T, H) >= 10 * darcy_residual(traj, T, H)


def test_test_points_must_be_inside():
    with pytest.raises(DomainError):
        evolution_law_residual(_traj("disk"), T, H, [2.0])


def test_verification_report_fields():
    rep = verification_report(_traj("disk"), T, H, CASES["disk"][2], count=64, n_sources=32)
    assert set(rep) >= {"darcy_residual", "evolution_law_residual", "collocation_residual"}
    assert rep["collocation_residual"] <= 1e-10

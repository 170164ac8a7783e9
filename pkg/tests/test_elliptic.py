import math

import numpy as np
import pytest

from schwarzflow.darcy import solve_pressure
from schwarzflow.dynamics import SinkSpec, evolve
from schwarzflow.errors import DomainError, UnsupportedFamilyError
from schwarzflow.families import FamilyState, boundary_sample
from schwarzflow.karp import karp_integrand
from schwarzflow.elliptic import (
    MediumSpec,
    characteristic_indicator,
    counterexample_singularity,
    elliptic_darcy_residual,
    elliptic_pressure,
    elliptic_residual,
    generalized_potential_dz,
    locate_blowup,
    multipole_generated,
    poisson_profile,
    singular_coefficients,
)

PLANAR = MediumSpec("planar_alpha_one")
MEDIA = [
    PLANAR,
    MediumSpec("laplace"),
    MediumSpec("counterexample"),
    *(MediumSpec("axisym_power", m=m) for m in (-4, -1, 0, 1, 2, 3)),
]
RNG = np.random.default_rng(11)
XS, YS = RNG.uniform(-2, 2, 50), RNG.uniform(0.2, 2, 50)
DISK = evolve(FamilyState("disk", (1.0,)), [SinkSpec(0, 1.0)], 0.5, steps=10)
PTS = [0.2, 0.3j, -0.1 - 0.2j]


@pytest.mark.parametrize("medium", MEDIA, ids=lambda m: f"{m.kind}{'' if m.m is None else m.m}")
def test_derived_profiles_solve_the_poisson_equation(medium):
    prof = poisson_profile(medium)
    assert prof.satisfies
    assert np.max(np.abs(prof.residual(XS, YS))) <= 1e-10


def test_printed_profiles_flagged():
    assert not poisson_profile(PLANAR, "printed").satisfies
    assert poisson_profile(MediumSpec("laplace"), "printed").satisfies
    for m in (1, 2, 3, -2, -3):
        assert not poisson_profile(MediumSpec("axisym_power", m=m), "printed").satisfies
    # the printed planar profile misses the source by 10 x^2
    res = poisson_profile(PLANAR, "printed").residual(XS, YS)
    np.testing.assert_allclose(res, 10 * XS**2, atol=1e-10)


def test_radial_profile_only_for_m_two():
    prof = poisson_profile(MediumSpec("axisym_power", m=2), "radial")
    assert prof.to_dict()["q"] == "x**2/8 + y**2/8"
    with pytest.raises(ValueError):
        poisson_profile(MediumSpec("axisym_power", m=1), "radial")
    with pytest.raises(ValueError):
        poisson_profile(PLANAR, "nope")


def test_medium_validation():
    with pytest.raises(ValueError):
        MediumSpec("axisym_power")
    with pytest.raises(ValueError):
        MediumSpec("granite")
    assert MediumSpec("counterexample").m == -2
    assert str(MediumSpec("counterexample").alpha) == "y**2"


@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 1.0])
def test_worked_example_singular_terms(t):
    s = 1 - t
    dz = generalized_potential_dz(lambda z: s / z, PLANAR, "printed")
    c = singular_coefficients(dz, max_order=6)
    expect = [(5 - 8 * t + 3 * t * t) / 4, 0, (1 - 3 * t + 3 * t * t - t**3) / 4, 0, 0, 0]
    assert np.max(np.abs(np.subtract(c, expect))) <= 1e-10


def test_derived_profile_singular_terms():
    s = 0.6
    c = singular_coefficients(generalized_potential_dz(lambda z: s / z, PLANAR), max_order=4)
    np.testing.assert_allclose(c, [(s * s + 4 * s) / 8, 0, s**3 / 24, 0], atol=1e-12)


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_multipole_order_bound(m, k):
    S = lambda z: 0.5 / z**k + 0.2 * z
    bound = k * (m + 2)
    medium = MediumSpec("axisym_power", m=m)
    printed = singular_coefficients(generalized_potential_dz(S, medium, "printed"), max_order=bound + 4)
    assert abs(printed[bound - 1]) > 1e-6  # the bound is attained
    assert max(abs(c) for c in printed[bound:]) <= 1e-9
    derived = singular_coefficients(generalized_potential_dz(S, medium), max_order=bound + 4)
    assert max(abs(c) for c in derived[k * m:]) <= 1e-9


def test_m_two_radial_matches_karp_integrand():
    S = lambda z: 0.5 / z**2 + 0.3 / z
    dz = generalized_potential_dz(S, MediumSpec("axisym_power", m=2), "radial")
    z = np.array([0.3 + 0.4j, 1 + 1j, -0.7 + 0.2j])
    np.testing.assert_allclose(dz(z), karp_integrand(S)(z) / 8, atol=1e-14)


def test_counterexample_double_pole():
    a, r = 2.0, 1.0
    dz = generalized_potential_dz(FamilyState("offset_circle", (r, a)), MediumSpec("counterexample"))
    p = counterexample_singularity(a, r)
    assert p == pytest.approx(1j * math.sqrt(3))
    assert abs(locate_blowup(dz, p + 0.05 + 0.03j) - p) <= 1e-10
    c = np.abs(singular_coefficients(dz, center=p, max_order=8, radius=0.3))
    assert c[1] > 1e-3
    assert c[2:].max() <= 1e-9
    # closed form of the leading term: -2i / (z - S)^2 has 2nd-order coefficient -2i / (1 - S'(p))^2
    Sp = -r * r / (p - 1j * a) ** 2
    assert abs(singular_coefficients(dz, center=p, max_order=2, radius=0.3)[1] + 2j / (1 - Sp) ** 2) <= 1e-10


def test_counterexample_domain_error():
    with pytest.raises(DomainError):
        counterexample_singularity(1.0, 1.5)


def test_counterexample_singularity_drifts_under_laplacian_growth():
    traj = evolve(FamilyState("offset_circle", (1.0, 2.0)), [SinkSpec(2j, 0.5)], 0.5, steps=5)
    a = traj.states[0].params[1]
    rs = [s.params[0] for s in traj.states]
    assert not multipole_generated([a] * len(rs), rs)
    locs = [counterexample_singularity(a, r) for r in rs]
    assert abs(locs[-1] - locs[0]) > 1e-2


def test_constant_offset_family_generates_fixed_multipole():
    c = 3.0
    rs = np.linspace(1.0, 0.5, 6)
    as_ = np.sqrt(c + rs**2)
    assert multipole_generated(as_, rs)
    locs = {counterexample_singularity(a, r) for a, r in zip(as_, rs)}
    assert max(abs(l - 1j * math.sqrt(c)) for l in locs) <= 1e-14


@pytest.mark.parametrize("variant", ["derived", "printed"])
def test_evolution_residual_second_order(variant):
    r = [elliptic_residual(DISK, PLANAR, PTS, h, t=0.25, variant=variant) for h in (4e-3, 2e-3, 1e-3)]
    assert r[-1] <= 1e-6
    for coarse, fine in zip(r, r[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_laplace_medium_reduces_to_hele_shaw_pressure():
    st = DISK.state_at(0.25)
    P = elliptic_pressure(DISK, MediumSpec("laplace"), 0.25)
    ref = solve_pressure(boundary_sample(st, 64), DISK.sinks, 32)
    z = np.array([0.2, 0.3j, -0.5 + 0.1j])
    np.testing.assert_allclose(P(z), ref(z), atol=1e-10)
    assert elliptic_residual(DISK, MediumSpec("laplace"), PTS, 1e-3, t=0.25) <= 1e-6


def test_darcy_separates_the_profiles():
    assert elliptic_darcy_residual(DISK, PLANAR, 0.25, "derived") <= 1e-12
    assert elliptic_darcy_residual(DISK, PLANAR, 0.25, "printed") > 1.0


def test_elliptic_residual_needs_disk_and_interior_points():
    with pytest.raises(DomainError):
        elliptic_residual(DISK, PLANAR, [0.99], 1e-3, t=0.25)
    limacon = evolve(FamilyState("limacon", (0.2, 1.0)), [SinkSpec(0, 1.0)], 0.5, steps=5)
    with pytest.raises(UnsupportedFamilyError):
        elliptic_residual(limacon, PLANAR, [0.1], 1e-3, t=0.25)


def test_characteristic_indicator_nonvanishing():
    ind = characteristic_indicator(FamilyState("disk", (1.0,)), PLANAR)
    assert np.min(np.abs(ind)) > 1e-3
    off_axis = characteristic_indicator(FamilyState("offset_circle", (0.5, 2.0)), MediumSpec("counterexample"))
    assert np.min(np.abs(off_axis)) > 1e-3
    # alpha = y^2 vanishes where a curve meets the axis
    touching = characteristic_indicator(FamilyState("disk", (1.0,)), MediumSpec("axisym_power", m=1), count=8)
    assert np.min(np.abs(touching)) <= 1e-12


def test_profile_serialisation():
    d = poisson_profile(PLANAR, "printed").to_dict()
    assert d["satisfies"] is False and d["variant"] == "printed"
    assert poisson_profile(PLANAR).tag.startswith("planar_alpha_one:derived:")


def test_blowup_locator_ignores_nearby_zeros():
    # the circle centre 3i is a zero of dz only 0.04 from the pole
    a, r = 3.0, 0.5
    dz = generalized_potential_dz(FamilyState("offset_circle", (r, a)), MediumSpec("counterexample"))
    p = counterexample_singularity(a, r)
    assert abs(dz(3j + 1e-9)) < 1e-6
    assert abs(locate_blowup(dz, p + 0.05 + 0.03j) - p) <= 1e-10


@pytest.mark.parametrize("order", [1, 2, 3])
def test_blowup_locator_any_order(order):
    p = 0.3 - 0.7j
    f = lambda z: np.exp(z) / (z - p) ** order + z**2
    assert abs(locate_blowup(f, p + 0.1) - p) <= 1e-8

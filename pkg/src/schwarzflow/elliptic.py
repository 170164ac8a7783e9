"""Generalized Schwarz potentials for elliptic growth.

For a medium with filtration ``lam`` and porosity ``rho`` the potential ``u``
solves ``div(lam rho grad u) = 0`` near the boundary with Cauchy data ``q``,
where ``div(lam rho grad q) = n rho``. When ``lam rho`` is 1 the potential
is harmonic; when it is ``y^2`` the product ``V = y u`` is harmonic. In both
cases ``d/dz`` of the harmonic function is analytic and equals
``(g_x - i g_y) / 2`` evaluated at ``x = (z + S)/2, y = (z - S)/2i``, with
``g = q`` or ``g = y q`` respectively.

Two sets of Poisson profiles are carried. ``derived`` profiles satisfy the
Poisson equation exactly. ``printed`` profiles are the closed forms as printed
in the source literature; they do not all satisfy it, and
:attr:`PoissonProfile.satisfies` says which do.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy as sp

from .dynamics import Trajectory
from .errors import DomainError, UnsupportedFamilyError
from .families import FamilyId, FamilyState, boundary_sample, contains, defining_gradient, schwarz_function
from .numerics import laurent_coefficient, least_squares

X, Y = sp.symbols("x y", real=True)

KINDS = ("planar_alpha_one", "axisym_power", "counterexample", "laplace")
VARIANTS = ("derived", "printed", "radial")


@dataclass(frozen=True)
class MediumSpec:
    """Filtration/porosity pair. ``m`` is only used by ``axisym_power``."""

    kind: str
    m: int | None = None
    dimension: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown medium kind {self.kind!r}")
        if self.kind == "axisym_power" and self.m is None:
            raise ValueError("axisym_power needs an integer m")
        if self.kind == "counterexample":
            object.__setattr__(self, "m", -2)

    @property
    def power(self) -> int | None:
        return self.m if self.kind in ("axisym_power", "counterexample") else None

    @property
    def lam(self):
        if self.kind == "planar_alpha_one":
            return 1 / (X**2 + 1)
        if self.kind == "laplace":
            return sp.Integer(1)
        return Y ** (2 - self.m)

    @property
    def rho(self):
        if self.kind == "planar_alpha_one":
            return X**2 + 1
        if self.kind == "laplace":
            return sp.Integer(1)
        return Y**self.m

    @property
    def alpha(self):
        return sp.simplify(self.lam * self.rho)

    @property
    def axisymmetric(self) -> bool:
        return self.kind in ("axisym_power", "counterexample")


def _derived_q(medium: MediumSpec):
    n = medium.dimension
    if medium.kind == "planar_alpha_one":
        # q_xx = n (x^2 + 1)
        return sp.Rational(n, 12) * X**4 + sp.Rational(n, 2) * X**2
    if medium.kind == "laplace":
        return sp.Rational(n, 4) * (X**2 + Y**2)
    m = medium.m
    # (y^2 q')' = n y^m with q depending on y only
    if m == 0:
        return n * sp.log(Y)
    if m == -1:
        return -n * (sp.log(Y) + 1) / Y
    return sp.Rational(n, m * (m + 1)) * Y**m


def _printed_q(medium: MediumSpec, variant: str):
    if medium.kind == "planar_alpha_one":
        return X**4 + X**2
    if medium.kind == "laplace":
        return (X**2 + Y**2) / 2
    m = medium.m
    if variant == "radial":
        if m != 2:
            raise ValueError("the radial profile exists only for m = 2")
        return (X**2 + Y**2) / 8
    # printed power law; its exponents vanish at m = -2, -3
    if m == -2:
        return sp.log(Y)
    if m == -3:
        return -(sp.log(Y) + 1) / Y
    return Y ** (m + 2) / ((m + 2) * (m + 3))


@dataclass(frozen=True)
class PoissonProfile:
    """Closed-form ``q`` with the source term it actually produces."""

    medium: MediumSpec
    variant: str
    expr: sp.Expr

    @cached_property
    def source(self) -> sp.Expr:
        """``div(lam rho grad q)`` computed symbolically."""
        a = self.medium.alpha
        return sp.simplify(sp.diff(a * sp.diff(self.expr, X), X) + sp.diff(a * sp.diff(self.expr, Y), Y))

    @property
    def target(self) -> sp.Expr:
        return self.medium.dimension * self.medium.rho

    @cached_property
    def satisfies(self) -> bool:
        return sp.simplify(self.source - self.target) == 0

    def residual(self, x, y):
        """Pointwise ``div(lam rho grad q) - n rho``."""
        f = sp.lambdify((X, Y), self.source - self.target, "numpy")
        return np.asarray(f(np.asarray(x, float), np.asarray(y, float)), dtype=float) * np.ones(np.shape(x))

    def q(self, x, y):
        return sp.lambdify((X, Y), self.expr, "numpy")(x, y)

    @property
    def tag(self) -> str:
        return f"{self.medium.kind}:{self.variant}:{sp.sstr(self.expr)}"

    @property
    def carrier(self) -> sp.Expr:
        """Function whose Cauchy continuation is harmonic: ``q`` or ``y q``."""
        return Y * self.expr if self.medium.axisymmetric else self.expr

    @cached_property
    def _dz_symbolic(self):
        g = self.carrier
        return sp.simplify((sp.diff(g, X) - sp.I * sp.diff(g, Y)) / 2)

    def dz_carrier(self, x, y):
        """``(g_x - i g_y) / 2`` at (possibly complex) ``x, y``."""
        f = sp.lambdify((X, Y), self._dz_symbolic, "numpy")
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return np.asarray(f(x, y), dtype=complex) * np.ones(np.broadcast(x, y).shape)

    def to_dict(self) -> dict:
        return {
            "medium": self.medium.kind,
            "m": self.medium.m,
            "variant": self.variant,
            "q": sp.sstr(self.expr),
            "source": sp.sstr(self.source),
            "satisfies": bool(self.satisfies),
        }


def poisson_profile(medium: MediumSpec, variant: str = "derived") -> PoissonProfile:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    expr = _derived_q(medium) if variant == "derived" else _printed_q(medium, variant)
    return PoissonProfile(medium, variant, expr)


# ---------------------------------------------------------------------------
# generalized potential


def _schwarz_of(source):
    if isinstance(source, FamilyState):
        return schwarz_function(source)
    if callable(source):
        return source
    raise TypeError("expected a FamilyState or a Schwarz-function evaluator")


def generalized_potential_dz(source, medium: MediumSpec, variant: str = "derived"):
    """Analytic continuation of ``d/dz`` of the harmonic carrier.

    ``source`` is a :class:`FamilyState` or any evaluator of ``S(z)``.
    """
    prof = poisson_profile(medium, variant)
    S = _schwarz_of(source)

    def dz(z):
        z = np.asarray(z, dtype=complex)
        s = np.asarray(S(z), dtype=complex)
        out = prof.dz_carrier((z + s) / 2, (z - s) / 2j)
        return out if out.ndim else complex(out)

    dz.profile = prof
    return dz


def singular_coefficients(dz, center=0j, max_order=6, radius=0.5, tol=1e-11):
    """``c_-1 .. c_-max_order`` of ``dz`` about ``center``."""
    return [laurent_coefficient(dz, center, -k, radius=radius, tol=tol) for k in range(1, max_order + 1)]


def counterexample_singularity(a: float, r: float) -> complex:
    """Singular point ``i sqrt(a^2 - r^2)`` for the circle of radius ``r`` centred at ``ai``."""
    if not a > r > 0:
        raise DomainError("need a > r > 0 (circle must avoid the axis)")
    return 1j * math.sqrt(a * a - r * r)


def multipole_generated(a_values, r_values, tol=1e-12) -> bool:
    """True when ``a^2 - r^2`` is constant along the sampled trajectory."""
    c = np.asarray(a_values, float) ** 2 - np.asarray(r_values, float) ** 2
    return bool(np.all(np.abs(c - c[0]) <= tol * max(1.0, abs(c[0]))))


def locate_blowup(f, guess: complex, tol: float = 1e-11, maxiter: int = 60) -> complex:
    """Pole of ``f`` near ``guess``.

    ``f / f'`` vanishes at zeros as well as poles of ``f``. Newton's method
    on ``1 / f``, i.e. ``z += f / f'``, is attracted only to poles (linearly
    for a pole of order ``k``, with ratio ``1 - 1/k``), so it runs first;
    a secant iteration on ``f / f'`` then converges superlinearly. The size
    of ``f / f'`` is roughly the distance to the pole and sets the
    finite-difference step for ``f'``.
    """
    def phi(z, scale):
        step = 1e-4 * scale
        try:
            with np.errstate(all="ignore"):
                v = complex(f(z))
                d = (complex(f(z + step)) - complex(f(z - step))) / (2 * step)
        except ZeroDivisionError:
            return 0j  # landed on the pole
        if not cmath.isfinite(v):
            return 0j
        return v / d if d != 0 and cmath.isfinite(d) else 0j

    z1 = complex(guess)
    scale = 1.0
    for _ in range(maxiter):
        p = phi(z1, scale)
        z1 = z1 + p
        scale = max(min(1.0, abs(p)), 1e-9)
        if abs(p) <= 1e-3 * max(1.0, abs(z1)):
            break

    z0 = z1
    p0 = phi(z0, scale)
    z1 = z0 + 0.5 * p0
    p1 = phi(z1, max(min(1.0, abs(p0)), 1e-9))
    best = min((abs(p0), z0), (abs(p1), z1), key=lambda t: t[0])
    for _ in range(maxiter):
        if p1 == p0:
            break
        z2 = z1 - p1 * (z1 - z0) / (p1 - p0)
        if abs(z2 - z1) <= tol * max(1.0, abs(z2)):
            return z2
        z0, p0 = z1, p1
        z1 = z2
        p1 = phi(z1, max(min(1.0, abs(p0)), 1e-9))
        if abs(p1) < best[0]:
            best = (abs(p1), z1)
    return best[1]


# ---------------------------------------------------------------------------
# residual of the elliptic evolution law on the disk family


def _laurent(dz, radius, lo, hi):
    return {n: laurent_coefficient(dz, 0j, n, radius=radius) for n in range(lo, hi + 1)}


@dataclass(frozen=True)
class _DiskPotential:
    """``u = 2 Re G + C`` for a centred disk, ``G`` a primitive of ``dz``."""

    coeffs: dict
    constant: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        G = np.zeros_like(z)
        for n, c in self.coeffs.items():
            G = G + (c * np.log(z) if n == -1 else c * z ** (n + 1) / (n + 1))
        return 2 * np.real(G) + self.constant


def _disk_potential(state: FamilyState, medium: MediumSpec, variant: str, span: int = 8) -> _DiskPotential:
    if state.family is not FamilyId.DISK or medium.axisymmetric:
        raise UnsupportedFamilyError("closed-form u is available for planar media over the disk family")
    dz = generalized_potential_dz(state, medium, variant)
    r = state.params[0]
    coeffs = _laurent(dz, r, -span, span)
    coeffs = {n: c for n, c in coeffs.items() if abs(c) > 1e-14 * max(1.0, r ** -n)}
    prof = dz.profile
    u0 = _DiskPotential(coeffs, 0.0)
    const = float(prof.q(r, 0.0)) - float(u0(r))
    return _DiskPotential(coeffs, const)


def _singular_profile(medium: MediumSpec, variant: str):
    """Principal part of ``dz`` about 0 for ``S = s / z``, as polynomials in ``s``."""
    z, s = sp.symbols("z s")
    prof = poisson_profile(medium, variant)
    S = s / z
    expr = prof._dz_symbolic.subs({X: (z + S) / 2, Y: (z - S) / (2 * sp.I)}, simultaneous=True)
    expr = sp.expand(expr)
    out = {}
    for k in range(1, 12):
        c = sp.expand(expr.coeff(z, -k))
        if c != 0:
            out[k] = sp.lambdify(s, sp.diff(c, s), "numpy")
    return out


@dataclass(frozen=True)
class EllipticPressure:
    """Pressure ``P = P_sing + h`` with ``h`` a harmonic polynomial fitted so ``P = 0`` on the circle."""

    dzsing: dict  # order -> d(coefficient)/dt
    harmonic: np.ndarray  # coefficients of Re z^k, Im z^k
    degree: int
    n: int

    def _basis(self, z):
        cols = [np.ones(z.shape)]
        for k in range(1, self.degree + 1):
            cols += [np.real(z**k), np.imag(z**k)]
        return np.stack(cols, axis=-1)

    def singular(self, z):
        z = np.asarray(z, dtype=complex)
        G = np.zeros_like(z)
        for k, c in self.dzsing.items():
            G = G + (c * np.log(z) if k == 1 else c * z ** (1 - k) / (1 - k))
        return -2 * np.real(G) / self.n

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.singular(z) + self._basis(z) @ self.harmonic

    def dz(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in self.dzsing.items():
            out = out - c * z ** (-k) / self.n
        for k in range(1, self.degree + 1):
            a, b = self.harmonic[2 * k - 1], self.harmonic[2 * k]
            # d/dz (a Re z^k + b Im z^k) = k z^(k-1) (a - i b) / 2
            out = out + k * z ** (k - 1) * (a - 1j * b) / 2
        return out


def elliptic_pressure(traj: Trajectory, medium: MediumSpec, t: float, variant: str = "derived",
                      degree: int = 8, samples: int = 64) -> EllipticPressure:
    """Pressure implied by the prescribed singular terms at time ``t``."""
    state = traj.state_at(t)
    if state.family is not FamilyId.DISK:
        raise UnsupportedFamilyError("elliptic pressure is implemented for the disk family")
    s = state.params[0] ** 2
    dsdt = (traj.physical_at(t + 1.0) - traj.physical_at(t))  # linear law
    rates = {k: complex(f(s)) * dsdt for k, f in _singular_profile(medium, variant).items()}
    n = medium.dimension
    blank = EllipticPressure(rates, np.zeros(2 * degree + 1), degree, n)
    bs = boundary_sample(state, samples)
    fit = least_squares(blank._basis(bs.points), -blank.singular(bs.points))
    return EllipticPressure(rates, fit.coefficients, degree, n)


def elliptic_residual(traj: Trajectory, medium: MediumSpec, test_points, h: float, t: float | None = None,
                      variant: str = "derived") -> float:
    """``max |u_t + n P|`` over ``test_points``, with ``u_t`` by central differences."""
    if t is None:
        t = float(np.mean(traj.times))
    z = np.atleast_1d(np.asarray(test_points, dtype=complex))
    for tt in (t - h, t + h):
        if not np.all(contains(traj.state_at(tt), z)):
            raise DomainError("test point outside the oil domain")
    up = _disk_potential(traj.state_at(t + h), medium, variant)
    um = _disk_potential(traj.state_at(t - h), medium, variant)
    ut = (up(z) - um(z)) / (2 * h)
    P = elliptic_pressure(traj, medium, t, variant)
    return float(np.max(np.abs(ut + medium.dimension * P(z))))


def elliptic_darcy_residual(traj: Trajectory, medium: MediumSpec, t: float, variant: str = "derived",
                            count: int = 64) -> float:
    """``max |v_n + lam dP/dn| / max |v_n|`` on the circle at time ``t``."""
    state = traj.state_at(t)
    bs = boundary_sample(state, count)
    P = elliptic_pressure(traj, medium, t, variant)
    r = state.params[0]
    vn = (traj.physical_at(t + 1.0) - traj.physical_at(t)) / (2 * r)
    lam = sp.lambdify((X, Y), medium.lam, "numpy")
    dPdn = 2 * np.real(P.dz(bs.points) * bs.normals)
    lam_v = np.asarray(lam(bs.points.real, bs.points.imag), float) * np.ones(count)
    return float(np.max(np.abs(vn + lam_v * dPdn)) / abs(vn))


def characteristic_indicator(state: FamilyState, medium: MediumSpec, count: int = 64) -> np.ndarray:
    """``grad(alpha) . grad(phi) + alpha |grad phi|^2`` on boundary samples.

    ``phi`` is the family's defining polynomial; the value is scale dependent,
    only its vanishing matters.
    """
    bs = boundary_sample(state, count)
    x, y = bs.points.real, bs.points.imag
    a = medium.alpha
    ax = sp.lambdify((X, Y), sp.diff(a, X), "numpy")
    ay = sp.lambdify((X, Y), sp.diff(a, Y), "numpy")
    av = sp.lambdify((X, Y), a, "numpy")
    gx, gy = defining_gradient(state, x, y)
    ones = np.ones_like(x)
    return ax(x, y) * ones * gx + ay(x, y) * ones * gy + av(x, y) * ones * (gx * gx + gy * gy)

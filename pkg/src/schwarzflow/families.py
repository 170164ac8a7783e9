"""Curve families with closed-form Schwarz functions.

Each family is identified by a :class:`FamilyId` and carries a fixed
parameter vector:

============== ================ =====================================
family         params           curve
============== ================ =====================================
disk           (r,)             ``|z| = r``
limacon        (a, b)           image of ``|w| = 1`` under ``a w^2 + b w``
neumann_oval   (a, eps)         ``(x^2+y^2)^2 = a^2 (x^2+y^2) + 4 eps^2 x^2``
ellipse        (a, b)           ``x^2/a^2 + y^2/b^2 = 1`` (exterior domain)
offset_circle  (R, center)      ``|z - i center| = R``
============== ================ =====================================

The physical domain is the bounded interior for every family except the
ellipse, whose physical domain is the unbounded exterior.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import SingularPointError, UnsupportedFamilyError
from .numerics import principal_part


class FamilyId(str, enum.Enum):
    DISK = "disk"
    LIMACON = "limacon"
    NEUMANN_OVAL = "neumann_oval"
    ELLIPSE = "ellipse"
    OFFSET_CIRCLE = "offset_circle"


PARAM_NAMES = {
    FamilyId.DISK: ("r",),
    FamilyId.LIMACON: ("a", "b"),
    FamilyId.NEUMANN_OVAL: ("a", "eps"),
    FamilyId.ELLIPSE: ("a", "b"),
    FamilyId.OFFSET_CIRCLE: ("R", "center"),
}

CONSTRAINTS = {
    FamilyId.DISK: "r > 0",
    FamilyId.LIMACON: "b > 2a > 0",
    FamilyId.NEUMANN_OVAL: "a > 0, eps > 0",
    FamilyId.ELLIPSE: "a > b > 0",
    FamilyId.OFFSET_CIRCLE: "center > R > 0",
}


def _valid(family, p):
    if family is FamilyId.DISK:
        return p[0] > 0
    if family is FamilyId.LIMACON:
        a, b = p
        return b > 2 * a > 0
    if family is FamilyId.NEUMANN_OVAL:
        return p[0] > 0 and p[1] > 0
    if family is FamilyId.ELLIPSE:
        return p[0] > p[1] > 0
    if family is FamilyId.OFFSET_CIRCLE:
        return p[1] > p[0] > 0
    raise UnsupportedFamilyError(family)


@dataclass(frozen=True)
class FamilyState:
    """One point on an evolution: family, parameters and time."""

    family: FamilyId
    params: tuple
    time: float = 0.0

    def __post_init__(self):
        fam = FamilyId(self.family)
        object.__setattr__(self, "family", fam)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "time", float(self.time))
        if len(params) != len(PARAM_NAMES[fam]):
            raise ValueError(f"{fam.value} takes parameters {PARAM_NAMES[fam]}, got {params}")
        if not _valid(fam, params):
            raise ValueError(f"{fam.value} parameters {params} violate {CONSTRAINTS[fam]}")

    @property
    def named(self) -> dict:
        return dict(zip(PARAM_NAMES[self.family], self.params))

    def to_dict(self) -> dict:
        return {"family": self.family.value, "params": self.named, "time": self.time}

    @classmethod
    def from_dict(cls, data) -> "FamilyState":
        fam = FamilyId(data["family"])
        params = data["params"]
        if isinstance(params, dict):
            params = [params[name] for name in PARAM_NAMES[fam]]
        return cls(fam, tuple(params), data.get("time", 0.0))


def catalog() -> list[dict]:
    """Family ids with parameter names and validity constraints."""
    return [
        {"family": fam.value, "params": list(PARAM_NAMES[fam]), "constraint": CONSTRAINTS[fam]}
        for fam in FamilyId
    ]


# ---------------------------------------------------------------------------
# helpers shared by several families


def neumann_map_radius(a, eps=1.0, tol=1e-12) -> float:
    """Pole radius ``R`` of the rational map onto the Neumann oval.

    The map ``eps (R^4-1) xi / (R (R^2 - xi^2))`` sends ``xi = 1`` to the
    axis crossing ``sqrt(a^2 + 4 eps^2)``; ``R`` solves that matching
    condition.
    """
    target = math.sqrt((a / eps) ** 2 + 4.0)
    return brentq(lambda R: (R * R + 1.0) / R - target, 1.0, target + 1.0, xtol=tol, rtol=1e-15)


def _neumann_branch_height(a, eps):
    return a * math.sqrt(a * a + 4 * eps * eps) / (2 * eps)


def _limacon_inverse(a, b, z):
    # principal sqrt; cut on (-inf, -b^2/4a] lies outside the domain
    root = np.sqrt(b * b + 4 * a * z)
    return 2 * z / (b + root)


def schwarz_function(state: FamilyState):
    """Vectorised closed-form Schwarz function of ``state`` (no checks)."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        r2 = p[0] ** 2
        return lambda z: r2 / np.asarray(z, dtype=complex)
    if fam is FamilyId.LIMACON:
        a, b = p

        def S(z):
            w = _limacon_inverse(a, b, np.asarray(z, dtype=complex))
            return a / w**2 + b / w

        return S
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        c = _neumann_branch_height(a, eps)
        lead = a * a + 2 * eps * eps

        def S(z):
            z = np.asarray(z, dtype=complex)
            # cuts run from +-ic outward along the imaginary axis
            root = np.sqrt(c + 1j * z) * np.sqrt(c - 1j * z)
            return z * (lead + 2 * eps * root) / (2 * (z * z - eps * eps))

        return S
    if fam is FamilyId.ELLIPSE:
        a, b = p
        c = math.sqrt(a * a - b * b)

        def S(z):
            z = np.asarray(z, dtype=complex)
            root = np.sqrt(z - c) * np.sqrt(z + c)
            return ((a * a + b * b) * z - 2 * a * b * root) / (a * a - b * b)

        return S
    if fam is FamilyId.OFFSET_CIRCLE:
        R, h = p
        return lambda z: R * R / (np.asarray(z, dtype=complex) - 1j * h) - 1j * h
    raise UnsupportedFamilyError(fam)


def branch_points(state: FamilyState) -> list[complex]:
    """All finite branch points of the closed-form Schwarz function."""
    fam = state.family
    if fam is FamilyId.LIMACON:
        a, b = state.params
        return [complex(-b * b / (4 * a))]
    if fam is FamilyId.NEUMANN_OVAL:
        c = _neumann_branch_height(*state.params)
        return [complex(0, -c), complex(0, c)]
    if fam is FamilyId.ELLIPSE:
        a, b = state.params
        c = math.sqrt(a * a - b * b)
        return [complex(-c), complex(c)]
    return []


# ---------------------------------------------------------------------------
# singularity inventory


@dataclass(frozen=True)
class Pole:
    location: complex
    order: int
    coefficients: tuple  # c_-1 .. c_-order


@dataclass(frozen=True)
class SingularityInventory:
    poles: tuple = ()
    branch_points: tuple = ()  # (location, exponent)
    log_segments: tuple = ()  # ((start, end), jump)

    def __post_init__(self):
        key = lambda loc: (complex(loc).real, complex(loc).imag)
        object.__setattr__(self, "poles", tuple(sorted(self.poles, key=lambda p: key(p.location))))
        object.__setattr__(self, "branch_points", tuple(sorted(self.branch_points, key=lambda b: key(b[0]))))
        for p in self.poles:
            if p.order < 1:
                raise ValueError("pole order must be >= 1")

    @property
    def locations(self) -> list[complex]:
        return [p.location for p in self.poles]

    def pole_at(self, location, tol=1e-12) -> Pole | None:
        for p in self.poles:
            if abs(p.location - location) <= tol * max(1.0, abs(location)):
                return p
        return None

    def principal_parts(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for p in self.poles:
            inv = 1.0 / (z - p.location)
            for k, c in enumerate(p.coefficients, start=1):
                out = out + c * inv**k
        return out

    def to_dict(self) -> dict:
        return {
            "poles": [
                {"location": [p.location.real, p.location.imag], "order": p.order,
                 "coefficients": [[c.real, c.imag] for c in p.coefficients]}
                for p in self.poles
            ],
            "branch_points": [{"location": [b.real, b.imag], "exponent": e} for b, e in self.branch_points],
            "log_segments": [
                {"endpoints": [[s.real, s.imag], [e.real, e.imag]], "jump": j} for (s, e), j in self.log_segments
            ],
        }


def singularities(state: FamilyState) -> SingularityInventory:
    """Singularities of the Schwarz function inside the physical domain."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return SingularityInventory((Pole(0j, 1, (complex(p[0] ** 2),)),))
    if fam is FamilyId.LIMACON:
        a, b = p
        S = schwarz_function(state)
        bps = branch_points(state)
        coeffs = principal_part(S, 0j, 2, others=bps)
        return SingularityInventory((Pole(0j, 2, coeffs),), tuple((b, 0.5) for b in bps))
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        res = complex((a * a + 2 * eps * eps) / 2)
        bps = tuple((b, 0.5) for b in branch_points(state))
        return SingularityInventory((Pole(complex(-eps), 1, (res,)), Pole(complex(eps), 1, (res,))), bps)
    if fam is FamilyId.ELLIPSE:
        return SingularityInventory((), tuple((b, 0.5) for b in branch_points(state)))
    if fam is FamilyId.OFFSET_CIRCLE:
        R, h = p
        return SingularityInventory((Pole(complex(0, h), 1, (complex(R * R),)),))
    raise UnsupportedFamilyError(fam)


def schwarz_eval(state: FamilyState, z):
    """Schwarz function of ``state`` at ``z``; rejects singular points."""
    inv = singularities(state)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    scale = max(1.0, *(abs(x) for x in state.params))
    for loc in inv.locations + branch_points(state):
        hit = np.abs(zz - loc) <= 1e-13 * scale
        if hit.any():
            raise SingularPointError(f"Schwarz function of {state.family.value} is singular at {loc}", inv)
    out = schwarz_function(state)(zz)
    return out if np.ndim(z) else complex(out[0])


# ---------------------------------------------------------------------------
# conformal maps


def conformal_map(state: FamilyState, w):
    """Map from the unit disk onto the domain; returns ``(z, dz/dw)``."""
    fam = state.family
    w = np.asarray(w, dtype=complex)
    if fam is FamilyId.DISK:
        r = state.params[0]
        return r * w, r * np.ones_like(w)
    if fam is FamilyId.LIMACON:
        a, b = state.params
        return a * w * w + b * w, 2 * a * w + b
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = state.params
        R = neumann_map_radius(a, eps)
        c = eps * (R**4 - 1) / R
        d = R * R - w * w
        return c * w / d, c * (R * R + w * w) / d**2
    raise UnsupportedFamilyError(f"no conformal map for {fam.value}")


class PolynomialMapSchwarz:
    """Schwarz function of the image of the unit disk under a real polynomial.

    ``coeffs`` are ``(c_1, c_2, ..., c_k)`` of ``f(w) = sum c_j w^j``. The
    inverse map is computed by Newton iteration from ``z / c_1``, which is
    reliable on the disks used for Laurent extraction near the origin.
    """

    def __init__(self, coeffs):
        self.coeffs = tuple(float(c) for c in coeffs)
        if not self.coeffs or self.coeffs[0] == 0:
            raise ValueError("need a nonzero linear coefficient")
        self.degree = len(self.coeffs)

    def map(self, w):
        w = np.asarray(w, dtype=complex)
        z = np.zeros_like(w)
        dz = np.zeros_like(w)
        for j, c in enumerate(self.coeffs, start=1):
            z = z + c * w**j
            dz = dz + j * c * w ** (j - 1)
        return z, dz

    def inverse(self, z):
        z = np.asarray(z, dtype=complex)
        w = z / self.coeffs[0]
        for _ in range(60):
            fz, dz = self.map(w)
            step = (fz - z) / dz
            w = w - step
            if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(w))):
                break
        return w

    def __call__(self, z):
        w = self.inverse(z)
        return sum(c * w ** (-j) for j, c in enumerate(self.coeffs, start=1))


def disk_schwarz_potential(r, x, n=2):
    """Schwarz potential of the sphere of radius ``r`` in ``R^n``.

    ``x`` is a complex point for ``n = 2`` and a distance from the origin
    otherwise.
    """
    if n == 2:
        return r * r * (np.log(np.abs(x)) + 0.5 - math.log(r))
    rho = np.abs(x)
    return -(r**n) / ((n - 2) * rho ** (n - 2)) + n * r * r / (2 * (n - 2))


# ---------------------------------------------------------------------------
# boundary geometry


@dataclass(frozen=True)
class BoundarySample:
    points: np.ndarray
    normals: np.ndarray  # complex unit vectors
    params: np.ndarray
    tangents: np.ndarray = field(repr=False, default=None)  # dz/dparam

    @property
    def xy(self):
        return np.column_stack([self.points.real, self.points.imag])

    def to_csv_rows(self):
        return [
            (p.real, p.imag, n.real, n.imag) for p, n in zip(self.points, self.normals)
        ]


def boundary_param(state: FamilyState, t):
    """Boundary point and derivative at parameter ``t`` (counter-clockwise)."""
    fam = state.family
    t = np.asarray(t, dtype=float)
    p = state.params
    e = np.exp(1j * t)
    if fam is FamilyId.DISK:
        return p[0] * e, 1j * p[0] * e
    if fam is FamilyId.LIMACON:
        a, b = p
        return a * e * e + b * e, 1j * e * (2 * a * e + b)
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        rho = np.sqrt(a * a + 4 * eps * eps * np.cos(t) ** 2)
        drho = -4 * eps * eps * np.cos(t) * np.sin(t) / rho
        return rho * e, (drho + 1j * rho) * e
    if fam is FamilyId.ELLIPSE:
        a, b = p
        return a * np.cos(t) + 1j * b * np.sin(t), -a * np.sin(t) + 1j * b * np.cos(t)
    if fam is FamilyId.OFFSET_CIRCLE:
        R, h = p
        return 1j * h + R * e, 1j * R * e
    raise UnsupportedFamilyError(fam)


def boundary_sample(state: FamilyState, count: int, half: bool = False) -> BoundarySample:
    """Points uniformly spaced in the curve parameter, with outward normals.

    Normals point out of the bounded region enclosed by the curve. With
    ``half=True`` only the closed upper half ``t in [0, pi]`` is sampled,
    which is the profile of the axisymmetric body.
    """
    if count < 4:
        raise ValueError("boundary sample needs count >= 4")
    if half:
        t = np.linspace(0.0, np.pi, count)
    else:
        t = 2 * np.pi * np.arange(count) / count
    z, dz = boundary_param(state, t)
    normals = -1j * dz / np.abs(dz)
    return BoundarySample(z, normals, t, dz)


def defining_polynomial(state: FamilyState, x, y):
    """Polynomial vanishing on the curve, negative inside the bounded region."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return x * x + y * y - p[0] ** 2
    if fam is FamilyId.LIMACON:
        a, b = p
        X = x + a
        rho2 = X * X + y * y
        return (rho2 - 2 * a * X) ** 2 - b * b * rho2
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        r2 = x * x + y * y
        return r2 * r2 - a * a * r2 - 4 * eps * eps * x * x
    if fam is FamilyId.ELLIPSE:
        a, b = p
        return x * x / (a * a) + y * y / (b * b) - 1
    if fam is FamilyId.OFFSET_CIRCLE:
        R, h = p
        return x * x + (y - h) ** 2 - R * R
    raise UnsupportedFamilyError(fam)


def defining_gradient(state: FamilyState, x, y):
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return 2 * x, 2 * y
    if fam is FamilyId.LIMACON:
        a, b = p
        X = x + a
        q = X * X + y * y - 2 * a * X
        return 2 * q * (2 * X - 2 * a) - 2 * b * b * X, 4 * q * y - 2 * b * b * y
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        r2 = x * x + y * y
        return 4 * x * r2 - 2 * a * a * x - 8 * eps * eps * x, 4 * y * r2 - 2 * a * a * y
    if fam is FamilyId.ELLIPSE:
        a, b = p
        return 2 * x / (a * a), 2 * y / (b * b)
    if fam is FamilyId.OFFSET_CIRCLE:
        R, h = p
        return 2 * x, 2 * (y - h)
    raise UnsupportedFamilyError(fam)


def contains(state: FamilyState, z) -> np.ndarray:
    """True where ``z`` lies in the open physical domain."""
    fam = state.family
    z = np.asarray(z, dtype=complex)
    p = state.params
    if fam is FamilyId.DISK:
        return np.abs(z) < p[0]
    if fam is FamilyId.LIMACON:
        return np.abs(_limacon_inverse(p[0], p[1], z)) < 1
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        phi = np.angle(z)
        return np.abs(z) ** 2 < a * a + 4 * eps * eps * np.cos(phi) ** 2
    if fam is FamilyId.ELLIPSE:
        return defining_polynomial(state, z.real, z.imag) > 0
    if fam is FamilyId.OFFSET_CIRCLE:
        return np.abs(z - 1j * p[1]) < p[0]
    raise UnsupportedFamilyError(fam)


def enclosed_area(state: FamilyState) -> float:
    """Area of the bounded region enclosed by the curve (closed form)."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return math.pi * p[0] ** 2
    if fam is FamilyId.LIMACON:
        return math.pi * (p[1] ** 2 + 2 * p[0] ** 2)
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        # integral of r(phi)^2 / 2 over a full turn
        return math.pi * (a * a + 2 * eps * eps)
    if fam is FamilyId.ELLIPSE:
        return math.pi * p[0] * p[1]
    if fam is FamilyId.OFFSET_CIRCLE:
        return math.pi * p[0] ** 2
    raise UnsupportedFamilyError(fam)


def area_moment(state: FamilyState, n: int, samples: int = 1024) -> complex:
    """``integral of z^n dA`` over the bounded region, by the boundary integral.

    Uses ``(1 / 2i) * contour integral of z^n conj(z) dz`` with the periodic
    trapezoidal rule on the curve parameterisation.
    """
    t = 2 * np.pi * np.arange(samples) / samples
    z, dz = boundary_param(state, t)
    return complex(np.sum(z**n * np.conj(z) * dz) * (2 * np.pi / samples) / 2j)

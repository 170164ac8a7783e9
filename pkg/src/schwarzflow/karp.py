"""Singular part of the 4D axially symmetric Schwarz potential from a planar profile.

Steps: ``f = (i/2) S (S - 2z)``; a primitive ``F``; then ``V = Re F`` is
harmonic in the profile half-plane and ``U = (V + c) / y`` is the
axisymmetric Schwarz potential. A term ``beta / (z - x0)^(j+1)`` of ``F`` at
an axis point ``x0`` equals ``A_j d^j/dx^j |x - x0|^-2`` after division by
``y``, with ``A_j = beta / (i (-1)^j j!)``.

Limaçon coefficients here use the map ``z = a w^2 + b w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import ContourError, UnbalancedLogError
from .families import SingularityInventory
from .numerics import RationalComplexFunction, contour_coefficient, gauss_legendre, integrate_rational

AXIS_TOL = 1e-12


def karp_integrand(S):
    """``f(z) = (i/2) S(z) (S(z) - 2 z)``."""
    def f(z):
        z = np.asarray(z, dtype=complex)
        s = np.asarray(S(z), dtype=complex)
        return 0.5j * s * (s - 2 * z)
    return f


def _pole_list(inventory):
    if isinstance(inventory, SingularityInventory):
        poles = [(p.location, p.order) for p in inventory.poles]
        others = [loc for loc, _ in inventory.branch_points]
        return poles, others
    return [(complex(loc), int(k)) for loc, k in inventory], []


def _radius(center, others):
    others = [o for o in others if abs(o - center) > 0]
    if not others:
        return 0.5
    return 0.5 * min(abs(o - center) for o in others)


def karp_step1(S, inventory, radius: float | None = None, tol: float = 1e-10) -> RationalComplexFunction:
    """Principal parts of ``f`` at each pole of ``S``, by contour integration.

    ``inventory`` is a :class:`SingularityInventory` or a list of
    ``(location, order)``. A pole of order ``k`` of ``S`` gives a pole of
    order ``2k`` of ``f``; one extra order is extracted and must vanish.
    """
    poles, branch = _pole_list(inventory)
    f = karp_integrand(S)
    parts = {}
    locs = [p for p, _ in poles]
    for loc, order in poles:
        others = [o for o in locs if o != loc] + branch
        rad = radius if radius is not None else _radius(loc, others)
        if radius is not None and any(abs(o - loc) <= radius for o in others):
            raise ContourError(f"contour of radius {radius} around {loc} encloses another singularity")
        coeffs = [contour_coefficient(f, loc, k, radius=rad) for k in range(1, 2 * order + 2)]
        # quadrature noise, relative to the pole's own scale, is an exact zero
        scale = max(abs(c) * rad ** (-k) for k, c in enumerate(coeffs, start=1))
        parts[loc] = [0j if abs(c) * rad ** (-k) <= tol * scale else c for k, c in enumerate(coeffs, start=1)]
    return RationalComplexFunction.from_principal_parts(parts, tol=tol)


@dataclass(frozen=True)
class PotentialSingularPart:
    """Singular part of ``U = (Re F + c) / y``.

    ``multipoles``: ``(x0, j, A_j)`` meaning ``A_j (d/dx)^j |x - x0|^-2``.
    ``poles``: principal parts of ``F`` away from the axis, ``(loc, order, coeff)``.
    ``logs``: ``(loc, coeff)`` meaning ``Re(coeff Log(z - loc))`` in ``V``.
    ``segments``: ``((x_left, x_right), strength)`` between balanced axis logs.
    """

    multipoles: tuple = ()
    poles: tuple = ()
    logs: tuple = ()
    segments: tuple = ()
    primitive: RationalComplexFunction = field(default_factory=RationalComplexFunction, repr=False)

    def multipole(self, j: int, x0: float = 0.0) -> complex:
        for loc, jj, A in self.multipoles:
            if jj == j and abs(loc - x0) <= AXIS_TOL:
                return A
        return 0j

    def log_coefficient(self, location) -> complex:
        for loc, c in self.logs:
            if abs(loc - complex(location)) <= AXIS_TOL:
                return c
        return 0j

    def V(self, x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        out = np.real(self.primitive(z))
        for loc, c in self.logs:
            out = out + np.real(c * np.log(z - loc))
        return out

    def U(self, x, y):
        return self.V(x, y) / np.asarray(y, dtype=float)

    def to_dict(self) -> dict:
        cx = lambda c: [float(np.real(c)), float(np.imag(c))]
        return {
            "multipoles": [{"location": float(l), "order": j, "coefficient": cx(A)} for l, j, A in self.multipoles],
            "poles": [{"location": cx(l), "order": k, "coefficient": cx(c)} for l, k, c in self.poles],
            "logs": [{"location": cx(l), "coefficient": cx(c)} for l, c in self.logs],
            "segments": [{"endpoints": [float(a), float(b)], "strength": float(s)} for (a, b), s in self.segments],
        }


def _on_axis(loc) -> bool:
    return abs(complex(loc).imag) <= AXIS_TOL * max(1.0, abs(loc))


def _segments(logs, strict=True, tol=1e-8):
    axis = sorted([(complex(l).real, c) for l, c in logs if _on_axis(l)])
    if not axis:
        return ()
    total = sum(c for _, c in axis)
    scale = max(abs(c) for _, c in axis)
    if abs(total) > tol * scale:
        if strict:
            raise UnbalancedLogError(
                f"axis log coefficients sum to {total}; the cuts do not cancel outside the segment"
            )
        return ()
    segs = []
    cum = 0j
    for (x0, c), (x1, _) in zip(axis[:-1], axis[1:]):
        cum += c
        segs.append(((x0, x1), float(np.real(-2 * cum / 1j))))
    return tuple(segs)


def karp_lift(S, inventory, strict: bool = True, radius: float | None = None) -> PotentialSingularPart:
    """Integrate the Step-1 principal parts and sort the result into potential terms."""
    f = karp_step1(S, inventory, radius=radius)
    F, logs = integrate_rational(f)
    multipoles = []
    poles = []
    for loc, coeffs in F.poles:
        if _on_axis(loc):
            for k, beta in enumerate(coeffs, start=1):
                j = k - 1
                multipoles.append((loc.real, j, beta / (1j * (-1) ** j * math.factorial(j))))
        else:
            poles.extend((loc, k, c) for k, c in enumerate(coeffs, start=1))
    segs = _segments(logs, strict=strict)
    return PotentialSingularPart(tuple(multipoles), tuple(poles), tuple(logs), segs, F)


def log_balance(S, locations=(1.0, -1.0), radius: float | None = None, strict: bool = False,
                tol: float = 1e-8, others=()):
    """``(C1, C2, balanced)`` from the residues of ``f`` at the two axis poles.

    ``C1 = (2/i) Res_{x1} f`` and ``C2 = -(2/i) Res_{x2} f``; the branch cuts
    of the two logarithms cancel outside the segment exactly when they agree.
    """
    f = karp_integrand(S)
    x1, x2 = (complex(l) for l in locations)
    pts = [x1, x2] + [complex(o) for o in others]
    r1 = contour_coefficient(f, x1, 1, radius=radius or _radius(x1, pts))
    r2 = contour_coefficient(f, x2, 1, radius=radius or _radius(x2, pts))
    C1 = 2 * r1 / 1j
    C2 = -2 * r2 / 1j
    balanced = abs(C1 - C2) <= tol * max(1.0, abs(C1), abs(C2))
    if strict and not balanced:
        raise UnbalancedLogError(f"C1 = {C1} and C2 = {C2} differ")
    return complex(C1), complex(C2), bool(balanced)


# ---------------------------------------------------------------------------
# closed forms


def limacon_coefficients(a, b) -> dict:
    """``A_2, A_1, A_0`` for ``z = a w^2 + b w`` (no logarithmic term)."""
    return {
        2: -(a**2) * b**4 / 12,
        1: a * b**2 * (a**2 + b**2 / 2),
        0: -(a**4 + 3 * a**2 * b**2 + b**4 / 2),
    }


def printed_limacon_coefficients(a, b) -> dict:
    """The literature's closed forms, written for the map ``z = b w^2 + a w``."""
    return {
        2: -(b**2) * a**4 / 12,
        1: b * a**2 * (a**2 + 2 * b**2) / 2,
        0: -(a**4 + 6 * a**2 * b**2 + 2 * b**4) / 2,
    }


def torus_singular_part(R, a) -> dict:
    """``F = -i R^4 / (2 (z - ai)) + 2 a R^2 Log(z - ai)`` for the circle of radius R at ai."""
    return {"pole": -0.5j * R**4, "log": 2 * a * R**2}


def torus_V(R, a, x, y):
    """``Re F`` of :func:`torus_singular_part` written in real variables."""
    d2 = x**2 + (y - a) ** 2
    return -(R**4) * (y - a) / (2 * d2) + a * R**2 * np.log(d2)


def frozen_system_check(grid=None, printed: bool = False) -> dict:
    """Jacobian of ``(A_2, A_1)`` with respect to ``(a, b)`` over a parameter grid.

    A nonzero determinant means the level sets of the two frozen
    coefficients are isolated points, so no one-parameter family with both
    held fixed exists.
    """
    a, b = sp.symbols("a b", positive=True)
    forms = printed_limacon_coefficients(a, b) if printed else limacon_coefficients(a, b)
    J = sp.Matrix([[sp.diff(forms[k], v) for v in (a, b)] for k in (2, 1)])
    det = sp.factor(J.det())
    det_f = sp.lambdify((a, b), det, "numpy")
    if grid is None:
        # b > 2a > 0 in this parameterization
        grid = [(aa, bb) for bb in np.linspace(1.0, 3.0, 10) for aa in np.linspace(0.05, 0.45, 10) * bb]
    dets = [float(det_f(aa, bb)) for aa, bb in grid]
    return {
        "determinant": str(det),
        "points": [list(map(float, p)) for p in grid],
        "determinants": dets,
        "min_abs_determinant": float(min(abs(d) for d in dets)),
        "all_nonsingular": bool(all(d != 0 for d in dets)),
    }


# ---------------------------------------------------------------------------
# full potential by path integration


@dataclass(frozen=True)
class AxisymmetricPotential:
    """``U(x, y) = (Re F(z) + c) / y`` with ``F`` a primitive of ``f``.

    ``F`` is the closed-form primitive of the principal parts plus a
    Gauss-Legendre integral of the remainder along the straight path from
    ``base``. The constant ``c`` makes ``U = (x^2 + y^2)/2`` at ``anchor``.
    """

    S: object
    singular: PotentialSingularPart
    base: complex
    constant: float
    nodes: int = 48

    def _F_regular(self, z):
        f = karp_integrand(self.S)
        sing = self.singular.primitive.derivative()
        rule = gauss_legendre(self.nodes, (0.0, 1.0))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        path = self.base + (z[:, None] - self.base) * rule.nodes[None, :]
        g = f(path) - sing(path)
        for loc, c in self.singular.logs:
            g = g - c / (path - loc)
        return (g @ rule.weights) * (z - self.base)

    def F(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = self._F_regular(z) + self.singular.primitive(z)
        for loc, c in self.singular.logs:
            out = out + c * np.log(z - loc)
        return out

    def V(self, x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        return np.real(self.F(z.ravel())).reshape(z.shape) + self.constant

    def U(self, x, y):
        return self.V(x, y) / np.asarray(y, dtype=float)


def axisymmetric_potential(S, inventory, base: complex, anchor: complex, strict: bool = True) -> AxisymmetricPotential:
    sing = karp_lift(S, inventory, strict=strict)
    pot = AxisymmetricPotential(S, sing, complex(base), 0.0)
    anchor = complex(anchor)
    target = (anchor.real**2 + anchor.imag**2) / 2
    c = target * anchor.imag - float(np.real(pot.F(anchor))[0])
    return AxisymmetricPotential(S, sing, complex(base), c)

"""Shared numerical kernel.

Complex rational-function algebra in partial-fraction form, Laurent
coefficient extraction by trapezoidal contour integration, Gauss-Legendre
rules and a rank-checked least-squares solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import ContourError, ParameterRecoveryError, RankDeficientError


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalComplexFunction:
    """Polynomial part plus a finite sum of principal parts.

    ``poles`` is a tuple of ``(location, (c_-1, c_-2, ..., c_-k))`` pairs and
    ``polynomial`` holds ascending-degree coefficients.
    """

    poles: tuple = ()
    polynomial: tuple = ()

    def __post_init__(self):
        cleaned = []
        for loc, coeffs in self.poles:
            coeffs = tuple(complex(c) for c in coeffs)
            while coeffs and coeffs[-1] == 0:
                coeffs = coeffs[:-1]
            if coeffs:
                cleaned.append((complex(loc), coeffs))
        locs = [loc for loc, _ in cleaned]
        if len(set(locs)) != len(locs):
            raise ValueError("pole locations must be pairwise distinct")
        cleaned.sort(key=lambda p: (p[0].real, p[0].imag))
        object.__setattr__(self, "poles", tuple(cleaned))
        object.__setattr__(self, "polynomial", tuple(complex(c) for c in self.polynomial))

    @classmethod
    def from_principal_parts(cls, parts, polynomial=(), tol=0.0):
        """Build from ``{location: coefficients}``, trimming small trailing terms.

        Trailing coefficients with modulus at most ``tol`` times the largest
        coefficient at that pole are dropped, so numerically extracted
        principal parts get their true order.
        """
        poles = []
        for loc, coeffs in dict(parts).items():
            coeffs = [complex(c) for c in coeffs]
            scale = max((abs(c) for c in coeffs), default=0.0)
            while coeffs and abs(coeffs[-1]) <= tol * scale:
                coeffs.pop()
            if coeffs:
                poles.append((loc, tuple(coeffs)))
        return cls(tuple(poles), tuple(polynomial))

    def order(self, location) -> int:
        for loc, coeffs in self.poles:
            if loc == location:
                return len(coeffs)
        return 0

    def principal_part(self, location) -> tuple:
        for loc, coeffs in self.poles:
            if loc == location:
                return coeffs
        return ()

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in reversed(self.polynomial):
            out = out * z + c
        for loc, coeffs in self.poles:
            inv = 1.0 / (z - loc)
            power = inv
            for c in coeffs:
                out = out + c * power
                power = power * inv
        return out if out.ndim else complex(out)

    def derivative(self) -> "RationalComplexFunction":
        poly = tuple(k * c for k, c in enumerate(self.polynomial))[1:]
        poles = []
        for loc, coeffs in self.poles:
            # d/dz c (z-p)^-k = -k c (z-p)^-(k+1)
            new = [0j] + [-(k + 1) * c for k, c in enumerate(coeffs)]
            poles.append((loc, tuple(new)))
        return RationalComplexFunction(tuple(poles), poly)

    def scaled(self, s) -> "RationalComplexFunction":
        return RationalComplexFunction(
            tuple((loc, tuple(s * c for c in co)) for loc, co in self.poles),
            tuple(s * c for c in self.polynomial),
        )


def integrate_rational(f: RationalComplexFunction):
    """Primitive of a rational function in partial-fraction form.

    Returns ``(F, log_terms)`` where ``log_terms`` lists ``(location,
    coefficient)`` so that ``F' + sum(c / (z - loc))`` reproduces ``f``.
    The integration constant of ``F`` is zero.
    """
    poly = (0j,) + tuple(c / (k + 1) for k, c in enumerate(f.polynomial)) if f.polynomial else ()
    poles = []
    logs = []
    for loc, coeffs in f.poles:
        if coeffs[0] != 0:
            logs.append((loc, coeffs[0]))
        # c_-k (z-p)^-k integrates to -c_-k / (k-1) (z-p)^-(k-1)
        new = tuple(-coeffs[k] / k for k in range(1, len(coeffs)))
        if new:
            poles.append((loc, new))
    return RationalComplexFunction(tuple(poles), poly), logs


# ---------------------------------------------------------------------------
# contour integration


def _evaluate(f, z):
    try:
        vals = np.asarray(f(z), dtype=complex)
        if vals.shape != z.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([complex(f(zz)) for zz in z])
    return vals


def _trapezoid_laurent(f, center, radius, n, samples):
    theta = 2.0 * np.pi * np.arange(samples) / samples
    ring = radius * np.exp(1j * theta)
    vals = _evaluate(f, center + ring)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(np.argmax(bad))
        raise ContourError(
            f"non-finite value on contour at angle {theta[k]:.17g} "
            f"(z = {complex(center + ring[k])})"
        )
    return complex(np.mean(vals * ring ** (-n)))


def laurent_coefficient(
    f: Callable,
    center: complex,
    n: int,
    radius: float | None = None,
    samples: int = 256,
    others: Sequence[complex] = (),
    tol: float = 1e-11,
    max_samples: int = 1 << 17,
) -> complex:
    """Laurent coefficient of ``(z - center)**n`` by the trapezoidal rule.

    The sample count is doubled until two successive values agree to
    ``tol`` (relative to ``max(1, |c|)``). When ``radius`` is omitted it is
    half the distance from ``center`` to the nearest point in ``others``.
    """
    center = complex(center)
    if radius is None:
        if not others:
            raise ValueError("need a radius or the locations of the other singularities")
        radius = 0.5 * min(abs(complex(o) - center) for o in others)
    if radius <= 0:
        raise ValueError("contour radius must be positive")
    prev = _trapezoid_laurent(f, center, radius, n, samples)
    while samples < max_samples:
        samples *= 2
        cur = _trapezoid_laurent(f, center, radius, n, samples)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ContourError(f"contour coefficient did not converge with {samples} samples")


def contour_coefficient(f, center, order, radius=None, samples=256, others=(), tol=1e-11):
    """Coefficient of ``(z - center)**(-order)`` for ``order >= 1``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return laurent_coefficient(f, center, -order, radius=radius, samples=samples, others=others, tol=tol)


def principal_part(f, center, max_order, radius=None, samples=256, others=()):
    """Coefficients ``c_-1 .. c_-max_order`` of ``f`` about ``center``."""
    return tuple(
        contour_coefficient(f, center, k, radius=radius, samples=samples, others=others)
        for k in range(1, max_order + 1)
    )


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def integrate(self, func) -> float:
        return np.sum(self.weights * func(self.nodes))


def gauss_legendre(n: int, interval=(-1.0, 1.0)) -> QuadratureRule1D:
    """n-point Gauss-Legendre rule mapped to ``interval``."""
    if n < 1:
        raise ValueError("Gauss-Legendre rule needs n >= 1")
    lo, hi = float(interval[0]), float(interval[1])
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return QuadratureRule1D(half * x + 0.5 * (hi + lo), half * w, (lo, hi))


# ---------------------------------------------------------------------------
# least squares


@dataclass(frozen=True)
class LeastSquaresSolution:
    coefficients: np.ndarray
    residual_norm: float
    residual: np.ndarray = field(repr=False, default=None)


def least_squares(matrix, rhs, rcond: float = 1e-12) -> LeastSquaresSolution:
    """Minimise ``||A x - b||`` by column-pivoted QR.

    Raises :class:`RankDeficientError` when a diagonal entry of ``R`` falls
    below ``rcond`` times the largest one; no pseudo-inverse fallback.
    """
    A = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    m, k = A.shape
    if m < k:
        raise RankDeficientError(f"underdetermined system: {m} rows, {k} columns")
    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0 or diag[-1] <= rcond * diag[0]:
        raise RankDeficientError(
            f"design matrix is rank deficient (|R_kk|/|R_11| = {diag[-1] / max(diag[0], 1e-300):.3g})"
        )
    y = scipy.linalg.solve_triangular(R, Q.T @ b)
    x = np.empty(k)
    x[perm] = y
    r = A @ x - b
    return LeastSquaresSolution(x, float(np.linalg.norm(r)), r)


# ---------------------------------------------------------------------------
# scalar root finding


def solve_monotone(g, dg, lo, hi, tol=1e-12, maxiter=200) -> float:
    """Root of a monotone ``g`` on ``[lo, hi]`` by Newton with bisection fallback."""
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if np.sign(glo) == np.sign(ghi):
        raise ParameterRecoveryError(f"no sign change on [{lo}, {hi}]")
    increasing = ghi > 0
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        gx = g(x)
        if gx == 0:
            return x
        if (gx > 0) == increasing:
            hi = x
        else:
            lo = x
        d = dg(x)
        step_ok = d != 0 and math.isfinite(d)
        xn = x - gx / d if step_ok else 0.5 * (lo + hi)
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol * max(1.0, abs(x)):
            return xn
        x = xn
    return x

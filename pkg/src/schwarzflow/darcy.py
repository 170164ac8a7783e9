"""Independent check of Darcy's law and the Schwarz-function evolution law.

The pressure is solved by the method of fundamental solutions: the exact
sink singularities plus a combination of logarithms centred at source points
pushed off the boundary, fitted so that ``P = 0`` on the collocation points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import SinkSpec, Trajectory, schwarz_time_derivative
from .errors import CollocationError, DomainError
from .families import (
    FamilyId,
    BoundarySample,
    boundary_sample,
    contains,
    defining_gradient,
    defining_polynomial,
)


def fundamental_solution(n: int):
    """``K`` with ``-Laplace K = delta`` in ``R^n``, as a function of ``|x|``.

    ``n = 2``: ``-log(r) / 2 pi``; otherwise ``1 / ((n-2) |S^{n-1}| r^{n-2})``.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if n == 2:
        return lambda r: -np.log(r) / (2 * math.pi)
    sphere = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    c = 1.0 / ((n - 2) * sphere)
    return lambda r: c / np.asarray(r, dtype=float) ** (n - 2)


def _K(z):
    return -np.log(np.abs(z)) / (2 * math.pi)


def _dK(z):
    # d/dz of -log|z| / 2pi
    return -1.0 / (4 * math.pi * z)


@dataclass(frozen=True)
class PressureSolution:
    """``P = -sum Q_i K(z - x_i) + sum c_j K(z - s_j) + c_0``.

    A sink at infinity contributes ``-(Q / 2 pi) log|z|`` (the origin is
    assumed to lie inside the bubble for exterior problems).
    """

    sinks: tuple
    sources: np.ndarray
    coefficients: np.ndarray
    constant: float
    boundary_residual: float
    exterior: bool = False

    def _singular(self, z):
        out = np.zeros(z.shape)
        for s in self.sinks:
            if s.at_infinity:
                out -= s.rate * np.log(np.abs(z)) / (2 * math.pi)
            else:
                out -= s.rate * _K(z - s.location)
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        zz = np.atleast_1d(z)
        val = self._singular(zz) + _K(zz[:, None] - self.sources[None, :]) @ self.coefficients + self.constant
        return val if z.ndim else float(val[0])

    def dz(self, z):
        """Complex gradient ``(P_x - i P_y) / 2``."""
        z = np.asarray(z, dtype=complex)
        zz = np.atleast_1d(z)
        out = np.zeros(zz.shape, dtype=complex)
        for s in self.sinks:
            if s.at_infinity:
                out -= s.rate / (4 * math.pi * zz)
            else:
                out -= s.rate * _dK(zz - s.location)
        out += _dK(zz[:, None] - self.sources[None, :]) @ self.coefficients
        return out if z.ndim else complex(out[0])

    def gradient(self, z):
        d = self.dz(z)
        return 2 * np.real(d), -2 * np.imag(d)

    def normal_derivative(self, z, normals):
        return 2 * np.real(self.dz(z) * np.asarray(normals, dtype=complex))


def _curvature_radius(points):
    """Menger radius through each point and its two neighbours (closed curve)."""
    p0 = np.roll(points, 1)
    p2 = np.roll(points, -1)
    a = np.abs(points - p0)
    b = np.abs(p2 - points)
    c = np.abs(p2 - p0)
    cross = np.abs(np.imag(np.conj(points - p0) * (p2 - points)))
    with np.errstate(divide="ignore"):
        return np.where(cross > 0, a * b * c / (2 * cross), np.inf)


def source_points(sample: BoundarySample, n_sources: int, fraction: float = 0.75,
                  cap: float = 0.5, inward: bool = False) -> np.ndarray:
    """Boundary points displaced along the normal by ``fraction`` of the curvature radius.

    The displacement is capped at ``cap`` times the smallest distance from
    the boundary to its centroid.
    """
    pts = np.asarray(sample.points)
    m = len(pts)
    if n_sources > m:
        raise ValueError("need at least as many boundary samples as sources")
    radius = _curvature_radius(pts)
    scale = np.min(np.abs(pts - pts.mean()))
    idx = np.floor(np.arange(n_sources) * m / n_sources).astype(int)
    d = np.minimum(fraction * radius[idx], cap * scale)
    sign = -1.0 if inward else 1.0
    return pts[idx] + sign * d * np.asarray(sample.normals)[idx]


def solve_pressure(sample: BoundarySample, sinks, n_sources: int = 64, *, exterior: bool = False,
                   fraction: float = 0.75, cap: float = 0.5, threshold: float = 1e-6) -> PressureSolution:
    """Fit the pressure with ``P = 0`` on ``sample.points``.

    ``exterior=True`` means the oil fills the unbounded side of the curve;
    sources then sit inside the curve and their strengths are constrained
    to sum to zero so the far field is carried by the sink at infinity.
    Raises :class:`CollocationError` if ``max|P|`` on the collocation points
    exceeds ``threshold * sum|Q| / 2 pi``.
    """
    sinks = tuple(sinks)
    pts = np.asarray(sample.points, dtype=complex)
    src = source_points(sample, n_sources, fraction, cap, inward=exterior)
    blank = PressureSolution(sinks, src, np.zeros(len(src)), 0.0, 0.0, exterior)
    rhs = -blank._singular(pts)
    A = np.hstack([_K(pts[:, None] - src[None, :]), np.ones((len(pts), 1))])
    if exterior:
        weight = np.max(np.abs(A))
        A = np.vstack([A, weight * np.r_[np.ones(len(src)), 0.0]])
        rhs = np.r_[rhs, 0.0]
    x, *_ = scipy.linalg.lstsq(A, rhs)
    sol = PressureSolution(sinks, src, x[:-1], float(x[-1]), 0.0, exterior)
    resid = float(np.max(np.abs(sol(pts))))
    scale = max(sum(abs(s.rate) for s in sinks) / (2 * math.pi), 1e-300)
    if resid > threshold * scale and resid > 0:
        raise CollocationError(
            f"collocation residual {resid:.3g} exceeds {threshold:g} x Q/2pi; "
            "use more sources or move them farther from the boundary"
        )
    return PressureSolution(sinks, src, sol.coefficients, sol.constant, resid, exterior)


# ---------------------------------------------------------------------------
# residuals


def _normal_offset(state, z0, normal, tol=1e-15, maxiter=60):
    """Signed distance ``s`` with ``z0 + s * normal`` on the boundary of ``state``."""
    s = np.zeros(len(z0))
    nx, ny = normal.real, normal.imag
    for _ in range(maxiter):
        x = z0.real + s * nx
        y = z0.imag + s * ny
        g = defining_polynomial(state, x, y)
        gx, gy = defining_gradient(state, x, y)
        step = g / (gx * nx + gy * ny)
        s = s - step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(z0))):
            break
    return s


def normal_velocity(traj: Trajectory, t: float, h: float, sample: BoundarySample) -> np.ndarray:
    """Outward boundary speed from the displacement of the curve between ``t - h`` and ``t + h``."""
    plus = _normal_offset(traj.state_at(t + h), sample.points, sample.normals)
    minus = _normal_offset(traj.state_at(t - h), sample.points, sample.normals)
    return (plus - minus) / (2 * h)


def _pressure_at(traj: Trajectory, t: float, count: int, n_sources: int, **kw):
    state = traj.state_at(t)
    sample = boundary_sample(state, count)
    sol = solve_pressure(sample, traj.sinks, n_sources, exterior=state.family is FamilyId.ELLIPSE, **kw)
    return state, sample, sol


def darcy_residual(traj: Trajectory, t: float, h: float, count: int = 128, n_sources: int = 64, **kw) -> float:
    """``max |v_n + dP/dn| / max |v_n|`` over boundary samples at time ``t``."""
    _, sample, sol = _pressure_at(traj, t, count, n_sources, **kw)
    vn = normal_velocity(traj, t, h, sample)
    err = np.max(np.abs(vn + sol.normal_derivative(sample.points, sample.normals)))
    ref = np.max(np.abs(vn))
    if ref == 0:
        return float(err)
    return float(err / ref)


def evolution_law_residual(traj: Trajectory, t: float, h: float, test_points, count: int = 128,
                      n_sources: int = 64, **kw) -> float:
    """``max |S_t + 4 dP/dz| / max |S_t|`` at interior test points."""
    state, _, sol = _pressure_at(traj, t, count, n_sources, **kw)
    z = np.atleast_1d(np.asarray(test_points, dtype=complex))
    if not np.all(contains(state, z)):
        raise DomainError("test point outside the oil domain")
    st = schwarz_time_derivative(traj, z, t, h)
    err = np.max(np.abs(st + 4 * sol.dz(z)))
    ref = np.max(np.abs(st))
    if ref == 0:
        return float(err)
    return float(err / ref)


def verification_report(traj: Trajectory, t: float, h: float, test_points, count: int = 128,
                         n_sources: int = 64) -> dict:
    _, _, sol = _pressure_at(traj, t, count, n_sources)
    return {
        "darcy_residual": darcy_residual(traj, t, h, count, n_sources),
        "evolution_law_residual": evolution_law_residual(traj, t, h, test_points, count, n_sources),
        "collocation_residual": sol.boundary_residual,
        "boundary_samples": count,
        "sources": n_sources,
        "h": h,
        "t": t,
    }


__all__ = [
    "SinkSpec",
    "PressureSolution",
    "fundamental_solution",
    "source_points",
    "solve_pressure",
    "normal_velocity",
    "darcy_residual",
    "evolution_law_residual",
    "verification_report",
]

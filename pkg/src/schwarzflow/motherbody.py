"""Quadrature identities for the solid of revolution of a Neumann oval.

Harmonic moments ``M_n = integral of r^n P_n(cos theta) dV`` are computed by
nested Gauss-Legendre in polar profile coordinates, then a small set of
axis nodes is fitted by least squares so that point evaluations reproduce
them. Differences of fitted weights between two domains give the share of
extracted volume that each node accounts for.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_legendre

from .errors import ContourError, RankDeficientError
from .families import FamilyId, FamilyState, area_moment
from .numerics import gauss_legendre, least_squares

PRINTED_NODES = (-1.0, -0.5, 0.0, 0.5, 1.0)


@dataclass(frozen=True)
class AxisymmetricDomain3D:
    """Body obtained by rotating a planar profile about the real axis.

    ``profile`` is a neumann_oval (the headline case) or a disk, which gives
    a ball.
    """

    profile: FamilyState

    def __post_init__(self):
        if self.profile.family not in (FamilyId.NEUMANN_OVAL, FamilyId.DISK):
            raise ValueError("profile must be a neumann_oval or a disk")

    @classmethod
    def neumann(cls, a: float, eps: float = 1.0) -> "AxisymmetricDomain3D":
        return cls(FamilyState(FamilyId.NEUMANN_OVAL, (a, eps)))

    @classmethod
    def ball(cls, r: float) -> "AxisymmetricDomain3D":
        return cls(FamilyState(FamilyId.DISK, (r,)))

    def polar_radius(self, phi):
        p = self.profile.params
        if self.profile.family is FamilyId.DISK:
            return np.full_like(np.asarray(phi, dtype=float), p[0])
        a, eps = p
        return np.sqrt(a * a + 4 * eps * eps * np.cos(phi) ** 2)

    @property
    def axis_radius(self) -> float:
        """Largest distance from the origin, reached on the axis."""
        return float(self.polar_radius(0.0))

    def contains(self, x, y, z=0.0):
        rho2 = np.asarray(x) ** 2 + np.asarray(y) ** 2 + np.asarray(z) ** 2
        cos2 = np.where(rho2 > 0, np.asarray(x) ** 2 / np.where(rho2 > 0, rho2, 1), 1.0)
        phi = np.arccos(np.sqrt(cos2))
        return rho2 < self.polar_radius(phi) ** 2


def _moments_at_order(domain, degrees, n_phi):
    rule_phi = gauss_legendre(n_phi, (0.0, math.pi))
    phi = rule_phi.nodes
    R = domain.polar_radius(phi)
    cos_phi = np.cos(phi)
    out = np.empty(degrees)
    for n in range(degrees):
        # radial integrand rho^(n+2) is a polynomial: this rule is exact
        rr = gauss_legendre(n // 2 + 2, (0.0, 1.0))
        radial = np.sum(rr.weights * rr.nodes ** (n + 2)) * R ** (n + 3)
        integrand = 2 * math.pi * np.sin(phi) * eval_legendre(n, cos_phi) * radial
        out[n] = np.sum(rule_phi.weights * integrand)
    return out


def harmonic_moments(domain: AxisymmetricDomain3D, max_degree: int, tol: float = 1e-8,
                     start: int = 32, cap: int = 8192) -> np.ndarray:
    """``M_0 .. M_{max_degree-1}``, doubling the angular order until converged.

    Convergence is declared when successive orders differ by at most
    ``tol * M_0 * R^n`` for every degree ``n`` (``R`` the axis radius).
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    scale = domain.axis_radius ** np.arange(max_degree)
    n_phi = start
    prev = _moments_at_order(domain, max_degree, n_phi)
    while n_phi < cap:
        n_phi *= 2
        cur = _moments_at_order(domain, max_degree, n_phi)
        if np.all(np.abs(cur - prev) <= tol * abs(cur[0]) * scale):
            return cur
        prev = cur
    raise ContourError(f"harmonic moments not converged at {n_phi} angular nodes")


def integrate_function(domain: AxisymmetricDomain3D, u, n_phi: int = 128, n_rho: int = 64,
                       n_azimuth: int = 64) -> float:
    """``integral of u(x1, x2, x3) dV`` for a general (vectorised) ``u``."""
    rp = gauss_legendre(n_phi, (0.0, math.pi))
    rr = gauss_legendre(n_rho, (0.0, 1.0))
    psi = 2 * math.pi * np.arange(n_azimuth) / n_azimuth
    R = domain.polar_radius(rp.nodes)
    phi = rp.nodes[:, None, None]
    rho = (R[:, None] * rr.nodes[None, :])[:, :, None]
    x1 = rho * np.cos(phi)
    y = rho * np.sin(phi)
    vals = u(x1, y * np.cos(psi), y * np.sin(psi)).mean(axis=2) * 2 * math.pi
    jac = (rho[:, :, 0] ** 2) * np.sin(rp.nodes)[:, None] * R[:, None]
    return float(np.sum(rp.weights[:, None] * rr.weights[None, :] * jac * vals))


@dataclass(frozen=True)
class QuadratureFormula:
    """Axis nodes and weights reproducing the harmonic moments.

    ``residual_norm`` is the Euclidean norm of the fit residual with row
    ``n`` divided by ``scale**n``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    residual_norm: float
    scale: float = 1.0
    residual: np.ndarray = field(repr=False, default=None)

    def apply(self, u_on_axis) -> float:
        return float(np.sum(self.weights * u_on_axis(np.asarray(self.nodes))))

    def predict_moment(self, n: int) -> float:
        return float(np.sum(self.weights * self.nodes**n))

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
            "residual_norm": self.residual_norm,
            "scale": self.scale,
        }


def design_matrix(nodes, degrees: int) -> np.ndarray:
    """``D[n, k] = x_k ** n``: the value of ``r^n P_n(cos theta)`` at axis point ``x_k``."""
    x = np.asarray(nodes, dtype=float)
    return x[None, :] ** np.arange(degrees)[:, None]


def fit_quadrature(moments, nodes, scale: float = 1.0) -> QuadratureFormula:
    """Least-squares weights with ``sum_k w_k x_k^n = M_n``.

    Row ``n`` is divided by ``scale**n``. Passing the domain's axis radius
    makes each row the moment of a harmonic polynomial of unit size on the
    domain, so no single high degree dominates the fit.
    """
    M = np.asarray(moments, dtype=float)
    x = np.asarray(nodes, dtype=float)
    if len(np.unique(x)) != len(x):
        raise RankDeficientError("quadrature nodes must be distinct")
    if len(x) > len(M):
        raise RankDeficientError("more nodes than moments")
    if scale <= 0:
        raise ValueError("scale must be positive")
    row = float(scale) ** -np.arange(len(M))
    sol = least_squares(design_matrix(x, len(M)) * row[:, None], M * row)
    return QuadratureFormula(x, sol.coefficients, sol.residual_norm, float(scale), sol.residual)


def fit_domain(domain: AxisymmetricDomain3D, degrees: int = 20, nodes=PRINTED_NODES) -> QuadratureFormula:
    return fit_quadrature(harmonic_moments(domain, degrees), nodes, scale=domain.axis_radius)


def _groups(nodes):
    keys = sorted({round(abs(float(x)), 12) for x in nodes}, reverse=True)
    return keys, [[k for k, x in enumerate(nodes) if round(abs(float(x)), 12) == key] for key in keys]


def suction_distribution(a_initial: float, a_final: float, nodes=PRINTED_NODES, degrees: int = 20,
                         eps: float = 1.0) -> dict:
    """Share of the extracted volume attributed to each node group ``{+x, -x}``.

    Both domains are fitted on the same nodes; ``delta = w_initial - w_final``.
    Groups with negative totals are listed under ``nonphysical_groups``.
    """
    dom_i = AxisymmetricDomain3D.neumann(a_initial, eps)
    dom_f = AxisymmetricDomain3D.neumann(a_final, eps)
    Mi = harmonic_moments(dom_i, degrees)
    Mf = harmonic_moments(dom_f, degrees)
    fi = fit_quadrature(Mi, nodes, scale=dom_i.axis_radius)
    ff = fit_quadrature(Mf, nodes, scale=dom_f.axis_radius)
    delta = fi.weights - ff.weights
    total = float(delta.sum())
    keys, groups = _groups(nodes)
    group_totals = [float(delta[g].sum()) for g in groups]
    if total != 0:
        pct = [100.0 * gt / total for gt in group_totals]
    else:
        pct = [0.0 for _ in group_totals]
    volume_change = float(Mi[0] - Mf[0])
    return {
        "a_initial": a_initial,
        "a_final": a_final,
        "degrees": degrees,
        "nodes": [float(x) for x in nodes],
        "weights_initial": fi.weights.tolist(),
        "weights_final": ff.weights.tolist(),
        "delta": delta.tolist(),
        "groups": [{"abs_node": k, "total": gt, "percent": p} for k, gt, p in zip(keys, group_totals, pct)],
        "percentages": pct,
        "residuals": [fi.residual_norm, ff.residual_norm],
        "volume_change": volume_change,
        "volume_gap": abs(total - volume_change) / abs(volume_change) if volume_change else abs(total),
        "nonphysical_groups": [k for k, gt in zip(keys, group_totals) if gt < 0],
    }


# ---------------------------------------------------------------------------
# Richardson moment identity in the plane


@dataclass(frozen=True)
class HarmonicTest:
    """``u(z) = Re(c z^n)``, whose area integral is ``Re(c M_n)``."""

    name: str
    degree: int
    coefficient: complex = 1.0

    def __call__(self, z):
        return np.real(self.coefficient * np.asarray(z, dtype=complex) ** self.degree)

    def integral(self, state: FamilyState, samples: int = 1024) -> float:
        return float(np.real(self.coefficient * area_moment(state, self.degree, samples)))


DEFAULT_TESTS = (
    HarmonicTest("1", 0),
    HarmonicTest("Re z", 1),
    HarmonicTest("Re z^2", 2),
    HarmonicTest("Im z^2", 2, -1j),
)


def richardson_report(traj, tests=DEFAULT_TESTS, t: float | None = None, h: float = 1e-4,
                      samples: int = 1024) -> list[dict]:
    """Compare ``d/dt integral u dA`` with ``-sum Q_i u(x_i)`` for each test.

    The relative residual is taken against ``sum |Q_i| * max(1, |u(x_i)|)``
    so it stays meaningful when the right-hand side vanishes by symmetry.
    """
    sinks = [s for s in traj.sinks if not s.at_infinity]
    if len(sinks) != len(traj.sinks):
        raise ValueError("Richardson report needs finite sinks")
    if t is None:
        t = float(np.mean(traj.times))
    plus, minus = traj.state_at(t + h), traj.state_at(t - h)
    rows = []
    for u in tests:
        lhs = (u.integral(plus, samples) - u.integral(minus, samples)) / (2 * h)
        rhs = -sum(s.rate * float(u(s.location)) for s in sinks)
        ref = sum(abs(s.rate) * max(1.0, abs(float(u(s.location)))) for s in sinks) or 1.0
        rows.append({"u": u.name, "lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs) / ref})
    return rows

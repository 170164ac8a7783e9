"""Laplacian-growth evolution by singularity dynamics.

Non-physical singular coefficients of the Schwarz function are held fixed
and the simple pole at each sink changes linearly in time; the family
parameters at any time are recovered from those coefficients.

Rate convention: ``Q`` is the area extraction rate at a sink, so the
enclosed area changes at ``-sum(Q)`` and the residue of the Schwarz function
at a sink changes at ``-Q / pi``. For a sink at infinity (exterior domain)
the enclosed region grows at rate ``Q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InadmissibleSinksError, ParameterRecoveryError, UnsupportedFamilyError
from .families import FamilyId, FamilyState, contains, schwarz_function
from .numerics import solve_monotone

INFINITY = "infinity"


@dataclass(frozen=True)
class SinkSpec:
    """Point sink (``rate > 0``) or source (``rate < 0``)."""

    location: object  # complex, or the string "infinity"
    rate: float

    def __post_init__(self):
        if isinstance(self.location, str):
            if self.location != INFINITY:
                raise ValueError(f"unknown sink location {self.location!r}")
        else:
            object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "rate", float(self.rate))

    @property
    def at_infinity(self) -> bool:
        return self.location == INFINITY

    def negated(self) -> "SinkSpec":
        return SinkSpec(self.location, -self.rate)

    def to_dict(self):
        loc = self.location if self.at_infinity else [self.location.real, self.location.imag]
        return {"location": loc, "rate": self.rate}


# ---------------------------------------------------------------------------
# coefficient <-> parameter maps


def frozen_quantities(state: FamilyState) -> dict:
    """Coefficients that Laplacian growth must leave unchanged."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return {}
    if fam is FamilyId.LIMACON:
        a, b = p
        return {"order2_coefficient": a * b * b}
    if fam is FamilyId.NEUMANN_OVAL:
        return {"pole_location": p[1]}
    if fam is FamilyId.ELLIPSE:
        return {"aspect_ratio": p[0] / p[1]}
    if fam is FamilyId.OFFSET_CIRCLE:
        return {"center": p[1]}
    raise UnsupportedFamilyError(fam)


def physical_coefficient(state: FamilyState) -> float:
    """Residue carried by each sink (``ab`` for the ellipse, i.e. area/pi)."""
    fam = state.family
    p = state.params
    if fam is FamilyId.DISK:
        return p[0] ** 2
    if fam is FamilyId.LIMACON:
        a, b = p
        return b * b + 2 * a * a
    if fam is FamilyId.NEUMANN_OVAL:
        a, eps = p
        return (a * a + 2 * eps * eps) / 2
    if fam is FamilyId.ELLIPSE:
        return p[0] * p[1]
    if fam is FamilyId.OFFSET_CIRCLE:
        return p[0] ** 2
    raise UnsupportedFamilyError(fam)


def limacon_cusp_parameters(order2):
    """``(a, b)`` at which ``b = 2a`` for the given order-2 coefficient ``a b^2``."""
    b = (2.0 * order2) ** (1.0 / 3.0)
    return order2 / (b * b), b


def terminal_coefficient(family: FamilyId, frozen: dict) -> float:
    """Value of the physical coefficient at which the family breaks down."""
    if family is FamilyId.LIMACON:
        _, b = limacon_cusp_parameters(frozen["order2_coefficient"])
        return 1.5 * b * b
    if family is FamilyId.NEUMANN_OVAL:
        return frozen["pole_location"] ** 2
    return 0.0


def recover_parameters(family: FamilyId, frozen: dict, physical: float, tol: float = 1e-12) -> tuple:
    """Invert the coefficient map; raises when no smooth member exists."""
    if physical <= terminal_coefficient(family, frozen):
        raise ParameterRecoveryError(f"{family.value}: coefficient {physical} beyond breakdown")
    if family is FamilyId.DISK:
        return (math.sqrt(physical),)
    if family is FamilyId.OFFSET_CIRCLE:
        return (math.sqrt(physical), frozen["center"])
    if family is FamilyId.NEUMANN_OVAL:
        eps = frozen["pole_location"]
        return (math.sqrt(2 * physical - 2 * eps * eps), eps)
    if family is FamilyId.ELLIPSE:
        k = frozen["aspect_ratio"]
        b = math.sqrt(physical / k)
        return (k * b, b)
    if family is FamilyId.LIMACON:
        C = frozen["order2_coefficient"]
        _, b_cusp = limacon_cusp_parameters(C)
        # b^2 + 2 C^2 / b^4 is increasing for b above the cusp value
        g = lambda b: b * b + 2 * C * C / b**4 - physical
        dg = lambda b: 2 * b - 8 * C * C / b**5
        b = solve_monotone(g, dg, b_cusp, math.sqrt(physical), tol=tol)
        return (C / (b * b), b)
    raise UnsupportedFamilyError(family)


# ---------------------------------------------------------------------------
# admissibility


def _close(z, w, scale):
    return abs(complex(z) - complex(w)) <= 1e-12 * max(1.0, scale)


def check_sinks(state: FamilyState, sinks) -> None:
    """Raise :class:`InadmissibleSinksError` unless ``sinks`` can drive ``state``."""
    sinks = list(sinks)
    fam = state.family
    if not sinks:
        return
    scale = max(abs(x) for x in state.params)
    finite = [s for s in sinks if not s.at_infinity]
    if fam is FamilyId.ELLIPSE:
        if len(sinks) != 1 or finite:
            raise InadmissibleSinksError("ellipse is driven by exactly one sink at infinity")
        return
    if len(finite) != len(sinks):
        raise InadmissibleSinksError(f"{fam.value} has a bounded domain; no sink at infinity")
    if fam in (FamilyId.DISK, FamilyId.LIMACON, FamilyId.OFFSET_CIRCLE):
        target = 1j * state.params[1] if fam is FamilyId.OFFSET_CIRCLE else 0j
        if len(sinks) != 1 or not _close(sinks[0].location, target, scale):
            raise InadmissibleSinksError(f"{fam.value} needs a single sink at {target}")
        return
    if fam is FamilyId.NEUMANN_OVAL:
        eps = state.params[1]
        locs = sorted(s.location.real for s in sinks)
        ok = (
            len(sinks) == 2
            and _close(locs[0], -eps, scale)
            and _close(locs[1], eps, scale)
            and abs(sinks[0].rate - sinks[1].rate) <= 1e-12 * max(1.0, abs(sinks[0].rate))
        )
        if not ok:
            raise InadmissibleSinksError("neumann_oval needs equal-rate sinks at +eps and -eps")
        return
    raise UnsupportedFamilyError(fam)


def coefficient_rate(state: FamilyState, sinks) -> float:
    """Time derivative of :func:`physical_coefficient` under ``sinks``."""
    sinks = list(sinks)
    if not sinks:
        return 0.0
    if state.family is FamilyId.ELLIPSE:
        return sinks[0].rate / math.pi
    if state.family is FamilyId.NEUMANN_OVAL:
        # each pole carries its own sink
        return -sinks[0].rate / math.pi
    return -sum(s.rate for s in sinks) / math.pi


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered states of one evolution plus the law that generated them.

    ``drift`` maps a frozen-quantity name to a relative rate ``delta``; the
    quantity then evolves as ``value * (1 + delta (t - t0))``. It exists to
    build deliberately non-physical trajectories for sensitivity checks.
    """

    family: FamilyId
    initial: FamilyState
    sinks: tuple
    states: tuple
    frozen_constraints: dict
    termination: dict | None = None
    drift: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def t_start(self) -> float:
        return self.initial.time

    def frozen_at(self, t: float) -> dict:
        dt = t - self.initial.time
        return {k: v * (1 + self.drift.get(k, 0.0) * dt) for k, v in self.frozen_constraints.items()}

    def physical_at(self, t: float) -> float:
        rate = coefficient_rate(self.initial, self.sinks)
        return physical_coefficient(self.initial) + rate * (t - self.initial.time)

    def state_at(self, t: float) -> FamilyState:
        params = recover_parameters(self.family, self.frozen_at(t), self.physical_at(t))
        return FamilyState(self.family, params, t)

    def schwarz_at(self, t: float):
        return schwarz_function(self.state_at(t))

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "sinks": [s.to_dict() for s in self.sinks],
            "frozen_constraints": dict(self.frozen_constraints),
            "termination": self.termination,
            "states": [s.to_dict() for s in self.states],
        }


def breakdown_time(initial: FamilyState, sinks) -> float | None:
    """Time at which the driven coefficient reaches the family's breakdown value."""
    sinks = list(sinks)
    rate = coefficient_rate(initial, sinks)
    if rate >= 0:
        return None
    frozen = frozen_quantities(initial)
    stop = terminal_coefficient(initial.family, frozen)
    return initial.time + (stop - physical_coefficient(initial)) / rate


def cusp_time(initial: FamilyState, sinks) -> float | None:
    """First time the limacon map derivative ``2 a w + b`` vanishes on ``|w| = 1``.

    Injection never produces a cusp and returns ``None``. For other
    families this is the collapse time of the domain, or ``None``.
    """
    check_sinks(initial, sinks)
    return breakdown_time(initial, sinks)


def evolve(initial: FamilyState, sinks, t_end: float, steps: int = 200) -> Trajectory:
    """Evolve ``initial`` to ``t_end`` in ``steps`` equal increments.

    If the family breaks down (cusp or collapse) before ``t_end`` the
    trajectory stops at the last valid step and ``termination`` records the
    reason and the exact breakdown time.
    """
    sinks = tuple(sinks)
    check_sinks(initial, sinks)
    if t_end <= initial.time:
        raise ValueError("t_end must exceed the initial time")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    frozen = frozen_quantities(initial)
    traj = Trajectory(initial.family, initial, sinks, (), frozen)
    t_break = breakdown_time(initial, sinks)
    times = initial.time + (t_end - initial.time) * np.arange(steps + 1) / steps
    states = [initial]
    termination = None
    for t in times[1:]:
        if t_break is not None and t >= t_break:
            reason = "cusp" if initial.family is FamilyId.LIMACON else "collapse"
            termination = {"reason": reason, "time": t_break}
            break
        try:
            states.append(traj.state_at(float(t)))
        except (ParameterRecoveryError, ValueError) as exc:
            termination = {"reason": "parameter_recovery", "time": float(t), "detail": str(exc)}
            break
    return Trajectory(initial.family, initial, sinks, tuple(states), frozen, termination)


def perturb_frozen(traj: Trajectory, name: str, delta: float) -> Trajectory:
    """Copy of ``traj`` whose frozen quantity ``name`` drifts at relative rate ``delta``."""
    if name not in traj.frozen_constraints:
        raise KeyError(f"{name} is not frozen for {traj.family.value}")
    drift = dict(traj.drift)
    drift[name] = delta
    return Trajectory(traj.family, traj.initial, traj.sinks, traj.states, traj.frozen_constraints,
                      traj.termination, drift)


def schwarz_time_derivative(traj: Trajectory, z, t: float, h: float):
    """Central difference ``(S(z, t+h) - S(z, t-h)) / 2h``."""
    plus = traj.state_at(t + h)
    minus = traj.state_at(t - h)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    for st in (plus, minus):
        if not np.all(contains(st, zz)):
            raise DomainError(f"point outside the domain at t = {st.time}")
    out = (schwarz_function(plus)(zz) - schwarz_function(minus)(zz)) / (2 * h)
    return out if np.ndim(z) else complex(out[0])

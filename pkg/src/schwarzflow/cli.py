"""Command-line front end: ``schwarzflow <subcommand> ...``.

Every subcommand that takes ``--out`` writes ``config.json`` (the resolved
arguments) next to its outputs. Only ``verify`` fails on threshold breaches.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import export
from .darcy import darcy_residual, solve_pressure, evolution_law_residual
from .dynamics import INFINITY, SinkSpec, evolve
from .errors import SchwarzFlowError
from .families import PARAM_NAMES, FamilyId, FamilyState, boundary_sample, catalog, contains, schwarz_function, singularities

_SINK = re.compile(r"^\s*(?P<loc>[^:]+):\s*Q\s*=\s*(?P<q>[-+0-9.eE]+)\s*$")


def parse_location(text: str):
    text = text.strip().replace(" ", "")
    if text.lower() in ("inf", "infinity", "∞"):
        return INFINITY
    return complex(text.replace("i", "j"))


def parse_sinks(specs) -> list[SinkSpec]:
    """``"±1:Q=0.5"``, ``"0:Q=0.3"``, ``"inf:Q=2"``; several may be joined by ``;``."""
    out = []
    for spec in specs or ():
        for part in spec.split(";"):
            if not part.strip():
                continue
            m = _SINK.match(part)
            if not m:
                raise argparse.ArgumentTypeError(f"bad sink spec {part!r} (expected LOC:Q=RATE)")
            loc, q = m.group("loc").strip(), float(m.group("q"))
            if loc.startswith(("±", "+-")):
                base = parse_location(loc.lstrip("±+-"))
                out += [SinkSpec(base, q), SinkSpec(-base, q)]
            else:
                out.append(SinkSpec(parse_location(loc), q))
    return out


def _add_family(p, required=True):
    p.add_argument("--family", required=required, choices=[f.value for f in FamilyId])
    for name in ("r", "a", "b", "eps", "R", "center"):
        p.add_argument(f"--{name}", type=float, dest=f"p_{name}", default=None, metavar=name.upper())
    p.add_argument("--time", type=float, default=0.0, help="initial time (default 0)")


def _state(args) -> FamilyState:
    fam = FamilyId(args.family)
    vals = []
    for name in PARAM_NAMES[fam]:
        v = getattr(args, f"p_{name}")
        if v is None:
            raise SchwarzFlowError(f"{fam.value} needs --{name}")
        vals.append(v)
    return FamilyState(fam, tuple(vals), args.time)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}


def _outdir(args) -> Path | None:
    if not getattr(args, "out", None):
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export.write_json(out / "config.json", _config(args))
    return out


def _emit(obj):
    sys.stdout.write(export.dumps(obj))


# ---------------------------------------------------------------------------


def cmd_catalog(args):
    _emit(catalog())
    return 0


def cmd_evolve(args):
    state = _state(args)
    traj = evolve(state, parse_sinks(args.sinks), args.t_end, args.steps)
    out = _outdir(args)
    summary = {"family": traj.family.value, "termination": traj.termination,
               "final": traj.states[-1].to_dict(), "steps": len(traj.states) - 1}
    if out:
        export.write_json(out / "trajectory.json", traj.to_dict())
        idx = np.unique(np.linspace(0, len(traj.states) - 1, args.snapshots).round().astype(int))
        curves, rows = [], []
        for k in idx:
            bs = boundary_sample(traj.states[k], args.samples)
            curves.append(bs.points)
            rows += [(traj.states[k].time, *r) for r in bs.to_csv_rows()]
        export.write_csv(out / "boundaries.csv", ["t", "x", "y", "nx", "ny"], rows)
        marks = [s.location for s in traj.sinks if not s.at_infinity]
        export.write_svg(out / "boundaries.svg", curves, marks, title=f"{traj.family.value} evolution")
    _emit(summary)
    return 0


def cmd_karp(args):
    from .karp import karp_lift, limacon_coefficients, printed_limacon_coefficients, torus_singular_part

    state = _state(args)
    part = karp_lift(schwarz_function(state), singularities(state), strict=not args.lenient)
    report = {"state": state.to_dict(), "singular_part": part.to_dict()}
    if state.family is FamilyId.LIMACON:
        a, b = state.params
        ours = limacon_coefficients(a, b)
        printed = printed_limacon_coefficients(b, a)
        report["comparison"] = [
            {"k": k, "pipeline": float(np.real(part.multipole(k))), "closed_form": ours[k],
             "printed_swapped": printed[k]}
            for k in (2, 1, 0)
        ]
    elif state.family is FamilyId.OFFSET_CIRCLE:
        R, c = state.params
        ref = torus_singular_part(R, c)
        report["comparison"] = [
            {"term": "pole", "pipeline": part.poles[0][2], "closed_form": ref["pole"]},
            {"term": "log", "pipeline": part.log_coefficient(1j * c), "closed_form": ref["log"]},
        ]
    out = _outdir(args)
    if out:
        export.write_json(out / "karp.json", report)
    _emit(report)
    return 0


def cmd_elliptic(args):
    from .elliptic import MediumSpec, counterexample_singularity, generalized_potential_dz, locate_blowup, poisson_profile, singular_coefficients

    medium = MediumSpec(args.medium, args.m)
    if args.variant is None:
        # printed terms of the planar worked example need the printed profile
        args.variant = "printed" if args.medium == "planar_alpha_one" else "derived"
    prof = poisson_profile(medium, args.variant)
    report = {"profile": prof.to_dict()}
    rows = []
    if args.medium == "counterexample":
        if args.a is None or args.radius is None:
            raise SchwarzFlowError("counterexample needs --a and --radius")
        st = FamilyState(FamilyId.OFFSET_CIRCLE, (args.radius, args.a))
        dz = generalized_potential_dz(st, medium, args.variant)
        formula = counterexample_singularity(args.a, args.radius)
        located = locate_blowup(dz, formula + 0.05 * (1 + 1j))
        report.update({"formula": formula, "located": located})
        curves = [boundary_sample(st, 128).points]
        marks = [formula]
    else:
        for t in args.times:
            s = 1.0 - t
            S = lambda z, s=s: s / np.asarray(z, dtype=complex)
            coeffs = singular_coefficients(generalized_potential_dz(S, medium, args.variant), max_order=args.orders)
            rows.append([t] + [float(np.real(c)) for c in coeffs])
        report["singular_coefficients"] = rows
        curves = [np.sqrt(max(1 - t, 0.0)) * np.exp(2j * np.pi * np.arange(128) / 128) for t in args.times if t < 1]
        marks = [0j]
    out = _outdir(args)
    if out:
        export.write_json(out / "elliptic.json", report)
        if rows:
            export.write_csv(out / "coefficients.csv", ["t"] + [f"c_{-k}" for k in range(1, args.orders + 1)], rows)
        export.write_svg(out / "geometry.svg", curves, marks, title=args.medium)
    _emit(report)
    return 0


def cmd_motherbody(args):
    from .motherbody import AxisymmetricDomain3D, harmonic_moments, suction_distribution

    report = suction_distribution(args.a_initial, args.a_final, args.nodes, args.degrees)
    out = _outdir(args)
    if out:
        export.write_json(out / "motherbody.json", report)
        rows = []
        for a in (args.a_initial, args.a_final):
            M = harmonic_moments(AxisymmetricDomain3D.neumann(a), args.degrees)
            rows += [(a, n, m) for n, m in enumerate(M)]
        export.write_csv(out / "moments.csv", ["a", "n", "moment"], rows)
        curves = []
        for a in (args.a_initial, args.a_final):
            phi = 2 * np.pi * np.arange(256) / 256
            curves.append(np.sqrt(a * a + 4 * np.cos(phi) ** 2) * np.exp(1j * phi))
        export.write_svg(out / "profile.svg", curves, [complex(x) for x in args.nodes], title="mother body nodes")
    _emit(report)
    return 0


def cmd_verify(args):
    state = _state(args)
    sinks = parse_sinks(args.sinks)
    span = args.t + 4 * args.h + 1e-9
    traj = evolve(state, sinks, max(span, state.time + 2 * args.t), 10)
    st = traj.state_at(args.t)
    # interior test points on a shrunken copy of the boundary
    pts = boundary_sample(st, args.points).points
    test = pts * (0.5 if st.family is not FamilyId.ELLIPSE else 1.5)
    if st.family is FamilyId.OFFSET_CIRCLE:
        test = 1j * st.params[1] + 0.5 * (pts - 1j * st.params[1])
    test = test[contains(st, test)]
    d = darcy_residual(traj, args.t, args.h, args.samples, args.sources)
    t1 = evolution_law_residual(traj, args.t, args.h, test, args.samples, args.sources)
    sol = solve_pressure(boundary_sample(st, args.samples), sinks, args.sources,
                         exterior=st.family is FamilyId.ELLIPSE)
    report = {
        "darcy_residual": d,
        "evolution_law_residual": t1,
        "collocation_residual": sol.boundary_residual,
        "boundary_samples": args.samples,
        "sources": args.sources,
        "h": args.h,
        "t": args.t,
        "thresholds": {"darcy": args.darcy_tol, "evolution_law": args.law_tol},
    }
    report["passed"] = bool(d <= args.darcy_tol and t1 <= args.law_tol)
    out = _outdir(args)
    if out:
        export.write_json(out / "verify.json", report)
    _emit(report)
    return 0 if report["passed"] else 1


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schwarzflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="list families and parameter constraints")
    c.set_defaults(func=cmd_catalog)

    e = sub.add_parser("evolve", help="evolve a family under sinks")
    _add_family(e)
    e.add_argument("--sinks", action="append", default=[], help='e.g. "±1:Q=0.5" or "0:Q=0.3"')
    e.add_argument("--t-end", type=float, required=True)
    e.add_argument("--steps", type=int, default=200)
    e.add_argument("--snapshots", type=int, default=6, help="boundaries written to CSV/SVG")
    e.add_argument("--samples", type=int, default=256, help="points per boundary snapshot")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evolve)

    k = sub.add_parser("karp", help="4D axisymmetric singular part from a planar profile")
    _add_family(k)
    k.add_argument("--lenient", action="store_true", help="do not fail on unbalanced axis logs")
    k.add_argument("--out")
    k.set_defaults(func=cmd_karp)

    el = sub.add_parser("elliptic", help="generalized Schwarz potential singular terms")
    el.add_argument("--medium", default="planar_alpha_one",
                    choices=["planar_alpha_one", "axisym_power", "counterexample", "laplace"])
    el.add_argument("--m", type=int)
    el.add_argument("--variant", choices=["derived", "printed", "radial"],
                    help="Poisson profile (default: printed for planar_alpha_one, derived otherwise)")
    el.add_argument("--times", type=_floats, default=[0.0, 0.25, 0.5, 1.0])
    el.add_argument("--orders", type=int, default=4)
    el.add_argument("--a", type=float, help="counterexample circle centre height")
    el.add_argument("--radius", type=float, help="counterexample circle radius")
    el.add_argument("--out")
    el.set_defaults(func=cmd_elliptic)

    mb = sub.add_parser("motherbody", help="axis quadrature fit and suction split")
    mb.add_argument("--a-initial", type=float, default=2.0)
    mb.add_argument("--a-final", type=float, default=1.0)
    mb.add_argument("--degrees", type=int, default=20)
    mb.add_argument("--nodes", type=_floats, default=[-1.0, -0.5, 0.0, 0.5, 1.0])
    mb.add_argument("--out")
    mb.set_defaults(func=cmd_motherbody)

    v = sub.add_parser("verify", help="Darcy and Schwarz-derivative residuals; exit 1 on breach")
    _add_family(v)
    v.add_argument("--sinks", action="append", default=[])
    v.add_argument("--t", type=float, default=0.1)
    v.add_argument("--h", type=float, default=1e-4)
    v.add_argument("--samples", type=int, default=128, help="collocation points (default 128)")
    v.add_argument("--sources", type=int, default=64, help="fundamental-solution sources (default 64)")
    v.add_argument("--points", type=int, default=20, help="interior test points (default 20)")
    v.add_argument("--darcy-tol", type=float, default=1e-3, help="darcy residual threshold (default 1e-3)")
    v.add_argument("--law-tol", type=float, default=1e-3, help="S_t + 4 dP/dz threshold (default 1e-3)")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("darcy_tol", "law_tol", "h"):
        if getattr(args, name, 1.0) is not None and getattr(args, name, 1.0) <= 0:
            parser.print_usage(sys.stderr)
            sys.stderr.write(f"error: --{name.replace('_', '-')} must be positive\n")
            return 2
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (SchwarzFlowError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

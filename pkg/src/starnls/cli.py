"""Command-line entry point: ``starnls <command> [options]``.

Single records print as JSON, sweeps as CSV; ``--format`` overrides either.
Exit status is 0 on success, 2 for inputs outside the admissible windows and
3 when a bracketing search fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import discrete, existence, reduced, soliton, stationary
from .params import DomainError, NonlinearParams, SearchFailure

OUTPUT_DIR_ENV = "STARNLS_OUTPUT_DIR"

PROFILES = {
    "fast": {"rel_tol": 1e-6, "omega_tol": 1e-10, "step": 1e-3, "tol": 1e-8, "max_iter": 1000},
    "precise": {"rel_tol": 1e-10, "omega_tol": 1e-12, "step": 1e-4, "tol": 1e-10,
                "max_iter": 5000},
}

EXIT_OK, EXIT_DOMAIN, EXIT_SEARCH = 0, 2, 3


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(c in text for c in ".e") else text + ".0"


def to_json(obj) -> str:
    """Deterministic JSON with 17 significant digits for every float."""
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(float(v)) if math.isfinite(v) else "nan"
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    return str(v)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def _emit(args, rows: list[dict], columns: list[str], single: bool) -> None:
    fmt = args.format or ("json" if single else "csv")
    if fmt == "json":
        text = to_json(rows[0] if single else rows) + "\n"
    else:
        text = to_csv(rows, columns)
    out = _resolve_output(args.output)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _record(args, record: dict) -> None:
    _emit(args, [record], list(record), single=True)


def _setting(args, name: str):
    value = getattr(args, name, None)
    return PROFILES[args.profile][name] if value is None else value


# commands

def cmd_soliton(args) -> None:
    if args.omega is not None:
        s = soliton.Soliton.from_omega(args.p, args.omega)
    else:
        s = soliton.Soliton.from_mass(args.p, args.mu)
    _record(args, {"p": s.p, "omega": s.omega, "mass": s.mass, "energy": s.energy,
                   "peak": s.peak})


def cmd_stationary(args) -> None:
    params = NonlinearParams(args.p, args.q)
    if args.omega is not None:
        state = stationary.state_from_omega(params, args.n, args.J, args.omega)
    else:
        state = stationary.solve_stationary(params, args.n, args.J, args.mu,
                                            _setting(args, "omega_tol"))
    record = state.as_dict()
    record["flux_residual"] = state.flux_residual()
    _record(args, record)


def cmd_exists(args) -> None:
    report = existence.exists_ground_state(NonlinearParams(args.p, args.q), args.n, args.mu)
    _record(args, report.as_dict())


def cmd_critical_mass(args) -> None:
    result = existence.critical_mass(NonlinearParams(args.p, args.q), args.n,
                                     _setting(args, "rel_tol"), (args.mu_min, args.mu_max))
    _record(args, result.as_dict())


def cmd_critical_n(args) -> None:
    n_p = existence.critical_N(args.p, args.cap)
    record = {"p": args.p, "N_p": n_p,
              "condcrit_lhs": existence.condcrit_lhs(args.p, n_p),
              "condcrit_lhs_next": existence.condcrit_lhs(args.p, n_p + 1)}
    if args.p < 4:
        record["certified_N"] = existence.certified_N(args.p, args.cap)
    _record(args, record)


def cmd_r_curve(args) -> None:
    grid = np.linspace(args.p_min, args.p_max, args.steps)
    rows = [{"p": p, "R": r, "three_R": 3.0 * r} for p, r in existence.r_curve(grid)]
    _emit(args, rows, ["p", "R", "three_R"], single=False)


def cmd_phase_diagram(args) -> None:
    pairs = [(p, q) for p in _float_list(args.p) for q in _float_list(args.q)]
    rows = existence.phase_diagram(pairs, _int_list(args.n), _float_list(args.mu),
                                   workers=args.workers)
    columns = list(existence.PhaseRow.COLUMNS)
    _emit(args, [asdict(r) for r in rows], columns, single=False)


def cmd_stability(args) -> None:
    cert = reduced.hessian_check(NonlinearParams(args.p, args.q), args.n, args.mu,
                                 _setting(args, "step"))
    _record(args, cert.as_dict())


def cmd_oracle(args) -> None:
    params = NonlinearParams(args.p, args.q)
    grid = discrete.GridSpec(args.n, args.L, args.dx)
    state = stationary.solve_stationary(params, args.n, 0, args.mu)
    if args.init == "stationary":
        init = discrete.sample_stationary(state, grid)
        rng = np.random.default_rng(args.seed)
        values = init.values * (1.0 + args.noise * rng.standard_normal(init.values.shape))
        values[:, 0] = values[0, 0]
        init = discrete.DiscreteField(grid, values)
    else:
        omega = soliton.omega_of_mass_line(args.p, args.mu)
        init = discrete.sample_soliton_on_edge(grid, args.p, omega, args.L / 2)
    result = discrete.minimize(params, grid, args.mu, init, _setting(args, "max_iter"),
                               _setting(args, "tol"))
    floor_ok = all(e >= discrete.gn_coercivity_bound(params, args.mu, k)
                   for e, k in zip(result.energies, result.kinetic_norms))
    if args.field_csv:
        with open(_resolve_output(args.field_csv), "w", newline="") as fh:
            result.field.to_csv(fh)
    _record(args, {
        "p": args.p, "q": args.q, "N": args.n, "mu": args.mu, "L": args.L, "dx": args.dx,
        "init": args.init, "energy": result.energy, "iterations": result.iterations,
        "converged": result.converged, "vertex_value": result.field.vertex,
        "mass": discrete.discrete_mass(result.field), "energy_eta": state.energy,
        "line_energy": soliton.line_energy(args.p, args.mu), "gn_floor_ok": floor_ok,
        "tail_ok": grid.tail_ok(state.omega),
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starnls", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default: json for records, csv for sweeps)")
    common.add_argument("--output", default=None,
                        help=f"output file; relative paths resolve under ${OUTPUT_DIR_ENV} "
                             "when set (default: stdout)")
    common.add_argument("--profile", choices=sorted(PROFILES), default="precise",
                        help="tolerance bundle used for any tolerance flag left unset")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def pq(p):
        p.add_argument("--p", type=float, required=True, help="power p in (2, 6)")
        p.add_argument("--q", type=float, required=True, help="vertex power q in (2, 4)")

    s = add("soliton", cmd_soliton, "line soliton by mass or frequency")
    s.add_argument("--p", type=float, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--mu", type=float)
    g.add_argument("--omega", type=float)

    s = add("stationary", cmd_stationary, "stationary state eta_J on the star graph")
    pq(s)
    s.add_argument("--n", type=int, required=True, help="number of half-lines N >= 2")
    s.add_argument("--J", type=int, default=0, help="peak-containing edges (default 0)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--mu", type=float)
    g.add_argument("--omega", type=float)
    s.add_argument("--omega-tol", type=float, default=None,
                   help="relative tolerance on omega (precise: 1e-12)")

    s = add("exists", cmd_exists, "ground-state existence verdict")
    pq(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mu", type=float, required=True)

    s = add("critical-mass", cmd_critical_mass, "mass at which existence switches")
    pq(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rel-tol", type=float, default=None,
                   help="relative bracket width (precise: 1e-10)")
    s.add_argument("--mu-min", type=float, default=existence.MU_BOUNDS[0],
                   help="lower end of the mass search window")
    s.add_argument("--mu-max", type=float, default=existence.MU_BOUNDS[1],
                   help="upper end of the mass search window")

    s = add("critical-n", cmd_critical_n, "largest N with ground states at q = p/2 + 1")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--cap", type=int, default=existence.N_CAP)

    s = add("r-curve", cmd_r_curve, "R(p) on a uniform grid (CSV)")
    s.add_argument("--p-min", type=float, default=2.1)
    s.add_argument("--p-max", type=float, default=5.99)
    s.add_argument("--steps", type=int, default=200)

    s = add("phase-diagram", cmd_phase_diagram, "existence verdicts over a grid (CSV)")
    s.add_argument("--p", required=True, help="comma-separated p values")
    s.add_argument("--q", required=True, help="comma-separated q values")
    s.add_argument("--n", required=True, help="comma-separated edge counts")
    s.add_argument("--mu", required=True, help="comma-separated masses")
    s.add_argument("--workers", type=int, default=1)

    s = add("stability", cmd_stability, "Hessian certificate of the reduced energy")
    pq(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--step", type=float, default=None,
                   help="relative finite-difference step (precise: 1e-4)")

    s = add("oracle", cmd_oracle, "discrete constrained minimisation")
    pq(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--L", type=float, default=40.0)
    s.add_argument("--dx", type=float, default=0.005)
    s.add_argument("--init", choices=("stationary", "soliton"), default="stationary",
                   help="perturbed radial state, or a line soliton mid-edge")
    s.add_argument("--noise", type=float, default=0.01)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--tol", type=float, default=None,
                   help="relative energy decrease to stop at (precise: 1e-10)")
    s.add_argument("--field-csv", default=None, help="also write the final field as CSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SearchFailure as exc:
        print(f"search failed: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_SEARCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

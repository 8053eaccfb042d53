"""Command-line front end.

Subcommands: entropy, moment, basis-table, scan, verify, minimize.
Output is reproducible byte for byte: fixed key order, floats at 17
significant digits, and atomic writes (temp file + rename). Exit codes:
0 ok, 1 usage or parse failure, 2 numerical failure, 3 a scan violation
that survived grid refinement.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import closed_forms, conjectures, sphere_quadrature
from .errors import WehrlLabError
from .spin_core import (
    HalfInt,
    SpinState,
    basis_state,
    gauss_legendre_grid,
    magnetic_labels,
    random_euler_angles,
    random_haar_state,
    spin,
    state_from_dict,
    state_to_dict,
)
from .wigner import apply_rotation

DEFAULT_SEED = 2024


@dataclass
class CliConfig:
    subcommand: str
    two_j: int = 2
    p: tuple[float, ...] = ()
    a: tuple[float, ...] = ()
    n_theta: int = sphere_quadrature.DEFAULT_N_THETA
    n_phi: int = sphere_quadrature.DEFAULT_N_PHI
    count: int = 1000
    seed: int = DEFAULT_SEED
    format: str = "json"
    output: str | None = None

    def __post_init__(self) -> None:
        if self.two_j < 1:
            raise ValueError(f"--two-j must be >= 1, got {self.two_j}")
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("grid sizes must be >= 2")
        if any(not (p > 0.0) for p in self.p):
            raise ValueError("every --p entry must be positive")


# ---------------------------------------------------------------------------
# canonical serialization


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite value in report")
    return format(x, ".17g")


def dumps_canonical(obj) -> str:
    """JSON with insertion-ordered keys and 17-significant-digit floats."""
    pieces: list[str] = []
    _write_json(obj, pieces)
    return "".join(pieces)


def _write_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return "\n"
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            value = row[key]
            if value is None:
                cells.append("")
            elif isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, (int, np.integer)):
                cells.append(str(int(value)))
            elif isinstance(value, (float, np.floating)):
                cells.append(format_float(float(value)))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_output(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".wehrl-lab-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def emit(payload, fmt: str, output: str | None, rows: list[dict] | None = None) -> None:
    if fmt == "csv":
        text = rows_to_csv(rows if rows is not None else [payload])
    else:
        text = dumps_canonical(payload) + "\n"
    write_output(text, output)


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--two-j", type=int, default=2, help="doubled spin label (integer)")
    sub.add_argument("--n-theta", type=int, default=sphere_quadrature.DEFAULT_N_THETA)
    sub.add_argument("--n-phi", type=int, default=sphere_quadrature.DEFAULT_N_PHI)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", default=None, help="write atomically to this path")


def build_parser() -> _Parser:
    parser = _Parser(prog="wehrl-lab", description=__doc__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p_entropy = subs.add_parser("entropy", help="classical entropy of one state")
    _add_common(p_entropy)
    p_entropy.add_argument("--state-file", default=None, help="path to a state JSON file")
    p_entropy.add_argument("--a", type=float, default=None, help="spin-1 orbit parameter")
    p_entropy.add_argument("--h", type=float, default=1e-3, help="p-derivative step")
    p_entropy.set_defaults(func=cmd_entropy)

    p_moment = subs.add_parser("moment", help="coherent-state moment integrals")
    _add_common(p_moment)
    p_moment.add_argument("--state-file", default=None)
    p_moment.add_argument("--a", type=float, default=None)
    p_moment.add_argument("--p", type=float, nargs="+", required=True)
    p_moment.set_defaults(func=cmd_moment)

    p_table = subs.add_parser("basis-table", help="closed form vs quadrature per basis state")
    _add_common(p_table)
    p_table.add_argument("--p", type=float, nargs="+", default=[2.0])
    p_table.set_defaults(func=cmd_basis_table)

    p_scan = subs.add_parser("scan", help="randomized or grid margin scans")
    _add_common(p_scan)
    p_scan.add_argument("--kind", choices=("lieb", "beta", "generalized"), default="lieb")
    p_scan.add_argument("--count", type=int, default=1000)
    p_scan.add_argument("--p", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    p_scan.add_argument("--tolerance", type=float, default=conjectures.VIOLATION_TOLERANCE)
    p_scan.add_argument("--a-grid", type=float, nargs="+", default=None,
                        help="beta scan: first Beta argument values")
    p_scan.add_argument("--b-grid", type=float, nargs="+", default=None,
                        help="beta scan: second Beta argument values")
    p_scan.set_defaults(func=cmd_scan)

    p_verify = subs.add_parser("verify", help="cross-oracle identity checks")
    _add_common(p_verify)
    p_verify.add_argument("--suite", choices=("identities", "hypothesis"), required=True)
    p_verify.add_argument("--n-max", type=int, default=6)
    p_verify.set_defaults(func=cmd_verify)

    p_min = subs.add_parser("minimize", help="search for the entropy minimizer")
    _add_common(p_min)
    p_min.add_argument("--restarts", type=int, default=3)
    p_min.set_defaults(func=cmd_minimize)

    return parser


def _grid_from(args) -> "sphere_quadrature.SphereGrid":
    return gauss_legendre_grid(args.n_theta, args.n_phi)


def _load_state(args) -> SpinState:
    """State from --state-file, or the spin-1 orbit representative for --a."""
    if args.state_file is not None and args.a is not None:
        raise ValueError("give either --state-file or --a, not both")
    if args.state_file is not None:
        with open(args.state_file, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        state = state_from_dict(data)
        if state.j.twice != args.two_j and "--two-j" in sys.argv:
            raise ValueError(
                f"state file has two_j={state.j.twice}, but --two-j {args.two_j} was given"
            )
        return state
    if args.a is not None:
        if args.two_j != 2:
            raise ValueError("--a describes spin-1 orbits; it requires --two-j 2")
        return closed_forms.stratum_representative(args.a)
    raise ValueError("need one of --state-file or --a")


# ---------------------------------------------------------------------------
# subcommands


def cmd_entropy(args) -> int:
    try:
        state = _load_state(args)
        config = CliConfig(
            subcommand="entropy", two_j=state.j.twice, n_theta=args.n_theta,
            n_phi=args.n_phi, seed=args.seed, format=args.format, output=args.output,
        )
    except (OSError, ValueError, KeyError) as exc:
        print(f"wehrl-lab entropy: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        s_direct = sphere_quadrature.classical_entropy_direct(state, +1, grid)
        s_pderiv = sphere_quadrature.classical_entropy_pderiv(state, +1, grid, h=args.h)
        i1 = sphere_quadrature.moment_integral(state, 1.0, +1, grid)
        margin = s_direct - state.j.twice / (state.j.twice + 1.0)
        s_closed = None
        a_value = None
        if state.j.twice == 2:
            a_value = closed_forms.orbit_param_a(state).a
            s_closed = closed_forms.s_cl_j1(a_value)
    except WehrlLabError as exc:
        print(f"wehrl-lab entropy: numerical failure: {exc}", file=sys.stderr)
        return 2
    payload = {
        "two_j": config.two_j,
        "grid": [args.n_theta, args.n_phi],
        "a": a_value,
        "s_direct": s_direct,
        "s_pderiv": s_pderiv,
        "s_closed": s_closed,
        "lieb_margin": margin,
        "i1_value": i1.value,
        "i1_err_estimate": i1.err_estimate,
        "route_abs_diff": abs(s_direct - s_pderiv),
    }
    emit(payload, config.format, config.output)
    return 0


def cmd_moment(args) -> int:
    try:
        state = _load_state(args)
        config = CliConfig(
            subcommand="moment", two_j=state.j.twice, p=tuple(args.p),
            n_theta=args.n_theta, n_phi=args.n_phi, seed=args.seed,
            format=args.format, output=args.output,
        )
    except (OSError, ValueError, KeyError) as exc:
        print(f"wehrl-lab moment: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        rows = []
        for p in config.p:
            result = sphere_quadrature.moment_integral(state, p, +1, grid)
            rows.append({
                "two_j": config.two_j,
                "p": p,
                "value": result.value,
                "err_estimate": result.err_estimate,
            })
    except WehrlLabError as exc:
        print(f"wehrl-lab moment: numerical failure: {exc}", file=sys.stderr)
        return 2
    payload = {"two_j": config.two_j, "grid": [args.n_theta, args.n_phi], "moments": rows}
    emit(payload, config.format, config.output, rows=rows)
    return 0


def cmd_basis_table(args) -> int:
    try:
        config = CliConfig(
            subcommand="basis-table", two_j=args.two_j, p=tuple(args.p),
            n_theta=args.n_theta, n_phi=args.n_phi, format=args.format,
            output=args.output,
        )
        j = spin(config.two_j)
    except ValueError as exc:
        print(f"wehrl-lab basis-table: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        rows = []
        for m in magnetic_labels(j):
            state = basis_state(j, m)
            s_closed = closed_forms.s_cl_basis(j, m)
            s_quad = sphere_quadrature.classical_entropy_direct(state, +1, grid)
            for p in config.p:
                i_closed = closed_forms.i_p_basis_closed(j, m, p)
                i_quad = sphere_quadrature.moment_integral(state, p, +1, grid).value
                rows.append({
                    "two_j": config.two_j,
                    "m": m.value,
                    "p": p,
                    "i_p_closed": i_closed,
                    "i_p_quadrature": i_quad,
                    "i_p_abs_diff": abs(i_closed - i_quad),
                    "s_cl_closed": s_closed,
                    "s_cl_quadrature": s_quad,
                    "s_cl_abs_diff": abs(s_closed - s_quad),
                })
    except WehrlLabError as exc:
        print(f"wehrl-lab basis-table: numerical failure: {exc}", file=sys.stderr)
        return 2
    payload = {"two_j": config.two_j, "grid": [args.n_theta, args.n_phi], "rows": rows}
    emit(payload, config.format, config.output, rows=rows)
    return 0


def _scan_beta(args, config: CliConfig):
    a_grid = args.a_grid if args.a_grid is not None else [0.1 * i for i in range(1, 101)]
    b_grid = args.b_grid if args.b_grid is not None else list(a_grid)
    p_grid = list(config.p)
    rows = []
    worst = math.inf
    for a in a_grid:
        for b in b_grid:
            for p in p_grid:
                margin = conjectures.beta_margin(a, b, p)
                worst = min(worst, margin)
                rows.append({"a": a, "b": b, "p": p, "margin": margin})
    payload = {
        "kind": "beta",
        "min_margin": worst,
        "tolerance": args.tolerance,
        "rows": rows,
    }
    return payload, rows, worst >= -args.tolerance


def _scan_generalized(args, config: CliConfig, grid):
    j = spin(config.two_j)
    rows = []
    worst = math.inf
    suspects = []
    for m in magnetic_labels(j):
        state = basis_state(j, m)
        for p in config.p:
            margin = conjectures.generalized_margin(state, p, grid)
            worst = min(worst, margin)
            rows.append({"two_j": config.two_j, "m": m.value, "p": p, "margin": margin})
            if margin < -args.tolerance:
                suspects.append((state, p))
    ok = True
    if suspects:
        fine = gauss_legendre_grid(2 * args.n_theta, 2 * args.n_phi)
        for state, p in suspects:
            if conjectures.generalized_margin(state, p, fine) < -args.tolerance:
                ok = False
    payload = {
        "kind": "generalized",
        "two_j": config.two_j,
        "min_margin": worst,
        "tolerance": args.tolerance,
        "rows": rows,
    }
    return payload, rows, ok


def cmd_scan(args) -> int:
    try:
        config = CliConfig(
            subcommand="scan", two_j=args.two_j, p=tuple(args.p), count=args.count,
            n_theta=args.n_theta, n_phi=args.n_phi, seed=args.seed,
            format=args.format, output=args.output,
        )
        if config.count < 1:
            raise ValueError("--count must be >= 1")
        if args.kind != "lieb" and any(p < 1.0 for p in config.p):
            raise ValueError("margin scans need p >= 1")
    except ValueError as exc:
        print(f"wehrl-lab scan: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        if args.kind == "beta":
            payload, rows, ok = _scan_beta(args, config)
        elif args.kind == "generalized":
            payload, rows, ok = _scan_generalized(args, config, grid)
        else:
            report = conjectures.scan_lieb(
                spin(config.two_j), config.count, config.seed,
                p_list=config.p, grid=grid, tolerance=args.tolerance,
            )
            payload = report.to_dict()
            rows = [
                {"two_j": config.two_j, "p": v.p, "margin": v.margin}
                for v in report.violations
            ] or [{"two_j": config.two_j, "p": None, "margin": report.min_margin}]
            ok = not report.violations
    except WehrlLabError as exc:
        print(f"wehrl-lab scan: numerical failure: {exc}", file=sys.stderr)
        return 2
    emit(payload, config.format, config.output, rows=rows)
    return 0 if ok else 3


def _identity_checks(args, grid):
    rng_seed = args.seed
    checks = []

    worst = 0.0
    for two_j in (1, 2, 3):
        j = spin(two_j)
        for i in range(10):
            u = random_haar_state(j, _seed_of(rng_seed, two_j, i))
            value = sphere_quadrature.moment_integral(u, 1.0, +1, grid).value
            worst = max(worst, abs(value - 1.0))
    checks.append(("moment_normalization_p1", worst, 1e-10))

    worst = 0.0
    for two_j in (1, 2, 3):
        j = spin(two_j)
        for i in range(4):
            u = random_haar_state(j, _seed_of(rng_seed, 100 + two_j, i))
            v = random_haar_state(j, _seed_of(rng_seed, 200 + two_j, i))
            value = sphere_quadrature.square_integrability_check(u, v, grid)
            worst = max(worst, abs(value - 1.0))  # Haar samples are unit norm
    checks.append(("square_integrability", worst, 1e-8))

    worst = 0.0
    for b in np.arange(0.0, 5.0 + 1e-9, 0.5):
        worst = max(worst, conjectures.jensen_identity_check(float(b)))
    checks.append(("jensen_beta_identity", worst, 1e-10))

    worst = 0.0
    for two_j in (1, 2, 3, 4):
        j = spin(two_j)
        u = random_haar_state(j, _seed_of(rng_seed, 300, two_j))
        direct = sphere_quadrature.classical_entropy_direct(u, +1, grid)
        pderiv = sphere_quadrature.classical_entropy_pderiv(u, +1, grid)
        worst = max(worst, abs(direct - pderiv))
    checks.append(("entropy_route_agreement", worst, 1e-6))

    worst = 0.0
    for a in np.arange(0.0, 1.0 + 1e-9, 0.1):
        rep = closed_forms.stratum_representative(float(a))
        direct = sphere_quadrature.classical_entropy_direct(rep, +1, grid)
        worst = max(worst, abs(direct - closed_forms.s_cl_j1(float(a))))
    checks.append(("stratum_entropy_closed_form", worst, 1e-6))

    return checks


def _hypothesis_checks(args, grid):
    checks = []
    a_grid = [round(0.1 * i, 1) for i in range(11)]

    worst = 0.0
    for n in range(1, args.n_max + 1):
        for a in a_grid:
            worst = max(
                worst,
                abs(closed_forms.i_n_oa_triple_sum(n, a) - closed_forms.i_n_oa_legendre(n, a)),
            )
    checks.append(("triple_sum_vs_legendre", worst, 1e-11))

    worst = 0.0
    for n in range(1, args.n_max + 1):
        for a in a_grid:
            quad = sphere_quadrature.moment_integral(
                closed_forms.stratum_representative(a), float(n), +1, grid
            ).value
            worst = max(worst, abs(closed_forms.i_n_oa_legendre(n, a) - quad))
    checks.append(("legendre_vs_quadrature", worst, 1e-9))

    worst = 0.0
    for p in (1.25, 1.5, 2.5, 3.75):
        for a in a_grid[1:-1]:
            quad = sphere_quadrature.moment_integral(
                closed_forms.stratum_representative(a), p, +1, grid
            ).value
            worst = max(worst, abs(closed_forms.i_p_oa_hypothesis(p, a) - quad))
    checks.append(("noninteger_p_vs_quadrature", worst, 1e-7))

    worst = 0.0
    for p in (1.5, 2.5):
        for a in a_grid[1:-1]:
            quad = sphere_quadrature.moment_integral(
                closed_forms.stratum_representative(a), p, +1, grid
            ).value
            worst = max(worst, abs(closed_forms.i_p_oa_integral_rep(p, a) - quad))
    checks.append(("integral_rep_vs_quadrature", worst, 1e-8))

    worst = 0.0
    for a in a_grid:
        s_numeric = closed_forms.entropy_from_hypothesis(a)
        worst = max(worst, abs(s_numeric - closed_forms.s_cl_j1(a)))
    checks.append(("hypothesis_entropy_route", worst, 1e-7))

    return checks


def _seed_of(*parts: int) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1, np.uint64)[0])


def cmd_verify(args) -> int:
    try:
        config = CliConfig(
            subcommand="verify", two_j=args.two_j, n_theta=args.n_theta,
            n_phi=args.n_phi, seed=args.seed, format=args.format, output=args.output,
        )
    except ValueError as exc:
        print(f"wehrl-lab verify: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        if args.suite == "identities":
            raw = _identity_checks(args, grid)
        else:
            raw = _hypothesis_checks(args, grid)
    except WehrlLabError as exc:
        print(f"wehrl-lab verify: numerical failure: {exc}", file=sys.stderr)
        return 2
    checks = [
        {"name": name, "max_deviation": dev, "contract": contract, "pass": dev < contract}
        for name, dev, contract in raw
    ]
    all_pass = all(c["pass"] for c in checks)
    payload = {"suite": args.suite, "checks": checks, "all_pass": all_pass}
    emit(payload, config.format, config.output, rows=checks)
    return 0 if all_pass else 2


def cmd_minimize(args) -> int:
    try:
        config = CliConfig(
            subcommand="minimize", two_j=args.two_j, n_theta=args.n_theta,
            n_phi=args.n_phi, seed=args.seed, format=args.format, output=args.output,
        )
        if args.restarts < 1:
            raise ValueError("--restarts must be >= 1")
    except ValueError as exc:
        print(f"wehrl-lab minimize: error: {exc}", file=sys.stderr)
        return 1
    try:
        grid = _grid_from(args)
        j = spin(config.two_j)
        result = conjectures.minimize_entropy(j, restarts=args.restarts, seed=config.seed, grid=grid)
        witness = conjectures.coherence_witness(result.state, grid)
    except WehrlLabError as exc:
        print(f"wehrl-lab minimize: numerical failure: {exc}", file=sys.stderr)
        return 2
    payload = {
        "two_j": config.two_j,
        "entropy": result.entropy,
        "target": config.two_j / (config.two_j + 1.0),
        "coherence_witness": witness,
        "converged": result.converged,
        "state": state_to_dict(result.state),
    }
    emit(payload, config.format, config.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

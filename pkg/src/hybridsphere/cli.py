"""Command-line experiment driver.

Subcommands::

    gen-points   write an experiment point set
    coeffs       Fourier-Legendre coefficient table
    solve        preconditioned MINRES over an (m, N, L) grid
    spectrum     extreme eigenvalues of the Schur complement against Lambda_L
    verify       run the acceptance suite

Every command writes CSV with a header. The exit status is 0 only when every
grid cell completed and every hard invariant held.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .assembly import FIELDS, assemble_A, cholesky
from .experiment import (
    PRECONDITIONERS,
    RESIDUAL_MODES,
    SCHUR_CHOICES,
    ExperimentConfig,
    make_points,
    solve_case,
    spectrum_case,
)
from .kernels import ZonalKernel, format_coeffs, fourier_legendre_coeffs, write_coeffs
from .minres import write_residual_log
from .points import CapSpec, write_points

SOLVE_COLUMNS = (
    "m", "N", "L", "precond", "iterations", "converged", "residual",
    "walltime_s", "interp_residual_inf", "side_condition_inf",
)
SPECTRUM_COLUMNS = ("m", "N", "L", "lambda_min", "lambda_max", "infsup_estimate")

# hard-invariant tolerances checked before rows are written
UPPER_BOUND_SLACK = 1e-8
INTERP_TOL = 1e-6

LIST_KEYS = {"m", "N", "L"}
INT_KEYS = {"n_cap", "jobs", "max_iter"}
FLOAT_KEYS = {"cap_radius", "rtol", "nu", "mu"}


def _int_list(text: str) -> list[int]:
    return [int(v) for v in str(text).replace(",", " ").split()]


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment, lists are comma separated."""
    known = set(ExperimentConfig.keys())
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in LIST_KEYS:
            out[key] = _int_list(value)
        elif key in INT_KEYS:
            out[key] = None if value.lower() == "none" else int(value)
        elif key in FLOAT_KEYS:
            out[key] = None if value.lower() == "none" else float(value)
        else:
            out[key] = value
    return out


def build_config(args) -> ExperimentConfig:
    """File values first, then any flag given on the command line."""
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key in ExperimentConfig.keys():
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return ExperimentConfig(**values).validate()


def _write_csv(path: str | None, header, rows) -> None:
    lines = [",".join(header)] + [",".join(str(r[c]) for c in header) for r in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _log_path(base: str, cell, many: bool) -> Path:
    p = Path(base)
    if not many:
        return p
    m, N, L = cell
    return p.with_name(f"{p.stem}_m{m}_N{N}_L{L}{p.suffix or '.csv'}")


def cmd_gen_points(args) -> int:
    n_cap = args.n_cap
    if n_cap >= args.N:
        raise SystemExit(f"n_cap ({n_cap}) must be smaller than N ({args.N})")
    cap = CapSpec(radius=args.cap_radius)
    pts = make_points(args.N, n_cap, cap.radius)
    try:
        write_points(args.output, pts)
    except OSError as exc:
        raise SystemExit(f"cannot write {args.output}: {exc}") from None
    inside = int(cap.contains(pts).sum())
    print(f"wrote {pts.shape[0]} points ({inside} in cap) to {args.output}", file=sys.stderr)
    return 0


def cmd_coeffs(args) -> int:
    table = fourier_legendre_coeffs(args.m, args.l_max, args.n_nodes)
    if args.output in (None, "-"):
        sys.stdout.write(format_coeffs(table))
    else:
        write_coeffs(args.output, table)
    return 0


def _solve_cell(cell, config: ExperimentConfig, residual_log: str | None, many: bool):
    m, N, L = cell
    res = solve_case(m, N, L, config)
    if residual_log:
        write_residual_log(_log_path(residual_log, cell, many), res.report)
    ok = True
    if res.report.converged:
        bound = INTERP_TOL * res.f_inf
        ok = res.interp_residual_inf <= bound and res.side_condition_inf <= bound
    return res.row(), ok, res.report.message


def cmd_solve(args) -> int:
    config = build_config(args)
    cells = sorted((m, N, L) for m in config.m for N in config.N for L in config.L)
    many = len(cells) > 1
    results = []
    if config.jobs > 1 and many:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_solve_cell, c, config, args.residual_log, many) for c in cells]
            results = [f.result() for f in futures]
    else:
        results = [_solve_cell(c, config, args.residual_log, many) for c in cells]
    rows = [r for r, _, _ in results]
    rows.sort(key=lambda r: (r["m"], r["N"], r["L"]))
    status = 0
    for row, ok, message in results:
        if not ok:
            print(f"invariant violated in cell m={row['m']} N={row['N']} L={row['L']}", file=sys.stderr)
            status = 1
        if row["converged"] != "true":
            print(f"cell m={row['m']} N={row['N']} L={row['L']}: {message}", file=sys.stderr)
    _write_csv(args.output, SOLVE_COLUMNS, rows)
    return status


def _spectrum_group(m: int, N: int, Ls, config: ExperimentConfig, eigen_dir: str | None):
    pts = make_points(N, config.n_cap, config.cap_radius)
    A = assemble_A(pts, ZonalKernel(m))
    factor = cholesky(A)
    rows = []
    for L in Ls:
        rep = spectrum_case(pts, m, L, factor=factor, A=A)
        if eigen_dir:
            d = Path(eigen_dir)
            d.mkdir(parents=True, exist_ok=True)
            lines = ["index,eigenvalue"] + [f"{i},{v:.16e}" for i, v in enumerate(rep.eigenvalues)]
            (d / f"eigenvalues_m{m}_N{N}_L{L}.csv").write_text("\n".join(lines) + "\n")
        rows.append({
            "m": m,
            "N": N,
            "L": L,
            "lambda_min": f"{rep.lambda_min:.10f}",
            "lambda_max": f"{rep.lambda_max:.10f}",
            "infsup_estimate": f"{rep.infsup_estimate:.10f}",
            "_ok": 0.0 < rep.lambda_min and rep.lambda_max <= 1.0 + UPPER_BOUND_SLACK,
        })
    return rows


def cmd_spectrum(args) -> int:
    config = build_config(args)
    if max(config.N) > 8000:
        raise SystemExit("spectrum runs are limited to N <= 8000 (dense Schur complement)")
    groups = sorted((m, N) for m in config.m for N in config.N)
    Ls = sorted(config.L)
    if config.jobs > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_spectrum_group, m, N, Ls, config, args.eigen_dir) for m, N in groups]
            chunks = [f.result() for f in futures]
    else:
        chunks = [_spectrum_group(m, N, Ls, config, args.eigen_dir) for m, N in groups]
    rows = [r for chunk in chunks for r in chunk]
    status = 0
    for r in rows:
        if not r["_ok"]:
            print(f"eigenvalue bound violated: m={r['m']} N={r['N']} L={r['L']} "
                  f"lambda_min={r['lambda_min']} lambda_max={r['lambda_max']}", file=sys.stderr)
            status = 1
    _write_csv(args.output, SPECTRUM_COLUMNS, rows)
    return status


def _find_acceptance_suite() -> Path | None:
    candidates = [Path.cwd() / "tests" / "test_acceptance.py",
                  Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"]
    for c in candidates:
        if c.is_file():
            return c
    return None


def cmd_verify(args) -> int:
    suite = _find_acceptance_suite()
    if suite is None:
        print("tests/test_acceptance.py not found; run from the repository root", file=sys.stderr)
        return 2
    try:
        import pytest
    except ImportError:
        print("verify needs pytest (pip install '.[test]')", file=sys.stderr)
        return 2
    extra = ["-k", args.select] if args.select else []
    return int(pytest.main([str(suite), "-s", "-q", *extra]))


def _add_grid_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat 'key = value' file; flags override it")
    p.add_argument("-m", "--m", type=_int_list, default=None, help="kernel orders, e.g. 0,1,2")
    p.add_argument("-N", "--N", type=_int_list, default=None, help="point counts, e.g. 2000,4000")
    p.add_argument("-L", "--L", type=_int_list, default=None, help="polynomial degrees, e.g. 0,5,10")
    p.add_argument("--n-cap", dest="n_cap", type=int, default=None, help="points placed in the cap (default 1000)")
    p.add_argument("--cap-radius", dest="cap_radius", type=float, default=None, help="cap radius in radians (default 0.1)")
    p.add_argument("--jobs", type=int, default=None, help="parallel grid cells (default 1)")
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsphere", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-points", help="write an experiment point set")
    p.add_argument("-N", "--N", type=int, required=True)
    p.add_argument("--n-cap", dest="n_cap", type=int, default=1000)
    p.add_argument("--cap-radius", dest="cap_radius", type=float, default=0.1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_points)

    p = sub.add_parser("coeffs", help="Fourier-Legendre coefficients a_l")
    p.add_argument("-m", "--m", type=int, required=True, choices=(0, 1, 2))
    p.add_argument("--l-max", dest="l_max", type=int, required=True)
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("solve", help="preconditioned MINRES over a grid")
    _add_grid_options(p)
    p.add_argument("--precond", choices=PRECONDITIONERS + ("block",), default=None,
                   help="primal block: none, schwarz (alias block) or exact")
    p.add_argument("--schur", choices=SCHUR_CHOICES, default=None)
    p.add_argument("--rtol", type=float, default=None, help="residual tolerance (default 1e-9)")
    p.add_argument("--residual-mode", dest="residual_mode", choices=RESIDUAL_MODES, default=None,
                   help="compare the preconditioned residual with rtol directly or relative to its start")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--nu", type=float, default=None, help="minimum centre separation (radians)")
    p.add_argument("--mu", type=float, default=None, help="subdomain radius (radians, < pi/3)")
    p.add_argument("--field", choices=sorted(FIELDS), default=None)
    p.add_argument("--residual-log", dest="residual_log", default=None,
                   help="CSV 'iteration,residual'; one file per cell when the grid has several")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectrum", help="generalized eigenvalues of (S, Lambda_L)")
    _add_grid_options(p)
    p.add_argument("--eigen-dir", dest="eigen_dir", default=None,
                   help="also write 'index,eigenvalue' files per cell here")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("-k", dest="select", default=None, help="pytest -k expression")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

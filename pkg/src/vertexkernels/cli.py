"""Command-line front end.

Subcommands tabulate a quantity over ``lo:hi:count`` grids and write CSV or
JSON; ``verify`` runs the identity suite.  Exit codes: 0 success, 1 usage
or input error, 2 numerical-accuracy failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import Grid, TabulatedSweep, make_dirichlet_graph, make_graph
from .errors import ContractError, DomainError
from .kernels import ProblemKind, star_kernel
from .spectral import (global_density_regular, local_spectral_density,
                       spectral_projection_kernel, staircase_increment)
from .vacuum import energy_density_closed, energy_density_from_density, energy_density_numeric
from .verify import run_suite
from .wavesolve import InitialData, evolve_fd_oracle, exact_snapshot

EXIT_OK, EXIT_USAGE, EXIT_ACCURACY = 0, 1, 2
THREADS_ENV = "VERTEXKERNELS_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class _SinglePoint:
    """A one-point axis given on the command line as a bare number."""

    def __init__(self, value):
        self.points = np.array([value])


def _grid(text):
    if ":" not in text:
        try:
            return _SinglePoint(float(text))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:count or a number, got {text!r}") from None
    try:
        return Grid.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value):
    return "%.17g" % value


def format_csv(sweep: TabulatedSweep) -> str:
    """Metadata as ``# key=value`` lines, then the header, then one record per line."""
    lines = [f"# {k}={_fmt(v) if isinstance(v, float) else v}"
             for k, v in sorted(sweep.metadata.items())]
    lines.append(",".join(sweep.column_names))
    lines.extend(",".join(_fmt(v) for v in row) for row in sweep.rows)
    return "\n".join(lines) + "\n"


def format_json(sweep: TabulatedSweep) -> str:
    doc = {"columns": list(sweep.column_names),
           "rows": [list(row) for row in sweep.rows],
           "metadata": dict(sorted(sweep.metadata.items()))}
    return json.dumps(doc, allow_nan=False) + "\n"


def write_sweep(sweep: TabulatedSweep, fmt: str, out: str):
    text = format_csv(sweep) if fmt == "csv" else format_json(sweep)
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _workers():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _map_rows(fn, items):
    """Evaluate ``fn`` on every item, concurrently if allowed; results keep input order."""
    items = list(items)
    workers = _workers()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _graph(args):
    if args.dirichlet:
        return make_dirichlet_graph(args.edges)
    if args.alpha is None:
        raise UsageError("give --alpha or --dirichlet")
    return make_graph(args.edges, args.alpha)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


def cmd_density(args):
    g = _graph(args)
    if args.kind == "global":
        _require(args, "omega")
        dens = global_density_regular(g)
        omegas = args.omega.points
        return TabulatedSweep.from_columns(
            ["omega", "regular_density"], [omegas, np.asarray(dens.regular_at(omegas), dtype=float)],
            {"delta_weight_at_zero": float(dens.delta_weight_at_zero)})
    if args.kind == "local":
        _require(args, "omega", "x")
        pairs = list(itertools.product(args.omega.points, args.x.points))
        vals = _map_rows(lambda p: local_spectral_density(g, p[0], args.j, p[1]), pairs)
        return TabulatedSweep(("omega", "x", "sigma"), tuple((w, x, v) for (w, x), v in zip(pairs, vals)))
    _require(args, "omega", "x", "y")
    triples = list(itertools.product(args.omega.points, args.x.points, args.y.points))
    vals = _map_rows(lambda p: spectral_projection_kernel(g, p[0], args.j, args.l, p[1], p[2]),
                     triples)
    return TabulatedSweep(("omega", "x", "y", "sigma"),
                          tuple((*p, v) for p, v in zip(triples, vals)))


def cmd_staircase(args):
    g = _graph(args)
    omegas = args.omega.points
    return TabulatedSweep.from_columns(["omega", "delta_N"],
                                       [omegas, [staircase_increment(g, w) for w in omegas]])


def cmd_kernel(args):
    g = _graph(args)
    kind = ProblemKind[args.kind.upper()]
    triples = list(itertools.product(args.t.points, args.x.points, args.y.points))
    vals = _map_rows(lambda p: star_kernel(kind, g, p[0], args.j, args.l, p[1], p[2],
                                           method=args.method), triples)
    if kind is ProblemKind.QUANTUM:
        return TabulatedSweep(("t", "x", "y", "re", "im"),
                              tuple((*p, v.real, v.imag) for p, v in zip(triples, vals)))
    return TabulatedSweep(("t", "x", "y", "value"), tuple((*p, v) for p, v in zip(triples, vals)))


def cmd_energy_density(args):
    g = _graph(args)
    xs = args.x.points

    def row(x):
        out = [x, energy_density_closed(g, x), energy_density_numeric(g, 1, x)]
        if args.with_density:
            out.append(energy_density_from_density(g, 1, x))
        return tuple(out)

    names = ["x", "T00_closed", "T00_numeric"] + (["T00_density"] if args.with_density else [])
    return TabulatedSweep(tuple(names), tuple(_map_rows(row, xs)))


def cmd_wave_evolve(args):
    g = _graph(args)
    amps = args.amplitudes or [1.0] * g.n_edges
    data = InitialData.bump(g.n_edges, args.center, args.half_width, amps)
    if not isinstance(args.x, Grid):
        raise UsageError("--x must be a lo:hi:count grid starting at 0")
    if args.fd:
        snap = evolve_fd_oracle(g, data, args.t, args.x, args.cfl)
    else:
        snap = exact_snapshot(g, data, args.t, args.x)
    rows = []
    for j, s in sorted(snap.samples.items()):
        rows.extend((j, x, u, ut, ux) for x, u, ut, ux in zip(s.x, s.u, s.u_t, s.u_x))
    return TabulatedSweep(("edge", "x", "u", "u_t", "u_x"), tuple(rows), {"t": float(args.t)})


def cmd_verify(args):
    results = run_suite("full" if args.full else "quick")
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCURACY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _graph_options(p):
    p.add_argument("--edges", type=int, required=True, help="number of edges N")
    p.add_argument("--alpha", type=float, help="vertex coupling alpha >= 0")
    p.add_argument("--dirichlet", action="store_true", help="Dirichlet vertex instead of alpha")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vertexkernels",
                     description="Green functions and spectral data of a star graph with a delta vertex.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="local, global or off-diagonal spectral density")
    _graph_options(p)
    p.add_argument("--kind", choices=("local", "global", "spectral"), default="local")
    p.add_argument("--omega", type=_grid)
    p.add_argument("--x", type=_grid)
    p.add_argument("--y", type=_grid)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("staircase", help="vertex contribution to the counting function")
    _graph_options(p)
    p.add_argument("--omega", type=_grid, required=True)
    p.set_defaults(handler=cmd_staircase)

    p = sub.add_parser("kernel", help="heat, cylinder or quantum kernel")
    _graph_options(p)
    p.add_argument("--kind", choices=("heat", "cylinder", "quantum"), required=True)
    p.add_argument("--t", type=_grid, required=True)
    p.add_argument("--x", type=_grid, required=True)
    p.add_argument("--y", type=_grid, required=True)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--method", choices=("closed", "contour", "quadrature"))
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("energy-density", help="vacuum energy density T00(x)")
    _graph_options(p)
    p.add_argument("--x", type=_grid, required=True)
    p.add_argument("--with-density", action="store_true",
                   help="add the subtracted-density route (slow)")
    p.set_defaults(handler=cmd_energy_density)

    p = sub.add_parser("wave-evolve", help="evolve bump initial data")
    _graph_options(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", type=_grid, required=True, help="output grid, must start at 0")
    p.add_argument("--center", type=float, default=3.0)
    p.add_argument("--half-width", type=float, default=1.0)
    p.add_argument("--amplitudes", type=float, nargs="+")
    p.add_argument("--fd", action="store_true", help="use the finite-difference solver")
    p.add_argument("--cfl", type=float, default=0.5)
    p.set_defaults(handler=cmd_wave_evolve)

    p = sub.add_parser("verify", help="run the cross-route identity suite")
    tier = p.add_mutually_exclusive_group()
    tier.add_argument("--quick", action="store_true", help="seconds (default)")
    tier.add_argument("--full", action="store_true", help="minutes")
    p.set_defaults(handler=cmd_verify)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        result = args.handler(args)
        if isinstance(result, int):
            return result
        write_sweep(result, args.format, args.out)
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ContractError) as exc:
        print(f"vertexkernels: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"vertexkernels: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"vertexkernels: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line front end.

Every subcommand prints one JSON envelope (or writes it to ``--out``).
Failures print a JSON error object and exit with 2 (usage), 3 (numeric)
or 4 (budget).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Sequence

from .. import exact, lattice, matrix, mirror
from ..errors import LensCSError
from ..largen import (TooftData, build_curve_q1, claim1_report, cut_endpoints, empirical_density,
                      saddle_solve)
from .envelope import ReportEnvelope, error_object
from .render import render_density, render_fan, render_web, write_svg

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_BUDGET = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would print and exit; we want a JSON error
        raise UsageError(message)


def _ls(a) -> lattice.LensSpace:
    return lattice.LensSpace(a.p, a.q)


# ---------------------------------------------------------------------------
# subcommands: each returns (inputs, outputs)

def cmd_fan(a):
    fan = lattice.build_fan(_ls(a))
    tri = lattice.triangulate(fan)
    out = {"fan": fan.to_dict(), "interior_points": [list(v) for v in lattice.interior_points(fan)],
           "triangulation": tri.to_dict(), "topology": lattice.topology(fan, tri).to_dict(),
           "lattice_width": lattice.lattice_width(fan.points)}
    if a.svg:
        write_svg(render_fan(fan, tri), a.svg)
        out["svg"] = str(a.svg)
    return {"p": a.p, "q": a.q}, out


def cmd_mirror(a):
    ls = _ls(a)
    P = mirror.newton_polynomial(ls)
    amap = mirror.fan_to_mirror_map(ls)
    return {"p": a.p, "q": a.q}, {
        "newton_polynomial": P.to_dict(), "pretty": P.pretty(),
        "invariants": mirror.curve_invariants(P).to_dict(),
        "fan_to_mirror_map": amap.to_dict() if amap else None}


def cmd_exact_z(a):
    ls = _ls(a)
    if a.full:
        if a.k is None:
            raise UsageError("--full needs --k")
        val = exact.z_full(ls, a.N, a.k, weighted=a.weighted, max_n=a.max_n)
    else:
        if a.k is None and a.gs is None:
            raise UsageError("give --k or --gs")
        m = tuple(a.m) if a.m else ()
        inp = (exact.ExactCSInput.from_level(ls, a.N, a.k, m) if a.k is not None
               else exact.ExactCSInput(ls, a.N, complex(a.gs) ** 0.5, m))
        val = exact.z_exact(inp, max_n=a.max_n)
    return ({"p": a.p, "q": a.q, "N": a.N, "k": a.k, "gs": a.gs, "m": a.m, "full": a.full,
             "weighted": a.weighted}, {"value": val.value, "convention": val.convention})


def cmd_matrix_z(a):
    spec = matrix.MatrixModelSpec(_ls(a), a.N, a.gs, tuple(a.m or ()), a.rep)
    if a.method == "quad":
        res = matrix.z_quadrature(spec)
    else:
        res = matrix.z_monte_carlo(spec, a.samples, a.seed)
    norm = matrix.normalization(spec)
    out = res.to_dict()
    out["normalization"] = norm
    out["sector_prefactor"] = matrix.sector_prefactor(spec)
    out["normalized_value"] = norm * res.value
    return ({"rep": a.rep, "p": a.p, "q": a.q, "N": a.N, "gs": a.gs, "m": list(spec.m),
             "method": a.method, "samples": a.samples, "seed": a.seed}, out)


def _fillings(a, p):
    if a.fillings:
        return TooftData(a.t, tuple(a.fillings))
    return TooftData.symmetric(p, a.t, a.S0)


def cmd_saddle(a):
    ls = _ls(a)
    td = _fillings(a, ls.p)
    cfg = saddle_solve(ls, a.N, a.t, td, tol=a.tol, kernel=a.kernel)
    ends = [cut_endpoints(g) if len(g) else None for g in cfg.groups]
    out = {"config": cfg.to_dict(), "endpoints": ends}
    if a.svg:
        _density_svg(cfg, a.svg)
        out["svg"] = str(a.svg)
    return {"p": a.p, "q": a.q, "N": a.N, "t": a.t, "fillings": list(td.fillings),
            "tol": a.tol, "kernel": a.kernel}, out


def _density_svg(cfg, path):
    dens = []
    for I, g in enumerate(cfg.groups):
        ok = len(g) >= 3 and cfg.kernel == "real"
        dens.append(empirical_density(cfg, I) if ok else None)
    ends = [cut_endpoints(g) if len(g) else (0, 0) for g in cfg.groups]
    write_svg(render_density(cfg.groups, cfg.p, dens, ends), path)


def cmd_curve_q1(a):
    c = build_curve_q1(a.p, a.t, a.S0)
    return {"p": a.p, "t": a.t, "S0": a.S0}, {
        "curve": c.to_dict(), "a_periods": c.a_periods(),
        "cut_masses": [c.cut_mass(J) for J in range(a.p)]}


def cmd_claim1(a):
    return {"p": a.p, "q": a.q}, claim1_report(a.p, a.q).to_dict()


def cmd_web_svg(a):
    fan = lattice.build_fan(_ls(a))
    web = lattice.pq_web(lattice.triangulate(fan))
    write_svg(render_web(web), a.svg)
    return {"p": a.p, "q": a.q}, {"web": web.to_dict(), "svg": str(a.svg)}


def cmd_density_svg(a):
    ls = _ls(a)
    td = _fillings(a, ls.p)
    cfg = saddle_solve(ls, a.N, a.t, td, kernel=a.kernel)
    _density_svg(cfg, a.svg)
    return ({"p": a.p, "q": a.q, "N": a.N, "t": a.t, "fillings": list(td.fillings), "kernel": a.kernel},
            {"svg": str(a.svg), "endpoints": [cut_endpoints(g) for g in cfg.groups if len(g)]})


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lenscs", description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    ap.add_argument("--timings", action="store_true", help="record wall-clock milliseconds")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pq(sp, q=True):
        sp.add_argument("--p", type=int, required=True)
        if q:
            sp.add_argument("--q", type=int, required=True)

    s = sub.add_parser("fan")
    pq(s)
    s.add_argument("--svg", type=Path)
    s.set_defaults(fn=cmd_fan)

    s = sub.add_parser("mirror")
    pq(s)
    s.set_defaults(fn=cmd_mirror)

    s = sub.add_parser("exact-z")
    pq(s)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--gs", type=float, help="real g_s^2 (euclidean coupling) instead of a level")
    s.add_argument("--m", type=int, nargs="*")
    s.add_argument("--full", action="store_true", help="sum over all flat connections")
    s.add_argument("--weighted", action="store_true", help="weight orbits by their size")
    s.add_argument("--max-n", type=int, default=exact.DEFAULT_MAX_N)
    s.set_defaults(fn=cmd_exact_z)

    s = sub.add_parser("matrix-z")
    pq(s)
    s.add_argument("--rep", choices=matrix.REPRESENTATIONS, default="mmcs")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--gs", type=float, required=True)
    s.add_argument("--m", type=int, nargs="*")
    s.add_argument("--method", choices=("quad", "mc"), default="quad")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_matrix_z)

    def saddle_args(s):
        pq(s)
        s.add_argument("--N", type=int, required=True)
        s.add_argument("--t", type=float, required=True)
        s.add_argument("--S0", type=float)
        s.add_argument("--fillings", type=float, nargs="*")
        s.add_argument("--kernel", choices=("real", "complex"), default="real")

    s = sub.add_parser("saddle")
    saddle_args(s)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--svg", type=Path)
    s.set_defaults(fn=cmd_saddle)

    s = sub.add_parser("curve-q1")
    pq(s, q=False)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--S0", type=float, required=True)
    s.set_defaults(fn=cmd_curve_q1)

    s = sub.add_parser("claim1")
    pq(s)
    s.set_defaults(fn=cmd_claim1)

    s = sub.add_parser("web-svg")
    pq(s)
    s.add_argument("--svg", type=Path, required=True)
    s.set_defaults(fn=cmd_web_svg)

    s = sub.add_parser("density-svg")
    saddle_args(s)
    s.add_argument("--svg", type=Path, required=True)
    s.set_defaults(fn=cmd_density_svg)
    return ap


def run(argv: Sequence[str] | None = None, stdout=None) -> tuple[int, str]:
    """Execute one command; return (exit code, text written)."""
    stdout = stdout or sys.stdout
    out_path = None
    try:
        args = build_parser().parse_args(argv)
        out_path = args.out
        t0 = time.perf_counter()
        inputs, outputs = args.fn(args)
        timings = {"total_ms": (time.perf_counter() - t0) * 1e3} if args.timings else {}
        text = ReportEnvelope(args.command, inputs, outputs, timings).to_json()
        code = EXIT_OK
    except UsageError as exc:
        code, text = EXIT_USAGE, error_object(exc, EXIT_USAGE)
    except SystemExit as exc:  # --help
        return int(exc.code or 0), ""
    except LensCSError as exc:
        code = exc.exit_code
        text = error_object(exc, code)
    except ValueError as exc:
        # parameter validation inside the library (ranges, lengths)
        code, text = EXIT_USAGE, error_object(exc, EXIT_USAGE)
    except Exception as exc:
        code, text = EXIT_NUMERIC, error_object(exc, EXIT_NUMERIC)
    if out_path is not None and code == EXIT_OK:
        Path(out_path).write_text(text)
    else:
        stdout.write(text)
    return code, text


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

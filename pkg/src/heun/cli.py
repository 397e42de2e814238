"""Command line front end.

::

    heun eval      general Heun solution at a point
    heun ceval     confluent Heun solution at a point
    heun connect   connection matrix between two singular points
    heun monodromy monodromy matrix of a local basis around a loop
    heun qnm       Regge-Wheeler quasinormal modes in a frequency rectangle

Complex numbers are written ``re,im`` (or a single real number). Values that
start with a minus sign need the ``--flag=value`` form. Exit status: 0 on
success, 2 on bad input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .connection import connection_matrix
from .continuation import ContinuationPath, StatePair, circle_loop, continue_along_path, default_path, monodromy_matrix
from .errors import HeunError, InputError, NumericalError
from .frobenius import DISC_CAP, EvalResult, eval_series, local_basis, local_solution, point_label, point_location
from .params import ConfluentParams, HeunParams, params_from_dict
from .spectral import RWProblem, find_modes

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
COMMANDS = ("eval", "ceval", "connect", "monodromy", "qnm")
BRANCH_NOTE = (
    "branch: principal powers at the seed; default path is the straight segment "
    "with circular detours on the upper-half-plane side"
)


@dataclass
class JobConfig:
    command: str
    params: HeunParams | ConfluentParams | None = None
    output: str = "json"
    tolerance: float = 1e-12
    path: ContinuationPath | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.output not in ("json", "csv"):
            raise InputError("output must be json or csv")
        if not (1e-14 <= self.tolerance <= 1e-3):
            raise InputError("tolerance must lie in [1e-14, 1e-3]")


def parse_complex(text: str) -> complex:
    text = str(text).strip()
    try:
        if "," in text:
            re, im = text.split(",")
            return complex(float(re), float(im))
        return complex(text.replace(" ", ""))
    except ValueError:
        raise InputError(f"cannot read {text!r} as a complex number (use re,im)") from None


def _pair(v: complex) -> list[float]:
    return [v.real, v.imag]


# --- argument parsing -----------------------------------------------------


def _common(p):
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, default=1e-12, help="local error tolerance, in [1e-14, 1e-3]")
    p.add_argument("--params", metavar="FILE", help="parameters as a JSON file")
    p.add_argument("--path", metavar="FILE", help="continuation path as a JSON file")


def _general_flags(p):
    for name in HeunParams._keys:
        p.add_argument(f"--{name}", metavar="RE,IM")


def _confluent_flags(p):
    for name in ConfluentParams._keys:
        p.add_argument(f"--{name}", metavar="RE,IM")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heun", description="Heun function toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    for cmd, flags in (("eval", _general_flags), ("ceval", _confluent_flags)):
        p = sub.add_parser(cmd, help=f"evaluate a {'general' if cmd == 'eval' else 'confluent'} Heun solution")
        _common(p)
        flags(p)
        p.add_argument("--z", required=True, metavar="RE,IM")
        p.add_argument("--point", default="0", help="expansion point: 0, 1 or a")
        p.add_argument("--branch", choices=("first", "second"), default="first")

    p = sub.add_parser("connect", help="connection matrix between two singular points")
    _common(p)
    p.add_argument("--equation", choices=("general", "confluent"), default=None)
    _general_flags(p)
    for name in ("mu", "nu"):
        p.add_argument(f"--{name}", metavar="RE,IM")
    p.add_argument("--from", dest="from_point", default="0")
    p.add_argument("--to", dest="to_point", default="1")

    p = sub.add_parser("monodromy", help="monodromy of a local basis around a loop")
    _common(p)
    p.add_argument("--equation", choices=("general", "confluent"), default=None)
    _general_flags(p)
    for name in ("mu", "nu"):
        p.add_argument(f"--{name}", metavar="RE,IM")
    p.add_argument("--point", default="0", help="singular point of the basis (default loop circles it)")

    p = sub.add_parser("qnm", help="Regge-Wheeler quasinormal modes")
    _common(p)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--rho", default="0", metavar="RE,IM")
    p.add_argument("--r-surface", type=float, default=None)
    p.add_argument("--region", default="0.25,-0.35,0.45,-0.03", metavar="RE0,IM0,RE1,IM1",
                   help="frequency rectangle in units 1/M (lower-left, upper-right)")
    p.add_argument("--grid", default="8,8", metavar="NX,NY")
    p.add_argument("--residual-tol", type=float, default=1e-9)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--emit-grid", metavar="FILE", help="write |D| on the scan grid as CSV")
    p.add_argument("--oracle", choices=("leaver",), help=argparse.SUPPRESS)
    p.add_argument("--overtones", type=int, default=2, help=argparse.SUPPRESS)
    return parser


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _params_from_args(ns, kind):
    if ns.params:
        d = _read_json(ns.params)
        if not isinstance(d, dict):
            raise InputError("parameter file must hold a JSON object")
        p = params_from_dict(d)
        if kind and p.kind != kind:
            raise InputError(f"expected {kind} parameters in {ns.params}")
        return p
    keys = HeunParams._keys if kind == "general" else ConfluentParams._keys
    values = {k: getattr(ns, k, None) for k in keys}
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise InputError(f"missing parameters: {', '.join('--' + k for k in missing)}")
    vals = {k: parse_complex(v) for k, v in values.items()}
    return HeunParams(**vals) if kind == "general" else ConfluentParams(**vals)


def _infer_kind(ns):
    if ns.equation:
        return ns.equation
    if ns.params:
        return None
    return "confluent" if (ns.mu is not None or ns.nu is not None) else "general"


def config_from_args(ns) -> JobConfig:
    opts: dict = {}
    params = None
    if ns.command in ("eval", "ceval"):
        params = _params_from_args(ns, "general" if ns.command == "eval" else "confluent")
        opts.update(z=parse_complex(ns.z), point=ns.point, branch=ns.branch)
    elif ns.command in ("connect", "monodromy"):
        params = _params_from_args(ns, _infer_kind(ns))
        if ns.command == "connect":
            opts.update(from_point=ns.from_point, to_point=ns.to_point)
        else:
            opts.update(point=ns.point)
    else:
        try:
            region = [float(x) for x in ns.region.split(",")]
            grid = tuple(int(x) for x in ns.grid.split(","))
            if len(region) != 4 or len(grid) != 2:
                raise ValueError
        except ValueError:
            raise InputError("--region needs four numbers and --grid two integers") from None
        opts.update(
            problem=RWProblem(ns.M, ns.ell, ns.s, parse_complex(ns.rho), ns.r_surface),
            region=(complex(region[0], region[1]), complex(region[2], region[3])),
            grid=grid,
            residual_tol=ns.residual_tol,
            workers=ns.workers,
            emit_grid=ns.emit_grid,
            oracle=ns.oracle,
            overtones=ns.overtones,
        )
    path = None
    if ns.path:
        path = ContinuationPath.from_dict(_read_json(ns.path), params)
    return JobConfig(ns.command, params, ns.output, ns.tol, path, opts)


# --- commands -------------------------------------------------------------


def _cmd_eval(cfg: JobConfig, err):
    eq, o = cfg.params, cfg.options
    sol = local_solution(eq, o["point"], o["branch"])
    z = o["z"]
    if cfg.path is None and abs(z - sol.expansion_point) <= DISC_CAP * sol.radius:
        res = eval_series(sol, z, max(cfg.tolerance * 1e-2, 1e-15))
    else:
        if cfg.path is not None:
            path = cfg.path
            if path.end != z:
                raise InputError(f"path ends at {path.end}, not at z = {z}")
        else:
            u = (z - sol.expansion_point) / abs(z - sol.expansion_point)
            path = default_path(eq, sol.expansion_point + 0.5 * sol.radius * u, z)
            print(BRANCH_NOTE, file=err)
        seed = eval_series(sol, path.start, 1e-15)
        diag: dict = {}
        end = continue_along_path(eq, StatePair(path.start, seed.value, seed.derivative), path, cfg.tolerance, diag)
        res = EvalResult(end.h, end.hp, diag["est_error"] + seed.est_error, seed.n_terms_used)
        print(f"continued along {len(path.waypoints)} waypoints in {diag['steps']} steps", file=err)
    doc = {"command": cfg.command, "params": eq.to_dict(), "point": sol.point, "branch": sol.branch,
           "z": _pair(z), "exponent": _pair(sol.exponent), **res.to_dict()}
    rows = [["z_re", "z_im", "value_re", "value_im", "derivative_re", "derivative_im", "est_error", "n_terms"],
            [z.real, z.imag, res.value.real, res.value.imag, res.derivative.real, res.derivative.imag,
             res.est_error, res.n_terms_used]]
    return doc, rows


def _cmd_connect(cfg: JobConfig, err):
    o = cfg.options
    cm = connection_matrix(cfg.params, o["from_point"], o["to_point"], cfg.path, cfg.tolerance)
    if cfg.path is None:
        print(BRANCH_NOTE, file=err)
    doc = {"command": "connect", "params": cfg.params.to_dict(), **cm.to_dict()}
    rows = [["i", "j", "re", "im"]]
    rows += [[i, j, cm.matrix[i, j].real, cm.matrix[i, j].imag] for i in range(2) for j in range(2)]
    return doc, rows


def _cmd_monodromy(cfg: JobConfig, err):
    eq = cfg.params
    label = point_label(eq, cfg.options["point"])
    basis = local_basis(eq, label)
    loop = cfg.path
    if loop is None:
        loop = circle_loop(eq, point_location(eq, label), 0.5 * basis[0].radius)
        print(f"loop: counter-clockwise circle of radius {0.5 * basis[0].radius:g} about {label}", file=err)
    diag: dict = {}
    M = monodromy_matrix(eq, basis, loop, cfg.tolerance, diag)
    doc = {"command": "monodromy", "params": eq.to_dict(), "point": label, "loop": loop.to_dict(),
           "matrix": [[_pair(complex(v)) for v in row] for row in M], "abel_residual": float(diag["abel_residual"]),
           "eigenvalues": [_pair(complex(v)) for v in np.linalg.eigvals(M)]}
    rows = [["i", "j", "re", "im"]] + [[i, j, M[i, j].real, M[i, j].imag] for i in range(2) for j in range(2)]
    return doc, rows


def _cmd_qnm(cfg: JobConfig, err):
    o = cfg.options
    prob: RWProblem = o["problem"]
    header = ["ell", "s", "rho_re", "rho_im", "n", "omega_re", "omega_im", "residual"]
    if o["oracle"] == "leaver":
        from .oracles import leaver_qnm_report

        reps = [leaver_qnm_report(prob.M, prob.ell, prob.s, n) for n in range(o["overtones"])]
        rows = [header] + [[prob.ell, prob.s, 0.0, 0.0, n, r.values[0].real, r.values[0].imag, r.convergence_metric]
                           for n, r in enumerate(reps)]
        doc = {"command": "qnm", "oracle": "leaver",
               "modes": [{"n": n, "omega": _pair(r.values[0]), "depth_doubling_shift": r.convergence_metric}
                         for n, r in enumerate(reps)]}
        return doc, rows
    diag: dict = {}
    modes = find_modes(prob, o["region"], o["grid"], o["residual_tol"], cfg.tolerance, workers=o["workers"],
                       diagnostics=diag)
    scan = diag["scan"]
    print(f"{len(modes)} modes from {diag['seeds']} seeds ({diag['dropped']} did not converge)", file=err)
    if o["emit_grid"]:
        with open(o["emit_grid"], "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["omega_re", "omega_im", "abs_D"])
            for j, y in enumerate(scan.im):
                for i, x in enumerate(scan.re):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(scan.absD[j, i]))])
    rho = prob.rho
    rows = [header] + [[prob.ell, prob.s, rho.real, rho.imag, m.overtone_hint, m.omega.real, m.omega.imag,
                        m.residual] for m in modes]
    doc = {
        "command": "qnm",
        "problem": {"M": prob.M, "ell": prob.ell, "s": prob.s, "rho": _pair(rho), "r_surface": prob.r_surface},
        "region": [_pair(o["region"][0]), _pair(o["region"][1])],
        "modes": [m.to_dict() for m in modes],
        "diagnostics": {"seeds": diag["seeds"], "dropped": diag["dropped"], "grid": list(o["grid"])},
    }
    return doc, rows


_HANDLERS = {"eval": _cmd_eval, "ceval": _cmd_eval, "connect": _cmd_connect, "monodromy": _cmd_monodromy,
             "qnm": _cmd_qnm}


def _write(doc, rows, fmt, out):
    if fmt == "json":
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        out.write(buf.getvalue())


def run(config: JobConfig, out=None, err=None) -> int:
    """Execute one job; returns the process exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        doc, rows = _HANDLERS[config.command](config, err)
    except InputError as exc:
        print(f"heun: input error in {exc.module}: {exc}", file=err)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        module = getattr(exc, "module", "linalg")
        print(f"heun: numerical failure in {module}: {exc}", file=err)
        return EXIT_NUMERICAL
    _write(doc, rows, config.output, out)
    return EXIT_OK


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
    except HeunError as exc:
        print(f"heun: input error in {exc.module}: {exc}", file=err)
        return EXIT_INPUT
    return run(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())

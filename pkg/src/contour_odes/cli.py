"""Command-line front end: ``eval``, ``coeffs``, ``verify`` and ``scan``.

Exit codes: 0 success, 1 a verified property failed, 2 bad arguments,
3 quadrature did not converge, 4 output path not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable


from .errors import ContourOdesError, NonConvergence, UnknownProperty
from .phi import PhiParams, phi_derivatives, phi_eval, u_family_eval
from .psi import PsiParams, psi_eval, special_eval
from .quadrature import EvalResult, QuadratureSpec
from .series import (
    U_coefficients,
    order_type_estimate,
    psi_coefficients,
    psi_deriv_zero_sum,
    recurrence_extend,
)
from .verify import PROPERTIES, GridSpec, run_property

__all__ = ["main", "build_parser", "OutputRecord", "parse_complex"]

FAMILIES = ("phi", "psi", "u", "fj", "uj", "U", "H", "Hneg", "G", "Ai")
TOL_ENV = "CONTOUR_ODES_TOL"
FIELDS = ("z_re", "z_im", "value_re", "value_im", "error_estimate", "function_id")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NONCONV, EXIT_UNWRITABLE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class OutputRecord:
    z_re: float
    z_im: float
    value_re: float
    value_im: float
    error_estimate: float
    function_id: str

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")


# ---------------------------------------------------------------- formatting

def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_exact(x) -> str:
    """17 significant digits for floats and for Fractions beyond float range."""
    if isinstance(x, Fraction):
        f = float(x)
        if f != 0 or x == 0:
            return fmt_float(f)
        with localcontext() as ctx:
            ctx.prec = 17
            d = Decimal(x.numerator) / Decimal(x.denominator)
        return format(d, ".16e")
    return fmt_float(x)


def _num(x) -> str:
    """JSON token for a number; non-finite values become strings."""
    s = fmt_exact(x)
    return s if re.fullmatch(r"-?[\d.]+(e[+-]?\d+)?", s) else json.dumps(s)


def _json_record(values: dict) -> str:
    parts = [f"{json.dumps(k)}: {json.dumps(v) if isinstance(v, str) else _num(v)}"
             for k, v in values.items()]
    return "{" + ", ".join(parts) + "}"


def write_rows(out, rows: Iterable[dict], fields: tuple, fmt: str) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(fields)
        for row in rows:
            w.writerow([row[f] if isinstance(row[f], str) else fmt_exact(row[f]) for f in fields])
    else:
        for row in rows:
            out.write(_json_record({f: row[f] for f in fields}) + "\n")


def record_row(rec: OutputRecord) -> dict:
    return {f: getattr(rec, f) for f in FIELDS}


# ---------------------------------------------------------------- parsing

def parse_complex(text: str) -> complex:
    """``"1.5"``, ``"-2+3i"``, ``"0.5j"``, ``"i"`` and the like."""
    s = text.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _range_spec(count: int):
    def parse(text: str):
        parts = text.strip().split(":")
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"expected {count} colon-separated numbers: {text!r}")
        return tuple(_float(p) for p in parts)

    return parse


def _protect_negatives(argv: list[str]) -> list[str]:
    # argparse reads "-2:2" or "-1+2i" as an option; a leading space disarms it
    return [" " + a if re.match(r"^-[\d.]", a) else a for a in argv]


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--b", type=parse_complex, default=0j)
    p.add_argument("--j", type=int)
    p.add_argument("--R", type=_float, help="circle radius for psi, U and G")
    p.add_argument("--p", "--s", dest="p", type=int, default=0, help="derivative order")
    p.add_argument("--scale", choices=("1", "2pii"), default="1",
                   help="multiply values by 2*pi*i (compares psi(3,2) with G)")


def _add_tol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--abs-tol", type=_float)
    p.add_argument("--rel-tol", type=_float)
    p.add_argument("--tail-tol", type=_float)


def _add_format(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--format", choices=("jsonl", "csv"), default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contour-odes",
        description="Evaluate and check contour-integral solutions of linear ODEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate a function at one or more points")
    _add_family_args(pe)
    pe.add_argument("--z", type=parse_complex, nargs="+", required=True)
    _add_tol_args(pe)
    _add_format(pe, "jsonl")

    pc = sub.add_parser("coeffs", help="Maclaurin coefficient table")
    pc.add_argument("--family", required=True, choices=("U", "psi", "phi"))
    pc.add_argument("--n", type=int)
    pc.add_argument("--k", type=int)
    pc.add_argument("--b", type=parse_complex, default=0j)
    pc.add_argument("--max-nu", type=int, help="largest nu for U (rows up to z^(2 nu))")
    pc.add_argument("--max-s", type=int, help="largest derivative index for psi")
    pc.add_argument("--max-m", type=int, help="largest power for phi")
    pc.add_argument("--provenance", choices=("closed_form_U", "residue_sum", "recurrence"))
    pc.add_argument("--trunc-tol", type=_float, default=1e-30)
    pc.add_argument("--estimate", action="store_true", help="append an order/type estimate")
    pc.add_argument("--estimate-method", choices=("regression", "limsup"), default="regression")
    _add_tol_args(pc)
    _add_format(pc, "jsonl")

    pv = sub.add_parser("verify", help="run registered properties")
    g = pv.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--property", action="append", choices=sorted(PROPERTIES))
    pv.add_argument("--n", type=int)
    pv.add_argument("--k", type=int)
    pv.add_argument("--b", type=parse_complex)
    _add_tol_args(pv)

    ps = sub.add_parser("scan", help="evaluate over a grid")
    _add_family_args(ps)
    grid = ps.add_mutually_exclusive_group(required=True)
    grid.add_argument("--ray", type=_float, metavar="THETA")
    grid.add_argument("--circle", type=_float, metavar="RADIUS")
    grid.add_argument("--disk", type=_float, metavar="RADIUS")
    grid.add_argument("--rect", type=_range_spec(5), metavar="X0:X1:Y0:Y1:STEP")
    ps.add_argument("--r", type=_range_spec(3), metavar="A:B:STEP", help="radii for --ray")
    ps.add_argument("--points", type=int, help="point count for --circle and --disk")
    ps.add_argument("--output", "-o", help="output file (default stdout)")
    _add_tol_args(ps)
    _add_format(ps, "csv")
    return parser


def _spec(args) -> QuadratureSpec:
    base = QuadratureSpec()
    abs_tol = base.abs_tol
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            abs_tol = float(env)
        except ValueError:
            raise UsageError(f"{TOL_ENV}={env!r} is not a number") from None
    if args.abs_tol is not None:
        abs_tol = args.abs_tol
    return QuadratureSpec(
        abs_tol=abs_tol,
        rel_tol=args.rel_tol if args.rel_tol is not None else base.rel_tol,
        tail_tol=args.tail_tol if args.tail_tol is not None else base.tail_tol,
    )


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {args.family} requires {', '.join(missing)}")


def _evaluator(args, spec: QuadratureSpec) -> tuple[str, Callable[[complex], EvalResult]]:
    fam, p = args.family, args.p
    if p < 0:
        raise UsageError("derivative order must be nonnegative")
    if fam == "Ai":
        params = PhiParams(2, 1, 0)
        return f"Ai^({p})", lambda z: phi_eval(params, p, z, spec)
    if fam == "phi":
        _need(args, "n", "k")
        params = PhiParams(args.n, args.k, args.b)
        b = args.b
        return (f"phi[n={args.n},k={args.k},b={fmt_float(b.real)}{fmt_float(b.imag):+}i]^({p})"
                if b.imag else f"phi[n={args.n},k={args.k},b={fmt_float(b.real)}]^({p})",
                lambda z: phi_eval(params, p, z, spec))
    if fam == "psi":
        _need(args, "n", "k")
        params = PsiParams(args.n, args.k)
        return f"psi[n={args.n},k={args.k}]^({p})", lambda z: psi_eval(params, p, z, spec, args.R)
    if fam in ("u", "fj", "uj"):
        _need(args, "n")
        if args.n < 2:
            raise UsageError("n must be >= 2")
        which = {"u": "u", "fj": "f", "uj": "uj"}[fam]
        if which != "u":
            _need(args, "j")
        tag = f"{fam}[n={args.n}" + (f",j={args.j}" if which != "u" else "") + f"]^({p})"
        return tag, lambda z: u_family_eval(args.n, which, p, z, spec, args.j)
    name = {"U": "U", "H": "H", "Hneg": "H_neg", "G": "G"}[fam]
    tag = f"{fam}^({p})" + (f"[R={fmt_float(args.R)}]" if args.R is not None else "")
    return tag, lambda z: special_eval(name, p, z, spec, args.R)


def _records(args, spec, points) -> Iterable[OutputRecord]:
    fid, f = _evaluator(args, spec)
    scale = 2j * math.pi if args.scale == "2pii" else 1.0
    if args.scale == "2pii":
        fid = "2pii*" + fid
    for z in points:
        z = complex(z)
        r = f(z)
        v = complex(r.value) * scale
        yield OutputRecord(z.real, z.imag, v.real, v.imag, r.error_estimate * abs(scale), fid)


# ---------------------------------------------------------------- commands

def cmd_eval(args, out) -> int:
    spec = _spec(args)
    records = list(_records(args, spec, args.z))
    write_rows(out, (record_row(r) for r in records), FIELDS, args.format)
    return EXIT_OK


def _scan_points(args) -> list[complex]:
    if args.ray is not None:
        if args.r is None:
            raise UsageError("--ray requires --r A:B:STEP")
        a, b, step = args.r
        if step <= 0 or b < a:
            raise UsageError("--r needs A <= B and STEP > 0")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return GridSpec.ray(args.ray, [a + i * step for i in range(count)]).samples()
    if args.circle is not None or args.disk is not None:
        if args.points is None or args.points < 1:
            raise UsageError("--circle/--disk require --points N with N >= 1")
        if args.circle is not None:
            return GridSpec.circle(args.circle, args.points).samples()
        return GridSpec.disk(args.points, args.disk).samples()
    x0, x1, y0, y1, step = args.rect
    if step <= 0 or x1 < x0 or y1 < y0:
        raise UsageError("--rect needs X0 <= X1, Y0 <= Y1 and STEP > 0")
    return GridSpec.rect(x0, x1, y0, y1, step).samples()


def cmd_scan(args, out) -> int:
    spec = _spec(args)
    points = _scan_points(args)
    records = list(_records(args, spec, points))
    buf = io.StringIO()
    write_rows(buf, (record_row(r) for r in records), FIELDS, args.format)
    if args.output is None:
        out.write(buf.getvalue())
        return EXIT_OK
    try:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    return EXIT_OK


def _coeff_table(args, spec):
    fam = args.family
    if fam == "U":
        if args.max_nu is None or args.max_nu < 0:
            raise UsageError("--family U requires --max-nu >= 0")
        prov = args.provenance or "closed_form_U"
        params = PsiParams(4, 3)
        m_max = 2 * args.max_nu
        if prov == "closed_form_U":
            coeffs = U_coefficients(args.max_nu, args.trunc_tol)
        elif prov == "residue_sum":
            coeffs = psi_coefficients(params, m_max, args.trunc_tol)
        else:
            seed = [psi_deriv_zero_sum(params, s, args.trunc_tol) for s in range(params.n)]
            coeffs = recurrence_extend(params, seed, max(m_max, params.n), args.trunc_tol)
        rows = [(m, coeffs[m]) for m in range(0, m_max + 1, 2)]
        return coeffs, rows, True
    if fam == "psi":
        if args.n is None or args.k is None or args.max_s is None or args.max_s < 0:
            raise UsageError("--family psi requires --n, --k and --max-s >= 0")
        params = PsiParams(args.n, args.k)
        prov = args.provenance or "residue_sum"
        if prov == "closed_form_U":
            raise UsageError("closed_form_U provenance applies to --family U only")
        if prov == "residue_sum":
            coeffs = psi_coefficients(params, args.max_s, args.trunc_tol)
        else:
            seed = [psi_deriv_zero_sum(params, s, args.trunc_tol) for s in range(params.n)]
            coeffs = recurrence_extend(params, seed, max(args.max_s, params.n), args.trunc_tol)
        even = params.n % 2 == 0 and params.k % 2 == 1
        return coeffs, [(m, coeffs[m]) for m in range(args.max_s + 1)], even
    if args.n is None or args.k is None or args.max_m is None or args.max_m < 0:
        raise UsageError("--family phi requires --n, --k and --max-m >= 0")
    if args.provenance not in (None, "recurrence"):
        raise UsageError("phi coefficients are available from the recurrence only")
    params = PhiParams(args.n, args.k, args.b)
    seed = [complex(v) for v in phi_derivatives(params, range(params.n), 0, spec).value]
    if params.b.imag == 0:
        seed = [v.real for v in seed]
    coeffs = recurrence_extend(params, seed, max(args.max_m, params.n), args.trunc_tol)
    return coeffs, [(m, coeffs[m]) for m in range(args.max_m + 1)], False


def cmd_coeffs(args, out) -> int:
    spec = _spec(args)
    coeffs, rows, even = _coeff_table(args, spec)
    table = []
    for m, c in rows:
        re_part = c if isinstance(c, Fraction) else complex(c).real
        im_part = 0.0 if isinstance(c, Fraction) else complex(c).imag
        table.append({"index": m, "coeff_re": re_part, "coeff_im": im_part,
                      "provenance": coeffs.provenance})
    fields = ("index", "coeff_re", "coeff_im", "provenance")
    write_rows(out, table, fields, args.format)
    if args.estimate:
        est = order_type_estimate(coeffs, even_only=even, method=args.estimate_method)
        if args.format == "csv":
            out.write(f"# rho_hat={fmt_float(est.rho_hat)} tau_hat={fmt_float(est.tau_hat)} "
                      f"nu_used={est.nu_used}\n")
        else:
            out.write(_json_record({"rho_hat": est.rho_hat, "tau_hat": est.tau_hat,
                                    "nu_used": est.nu_used}) + "\n")
    return EXIT_OK


def _override_params(pid: str, args):
    default = PROPERTIES[pid].default_params
    if args.n is None and args.k is None and args.b is None:
        return None
    if isinstance(default, PhiParams):
        n = args.n if args.n is not None else default.n
        k = args.k if args.k is not None else min(default.k, n - 1)
        b = args.b if args.b is not None else default.b
        return PhiParams(n, k, b)
    if isinstance(default, PsiParams):
        n = args.n if args.n is not None else default.n
        k = args.k if args.k is not None else default.k
        return PsiParams(n, k)
    return None


def cmd_verify(args, out) -> int:
    spec = _spec(args)
    ids = sorted(PROPERTIES, key=list(PROPERTIES).index) if args.all else args.property
    ok = True
    for pid in ids:
        rep = run_property(pid, _override_params(pid, args), None, spec)
        out.write(rep.to_json() + "\n")
        out.flush()
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {"eval": cmd_eval, "coeffs": cmd_coeffs, "verify": cmd_verify, "scan": cmd_scan}


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_negatives(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (UsageError, ValueError, UnknownProperty, ContourOdesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())

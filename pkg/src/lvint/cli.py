"""The ``lvint`` command line.

Exit codes: 0 success or pass, 1 a verification failed, 2 usage or parse error.
Every run prints one report document; ``--json`` switches it from indented
text to JSON.  Reports carry no timing unless ``--timing`` is given, so equal
inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import expr as _expr
from .catalog import SUPPORTED, UnsupportedResonance, get_case, list_cases, verify_case
from .darboux import (FIRST_INTEGRAL, IJM, ExpPartNotPolynomial, NotInvariant, ParametricExponent,
                      darboux_log_derivative, find_darboux_combination, parse_darboux,
                      relation_residual)
from .obstructions import integrability_obstructions, linearizability_obstructions
from .poly import PARAMS, format_poly
from .series import (HypothesisFailed, PreconditionViolated, VerificationFailed, default_order,
                     linearize_system, resonant_series_integral, theorem1_construct)
from .system import InvalidResonance, LVSystem, dual_transform

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_RATIONAL = re.compile(r"\s*([+-]?\d+(?:/\d+)?)\s*$")
_DECIMAL = re.compile(r"\d*\.\d|\d[eE][+-]?\d")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1, path: str = ""):
        self.line = line
        self.column = column
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class UsageError(ValueError):
    pass


# -- system files ---------------------------------------------------------------------------

def _rational(text: str, line: int, column: int, path: str) -> Fraction:
    m = _RATIONAL.match(text)
    if not m:
        if _DECIMAL.search(text):
            raise ParseError(f"decimal literal {text.strip()!r} not allowed; write p/q", line, column, path)
        raise ParseError(f"expected an integer or p/q, got {text.strip()!r}", line, column, path)
    try:
        return Fraction(m.group(1))
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text.strip()!r}", line, column, path) from None


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _parse_json_system(text: str, path: str):
    def no_float(s):
        raise ValueError(f"__float__{s}")

    try:
        data = json.loads(text, parse_float=no_float)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, path) from None
    except ValueError as exc:
        lit = str(exc).removeprefix("__float__")
        line, col = _line_col(text, max(text.find(lit), 0))
        raise ParseError(f"decimal literal {lit!r} not allowed; write p/q", line, col, path) from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object", 1, 1, path)

    def locate(value):
        line, col = _line_col(text, max(text.find(str(value)), 0))
        return line, col

    eigs = data.get("eigenvalues")
    if not isinstance(eigs, list) or len(eigs) != 3 or not all(isinstance(v, int) for v in eigs):
        raise ParseError("'eigenvalues' must be a list of three integers", *locate("eigenvalues"), path)
    matrix = data.get("matrix")
    if matrix is None and "params" in data:
        params = data["params"]
        matrix = [[params.get(n, 0) for n in PARAMS.names[i:i + 3]] for i in (0, 3, 6)]
    if matrix is None:
        matrix = [[0] * 3 for _ in range(3)]
    flat = [v for row in matrix for v in row] if all(isinstance(r, list) for r in matrix) else matrix
    if len(flat) != 9:
        raise ParseError("'matrix' must hold nine entries", *locate("matrix"), path)
    vals = []
    for v in flat:
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise ParseError(f"matrix entry {v!r} must be an integer or a \"p/q\" string", *locate(v), path)
        vals.append(_rational(str(v), *locate(v), path))
    return eigs, vals, data.get("label")


def _parse_text_system(text: str, path: str):
    """``key: value`` lines; ``matrix:`` is followed by three rows, or given as nine values."""
    eigs = None
    vals = {}
    label = None
    lines = text.splitlines()
    i = 0
    rows = []
    while i < len(lines):
        raw = lines[i]
        i += 1
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body and "=" not in body:
            raise ParseError("expected 'key: value'", i, 1, path)
        sep = ":" if ":" in body else "="
        key, _, rest = body.partition(sep)
        key = key.strip()
        vcol = len(key) + 2 + (len(rest) - len(rest.lstrip()))
        if key == "eigenvalues":
            parts = rest.replace(",", " ").split()
            if len(parts) != 3:
                raise ParseError("eigenvalues needs three integers", i, vcol, path)
            eigs = []
            for p in parts:
                q = _rational(p, i, body.find(p) + 1, path)
                if q.denominator != 1:
                    raise ParseError(f"eigenvalue {p!r} is not an integer", i, body.find(p) + 1, path)
                eigs.append(int(q))
        elif key == "label":
            label = rest.strip()
        elif key == "matrix":
            offset = len(body) - len(rest)
            tokens = [(t.group(), i, offset + t.start() + 1) for t in re.finditer(r"[^\s,]+", rest)]
            while len(tokens) < 9 and i < len(lines):
                nxt = lines[i].split("#", 1)[0]
                if not nxt.strip():
                    i += 1
                    continue
                if ":" in nxt or "=" in nxt:
                    break
                i += 1
                tokens += [(t.group(), i, t.start() + 1) for t in re.finditer(r"[^\s,]+", nxt)]
            if len(tokens) != 9:
                raise ParseError(f"matrix needs nine entries, found {len(tokens)}", i, 1, path)
            rows = [_rational(t, ln, col, path) for t, ln, col in tokens]
        elif key in PARAMS.names:
            vals[key] = _rational(rest, i, vcol, path)
        else:
            raise ParseError(f"unknown key {key!r}", i, 1, path)
    if eigs is None:
        raise ParseError("missing 'eigenvalues'", len(lines) or 1, 1, path)
    if rows and vals:
        raise ParseError("give either 'matrix' or parameter lines, not both", 1, 1, path)
    flat = rows or [vals.get(n, Fraction(0)) for n in PARAMS.names]
    return eigs, flat, label


def parse_system_text(text: str, path: str = "") -> LVSystem:
    if text.lstrip().startswith("{"):
        eigs, flat, _ = _parse_json_system(text, path)
    else:
        eigs, flat, _ = _parse_text_system(text, path)
    return LVSystem(eigs, [flat[0:3], flat[3:6], flat[6:9]])


def parse_system_file(path) -> LVSystem:
    """Read a system description (JSON or ``key: value`` text); never parses floats."""
    p = Path(path)
    return parse_system_text(p.read_text(encoding="utf-8"), str(p))


def format_system(sys: LVSystem, label: str | None = None) -> str:
    """Text system file that :func:`parse_system_file` reads back unchanged."""
    out = []
    if label:
        out.append(f"label: {label}")
    out.append("eigenvalues: " + " ".join(str(v) for v in sys.eigenvalues))
    out.append("matrix:")
    for row in sys.matrix:
        out.append("  " + " ".join(_q(v) for v in row))
    return "\n".join(out) + "\n"


def _q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# -- reports --------------------------------------------------------------------------------

def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    return _scalar(v)


def _is_flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v)


def _render_text(obj, indent=0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, str) and "\n" in v:
                lines.append(f"{pad}{k}: |")
                lines += [f"{pad}  {ln}" for ln in v.rstrip("\n").split("\n")]
            elif _is_flat(v) and len(_inline(v)) <= 80:
                lines.append(f"{pad}{k}: {_inline(v)}")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _render_text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict) and v:
                sub = _render_text(v, indent + 1)
                lines.append(f"{pad}- {sub[0].strip()}")
                lines += sub[1:]
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, list):
        return _inline(v)
    return str(v)


def _index(I) -> str:
    return "(" + ",".join(str(i) for i in I) + ")"


def _value(v) -> str:
    return format_poly(v) if hasattr(v, "terms") else _q(v)


def _series_terms(u, limit: int):
    items = u.items()
    out = [{"index": _index(I), "coeff": _value(c)} for I, c in items[:limit]]
    return out, len(items)


# -- subcommands ----------------------------------------------------------------------------

def _load(args) -> LVSystem:
    if not args.system:
        raise UsageError("a system file is required")
    return parse_system_file(args.system)


def _inputs(args, sys: LVSystem | None):
    d = {}
    if sys is not None:
        d["eigenvalues"] = list(sys.eigenvalues)
        d["matrix"] = [[_q(v) for v in row] for row in sys.matrix]
    return d


def cmd_obstructions(args):
    fn = integrability_obstructions if args.target == "int" else linearizability_obstructions
    if args.symbolic:
        res = _resonance(args.resonance) if args.resonance else None
        sys = None
        if res is None:
            sys = _load(args)
            res = sys.eigenvalues
        obs = fn(res, args.order)
        inputs = {"resonance": list(res)}
    else:
        sys = _load(args)
        obs = fn(sys.eigenvalues, args.order, sys.params())
        inputs = _inputs(args, sys)
    entries = [{"target": o.target, "index": _index(o.index), "value": _value(o.value)}
               for o in (obs.entries if args.all else obs.nonzero())]
    results = {"kind": obs.kind, "order": obs.order, "total": len(obs.entries),
               "nonzero": len(obs.nonzero()), "entries": entries}
    if obs.symbolic:
        return EXIT_OK, inputs, results
    return (EXIT_OK if obs.all_zero() else EXIT_FAIL), inputs, results


def cmd_series_integral(args):
    sys = _load(args)
    rho = tuple(_rational(r, 1, 1, "--rho") for r in args.rho)
    res = resonant_series_integral(sys, rho, args.order)
    terms, n = _series_terms(res.u, args.max_terms)
    results = {"rho": [_q(r) for r in res.rho], "order": res.order, "terms": n,
               "coefficients": terms,
               "obstructions": [{"index": _index(I), "value": _value(v)} for I, v in res.nonzero_obstructions]}
    return (EXIT_OK if res.ok else EXIT_FAIL), _inputs(args, sys), results


def _kind(text: str):
    if text in (FIRST_INTEGRAL, IJM):
        return text
    if text.startswith("eig:"):
        return ("eig", _rational(text[4:], 1, 5, "--kind"))
    raise UsageError(f"--kind must be fi, ijm or eig:K, got {text!r}")


def cmd_check(args):
    sys = _load(args)
    kind = _kind(args.kind)
    D = parse_darboux(args.expr, sys.params())
    results = {"expr": args.expr, "kind": args.kind}
    try:
        logd = darboux_log_derivative(sys, D)
    except (NotInvariant, ExpPartNotPolynomial) as exc:
        results.update({"holds": False, "error": str(exc)})
        return EXIT_FAIL, _inputs(args, sys), results
    resid = relation_residual(sys, D, kind)
    results.update({"log_derivative": format_poly(logd), "residual": format_poly(resid), "holds": not resid})
    return (EXIT_OK if not resid else EXIT_FAIL), _inputs(args, sys), results


def cmd_combine(args):
    sys = _load(args)
    atoms = [parse_darboux(a, sys.params()) for a in args.atoms]
    out = find_darboux_combination(sys, atoms, args.target)
    results = {"atoms": list(args.atoms), "target": args.target}
    if out is None:
        results["combination"] = None
        return EXIT_FAIL, _inputs(args, sys), results
    if args.target == "zero":
        results["basis"] = [[_q(e) for e in v] for v in out]
    else:
        results["exponents"] = [_q(e) for e in out]
    return EXIT_OK, _inputs(args, sys), results


def cmd_theorem1(args):
    sys = _load(args)
    results = {"phi": args.phi, "m": args.m, "order": args.order}
    try:
        res = theorem1_construct(sys, parse_darboux(args.phi, sys.params()),
                                 parse_darboux(args.m, sys.params()), args.order)
    except (VerificationFailed, HypothesisFailed, PreconditionViolated) as exc:
        results.update({"ok": False, "error": f"{type(exc).__name__}: {exc}"})
        return EXIT_FAIL, _inputs(args, sys), results
    terms, n = _series_terms(res.u, args.max_terms)
    results.update({
        "prefactor": [_q(r) for r in res.rho],
        "independent": res.independent,
        "exceptional": [_index(I) for I, _ in res.exceptional],
        "terms": n, "coefficients": terms,
        "obstructions": [{"index": _index(I), "value": _value(v)} for I, v in res.nonzero_obstructions],
        "ok": res.ok and res.independent,
    })
    return (EXIT_OK if results["ok"] else EXIT_FAIL), _inputs(args, sys), results


def cmd_linearize(args):
    sys = _load(args)
    lin = linearize_system(sys, args.order)
    results = {"order": args.order, "ok": lin.ok,
               "obstructions": [{"coordinate": c, "index": _index(I), "value": _value(v)}
                                for c, I, v in lin.nonzero_obstructions]}
    if args.max_terms:
        results["substitution"] = {name: _series_terms(u, args.max_terms)[0]
                                   for name, u in zip("XYZ", lin.u)}
    return (EXIT_OK if lin.ok else EXIT_FAIL), _inputs(args, sys), results


def _resonance(text: str):
    try:
        parts = tuple(int(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"resonance must look like 1:-1:1, got {text!r}") from None
    if len(parts) != 3:
        raise UsageError(f"resonance must have three parts, got {text!r}")
    return parts


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("LVINT_WORKERS", "1")))
    except ValueError:
        return 1


def cmd_verify_case(args):
    res = _resonance(args.resonance)
    case = get_case(args.case)
    if case.resonance != tuple(res):
        raise UsageError(f"{case.label} belongs to resonance {':'.join(map(str, case.resonance))}")
    order = args.order or default_order(res)
    rep = verify_case(case, order, args.samples, args.mode, args.seed, _workers())
    samples = []
    for s in rep.samples:
        samples.append({
            "seed": s.seed, "branch": s.branch,
            "point": {k: _q(v) for k, v in s.point.items() if v},
            "obstructions_vanish": s.obstructions_vanish,
            "nonzero_obstructions": [f"{t}{_index(I)}={_value(v)}" for t, I, v in s.nonzero_obstructions],
            "certificates": [{"check": c.description, "source": c.source, "ok": c.ok,
                              **({"message": c.message} if c.message else {})} for c in s.certificates],
            "series_orders": list(s.series_orders), "series_ok": s.series_ok,
            "linearization_ok": s.linearization_ok, "ok": s.ok,
        })
    results = {"case": case.label, "kind": case.kind, "conditions": list(case.conditions),
               "order": rep.order, "mode": rep.mode, "samples": samples, "verdict": rep.verdict}
    inputs = {"resonance": list(res), "case": case.label, "samples": args.samples}
    return (EXIT_OK if rep.verdict else EXIT_FAIL), inputs, results


def cmd_catalog(args):
    res = _resonance(args.resonance)
    cases = list_cases(res)
    out = []
    for c in cases:
        d = {"label": c.label, "kind": c.kind, "conditions": list(c.conditions),
             "branches": [b.tag for b in c.branches]}
        if c.dual_of:
            d["dual_of"] = c.dual_of
        if c.series_only:
            d["series_only"] = True
        out.append(d)
    return EXIT_OK, {"resonance": list(res)}, {"count": len(out), "cases": out}


def cmd_dual(args):
    sys = _load(args)
    d = dual_transform(sys)
    return EXIT_OK, _inputs(args, sys), {"system": format_system(d),
                                          "eigenvalues": list(d.eigenvalues),
                                          "matrix": [[_q(v) for v in row] for row in d.matrix]}


# -- entry point ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    p = argparse.ArgumentParser(prog="lvint", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"lvint {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, system=True):
        s = sub.add_parser(name, help=help_, parents=[common])
        if system:
            s.add_argument("system", nargs="?", help="system file (JSON or key: value text)")
        s.set_defaults(func=fn)
        return s

    s = add("obstructions", cmd_obstructions, "integrability or linearizability obstructions")
    s.add_argument("--target", choices=("int", "lin"), default="int")
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--symbolic", action="store_true", help="coefficients as polynomials in a..k")
    s.add_argument("--resonance", help="L:M:N, for --symbolic without a system file")
    s.add_argument("--all", action="store_true", help="list zero entries too")

    s = add("series-integral", cmd_series_integral, "formal first integral x^rho (1 + ...)")
    s.add_argument("--rho", nargs=3, required=True, metavar="R")
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--max-terms", type=int, default=50)

    s = add("check", cmd_check, "verify a Darboux relation exactly")
    s.add_argument("--expr", required=True)
    s.add_argument("--kind", required=True, help="fi | ijm | eig:K")

    s = add("combine", cmd_combine, "combine Darboux atoms into a first integral or IJM")
    s.add_argument("--atoms", nargs="+", required=True)
    s.add_argument("--target", choices=("zero", "div"), default="zero")

    s = add("theorem1", cmd_theorem1, "second first integral from a first integral and an IJM")
    s.add_argument("--phi", required=True)
    s.add_argument("--m", required=True)
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--max-terms", type=int, default=20)

    s = add("linearize", cmd_linearize, "formal linearizing substitution")
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--max-terms", type=int, default=0)

    s = add("verify-case", cmd_verify_case, "check a catalog case at seeded points", system=False)
    s.add_argument("--resonance", required=True)
    s.add_argument("--case", required=True)
    s.add_argument("--samples", type=int, default=5)
    s.add_argument("--order", type=int, default=None)
    s.add_argument("--mode", choices=("exact", "series", "both"), default="both")

    s = add("catalog", cmd_catalog, "list the cases for a resonance", system=False)
    s.add_argument("--resonance", required=True)

    add("dual", cmd_dual, "apply (x,y,z) -> (z,y,x)")
    return p


def run_command(argv, out=None, err=None):
    """Run one command; returns ``(exit code, report dict or None)``."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_USAGE), None
    t0 = time.perf_counter()
    try:
        code, inputs, results = args.func(args)
    except (ParseError, _expr.ParseError, _expr.EvalError, ParametricExponent, InvalidResonance,
            UnsupportedResonance, UsageError, KeyError, OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"lvint {args.command}: error: {msg}", file=err)
        return EXIT_USAGE, None
    report = {"command": ["lvint", *argv], "version": __version__, "seed": args.seed,
              "inputs": inputs, "results": results, "exit": code}
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 3)
    if args.json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write("\n".join(_render_text(report)) + "\n")
    return code, report


def main(argv=None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())

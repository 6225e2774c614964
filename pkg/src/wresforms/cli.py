"""Command line interface: flat tables, verification suites, constant solving.

Exit codes: 0 success, 1 verification residue or route disagreement, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import catalogue, conformal
from .conventions import area_factor, display_table
from .exact import format_rational, parse_rational
from .exterior import binomial_trace_constants, trace_pair
from .flat import CoefficientTable, omega_flat_direct, omega_flat_taylor, table_to_invariant
from .tensor import parse_expr, to_latex, to_text
from .tensor.expr import Factor, TensorExpr
from .tensor.relations import Certificate, express_in_basis, verify_identity

SUITES = ("trace-constants", "flat-routes", "grow6", "variation6", "cocycle6", "family", "filtration",
          "difference-term")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 6
    format: str = "text"
    measure: str = "normalized"
    E: Fraction = Fraction(0)
    G: Fraction = Fraction(0)
    output: str | None = None
    constraints: list = field(default_factory=list)

    def validate(self) -> None:
        if self.n % 2 or not 2 <= self.n <= 8:
            raise UsageError(f"n must be even with 2 <= n <= 8, got {self.n}")
        if self.format not in ("json", "latex", "text"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.measure not in ("normalized", "area"):
            raise UsageError(f"unknown measure {self.measure!r}")


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {raw.rstrip()}")
            k, v = (x.strip() for x in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def threads() -> int:
    try:
        return max(1, int(os.environ.get("WF_THREADS", "1")))
    except ValueError:
        raise UsageError("WF_THREADS must be an integer") from None


# ---------------------------------------------------------------------------
# flat tables

def flat_expression(table: CoefficientTable) -> TensorExpr:
    """Index form of a flat table with every derivative contracted pairwise."""
    out = TensorExpr()
    for (p, q, r), c in sorted(table_to_invariant(display_table(table)).items()):
        shared = [f"s{k}" for k in range(q)]
        fl = shared + [f"p{k}" for k in range(p) for _ in range(2)]
        hl = shared + [f"r{k}" for k in range(r) for _ in range(2)]
        out.add_term((Factor("f", (), tuple(fl)), Factor("h", (), tuple(hl))), c)
    return out


def _table_text(table: CoefficientTable, latex: bool) -> list:
    lines = []
    for (a, b), c in table.sorted_items():
        if latex:
            lines.append(f"{format_rational(c)}\\,\\partial^{{{''.join(map(str, a))}}}f"
                         f"\\,\\partial^{{{''.join(map(str, b))}}}h")
        else:
            lines.append(f"{format_rational(c)} d^{list(a)} f d^{list(b)} h")
    return lines


def cmd_flat(cfg: RunConfig) -> tuple:
    direct = omega_flat_direct(cfg.n)
    taylor = omega_flat_taylor(cfg.n)
    diff = direct.diff(taylor)
    scale = area_factor(cfg.n) if cfg.measure == "area" else Fraction(1)
    shown = CoefficientTable(cfg.n, {k: scale * v for k, v in direct.entries.items()}, direct.convention, direct.dim)
    note = f"times pi^{cfg.n // 2}" if cfg.measure == "area" else "normalized sphere measure"
    expr = flat_expression(direct)
    if cfg.format == "json":
        body = {"n": cfg.n, "measure": cfg.measure, "note": note,
                "direct": json.loads(shown.to_json()),
                "taylor": json.loads(CoefficientTable(cfg.n, {k: scale * v for k, v in taylor.entries.items()},
                                                      taylor.convention, taylor.dim).to_json()),
                "diff": [{"a": list(a), "b": list(b), "c": format_rational(c)} for (a, b), c in sorted(diff.items())],
                "display_form": to_text(expr)}
        text = json.dumps(body, indent=1)
    else:
        latex = cfg.format == "latex"
        head = [f"% n = {cfg.n}, {note}" if latex else f"# n = {cfg.n}, {note}",
                (to_latex(expr) if latex else to_text(expr)),
                "% coordinate table (partial derivatives)" if latex else "# coordinate table (partial derivatives)"]
        tail = ["% routes agree" if latex else "# routes agree"] if not diff else \
            [f"route difference at {k}: {format_rational(v)}" for k, v in sorted(diff.items())]
        text = "\n".join(head + _table_text(shown, latex) + tail)
    return text, (0 if not diff else 1)


# ---------------------------------------------------------------------------
# verification suites

def _cert(check: str, ok: bool, detail: str) -> dict:
    return {"check": check, "status": "zero" if ok else "residue", "certificate": detail}


def _from_certificate(c: Certificate, **extra) -> dict:
    d = c.to_dict()
    d.update(extra)
    return d


def _note(c: Certificate, **extra) -> dict:
    """A check reported for contrast only; it does not affect the exit status."""
    return _from_certificate(c, informational=True, **extra)


def suite_trace_constants(cfg: RunConfig) -> list:
    out = []
    for n in (2, 4, 6):
        got, formula = trace_pair(n), binomial_trace_constants(n)
        out.append(_cert(f"trace_pair({n})", got == formula,
                         f"matrices {tuple(map(format_rational, got))}, formula {tuple(map(format_rational, formula))}"))
    return out


def suite_flat_routes(cfg: RunConfig) -> list:
    out = []
    for n in (2, 4, 6):
        d = omega_flat_direct(n).diff(omega_flat_taylor(n))
        out.append(_cert(f"direct = taylor (n={n})", not d, "empty diff" if not d else repr(d)))
    return out


def suite_grow6(cfg: RunConfig) -> list:
    grown = conformal.grow_flat(display_table(omega_flat_taylor(6)))
    c = verify_identity(grown, catalogue.omega6_confflat(), "cf", check="grown = conformally flat display")
    return [_from_certificate(c, expression=to_text(grown))]


def suite_variation6(cfg: RunConfig) -> list:
    var = conformal.conformal_variation(catalogue.omega6_confflat())
    c = verify_identity(var, parse_expr(catalogue.VARIATION6), check="variation of conformally flat display")
    structures = {k: parse_expr(v) for k, v in catalogue.VARIATION_STRUCTURES.items()}
    coeffs, _ = express_in_basis(var, list(structures.values()))
    ans = conformal.conformal_variation(conformal.ansatz(with_family=False))
    per = {}
    for u, e in ans.terms.items():
        cu, _ = express_in_basis(e, list(structures.values()))
        per[u] = dict(zip(structures, map(format_rational, cu)))
    return [_from_certificate(c, expression=to_text(var),
                              structure_coefficients=dict(zip(structures, map(format_rational, coeffs)))),
            {"check": "ansatz variation on the displayed structures", "status": "zero",
             "certificate": json.dumps(per, sort_keys=True)}]


def suite_cocycle6(cfg: RunConfig) -> list:
    cob = conformal.hochschild_coboundary(catalogue.omega6_confflat())
    out = [_from_certificate(verify_identity(cob, parse_expr(catalogue.COCYCLE6), check="b tau of conformally flat"),
                             expression=to_text(cob))]
    out.append(_note(verify_identity(cob, parse_expr(catalogue.COCYCLE6_AS_PRINTED),
                                     check="b tau against the printed sum of divergence terms")))
    for u in ("C", "D", "E", "G"):
        out.append(_from_certificate(verify_identity(conformal.hochschild_coboundary(catalogue.ansatz_term(u)),
                                                     check=f"b tau' term {u} vanishes")))
    return out


def suite_family(cfg: RunConfig) -> list:
    r = conformal.check_family(cfg.E, cfg.G)
    pub = conformal.check_family(cfg.E, cfg.G, coefficients=catalogue.PUBLISHED_CONSTANTS)
    return [_from_certificate(r.symmetric), _from_certificate(r.variation), _from_certificate(r.cocycle),
            _cert("homogeneity 2 k_R + k_nabla = 6", r.homogeneous, "every monomial" if r.homogeneous else "violated"),
            _note(pub.variation, constants="printed"), _note(pub.cocycle, constants="printed")]


def suite_filtration(cfg: RunConfig) -> list:
    lhs, rhs = catalogue.FILTRATION_EXAMPLE
    c = verify_identity(parse_expr(lhs), parse_expr(rhs), check="order-4 Weyl term lies in the second filtration step")
    cand = conformal.candidate_terms()
    ok = cand.spanned_by is not None
    return [_from_certificate(c),
            _cert("unique candidate at (k_R, k_nabla) = (1, 4)", ok,
                  f"{len(cand.monomials)} contractions, quotient rank {cand.rank}"
                  + (f", spanned by {to_text(cand.spanned_by)}" if ok else ""))]


def suite_difference_term(cfg: RunConfig) -> list:
    sym = catalogue.omega6_confflat_symmetric()
    diff = parse_expr(catalogue.DIFFERENCE_TERM)
    c = verify_identity(sym - catalogue.omega6_confflat(), diff, check="symmetric form - display = difference term")
    c0 = verify_identity(diff, None, "cf", check="difference term vanishes for W = 0")
    fitted = catalogue.omega6_confflat_symmetric(catalogue.SYMMETRIC_CF_FITTED)
    c1 = verify_identity(fitted - catalogue.omega6_confflat(), diff,
                         check="symmetric form with refitted coefficients - display = difference term")
    return [_from_certificate(c), _from_certificate(c0), _note(c1)]


SUITE_FUNCS = {
    "trace-constants": suite_trace_constants, "flat-routes": suite_flat_routes, "grow6": suite_grow6,
    "variation6": suite_variation6, "cocycle6": suite_cocycle6, "family": suite_family,
    "filtration": suite_filtration, "difference-term": suite_difference_term,
}


def cmd_verify(suites: list, cfg: RunConfig) -> tuple:
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        results = list(pool.map(lambda s: SUITE_FUNCS[s](cfg), suites))
    report = {s: r for s, r in zip(suites, results)}
    ok = all(c["status"] in ("zero", "relation-span") for r in results for c in r if not c.get("informational"))
    return json.dumps(report, indent=1, sort_keys=True), (0 if ok else 1)


# ---------------------------------------------------------------------------
# solving

_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Z])")


def parse_constraint(text: str) -> tuple:
    """``"3B - 2A = -32"`` -> ({"B": 3, "A": -2}, -32)."""
    if text.count("=") != 1:
        raise UsageError(f"constraint needs one '=': {text!r}")
    lhs, rhs = text.split("=")
    coeffs: dict = {}
    pos = 0
    lhs = lhs.strip()
    while pos < len(lhs):
        m = _TERM.match(lhs, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse constraint {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = parse_rational(m.group(2)) if m.group(2) else Fraction(1)
        coeffs[m.group(3)] = coeffs.get(m.group(3), 0) + sign * c
        pos = m.end()
        while pos < len(lhs) and lhs[pos] == " ":
            pos += 1
    try:
        value = parse_rational(rhs.strip())
    except ValueError:
        raise UsageError(f"right-hand side must be rational: {text!r}") from None
    return coeffs, value


def cmd_solve(cfg: RunConfig) -> tuple:
    system = conformal.constraint_system()
    for text in cfg.constraints:
        coeffs, value = parse_constraint(text)
        unknown = set(coeffs) - set(system.unknowns)
        if unknown:
            raise UsageError(f"unknown constants {sorted(unknown)}")
        system.add(coeffs, value, "injected")
    lines = ["constraints:"] + [f"  {c}" for c in system.constraints]
    try:
        sol = conformal.solve_constants(system)
    except conformal.InconsistentConstraints as err:
        lines.append("inconsistent; combination giving 0 = nonzero:")
        lines += [f"  {format_rational(m)} * ({c})" for c, m in err.combination]
        return "\n".join(lines), 1
    lines.append("solution:")
    lines += [f"  {u} = {format_rational(v)}" for u, v in sol.values.items()]
    lines.append("free: " + (", ".join(sol.free) if sol.free else "none"))
    pub = catalogue.PUBLISHED_CONSTANTS
    differs = [u for u, v in pub.items() if u in sol.values and sol.values[u] != v]
    if differs:
        lines.append("differs from the printed constants in " + ", ".join(
            f"{u} (printed {format_rational(pub[u])})" for u in differs))
    return "\n".join(lines), 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wresforms", description=__doc__)
    ap.add_argument("--config", help="key = value file with default options")
    ap.add_argument("--output", help="write the result to this file")
    sub = ap.add_subparsers(dest="cmd", required=True)
    f = sub.add_parser("flat", help="flat coefficient tables by both routes")
    f.add_argument("--n", type=int)
    f.add_argument("--format", choices=("json", "latex", "text"))
    f.add_argument("--measure", choices=("normalized", "area"))
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", nargs="+", choices=SUITES + ("all",))
    v.add_argument("--E", type=str)
    v.add_argument("--G", type=str)
    s = sub.add_parser("solve", help="assemble and solve the constraint system")
    s.add_argument("--constraint", action="append", default=[], help='extra linear constraint, e.g. "E = 0"')
    return ap


def _config(args) -> RunConfig:
    base = read_config(args.config) if args.config else {}
    cfg = RunConfig()
    for key in ("n", "format", "measure", "E", "G", "output"):
        val = getattr(args, key, None)
        if val is None:
            val = base.get(key)
        if val is None:
            continue
        if key == "n":
            try:
                val = int(val)
            except ValueError:
                raise UsageError(f"n must be an integer, got {val!r}") from None
        elif key in ("E", "G"):
            try:
                val = parse_rational(str(val))
            except ValueError:
                raise UsageError(f"{key} must be a rational p/q, got {val!r}") from None
        setattr(cfg, key, val)
    cfg.constraints = list(getattr(args, "constraint", []) or [])
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = _config(args)
        if args.cmd == "flat":
            text, code = cmd_flat(cfg)
        elif args.cmd == "verify":
            suites = list(SUITES) if "all" in args.suite else list(dict.fromkeys(args.suite))
            text, code = cmd_verify(suites, cfg)
        else:
            text, code = cmd_solve(cfg)
    except (UsageError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

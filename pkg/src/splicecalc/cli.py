"""Command-line front end.

Commands:

  conway   print the Conway function, components, and linking matrix
  linking  print components and linking matrix only
  omega    print the reduced one-variable polynomial
  torres   print the spec of a link with one component removed
  torsion  print the torsion and counts of a based chain complex file
  selftest run the randomized verification suites

Exit codes: 0 success, 1 domain error (printed with its error name),
2 syntax error (expressions, catalog files, usage).

The splice expression grammar:

  expr := NAME | 'torus' '(' INT ',' INT ',' INT ')'
        | 'splice'  '(' expr '@' COMP ',' expr '@' COMP ')'
        | 'cable'   '(' expr '@' COMP ',' INT ',' INT ',' INT ')'
        | 'connsum' '(' expr '@' COMP ',' expr '@' COMP ')'
        | 'satellite' '(' expr ',' expr '@' COMP ')'

NAME resolves against the built-in catalog followed by --catalog files in
order; later files may not shadow earlier definitions.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .errors import (
    CatalogError,
    ExprSyntaxError,
    SpliceCalcError,
    SpliceCalcSyntaxError,
    UnknownComponent,
    UnknownName,
)
from .linkcore import Catalog, LinkSpec, builtin_catalog, emit_catalog, parse_catalog
from .spliceengine import (
    Cable,
    ConnSum,
    Leaf,
    Satellite,
    Splice,
    SpliceExpr,
    eval_expr,
    expr_components,
    omega,
    torres_remove,
)
from .selftests import run_all
from .symalg import render
from .torsionlab import counts, parse_complex, torsion


# ---------------------------------------------------------------------------
# Catalog stack.
# ---------------------------------------------------------------------------


def lookup(catalogs, name: str):
    for cat in catalogs:
        hit = cat.get(name)
        if hit is not None:
            return hit
    return None


def load_catalogs(paths) -> list[Catalog]:
    """Built-ins first, then each file; shadowing an earlier name is an error."""
    catalogs = [builtin_catalog()]
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CatalogError(f"{path}: {exc}") from exc
        earlier = list(catalogs)
        specs = parse_catalog(text, source=str(path), resolver=lambda n: lookup(earlier, n))
        cat = Catalog()
        for spec in specs:
            if lookup(catalogs, spec.name) is not None:
                raise CatalogError(
                    f"{path}: link {spec.name!r} shadows an earlier definition"
                )
            cat.add(spec)
        catalogs.append(cat)
    return catalogs


# ---------------------------------------------------------------------------
# Splice expression parser.
# ---------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z0-9_.\-]+")
_INT_RE = re.compile(r"-?\d+")
_KEYWORDS = ("splice", "cable", "connsum", "satellite", "torus")


class _ExprParser:
    def __init__(self, text: str, catalogs):
        self.text = text
        self.pos = 0
        self.catalogs = catalogs

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str):
        if self._peek() != ch:
            raise ExprSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def _int(self) -> int:
        self._skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            raise ExprSyntaxError("expected an integer", self.pos)
        self.pos = m.end()
        return int(m.group())

    def _name(self) -> str:
        self._skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            raise ExprSyntaxError("expected a name", self.pos)
        self.pos = m.end()
        return m.group()

    def parse(self) -> SpliceExpr:
        expr = self.expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ExprSyntaxError("unexpected trailing input", self.pos)
        return expr

    def _operand(self):
        """expr '@' COMP"""
        expr = self.expr()
        self._expect("@")
        comp = self._name()
        comps = expr_components(expr)
        if comp not in comps:
            raise UnknownComponent(
                f"component {comp!r} not in result (has: {' '.join(comps)})"
            )
        return expr, comp

    def expr(self) -> SpliceExpr:
        self._skip_ws()
        start = self.pos
        name = self._name()
        if name == "splice" or name == "connsum":
            self._expect("(")
            left, lc = self._operand()
            self._expect(",")
            right, rc = self._operand()
            self._expect(")")
            node = Splice if name == "splice" else ConnSum
            return node(left, lc, right, rc)
        if name == "cable":
            self._expect("(")
            base, comp = self._operand()
            self._expect(",")
            p = self._int()
            self._expect(",")
            q = self._int()
            self._expect(",")
            d = self._int()
            self._expect(")")
            return Cable(base, comp, p, q, d)
        if name == "satellite":
            self._expect("(")
            companion = self.expr()
            self._expect(",")
            pattern, meridian = self._operand()
            self._expect(")")
            return Satellite(companion, pattern, meridian)
        if name == "torus":
            self._expect("(")
            p = self._int()
            self._expect(",")
            q = self._int()
            self._expect(",")
            d = self._int()
            self._expect(")")
            spec = lookup(self.catalogs, f"torus({p},{q},{d})")
            return Leaf(spec)
        spec = lookup(self.catalogs, name)
        if spec is None:
            raise UnknownName(f"unknown link name {name!r} (at offset {start})")
        return Leaf(spec)


def parse_expr(text: str, catalogs) -> SpliceExpr:
    """Parse a splice expression, resolving names and validating components."""
    return _ExprParser(text, catalogs).parse()


# ---------------------------------------------------------------------------
# Output formatting.
# ---------------------------------------------------------------------------


def _spec_payload(spec: LinkSpec) -> dict:
    return {
        "conway": render(spec.conway),
        "components": list(spec.components),
        "lk": spec.lk_matrix(),
    }


def _print_spec(spec: LinkSpec, out, *, with_conway=True):
    if with_conway:
        print(f"conway: {render(spec.conway)}", file=out)
    print("components: " + " ".join(spec.components), file=out)
    print("lk:", file=out)
    for row in spec.lk_matrix():
        print(" ".join(str(v) for v in row), file=out)


def _emit(args, payload: dict, text_fn, out):
    if args.format == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        text_fn()


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def _read_expression(args) -> str:
    if args.expr is not None and args.file is not None:
        raise ExprSyntaxError("give either -e or a file, not both", 0)
    if args.expr is not None:
        return args.expr
    if args.file is not None:
        with open(args.file, "r", encoding="utf-8") as fh:
            return fh.read().strip()
    raise ExprSyntaxError("no expression given (use -e or a file)", 0)


def _evaluated(args) -> LinkSpec:
    catalogs = load_catalogs(args.catalog)
    expr = parse_expr(_read_expression(args), catalogs)
    return eval_expr(expr, verify=args.verify)


def _cmd_conway(args, out) -> int:
    spec = _evaluated(args)
    if args.emit_catalog:
        print(emit_catalog(spec), end="", file=out)
        return 0
    _emit(args, _spec_payload(spec), lambda: _print_spec(spec, out), out)
    return 0


def _cmd_linking(args, out) -> int:
    spec = _evaluated(args)
    payload = _spec_payload(spec)
    del payload["conway"]
    _emit(args, payload, lambda: _print_spec(spec, out, with_conway=False), out)
    return 0


def _cmd_omega(args, out) -> int:
    spec = _evaluated(args)
    value = omega(spec)
    payload = {"omega": str(value)}
    _emit(args, payload, lambda: print(f"omega: {value}", file=out), out)
    return 0


def _cmd_torres(args, out) -> int:
    spec = _evaluated(args)
    sub = torres_remove(spec, args.component)
    if args.emit_catalog:
        print(emit_catalog(sub), end="", file=out)
        return 0
    _emit(args, _spec_payload(sub), lambda: _print_spec(sub, out), out)
    return 0


def _cmd_torsion(args, out) -> int:
    with open(args.file, "r", encoding="utf-8") as fh:
        text = fh.read()
    complex_ = parse_complex(text, source=str(args.file))
    value = torsion(complex_)
    betas, gammas, size = counts(complex_)
    payload = {
        "torsion": str(value),
        "beta": betas,
        "gamma": gammas,
        "C": size,
    }

    def as_text():
        print(f"torsion: {value}", file=out)
        print("beta: " + " ".join(str(b) for b in betas), file=out)
        print("gamma: " + " ".join(str(g) for g in gammas), file=out)
        print(f"|C|: {size}", file=out)

    _emit(args, payload, as_text, out)
    return 0


def _cmd_selftest(args, out) -> int:
    results = run_all(args.seed, args.trials)
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "suites": [
            {"name": r.name, "checks": r.checks, "failures": r.failures}
            for r in results
        ],
        "pass": all(r.passed for r in results),
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(f"seed: {args.seed}", file=out)
        for r in results:
            print(f"suite {r.name}: {r.checks} checks, {len(r.failures)} failures", file=out)
            for failure in r.failures[:5]:
                print(f"  FAIL: {failure}", file=out)
            if len(r.failures) > 5:
                print(f"  ... {len(r.failures) - 5} more", file=out)
        print("selftest: " + ("PASS" if payload["pass"] else "FAIL"), file=out)
    return 0 if payload["pass"] else 1


# ---------------------------------------------------------------------------
# Argument parsing.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splicecalc",
        description="Exact Conway functions of spliced links; torsion of based complexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_expr_command(name, help_text, *, emit=False, component=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", nargs="?", help="file containing one expression")
        p.add_argument("-e", "--expr", help="inline splice expression")
        p.add_argument("--catalog", action="append", default=[], help="extra catalog file")
        p.add_argument("--verify", action="store_true",
                       help="cross-check derived operations against closed forms")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if emit:
            p.add_argument("--emit-catalog", action="store_true",
                           help="print the result in catalog file format")
        if component:
            p.add_argument("--component", required=True, help="component to remove")
        return p

    add_expr_command("conway", "Conway function, components, linking matrix", emit=True)
    add_expr_command("linking", "components and linking matrix")
    add_expr_command("omega", "reduced one-variable polynomial")
    add_expr_command("torres", "spec of the link with one component removed",
                     emit=True, component=True)

    p = sub.add_parser("torsion", help="torsion of a based chain complex file")
    p.add_argument("file", help="complex file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("selftest", help="run the verification suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100,
                   help="expression sample size; torsion suites scale with it")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


_DISPATCH = {
    "conway": _cmd_conway,
    "linking": _cmd_linking,
    "omega": _cmd_omega,
    "torres": _cmd_torres,
    "torsion": _cmd_torsion,
    "selftest": _cmd_selftest,
}


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args, out)
    except SpliceCalcSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 2
    except SpliceCalcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

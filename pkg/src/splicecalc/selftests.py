"""Randomized self-verification suites.

Each suite checks one exact identity of the calculus over either a fixed
fixture set or a seeded random sample, and reports failures with enough
context to reproduce them.  The CLI `selftest` command and the acceptance
tests both run these.

All randomness is seeded; expression samples are generated sequentially
from the root seed (so `--trials k` reruns a prefix), and torsion trials
use per-trial seeds `root + t` (so `--seed root+t --trials 1` replays one
trial exactly).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field

from .errors import CrossCheckError, MissingSublinkData, SpliceCalcError
from .linkcore import LinkSpec, builtin_catalog, component_var, make_torus, relabel
from .spliceengine import (
    Cable,
    ConnSum,
    Leaf,
    Splice,
    _cable,
    _cable_prefactor_monomial,
    _splice,
    cable,
    cable_remove,
    connected_sum,
    eval_expr,
    omega,
    resolve_names,
    torres_remove,
    verify_symmetry,
)
from .symalg import LaurentPoly, Monomial, RatFn
from .torsionlab import lemma22_check, random_based_complex, random_ses_witness, torsion


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = dataclass_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str):
        self.checks += 1
        if not ok:
            self.failures.append(message)

    def error(self, message: str):
        self.checks += 1
        self.failures.append(message)


@dataclass(frozen=True)
class GenExpr:
    """A generated expression: DSL text, AST, and its evaluated spec."""

    text: str
    expr: object
    spec: LinkSpec


_COPRIME = ((2, 1), (3, 2), (3, 1), (2, -1))
_TORUS_LEAVES = ("torus(2,1,1)", "torus(3,2,1)", "torus(2,-1,2)")


def sample_expressions(seed: int = 0, count: int = 100, depth: int = 4) -> list[GenExpr]:
    """Generate evaluable splice expressions over the builtin catalog.

    Draws that hit a domain error (degenerate splice, missing sublink data)
    are discarded and redrawn, deterministically for a fixed seed.
    """
    cat = builtin_catalog()
    leaves = list(cat.names()) + list(_TORUS_LEAVES)
    rng = random.Random(seed)

    def gen(level: int) -> GenExpr:
        if level >= depth or rng.random() < 0.35:
            name = rng.choice(leaves)
            spec = cat.get(name)
            return GenExpr(name, Leaf(spec), spec)
        op = rng.choice(("splice", "splice", "cable", "connsum"))
        if op == "splice":
            left = gen(level + 1)
            right = gen(level + 1)
            lc = rng.choice(left.spec.components)
            rc = rng.choice(right.spec.components)
            spec = _splice(left.spec, lc, right.spec, rc)[0]
            return GenExpr(
                f"splice({left.text}@{lc}, {right.text}@{rc})",
                Splice(left.expr, lc, right.expr, rc),
                spec,
            )
        if op == "cable":
            base = gen(level + 1)
            comp = rng.choice(base.spec.components)
            p, q = rng.choice(_COPRIME)
            d = rng.randint(1, 2)
            spec = cable(base.spec, comp, p, q, d)
            return GenExpr(
                f"cable({base.text}@{comp}, {p}, {q}, {d})",
                Cable(base.expr, comp, p, q, d),
                spec,
            )
        left = gen(level + 1)
        right = gen(level + 1)
        lc = rng.choice(left.spec.components)
        rc = rng.choice(right.spec.components)
        spec = connected_sum(left.spec, lc, right.spec, rc)
        return GenExpr(
            f"connsum({left.text}@{lc}, {right.text}@{rc})",
            ConnSum(left.expr, lc, right.expr, rc),
            spec,
        )

    out = []
    for _ in range(count):
        for _attempt in range(200):
            try:
                out.append(gen(0))
                break
            except SpliceCalcError:
                continue
        else:
            raise RuntimeError("expression generator failed 200 consecutive attempts")
    return out


def _repro(text: str) -> str:
    return f'rerun: splicecalc conway -e "{text}" --verify'


# ---------------------------------------------------------------------------
# Suites.
# ---------------------------------------------------------------------------


def suite_hopf_neutral() -> SuiteResult:
    """Splicing the Hopf link onto any component is the identity."""
    result = SuiteResult("hopf_neutral")
    cat = builtin_catalog()
    hopf = cat.get("hopf")
    names = list(cat.names()) + ["torus(2,1,1)", "torus(3,2,2)"]
    for name in names:
        target = cat.get(name)
        for comp in target.components:
            spliced = _splice(hopf, "a", target, comp)[0]
            rest = [c for c in target.components if c != comp]
            map_left, map_right = resolve_names(["b"], rest)
            mapping = {comp: map_left["b"]}
            mapping.update({c: map_right[c] for c in rest})
            expected = relabel(target, mapping)
            result.check(
                spliced.equivalent(expected),
                f"hopf splice is not the identity on {name}@{comp}",
            )
    return result


def suite_symmetry(sample: list[GenExpr], seed: int) -> SuiteResult:
    """conway(t^-1) = (-1)^n conway(t) on every generated expression."""
    result = SuiteResult("symmetry")
    for k, g in enumerate(sample):
        result.check(
            verify_symmetry(g.spec),
            f"symmetry violated by expression {k} (seed {seed}); {_repro(g.text)}",
        )
    return result


def suite_torres(sample: list[GenExpr], seed: int) -> SuiteResult:
    """Evaluation at t_c = 1 factors through component removal, exactly."""
    result = SuiteResult("torres")
    for k, g in enumerate(sample):
        spec = g.spec
        for comp in spec.components:
            exps = {
                component_var(i): spec.linking(comp, i)
                for i in spec.components
                if i != comp
            }
            t_mono = Monomial(exps)
            if t_mono.is_one:
                continue  # removal undefined when all linking numbers vanish
            try:
                lhs = spec.conway.specialize_one(component_var(comp))
                sub = torres_remove(spec, comp)
                bracket = RatFn(
                    LaurentPoly.monomial(t_mono) - LaurentPoly.monomial(t_mono.inverse())
                )
                result.check(
                    lhs == bracket * sub.conway,
                    f"removal identity failed at {comp} of expression {k}"
                    f" (seed {seed}); {_repro(g.text)}",
                )
            except SpliceCalcError as exc:
                result.error(
                    f"removal raised {type(exc).__name__} at {comp} of expression {k}"
                    f" (seed {seed}); {_repro(g.text)}"
                )
    return result


def _iter_splices(expr):
    """Yield (left, left_comp, right, right_comp) for every splice performed."""
    if isinstance(expr, Leaf):
        return
    if isinstance(expr, Splice):
        yield from _iter_splices(expr.left)
        yield from _iter_splices(expr.right)
        yield (eval_expr(expr.left), expr.left_comp, eval_expr(expr.right), expr.right_comp)
    elif isinstance(expr, Cable):
        yield from _iter_splices(expr.base)
        base = eval_expr(expr.base)
        yield (base, expr.comp, make_torus(expr.p, expr.q, expr.d), "c2")
    elif isinstance(expr, ConnSum):
        yield from _iter_splices(expr.left)
        yield from _iter_splices(expr.right)
        left = eval_expr(expr.left)
        right = eval_expr(expr.right)
        helper = builtin_catalog().get("tilde")
        step1, m1_left, _ = _splice(helper, "x", left, expr.left_comp)
        yield (helper, "x", left, expr.left_comp)
        yield (step1, m1_left["y"], right, expr.right_comp)


def suite_linking(sample: list[GenExpr], seed: int) -> SuiteResult:
    """Cross-side linking numbers factor as products; same-side persist."""
    result = SuiteResult("linking")
    for k, g in enumerate(sample):
        for left, lc, right, rc in _iter_splices(g.expr):
            try:
                spliced, map_left, map_right = _splice(left, lc, right, rc)
            except MissingSublinkData:
                continue
            ctx = f"expression {k} (seed {seed}); {_repro(g.text)}"
            for i in map_left:
                for j in map_right:
                    result.check(
                        spliced.linking(map_left[i], map_right[j])
                        == left.linking(lc, i) * right.linking(rc, j),
                        f"cross linking ({i},{j}) does not factor in {ctx}",
                    )
            lrem = list(map_left)
            for a_i, i in enumerate(lrem):
                for i2 in lrem[a_i + 1:]:
                    result.check(
                        spliced.linking(map_left[i], map_left[i2]) == left.linking(i, i2),
                        f"left-side linking ({i},{i2}) changed in {ctx}",
                    )
            rrem = list(map_right)
            for a_j, j in enumerate(rrem):
                for j2 in rrem[a_j + 1:]:
                    result.check(
                        spliced.linking(map_right[j], map_right[j2]) == right.linking(j, j2),
                        f"right-side linking ({j},{j2}) changed in {ctx}",
                    )
    return result


def suite_cable_oracle() -> SuiteResult:
    """Splice-route cables equal both closed forms on the parameter grid."""
    result = SuiteResult("cable_oracle")
    cat = builtin_catalog()
    bases = [cat.get(n) for n in ("unknot", "tilde", "hopf")]
    for base in bases:
        for comp in base.components:
            for p, q in ((2, 1), (3, 2), (5, -2)):
                for d in (1, 2, 3):
                    ctx = f"{base.name}@{comp} ({p},{q}) d={d}"
                    try:
                        cable(base, comp, p, q, d, verify=True)
                        result.check(True, "")
                    except CrossCheckError as exc:
                        result.error(f"cable closed form: {exc}")
                    try:
                        cable_remove(base, comp, p, q, d, verify=True)
                        result.check(True, "")
                    except CrossCheckError as exc:
                        result.error(f"cable-removal closed form: {exc}")
            # doubling shape: d=1, (p,q)=(2,1) removal equals (T + T^-1)
            # times the base conway with t_comp -> t_s1^2
            removed, map_left, copies = (None, None, None)
            spliced, map_left, copies = _cable(base, comp, 2, 1, 1)
            removed = torres_remove(spliced, comp)
            big_t = _cable_prefactor_monomial(base, comp, map_left, copies, 1)
            doubled = RatFn(
                LaurentPoly.monomial(big_t) + LaurentPoly.monomial(big_t.inverse())
            )
            renamed = base.conway.rename_vars(
                {
                    component_var(i): component_var(map_left[i])
                    for i in base.components
                    if i != comp
                }
            )
            arg = Monomial({component_var(s): 2 for s in copies})
            expected = doubled * renamed.substitute_monomial(component_var(comp), arg)
            result.check(
                removed.conway == expected,
                f"doubling shape failed for {base.name}@{comp}",
            )
    return result


def suite_connsum_oracle() -> SuiteResult:
    """Double splice through the helper equals the product closed form."""
    result = SuiteResult("connsum_oracle")
    cat = builtin_catalog()
    names = list(cat.names()) + ["torus(2,1,1)"]
    specs = [cat.get(n) for n in names]
    for left in specs:
        for lc in left.components:
            for right in specs:
                for rc in right.components:
                    try:
                        connected_sum(left, lc, right, rc, verify=True)
                        result.check(True, "")
                    except CrossCheckError as exc:
                        result.error(f"connected sum closed form: {exc}")
    return result


def suite_exceptional() -> SuiteResult:
    """The zero-linking bare-knot splice returns registered sublink data."""
    result = SuiteResult("exceptional")
    cat = builtin_catalog()
    unknot = cat.get("unknot")
    unlink2 = cat.get("unlink2")

    spliced = _splice(unknot, "u", unlink2, "a")[0]
    result.check(
        spliced == unlink2.sublinks["a"],
        "bare-knot splice did not return the registered sublink",
    )
    swapped = _splice(unlink2, "b", unknot, "u")[0]
    result.check(
        swapped == unlink2.sublinks["b"],
        "bare-knot splice (swapped sides) did not return the registered sublink",
    )

    stripped = LinkSpec("stripped", ("a", "b"), {}, RatFn.zero())
    try:
        _splice(unknot, "u", stripped, "a")
        result.error("stripped catalog entry did not raise MissingSublinkData")
    except MissingSublinkData:
        result.check(True, "")

    # nonzero linking on the spliced component must use the regular branch
    tilde = cat.get("tilde")
    regular = _splice(unknot, "u", tilde, "c")[0]
    result.check(
        regular.conway.is_zero and set(regular.components) == {"x", "y"},
        "regular branch of the bare-knot splice computed the wrong unlink",
    )
    return result


def suite_omega() -> SuiteResult:
    """Reduced one-variable values of the catalog links."""
    result = SuiteResult("omega")
    cat = builtin_catalog()
    t = LaurentPoly.variable("t")
    t_inv = LaurentPoly.monomial(Monomial({"t": -1}))
    result.check(omega(cat.get("unknot")) == LaurentPoly.one(), "omega(unknot) != 1")
    result.check(omega(cat.get("hopf")) == t - t_inv, "omega(hopf) != t - t^-1")
    result.check(omega(cat.get("tilde")) == (t - t_inv) ** 2, "omega(tilde) != (t - t^-1)^2")
    return result


def suite_torsion_multiplicativity(seed: int = 0, trials: int = 500) -> SuiteResult:
    """The signed multiplicativity identity on generated exact sequences."""
    result = SuiteResult("torsion_multiplicativity")
    for t in range(trials):
        trial_seed = seed + t
        witness = random_ses_witness(random.Random(trial_seed), max_len=4, max_dim=5)
        report = lemma22_check(witness)
        result.check(
            report.passed,
            f"multiplicativity failed at trial {t};"
            f" rerun: splicecalc selftest --seed {trial_seed} --trials 1",
        )
    return result


def suite_torsion_choices(seed: int = 0, trials: int = 200) -> SuiteResult:
    """Torsion does not depend on the choice of b-vectors or cycle lifts."""
    result = SuiteResult("torsion_choices")
    for t in range(trials):
        trial_seed = seed + t
        rng = random.Random(trial_seed)
        complex_ = random_based_complex(rng, rng.randint(0, 4), max_dim=5)
        reference = torsion(complex_)
        result.check(
            torsion(complex_, rng=rng) == reference,
            f"choice dependence at trial {t};"
            f" rerun: splicecalc selftest --seed {trial_seed} --trials 1",
        )
    return result


def run_all(
    seed: int = 0,
    trials: int = 100,
    *,
    depth: int = 4,
    witness_trials: int | None = None,
    independence_trials: int | None = None,
) -> list[SuiteResult]:
    """Run every suite; trials scales the randomized sample sizes."""
    if witness_trials is None:
        witness_trials = 5 * trials
    if independence_trials is None:
        independence_trials = 2 * trials
    sample = sample_expressions(seed, trials, depth)
    return [
        suite_hopf_neutral(),
        suite_symmetry(sample, seed),
        suite_torres(sample, seed),
        suite_linking(sample, seed),
        suite_cable_oracle(),
        suite_connsum_oracle(),
        suite_exceptional(),
        suite_omega(),
        suite_torsion_multiplicativity(seed, witness_trials),
        suite_torsion_choices(seed, independence_trials),
    ]

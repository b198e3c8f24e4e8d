"""Splice evaluation: Conway functions and linking matrices of composite links.

The core operation joins two links along chosen components.  Writing a, b
for the spliced components and A, B for the two links, the Conway function
of the splice is

    sub(conway(A), t_a -> prod_j t_j^lk_B(b,j)) *
    sub(conway(B), t_b -> prod_i t_i^lk_A(a,i)),

where each product runs over the surviving components of the *other* side
and an empty product means evaluation at 1.  There is one exception,
detected structurally rather than by attempting the (singular) evaluation:
when one side is a bare knot and the spliced component of the other side
links nothing, the result is the other link with that component deleted,
which must be supplied as registered sublink data.

Cross-side linking numbers multiply (lk(i,j) = lk_A(a,i) * lk_B(b,j));
same-side linking numbers carry over unchanged.

Cabling, satellite, and connected-sum operations are all expressed as
splices with catalog links.  Each also has an independent closed form; with
``verify=True`` the closed form is computed separately and any disagreement
raises CrossCheckError.  Production evaluation uses only the splice route.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd as _int_gcd
from typing import Union

from .errors import (
    CrossCheckError,
    DegenerateSplice,
    MissingSublinkData,
    NonCoprime,
    NotPolynomial,
    TorresDegenerate,
    UnknownComponent,
)
from .linkcore import LinkSpec, component_var, make_torus, relabel
from .symalg import LaurentPoly, Monomial, RatFn


# ---------------------------------------------------------------------------
# Expression trees.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    spec: LinkSpec


@dataclass(frozen=True)
class Splice:
    left: "SpliceExpr"
    left_comp: str
    right: "SpliceExpr"
    right_comp: str


@dataclass(frozen=True)
class Cable:
    base: "SpliceExpr"
    comp: str
    p: int
    q: int
    d: int


@dataclass(frozen=True)
class ConnSum:
    left: "SpliceExpr"
    left_comp: str
    right: "SpliceExpr"
    right_comp: str


@dataclass(frozen=True)
class Satellite:
    companion: "SpliceExpr"
    pattern: "SpliceExpr"
    meridian: str


SpliceExpr = Union[Leaf, Splice, Cable, ConnSum, Satellite]


# ---------------------------------------------------------------------------
# Component namespace management.
#
# The two sides of a splice may use the same labels.  Colliding labels get a
# side prefix (left_/right_), repeated if the prefixed name is itself taken;
# everything else keeps its name.  The rule is deterministic so callers (and
# tests) can reconstruct the final names.
# ---------------------------------------------------------------------------


def resolve_names(left_rem, right_rem):
    """Final names for the surviving components of each side of a splice."""
    collisions = set(left_rem) & set(right_rem)
    taken: set[str] = set()
    map_left: dict[str, str] = {}
    map_right: dict[str, str] = {}

    def place(name, prefix, mapping):
        new = prefix + name if name in collisions else name
        while new in taken:
            new = prefix + new
        taken.add(new)
        mapping[name] = new

    for c in left_rem:
        place(c, "left_", map_left)
    for c in right_rem:
        place(c, "right_", map_right)
    return map_left, map_right


def _with_name(spec: LinkSpec, name: str) -> LinkSpec:
    return LinkSpec(name, spec.components, dict(spec.nonzero_pairs()), spec.conway, spec.sublinks)


# ---------------------------------------------------------------------------
# The splice itself.
# ---------------------------------------------------------------------------


def _splice(left: LinkSpec, left_comp: str, right: LinkSpec, right_comp: str):
    """Splice two links; returns (result, left name map, right name map)."""
    if not left.has_component(left_comp):
        raise UnknownComponent(f"{left.name} has no component {left_comp!r}")
    if not right.has_component(right_comp):
        raise UnknownComponent(f"{right.name} has no component {right_comp!r}")
    left_rem = [c for c in left.components if c != left_comp]
    right_rem = [c for c in right.components if c != right_comp]
    if not left_rem and not right_rem:
        raise DegenerateSplice("splicing two bare knots leaves no components")

    # Exceptional branch: a bare knot spliced along a component that links
    # nothing.  The result is the other link minus that component, which is
    # not computable from a vanishing Conway function; it must be registered.
    if not left_rem and all(right.linking(right_comp, j) == 0 for j in right_rem):
        sub = right.sublinks.get(right_comp)
        if sub is None:
            raise MissingSublinkData(
                f"splice of bare knot {left.name} along zero-linking component"
                f" {right_comp!r} of {right.name} needs sublink data"
            )
        return sub, {}, {c: c for c in right_rem}
    if not right_rem and all(left.linking(left_comp, i) == 0 for i in left_rem):
        sub = left.sublinks.get(left_comp)
        if sub is None:
            raise MissingSublinkData(
                f"splice of bare knot {right.name} along zero-linking component"
                f" {left_comp!r} of {left.name} needs sublink data"
            )
        return sub, {c: c for c in left_rem}, {}

    map_left, map_right = resolve_names(left_rem, right_rem)
    lspec = relabel(left, map_left)
    rspec = relabel(right, map_right)
    lrem = [map_left[c] for c in left_rem]
    rrem = [map_right[c] for c in right_rem]

    into_left = Monomial(
        {component_var(j): rspec.linking(right_comp, j) for j in rrem}
    )
    into_right = Monomial(
        {component_var(i): lspec.linking(left_comp, i) for i in lrem}
    )
    f_left = lspec.conway.substitute_monomial(component_var(left_comp), into_left)
    f_right = rspec.conway.substitute_monomial(component_var(right_comp), into_right)
    conway = f_left * f_right

    lk: dict[tuple[str, str], int] = {}
    for (a, b), v in lspec.nonzero_pairs():
        if a != left_comp and b != left_comp:
            lk[(a, b)] = v
    for (a, b), v in rspec.nonzero_pairs():
        if a != right_comp and b != right_comp:
            lk[(a, b)] = v
    for i in lrem:
        li = lspec.linking(left_comp, i)
        if li == 0:
            continue
        for j in rrem:
            v = li * rspec.linking(right_comp, j)
            if v:
                lk[(i, j)] = v

    name = f"splice({left.name}@{left_comp},{right.name}@{right_comp})"
    spec = LinkSpec(name, tuple(lrem) + tuple(rrem), lk, conway)
    return spec, map_left, map_right


def splice_linking(left: LinkSpec, left_comp: str, right: LinkSpec, right_comp: str):
    """Linking matrix of a splice: cross pairs multiply, same-side pairs persist.

    Returns (components, lk) where lk maps every unordered pair (in component
    order) to its value, zeros included.
    """
    if not left.has_component(left_comp):
        raise UnknownComponent(f"{left.name} has no component {left_comp!r}")
    if not right.has_component(right_comp):
        raise UnknownComponent(f"{right.name} has no component {right_comp!r}")
    left_rem = [c for c in left.components if c != left_comp]
    right_rem = [c for c in right.components if c != right_comp]
    map_left, map_right = resolve_names(left_rem, right_rem)
    comps = tuple(map_left[c] for c in left_rem) + tuple(map_right[c] for c in right_rem)
    lk = {}
    for pos, i in enumerate(left_rem):
        for i2 in left_rem[pos + 1:]:
            lk[(map_left[i], map_left[i2])] = left.linking(i, i2)
        for j in right_rem:
            lk[(map_left[i], map_right[j])] = (
                left.linking(left_comp, i) * right.linking(right_comp, j)
            )
    for pos, j in enumerate(right_rem):
        for j2 in right_rem[pos + 1:]:
            lk[(map_right[j], map_right[j2])] = right.linking(j, j2)
    return comps, lk


# ---------------------------------------------------------------------------
# Derived operations.
# ---------------------------------------------------------------------------


def torres_remove(spec: LinkSpec, comp: str) -> LinkSpec:
    """The sublink with one component deleted, via evaluation at t_comp = 1.

    conway(result) = conway(spec) at t_comp = 1, divided by T - T^-1 where
    T = prod_i t_i^lk(comp, i).  Requires some nonzero lk(comp, .).
    """
    if not spec.has_component(comp):
        raise UnknownComponent(f"{spec.name} has no component {comp!r}")
    rest = [c for c in spec.components if c != comp]
    if not rest:
        raise TorresDegenerate("cannot remove the only component")
    t_mono = Monomial({component_var(i): spec.linking(comp, i) for i in rest})
    if t_mono.is_one:
        raise TorresDegenerate(f"all linking numbers of {comp!r} vanish")
    divisor = RatFn(
        LaurentPoly.monomial(t_mono) - LaurentPoly.monomial(t_mono.inverse())
    )
    conway = spec.conway.specialize_one(component_var(comp)) / divisor
    lk = {
        (a, b): v
        for (a, b), v in spec.nonzero_pairs()
        if a != comp and b != comp
    }
    return LinkSpec(f"{spec.name}.minus.{comp}", rest, lk, conway)


def omega(spec: LinkSpec) -> LaurentPoly:
    """The reduced one-variable form: (t - t^-1) * conway(t, ..., t).

    For consistent link data this is a Laurent polynomial; a surviving
    denominator signals an inconsistent input spec.
    """
    diag = spec.conway.diagonal("t")
    bracket = LaurentPoly.variable("t") - LaurentPoly.monomial(Monomial({"t": -1}))
    value = RatFn(bracket) * diag
    if not value.denominator.is_one:
        raise NotPolynomial(
            f"(t - t^-1) * conway(t,...,t) of {spec.name} is not a polynomial"
        )
    return value.numerator


def verify_symmetry(spec: LinkSpec) -> bool:
    """Whether conway(t^-1) = (-1)^n conway(t) holds exactly."""
    n = len(spec.components)
    expected = spec.conway if n % 2 == 0 else -spec.conway
    return spec.conway.invert_vars() == expected


def satellite_conway(
    companion: LinkSpec, pattern: LinkSpec, meridian: str, *, verify: bool = False
) -> LinkSpec:
    """Satellite of a knot: splice the companion into the pattern's meridian.

    The pattern spec encodes meridian ∪ f(L) with lk(meridian, K_i) the
    winding numbers.  With ``verify=True`` the closed form
    omega(companion)(prod t_i^l_i) * conway(pattern minus meridian) is
    computed independently and compared (when the needed sublink data exists
    or is derivable).
    """
    if len(companion.components) != 1:
        raise ValueError("satellite companion must be a knot (exactly one component)")
    core = companion.components[0]
    spec, _, map_right = _splice(companion, core, pattern, meridian)
    if verify:
        rest = [c for c in pattern.components if c != meridian]
        winding = Monomial(
            {component_var(map_right[c]): pattern.linking(meridian, c) for c in rest}
        )
        om_at = RatFn(omega(companion)).substitute_monomial("t", winding)
        sub = pattern.sublinks.get(meridian)
        if sub is not None:
            base = relabel(sub, {c: map_right[c] for c in rest}).conway
        else:
            base = relabel(torres_remove(pattern, meridian), map_right).conway
        closed = om_at * base
        if closed != spec.conway:
            raise CrossCheckError(
                f"satellite closed form disagrees with splice route for"
                f" {companion.name} into {pattern.name}@{meridian}"
            )
    return spec


def _cable(base: LinkSpec, comp: str, p: int, q: int, d: int):
    if not base.has_component(comp):
        raise UnknownComponent(f"{base.name} has no component {comp!r}")
    if d < 1:
        raise ValueError(f"cable copy count must be >= 1, got {d}")
    if _int_gcd(abs(p), abs(q)) != 1:
        raise NonCoprime(f"cable parameters ({p},{q}) are not coprime")
    torus = make_torus(p, q, d)
    spec, map_left, map_right = _splice(base, comp, torus, "c2")
    core = map_right["c1"]
    copies = [map_right[f"s{i}"] for i in range(1, d + 1)]
    renamed = relabel(spec, {core: comp})
    result = _with_name(renamed, f"cable({base.name}@{comp},{p},{q},{d})")
    return result, map_left, copies


def _cable_prefactor_monomial(base, comp, map_left, copies, q):
    exps = {
        component_var(map_left[i]): base.linking(comp, i)
        for i in base.components
        if i != comp
    }
    for s in copies:
        exps[component_var(s)] = exps.get(component_var(s), 0) + q
    return Monomial(exps)


def cable(base: LinkSpec, comp: str, p: int, q: int, d: int, *, verify: bool = False) -> LinkSpec:
    """Add d parallel copies of a (p,q)-cable of the named component.

    Evaluated by splicing the torus-link catalog entry onto ``comp``; the
    surviving inner core takes over the name ``comp``.  With ``verify=True``
    the closed form

        (t_comp^q T^p - t_comp^-q T^-p)^d * conway(base)[t_comp -> t_comp (t_s1...t_sd)^p]

    with T = prod_{i != comp} t_i^lk(comp,i) * (t_s1...t_sd)^q is computed
    independently and compared.
    """
    result, map_left, copies = _cable(base, comp, p, q, d)
    if verify:
        t_comp = component_var(comp)
        big_t = _cable_prefactor_monomial(base, comp, map_left, copies, q)
        head = Monomial({t_comp: q}) * big_t ** p
        prefactor = (
            LaurentPoly.monomial(head) - LaurentPoly.monomial(head.inverse())
        ) ** d
        renamed = base.conway.rename_vars(
            {component_var(i): component_var(map_left[i]) for i in base.components if i != comp}
        )
        arg = Monomial({t_comp: 1}) * Monomial({component_var(s): p for s in copies})
        closed = RatFn(prefactor) * renamed.substitute_monomial(t_comp, arg)
        if closed != result.conway:
            raise CrossCheckError(
                f"cable closed form disagrees with splice route for"
                f" {base.name}@{comp} ({p},{q}) d={d}"
            )
    return result


def cable_remove(
    base: LinkSpec, comp: str, p: int, q: int, d: int, *, verify: bool = False
) -> LinkSpec:
    """The cabled link with the original component removed.

    With ``verify=True`` the closed form

        (T^p - T^-p)^d / (T - T^-1) * conway(base)[t_comp -> (t_s1...t_sd)^p]

    is computed independently and compared.  At d=1, (p,q)=(2,1) the
    prefactor reduces to T + T^-1 (the doubling identity).
    """
    result, map_left, copies = _cable(base, comp, p, q, d)
    removed = torres_remove(result, comp)
    if verify:
        t_comp = component_var(comp)
        big_t = _cable_prefactor_monomial(base, comp, map_left, copies, q)
        tp = big_t ** p
        numer = RatFn(LaurentPoly.monomial(tp) - LaurentPoly.monomial(tp.inverse())) ** d
        denom = RatFn(
            LaurentPoly.monomial(big_t) - LaurentPoly.monomial(big_t.inverse())
        )
        renamed = base.conway.rename_vars(
            {component_var(i): component_var(map_left[i]) for i in base.components if i != comp}
        )
        arg = Monomial({component_var(s): p for s in copies})
        closed = (numer / denom) * renamed.substitute_monomial(t_comp, arg)
        if closed != removed.conway:
            raise CrossCheckError(
                f"cable-removal closed form disagrees with the Torres route for"
                f" {base.name}@{comp} ({p},{q}) d={d}"
            )
    return removed


def connected_sum(
    left: LinkSpec,
    left_comp: str,
    right: LinkSpec,
    right_comp: str,
    *,
    verify: bool = False,
) -> LinkSpec:
    """Connected sum along two components, via a double splice through the
    three-component helper link (components x, y, c; conway t_c - t_c^-1).

    With ``verify=True`` the closed form
    (t - t^-1) * conway(left) * conway(right), with both spliced component
    variables merged into the surviving helper component's variable, is
    computed independently and compared.
    """
    if not left.has_component(left_comp):
        raise UnknownComponent(f"{left.name} has no component {left_comp!r}")
    if not right.has_component(right_comp):
        raise UnknownComponent(f"{right.name} has no component {right_comp!r}")
    helper = _helper_link()
    step1, m1_left, m1_right = _splice(helper, "x", left, left_comp)
    y1 = m1_left["y"]
    c1 = m1_left["c"]
    step2, m2_left, m2_right = _splice(step1, y1, right, right_comp)
    merged = m2_left[c1]
    result = _with_name(
        step2, f"connsum({left.name}@{left_comp},{right.name}@{right_comp})"
    )
    if verify:
        t_merged = component_var(merged)
        bracket = LaurentPoly.variable(t_merged) - LaurentPoly.monomial(
            Monomial({t_merged: -1})
        )
        left_map = {component_var(left_comp): t_merged}
        for c in left.components:
            if c != left_comp:
                left_map[component_var(c)] = component_var(m2_left[m1_right[c]])
        right_map = {component_var(right_comp): t_merged}
        for c in right.components:
            if c != right_comp:
                right_map[component_var(c)] = component_var(m2_right[c])
        closed = (
            RatFn(bracket)
            * left.conway.rename_vars(left_map)
            * right.conway.rename_vars(right_map)
        )
        if closed != result.conway:
            raise CrossCheckError(
                f"connected-sum closed form disagrees with the double-splice route"
                f" for {left.name}@{left_comp} # {right.name}@{right_comp}"
            )
    return result


_HELPER = None


def _helper_link() -> LinkSpec:
    # Local import: linkcore's builtin_catalog does not depend on this module,
    # but keeping the import here avoids building the catalog at import time.
    global _HELPER
    if _HELPER is None:
        from .linkcore import builtin_catalog

        _HELPER = builtin_catalog().get("tilde")
    return _HELPER


# ---------------------------------------------------------------------------
# Expression evaluation.
# ---------------------------------------------------------------------------


def expr_components(expr: SpliceExpr) -> tuple[str, ...]:
    """Final component names of an expression, without computing any algebra.

    Mirrors the naming steps of eval_expr exactly; used to validate
    component references at parse time.
    """
    if isinstance(expr, Leaf):
        return expr.spec.components
    if isinstance(expr, Splice):
        lcomps = expr_components(expr.left)
        rcomps = expr_components(expr.right)
        if expr.left_comp not in lcomps:
            raise UnknownComponent(f"left side has no component {expr.left_comp!r}")
        if expr.right_comp not in rcomps:
            raise UnknownComponent(f"right side has no component {expr.right_comp!r}")
        lrem = [c for c in lcomps if c != expr.left_comp]
        rrem = [c for c in rcomps if c != expr.right_comp]
        if not lrem and not rrem:
            raise DegenerateSplice("splicing two bare knots leaves no components")
        map_left, map_right = resolve_names(lrem, rrem)
        return tuple(map_left[c] for c in lrem) + tuple(map_right[c] for c in rrem)
    if isinstance(expr, Cable):
        comps = expr_components(expr.base)
        if expr.comp not in comps:
            raise UnknownComponent(f"cable base has no component {expr.comp!r}")
        rem = [c for c in comps if c != expr.comp]
        torus_rem = ["c1"] + [f"s{i}" for i in range(1, expr.d + 1)]
        map_left, map_right = resolve_names(rem, torus_rem)
        return (
            tuple(map_left[c] for c in rem)
            + (expr.comp,)
            + tuple(map_right[s] for s in torus_rem[1:])
        )
    if isinstance(expr, ConnSum):
        lcomps = expr_components(expr.left)
        rcomps = expr_components(expr.right)
        if expr.left_comp not in lcomps:
            raise UnknownComponent(f"left side has no component {expr.left_comp!r}")
        if expr.right_comp not in rcomps:
            raise UnknownComponent(f"right side has no component {expr.right_comp!r}")
        lrem = [c for c in lcomps if c != expr.left_comp]
        m1_left, m1_right = resolve_names(["y", "c"], lrem)
        step1 = [m1_left["y"], m1_left["c"]] + [m1_right[c] for c in lrem]
        rem1 = [c for c in step1 if c != m1_left["y"]]
        rrem = [c for c in rcomps if c != expr.right_comp]
        m2_left, m2_right = resolve_names(rem1, rrem)
        return tuple(m2_left[c] for c in rem1) + tuple(m2_right[c] for c in rrem)
    if isinstance(expr, Satellite):
        companion = expr_components(expr.companion)
        if len(companion) != 1:
            raise ValueError("satellite companion must be a knot (exactly one component)")
        pattern = expr_components(expr.pattern)
        if expr.meridian not in pattern:
            raise UnknownComponent(f"pattern has no component {expr.meridian!r}")
        return tuple(c for c in pattern if c != expr.meridian)
    raise TypeError(f"not a splice expression: {expr!r}")


def eval_expr(expr: SpliceExpr, *, verify: bool = False) -> LinkSpec:
    """Evaluate a splice expression tree to a full LinkSpec."""
    if isinstance(expr, Leaf):
        return expr.spec
    if isinstance(expr, Splice):
        left = eval_expr(expr.left, verify=verify)
        right = eval_expr(expr.right, verify=verify)
        return _splice(left, expr.left_comp, right, expr.right_comp)[0]
    if isinstance(expr, Cable):
        base = eval_expr(expr.base, verify=verify)
        return cable(base, expr.comp, expr.p, expr.q, expr.d, verify=verify)
    if isinstance(expr, ConnSum):
        left = eval_expr(expr.left, verify=verify)
        right = eval_expr(expr.right, verify=verify)
        return connected_sum(left, expr.left_comp, right, expr.right_comp, verify=verify)
    if isinstance(expr, Satellite):
        companion = eval_expr(expr.companion, verify=verify)
        pattern = eval_expr(expr.pattern, verify=verify)
        return satellite_conway(companion, pattern, expr.meridian, verify=verify)
    raise TypeError(f"not a splice expression: {expr!r}")

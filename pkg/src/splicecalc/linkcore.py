"""Link data model and the built-in catalog of base links.

A LinkSpec is a named oriented link given by its ordered component labels,
its symmetric integer linking matrix (diagonal unused, treated as 0), and
its Conway function as an exact rational function over the component
variables t_<label>.  Split links that may be spliced along an all-zero
linking component additionally carry the specs of their sublinks, because
the Conway function of the result is not recoverable from a vanishing
Conway function alone.

Everything here is immutable after construction; the catalog is built once
and only read afterwards.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import gcd as _int_gcd

from .errors import (
    CatalogError,
    CollisionError,
    ExprSyntaxError,
    NonCoprime,
    SpliceCalcError,
    UnknownComponent,
)
from .symalg import LaurentPoly, Monomial, RatFn, parse_poly, render

_LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def component_var(label: str) -> str:
    """The polynomial variable carried by a component label."""
    return "t_" + label


class LinkSpec:
    """An oriented link: components, linking matrix, Conway function.

    ``lk`` maps unordered component pairs to integers; both orders are
    accepted on input and normalized.  ``sublinks`` optionally maps a
    component label to the spec of the link obtained by deleting it.
    """

    __slots__ = ("name", "components", "conway", "sublinks", "_lk", "_index")

    def __init__(self, name, components, lk, conway, sublinks=None):
        components = tuple(components)
        if not components:
            raise ValueError("a link needs at least one component")
        for c in components:
            if not isinstance(c, str) or not _LABEL_RE.match(c):
                raise ValueError(f"bad component label: {c!r}")
        if len(set(components)) != len(components):
            raise ValueError(f"duplicate component labels in {components}")
        index = {c: i for i, c in enumerate(components)}

        raw = lk.items() if isinstance(lk, dict) else lk
        norm: dict[tuple[str, str], int] = {}
        for pair, value in raw:
            a, b = pair
            if a not in index or b not in index:
                raise UnknownComponent(f"linking entry {pair} names an unknown component")
            if a == b:
                raise ValueError("diagonal linking entries are unused; omit them")
            if not isinstance(value, int):
                raise TypeError(f"linking number for {pair} must be int")
            key = (a, b) if index[a] < index[b] else (b, a)
            if key in norm and norm[key] != value:
                raise ValueError(f"conflicting linking values for pair {key}")
            norm[key] = value

        self.name = str(name)
        self.components = components
        self._index = index
        self._lk = {k: v for k, v in norm.items() if v}
        self.conway = conway if isinstance(conway, RatFn) else RatFn(conway)
        self.sublinks = dict(sublinks) if sublinks else {}

    # -- linking matrix ---------------------------------------------------

    def linking(self, a: str, b: str) -> int:
        if a not in self._index or b not in self._index:
            raise UnknownComponent(f"unknown component in linking lookup: {a!r}, {b!r}")
        if a == b:
            return 0
        key = (a, b) if self._index[a] < self._index[b] else (b, a)
        return self._lk.get(key, 0)

    def nonzero_pairs(self) -> list[tuple[tuple[str, str], int]]:
        """Nonzero linking entries, pairs ordered by component order."""
        return sorted(self._lk.items(), key=lambda kv: (self._index[kv[0][0]], self._index[kv[0][1]]))

    def lk_matrix(self) -> list[list[int]]:
        return [[self.linking(a, b) for b in self.components] for a in self.components]

    def var(self, comp: str) -> str:
        if comp not in self._index:
            raise UnknownComponent(f"unknown component: {comp!r}")
        return component_var(comp)

    def has_component(self, comp: str) -> bool:
        return comp in self._index

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        """Structural equality: components in order, lk, conway, sublinks.

        Names are display metadata and do not participate.
        """
        if not isinstance(other, LinkSpec):
            return NotImplemented
        return (
            self.components == other.components
            and self._lk == other._lk
            and self.conway == other.conway
            and self.sublinks == other.sublinks
        )

    __hash__ = None

    def equivalent(self, other: "LinkSpec") -> bool:
        """Equality up to component ordering, ignoring name and sublink data."""
        if set(self.components) != set(other.components):
            return False
        for i, a in enumerate(self.components):
            for b in self.components[i + 1:]:
                if self.linking(a, b) != other.linking(a, b):
                    return False
        return self.conway == other.conway

    def __repr__(self) -> str:
        return f"LinkSpec({self.name!r}, components={self.components!r}, conway={render(self.conway)})"


def relabel(spec: LinkSpec, mapping: dict[str, str]) -> LinkSpec:
    """Rename components consistently across labels, lk, conway, and sublinks.

    ``mapping`` may be partial; unmentioned components keep their names.  The
    resulting full relabeling must be injective.
    """
    for key in mapping:
        if not spec.has_component(key):
            raise UnknownComponent(f"relabel of unknown component: {key!r}")
    full = {c: mapping.get(c, c) for c in spec.components}
    for label in full.values():
        if not _LABEL_RE.match(label):
            raise ValueError(f"bad component label: {label!r}")
    if len(set(full.values())) != len(full):
        raise CollisionError(f"relabeling is not injective: {mapping}")
    var_map = {component_var(c): component_var(n) for c, n in full.items()}
    new_lk = {(full[a], full[b]): v for (a, b), v in spec._lk.items()}
    new_subs = {}
    for comp, sub in spec.sublinks.items():
        sub_map = {c: n for c, n in full.items() if sub.has_component(c)}
        new_subs[full[comp]] = relabel(sub, sub_map)
    return LinkSpec(
        spec.name,
        tuple(full[c] for c in spec.components),
        new_lk,
        spec.conway.rename_vars(var_map),
        new_subs,
    )


def validate_linkspec(spec: LinkSpec) -> list[str]:
    """Check the semantic invariants; returns human-readable violations.

    An empty list means the spec is valid.  Violations are data, not errors:
    building an invalid spec is allowed, using one where validity is required
    is not.
    """
    problems = []
    allowed = {component_var(c) for c in spec.components}
    for v in spec.conway.variables():
        if v not in allowed:
            problems.append(f"unknown-variable: conway uses {v}, not a component variable")
    n = len(spec.components)
    expected = spec.conway if n % 2 == 0 else -spec.conway
    if spec.conway.invert_vars() != expected:
        problems.append(f"symmetry: invert_vars(conway) != (-1)^{n} * conway")
    for comp in sorted(spec.sublinks):
        sub = spec.sublinks[comp]
        if not spec.has_component(comp):
            problems.append(f"sublink: {comp} is not a component")
            continue
        expected_comps = set(spec.components) - {comp}
        if set(sub.components) != expected_comps:
            problems.append(
                f"sublink: entry for {comp} has components {sorted(sub.components)},"
                f" expected {sorted(expected_comps)}"
            )
            continue
        for p in validate_linkspec(sub):
            problems.append(f"sublink {comp}: {p}")
    return problems


# ---------------------------------------------------------------------------
# Built-in catalog.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def make_torus(p: int, q: int, d: int) -> LinkSpec:
    """The link of d parallel (p,q) torus knots plus the two core circles.

    Components: c2 and c1 are the cores of the two solid tori (c2 links each
    copy p times, c1 links each copy q times), s1..sd are the parallel
    copies.  Its Conway function is (M - M^-1)^d for the monomial
    M = t_c2^p t_c1^q (t_s1...t_sd)^(pq).
    """
    if d < 1:
        raise ValueError(f"cable copy count must be >= 1, got {d}")
    if _int_gcd(abs(p), abs(q)) != 1:
        raise NonCoprime(f"({p},{q}) are not coprime")
    copies = tuple(f"s{i}" for i in range(1, d + 1))
    comps = ("c2", "c1") + copies
    lk: dict[tuple[str, str], int] = {("c2", "c1"): 1}
    for s in copies:
        lk[("c2", s)] = p
        lk[("c1", s)] = q
    for i, a in enumerate(copies):
        for b in copies[i + 1:]:
            lk[(a, b)] = p * q
    expo = {component_var("c2"): p, component_var("c1"): q}
    for s in copies:
        expo[component_var(s)] = p * q
    m = Monomial(expo)
    core = LaurentPoly.monomial(m) - LaurentPoly.monomial(m.inverse())
    return LinkSpec(f"torus({p},{q},{d})", comps, lk, RatFn(core ** d))


_TORUS_NAME_RE = re.compile(r"torus\((-?\d+),(-?\d+),(-?\d+)\)\Z")


class Catalog:
    """A name -> LinkSpec table with the parametric torus family built in."""

    def __init__(self):
        self._entries: dict[str, LinkSpec] = {}

    def add(self, spec: LinkSpec):
        if self.get(spec.name) is not None:
            raise CatalogError(f"duplicate link name: {spec.name}")
        self._entries[spec.name] = spec

    def names(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def get(self, name: str):
        """Look up a link by name; returns None when absent."""
        hit = self._entries.get(name)
        if hit is not None:
            return hit
        m = _TORUS_NAME_RE.match(name.replace(" ", ""))
        if m:
            p, q, d = map(int, m.groups())
            return make_torus(p, q, d)
        return None

    def __contains__(self, name: str) -> bool:
        try:
            return self.get(name) is not None
        except SpliceCalcError:
            return False


def builtin_catalog() -> Catalog:
    """The base links whose Conway functions the calculus starts from.

    * unknot: forced by consistency of the splice formula with component
      removal (checked by the Torres cross-check in the engine tests);
    * hopf: the positive Hopf link, the neutral element for splicing;
    * tilde: the three-component helper link through which connected sums
      are spliced;
    * unlink2: the split two-component link, carrying its sublinks since
      its own Conway function is 0;
    * torus(p,q,d): resolved parametrically by name.
    """
    cat = Catalog()
    unknot = LinkSpec("unknot", ("u",), {}, parse_poly("1/(t_u - t_u^-1)"))
    cat.add(unknot)
    cat.add(LinkSpec("hopf", ("a", "b"), {("a", "b"): 1}, parse_poly("1")))
    cat.add(
        LinkSpec(
            "tilde",
            ("x", "y", "c"),
            {("x", "c"): 1, ("y", "c"): 1},
            parse_poly("t_c - t_c^-1"),
        )
    )
    cat.add(
        LinkSpec(
            "unlink2",
            ("a", "b"),
            {},
            RatFn.zero(),
            sublinks={"a": relabel(unknot, {"u": "b"}), "b": relabel(unknot, {"u": "a"})},
        )
    )
    return cat


# ---------------------------------------------------------------------------
# Catalog file format (UTF-8, line oriented):
#
#   link <name>
#   components <c1> <c2> ...
#   lk <ci> <cj> <int>        # one line per nonzero pair; omitted pairs are 0
#   conway <rational-expr>    # variables t_<ci>
#   sublink <ci> <name>       # optional, repeatable
#   end
#
# Parsing is strict: unknown keywords, duplicate components, redefined lk
# pairs, or invalid specs are errors with line numbers.  Blank lines and
# lines starting with '#' are ignored.  A sublink reference names another
# link (in this file, an earlier catalog, or the built-ins); its components
# are matched positionally against the parent's remaining components.
# ---------------------------------------------------------------------------


class _Block:
    def __init__(self, name, line):
        self.name = name
        self.line = line
        self.components = None
        self.lk = []
        self.conway_src = None
        self.conway_line = None
        self.sublinks = []


def _parse_blocks(text: str, source: str) -> list[_Block]:
    blocks: list[_Block] = []
    current: _Block | None = None

    def fail(lineno, message):
        raise CatalogError(f"{source}:{lineno}: {message}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "link":
            if current is not None:
                fail(lineno, "nested 'link' (missing 'end'?)")
            if not rest:
                fail(lineno, "'link' needs a name")
            current = _Block(rest, lineno)
            continue
        if current is None:
            fail(lineno, f"{keyword!r} outside a link block")
        if keyword == "components":
            if current.components is not None:
                fail(lineno, "duplicate 'components' line")
            comps = rest.split()
            if len(set(comps)) != len(comps):
                fail(lineno, "duplicate component labels")
            current.components = tuple(comps)
        elif keyword == "lk":
            parts = rest.split()
            if len(parts) != 3:
                fail(lineno, "'lk' needs: <ci> <cj> <int>")
            try:
                value = int(parts[2])
            except ValueError:
                fail(lineno, f"bad linking number {parts[2]!r}")
            current.lk.append((parts[0], parts[1], value, lineno))
        elif keyword == "conway":
            if current.conway_src is not None:
                fail(lineno, "duplicate 'conway' line")
            current.conway_src = rest
            current.conway_line = lineno
        elif keyword == "sublink":
            parts = rest.split()
            if len(parts) != 2:
                fail(lineno, "'sublink' needs: <ci> <name>")
            current.sublinks.append((parts[0], parts[1], lineno))
        elif keyword == "end":
            if rest:
                fail(lineno, "'end' takes no arguments")
            if current.components is None:
                fail(lineno, f"link {current.name!r} has no 'components' line")
            if current.conway_src is None:
                fail(lineno, f"link {current.name!r} has no 'conway' line")
            blocks.append(current)
            current = None
        else:
            fail(lineno, f"unknown keyword {keyword!r}")
    if current is not None:
        raise CatalogError(f"{source}:{current.line}: link {current.name!r} never ends")
    return blocks


def parse_catalog(text: str, *, source: str = "<catalog>", resolver=None) -> list[LinkSpec]:
    """Parse catalog text into validated LinkSpecs, resolving sublink names.

    ``resolver`` is consulted for sublink names not defined in this text
    (typically the built-ins plus earlier catalog files).
    """
    blocks = _parse_blocks(text, source)
    by_name: dict[str, _Block] = {}
    for block in blocks:
        if block.name in by_name:
            raise CatalogError(f"{source}:{block.line}: duplicate link name {block.name!r}")
        by_name[block.name] = block

    built: dict[str, LinkSpec] = {}
    building: set[str] = set()

    def build(name: str) -> LinkSpec:
        if name in built:
            return built[name]
        block = by_name[name]
        if name in building:
            raise CatalogError(f"{source}:{block.line}: sublink cycle through {name!r}")
        building.add(name)

        seen_pairs = set()
        lk = {}
        for a, b, value, lineno in block.lk:
            for label in (a, b):
                if label not in block.components:
                    raise CatalogError(
                        f"{source}:{lineno}: lk names unknown component {label!r}"
                    )
            if a == b:
                raise CatalogError(f"{source}:{lineno}: lk diagonal entries are unused")
            pair = frozenset((a, b))
            if pair in seen_pairs:
                raise CatalogError(f"{source}:{lineno}: lk pair ({a},{b}) redefined")
            seen_pairs.add(pair)
            lk[(a, b)] = value
        try:
            conway = parse_poly(block.conway_src)
        except ExprSyntaxError as exc:
            raise CatalogError(f"{source}:{block.conway_line}: bad conway expression: {exc}") from exc

        sublinks = {}
        for comp, target_name, lineno in block.sublinks:
            if comp not in block.components:
                raise CatalogError(f"{source}:{lineno}: sublink component {comp!r} unknown")
            if comp in sublinks:
                raise CatalogError(f"{source}:{lineno}: duplicate sublink for {comp!r}")
            if target_name in by_name:
                target = build(target_name)
            else:
                target = resolver(target_name) if resolver else None
            if target is None:
                raise CatalogError(f"{source}:{lineno}: sublink name {target_name!r} not found")
            expected = tuple(c for c in block.components if c != comp)
            if len(target.components) != len(expected):
                raise CatalogError(
                    f"{source}:{lineno}: sublink {target_name!r} has {len(target.components)}"
                    f" components, expected {len(expected)}"
                )
            sublinks[comp] = relabel(target, dict(zip(target.components, expected)))

        try:
            spec = LinkSpec(name, block.components, lk, conway, sublinks)
        except (SpliceCalcError, ValueError, TypeError) as exc:
            raise CatalogError(f"{source}:{block.line}: {exc}") from exc
        problems = validate_linkspec(spec)
        if problems:
            detail = "; ".join(problems)
            raise CatalogError(f"{source}:{block.line}: link {name!r} is invalid: {detail}")
        building.discard(name)
        built[name] = spec
        return spec

    return [build(block.name) for block in blocks]


def emit_catalog(spec: LinkSpec) -> str:
    """Render a LinkSpec (and its sublink closure) in catalog file format."""
    lines: list[str] = []
    emitted: set[str] = set()

    def emit(s: LinkSpec, name: str):
        sub_names = {}
        for comp in s.components:
            if comp in s.sublinks:
                sub_name = f"{name}.minus.{comp}"
                sub_names[comp] = sub_name
                if sub_name not in emitted:
                    emit(s.sublinks[comp], sub_name)
        emitted.add(name)
        lines.append(f"link {name}")
        lines.append("components " + " ".join(s.components))
        for (a, b), value in s.nonzero_pairs():
            lines.append(f"lk {a} {b} {value}")
        lines.append(f"conway {render(s.conway)}")
        for comp in s.components:
            if comp in sub_names:
                lines.append(f"sublink {comp} {sub_names[comp]}")
        lines.append("end")

    emit(spec, spec.name)
    return "\n".join(lines) + "\n"

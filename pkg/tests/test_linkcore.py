"""Link data model, catalog invariants, relabeling, catalog file format."""

from math import gcd

import pytest

from splicecalc.errors import CatalogError, CollisionError, NonCoprime, UnknownComponent
from splicecalc.linkcore import (
    Catalog,
    LinkSpec,
    builtin_catalog,
    emit_catalog,
    make_torus,
    parse_catalog,
    relabel,
    validate_linkspec,
)
from splicecalc.symalg import RatFn, parse_poly

P = parse_poly


@pytest.fixture(scope="module")
def cat():
    return builtin_catalog()


class TestLinkSpec:
    def test_linking_is_symmetric_and_zero_diagonal(self, cat):
        hopf = cat.get("hopf")
        assert hopf.linking("a", "b") == 1
        assert hopf.linking("b", "a") == 1
        assert hopf.linking("a", "a") == 0

    def test_both_orders_accepted(self):
        s1 = LinkSpec("s", ("a", "b"), {("a", "b"): 3}, P("1"))
        s2 = LinkSpec("s", ("a", "b"), {("b", "a"): 3}, P("1"))
        assert s1 == s2

    def test_conflicting_lk_rejected(self):
        with pytest.raises(ValueError):
            LinkSpec("s", ("a", "b"), [(("a", "b"), 1), (("b", "a"), 2)], P("1"))

    def test_unknown_component_in_lk(self):
        with pytest.raises(UnknownComponent):
            LinkSpec("s", ("a", "b"), {("a", "z"): 1}, P("1"))

    def test_diagonal_rejected(self):
        with pytest.raises(ValueError):
            LinkSpec("s", ("a", "b"), {("a", "a"): 1}, P("1"))

    def test_duplicate_components_rejected(self):
        with pytest.raises(ValueError):
            LinkSpec("s", ("a", "a"), {}, P("1"))


class TestValidate:
    def test_hopf_valid(self, cat):
        assert validate_linkspec(cat.get("hopf")) == []

    def test_symmetry_violation(self):
        bad = LinkSpec("bad", ("a", "b"), {("a", "b"): 1}, P("t_a"))
        problems = validate_linkspec(bad)
        assert any(p.startswith("symmetry") for p in problems)

    def test_unknown_variable_violation(self):
        bad = LinkSpec("bad", ("a", "b"), {}, P("t_z - t_z^-1"))
        problems = validate_linkspec(bad)
        assert any(p.startswith("unknown-variable") for p in problems)

    def test_sublink_component_mismatch(self, cat):
        unknot = cat.get("unknot")
        bad = LinkSpec("bad", ("a", "b"), {}, RatFn.zero(), sublinks={"a": unknot})
        problems = validate_linkspec(bad)
        assert any("sublink" in p for p in problems)

    def test_all_builtins_valid(self, cat):
        for name in cat.names():
            assert validate_linkspec(cat.get(name)) == [], name

    def test_torus_family_valid(self):
        for p in range(-7, 8):
            for q in range(-7, 8):
                if gcd(abs(p), abs(q)) != 1:
                    continue
                for d in (1, 2, 3):
                    spec = make_torus(p, q, d)
                    assert validate_linkspec(spec) == [], (p, q, d)

    def test_torus_rejects_bad_parameters(self):
        with pytest.raises(NonCoprime):
            make_torus(2, 4, 1)
        with pytest.raises(ValueError):
            make_torus(2, 1, 0)


class TestRelabel:
    def test_identity(self, cat):
        tilde = cat.get("tilde")
        assert relabel(tilde, {"c": "c"}) == tilde

    def test_full_rename(self, cat):
        hopf = cat.get("hopf")
        renamed = relabel(hopf, {"a": "m", "b": "n"})
        assert renamed.components == ("m", "n")
        assert renamed.linking("m", "n") == 1
        assert renamed.conway == P("1")
        assert validate_linkspec(renamed) == []

    def test_swap(self, cat):
        tilde = cat.get("tilde")
        swapped = relabel(tilde, {"x": "y", "y": "x"})
        assert swapped.components == ("y", "x", "c")
        assert swapped.linking("y", "c") == 1

    def test_collision(self, cat):
        hopf = cat.get("hopf")
        with pytest.raises(CollisionError):
            relabel(hopf, {"a": "b"})

    def test_unknown_component(self, cat):
        with pytest.raises(UnknownComponent):
            relabel(cat.get("hopf"), {"z": "w"})

    def test_sublinks_follow(self, cat):
        unlink2 = cat.get("unlink2")
        renamed = relabel(unlink2, {"a": "p", "b": "q"})
        assert set(renamed.sublinks) == {"p", "q"}
        assert renamed.sublinks["p"].components == ("q",)
        assert renamed.sublinks["p"].conway == P("1/(t_q - t_q^-1)")

    def test_relabel_commutes_with_validate(self, cat):
        bad = LinkSpec("bad", ("a", "b"), {("a", "b"): 1}, P("t_a"))
        before = validate_linkspec(bad)
        after = validate_linkspec(relabel(bad, {"a": "m", "b": "n"}))
        assert len(before) == len(after)
        assert [p.split(":")[0] for p in before] == [p.split(":")[0] for p in after]


class TestCatalog:
    def test_builtin_values(self, cat):
        assert cat.get("hopf").conway == P("1")
        assert cat.get("unknot").conway == P("1/(t_u - t_u^-1)")
        assert cat.get("tilde").conway == P("t_c - t_c^-1")
        assert cat.get("unlink2").conway.is_zero

    def test_torus_lookup(self, cat):
        spec = cat.get("torus(2,1,1)")
        assert spec.conway == P("t_c2^2*t_c1*t_s1^2 - t_c2^-2*t_c1^-1*t_s1^-2")
        assert spec.linking("c2", "s1") == 2
        assert spec.linking("c1", "s1") == 1
        assert spec.linking("c2", "c1") == 1

    def test_torus_copies_linking(self, cat):
        spec = cat.get("torus(3,2,2)")
        assert spec.linking("s1", "s2") == 6

    def test_missing(self, cat):
        assert cat.get("missing") is None

    def test_duplicate_add(self, cat):
        extra = Catalog()
        extra.add(LinkSpec("x", ("a",), {}, P("1/(t_a - t_a^-1)")))
        with pytest.raises(CatalogError):
            extra.add(LinkSpec("x", ("a",), {}, P("1/(t_a - t_a^-1)")))


GOOD_CATALOG = """\
# a valid user catalog
link twist
components a b
lk a b 2
conway 1
end

link split
components p q
conway 0
sublink p onecomp
sublink q onecomp
end

link onecomp
components z
conway 1/(t_z - t_z^-1)
end
"""


class TestCatalogFile:
    def test_parse_good(self):
        specs = parse_catalog(GOOD_CATALOG, source="good")
        by_name = {s.name: s for s in specs}
        assert by_name["twist"].linking("a", "b") == 2
        split = by_name["split"]
        assert split.sublinks["p"].components == ("q",)
        assert split.sublinks["p"].conway == P("1/(t_q - t_q^-1)")

    def test_resolver_consulted(self, cat):
        text = "link mine\ncomponents a b\nconway 0\nsublink a unknot\nsublink b unknot\nend\n"
        specs = parse_catalog(text, source="t", resolver=cat.get)
        assert specs[0].sublinks["a"].components == ("b",)

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("link x\ncomponents a a\nconway 1\nend\n", ":2"),
            ("link x\ncomponents a\nconway 1\nfoo bar\nend\n", "foo"),
            ("link x\ncomponents a b\nlk a b 1\nlk b a 1\nconway 1\nend\n", ":4"),
            ("link x\ncomponents a\nconway t_a +\nend\n", "conway"),
            ("link x\ncomponents a\nconway 1/(t_a - t_a^-1)\n", "never ends"),
            ("components a\n", "outside"),
            ("link x\ncomponents a\nconway 1\nend\n", "invalid"),
            ("link x\ncomponents a b\nlk a z 1\nconway 0\nend\n", ":3"),
        ],
    )
    def test_strict_errors_carry_line_numbers(self, text, fragment):
        with pytest.raises(CatalogError) as err:
            parse_catalog(text, source="f")
        assert fragment in str(err.value)

    def test_validation_enforced(self):
        text = "link x\ncomponents a b\nconway t_a\nend\n"
        with pytest.raises(CatalogError) as err:
            parse_catalog(text, source="f")
        assert "symmetry" in str(err.value)

    def test_emit_round_trip(self, cat):
        for name in cat.names():
            spec = cat.get(name)
            text = emit_catalog(spec)
            specs = parse_catalog(text, source=name)
            rebuilt = {s.name: s for s in specs}[spec.name]
            assert rebuilt == spec, name

    def test_emit_round_trip_torus(self, cat):
        spec = cat.get("torus(5,-2,3)")
        rebuilt = parse_catalog(emit_catalog(spec), source="t")[-1]
        assert rebuilt == spec

    def test_sublink_cycle_detected(self):
        text = (
            "link a\ncomponents p q\nconway 0\nsublink p b\nend\n"
            "link b\ncomponents r\nconway 1/(t_r - t_r^-1)\nsublink r a\nend\n"
        )
        with pytest.raises(CatalogError):
            parse_catalog(text, source="f")

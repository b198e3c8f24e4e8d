"""Exact arithmetic: parsing, canonical forms, ring axioms, substitutions."""

import random

import pytest

from splicecalc.errors import (
    CollisionError,
    DivisionByZero,
    ExprSyntaxError,
    SingularSpecialization,
    ZeroDenominator,
)
from splicecalc.symalg import (
    LaurentPoly,
    Monomial,
    RatFn,
    exact_div,
    parse_poly,
    poly_gcd,
    render,
)

P = parse_poly


def rand_laurent(rng, variables, max_terms=4, max_exp=3, allow_zero=False):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = {v: rng.randint(-max_exp, max_exp) for v in variables if rng.random() < 0.7}
        m = Monomial(exps)
        terms[m] = terms.get(m, 0) + rng.randint(-5, 5)
    p = LaurentPoly(terms)
    if p.is_zero and not allow_zero:
        return LaurentPoly.one()
    return p


def rand_ratfn(rng, variables=("t_a", "t_b")):
    num = rand_laurent(rng, variables, allow_zero=True)
    den = rand_laurent(rng, variables)
    return RatFn(num, den)


class TestMonomial:
    def test_zero_exponents_dropped(self):
        assert Monomial({"t": 0}).is_one
        assert Monomial({"t": 2, "u": 0}) == Monomial({"t": 2})

    def test_bad_names_rejected(self):
        with pytest.raises(ValueError):
            Monomial({"": 1})
        with pytest.raises(ValueError):
            Monomial({"a b": 1})

    def test_group_structure(self):
        m = Monomial({"t_a": 2, "t_b": -1})
        assert m * m.inverse() == Monomial()
        assert m ** 3 == Monomial({"t_a": 6, "t_b": -3})
        assert (m ** -2) * (m ** 2) == Monomial()


class TestParseRender:
    def test_basic(self):
        f = P("t_a - t_a^-1")
        assert render(f) == "t_a - t_a^-1"

    def test_reduction_on_parse(self):
        # independent oracle: multiply the quotient back
        q = P("(t^2 - t^-2)/(t - t^-1)")
        assert q * P("t - t^-1") == P("t^2 - t^-2")
        assert q == P("t + t^-1")
        assert render(q) == "t + t^-1"

    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            P("t_a +")
        assert err.value.position == 5

    def test_trailing_garbage(self):
        with pytest.raises(ExprSyntaxError):
            P("t_a ) t")

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            P("1/(t - t)")

    def test_round_trips(self):
        rng = random.Random(11)
        for _ in range(120):
            f = rand_ratfn(rng)
            assert P(render(f)) == f

    def test_render_examples(self):
        assert render(P("0")) == "0"
        assert render(P("-5")) == "-5"
        assert render(P("2*t_a - t_b")) in ("2*t_a - t_b", "-t_b + 2*t_a")
        assert render(P("1/(t_u - t_u^-1)")) == "(t_u)/(t_u^2 - 1)"

    def test_canonical_term_order_is_graded_lex(self):
        # degree first, then lexicographic on variables sorted by name
        assert render(P("t_b + t_a*t_b")) == "t_a*t_b + t_b"
        assert render(P("t_b + t_a")) == "t_a + t_b"

    def test_whitespace_insignificant(self):
        assert P(" ( t ^ 2 - t ^ -2 ) / ( t - t ^ -1 )") == P("t + t^-1")


class TestArith:
    def test_additive_inverse(self):
        assert (P("t - t^-1") + P("t^-1 - t")).is_zero

    def test_difference_of_squares(self):
        assert P("(t - t^-1)*(t + t^-1)") == P("t^2 - t^-2")

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            P("1") / P("0")

    def test_pow(self):
        f = P("(t + 1)/(t - 1)")
        assert f ** 0 == RatFn.one()
        assert f ** 3 == f * f * f
        assert f ** -2 == RatFn.one() / (f * f)
        with pytest.raises(DivisionByZero):
            P("0") ** -1

    def test_int_coercion(self):
        f = P("t")
        assert 1 + f == P("1 + t")
        assert 2 * f - f == f
        assert 1 / P("t") == P("t^-1")


class TestRingAxioms:
    def test_axioms_hold_exactly(self):
        rng = random.Random(0)
        for _ in range(60):
            a = rand_ratfn(rng)
            b = rand_ratfn(rng)
            c = rand_ratfn(rng)
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            assert a + (-a) == RatFn.zero()
            if not a.is_zero:
                assert a * (RatFn.one() / a) == RatFn.one()

    def test_reduce_idempotent(self):
        rng = random.Random(1)
        for _ in range(60):
            f = rand_ratfn(rng)
            again = RatFn(f.numerator, f.denominator)
            assert again.numerator == f.numerator
            assert again.denominator == f.denominator

    def test_equality_matches_cross_multiplication(self):
        rng = random.Random(2)
        for _ in range(60):
            a = rand_ratfn(rng)
            b = rand_ratfn(rng)
            structural = a == b
            cross = a.numerator * b.denominator == b.numerator * a.denominator
            assert structural == cross
            # scaling both parts leaves the canonical form unchanged
            k = rand_laurent(rng, ("t_a", "t_b"))
            assert RatFn(a.numerator * k, a.denominator * k) == a


class TestCanonicalForm:
    def test_denominator_positive_leading(self):
        f = RatFn(P("t").numerator, P("1 - t").numerator)
        assert f.denominator == P("t - 1").numerator
        assert f == P("t") / P("1 - t")

    def test_denominator_has_no_monomial_content(self):
        f = P("1/(t - t^-1)")
        assert f.denominator == P("t^2 - 1").numerator
        assert f.numerator == P("t").numerator

    def test_integer_content_cancelled(self):
        f = RatFn(LaurentPoly.const(6), LaurentPoly.const(4))
        assert render(f) == "(3)/(2)"


class TestSubstitution:
    def test_monomial_substitution(self):
        f = P("t_p - t_p^-1")
        m = Monomial({"t_1": 1, "t_2": 2})
        assert f.substitute_monomial("t_p", m) == P("t_1*t_2^2 - t_1^-1*t_2^-2")

    def test_identity_substitution(self):
        f = P("(t + t^-1)/(t - t^-1)")
        assert f.substitute_monomial("t", Monomial({"t": 1})) == f

    def test_empty_monomial_is_specialization(self):
        with pytest.raises(SingularSpecialization):
            P("1/(t_p - t_p^-1)").substitute_monomial("t_p", Monomial())
        assert P("t_p^2").substitute_monomial("t_p", Monomial()) == RatFn.one()

    def test_substitution_self_reference(self):
        # replacing t by t*t_u^2 in one pass
        f = P("t - t^-1")
        m = Monomial({"t": 1, "t_u": 2})
        assert f.substitute_monomial("t", m) == P("t*t_u^2 - t^-1*t_u^-2")

    def test_specialize_one(self):
        assert P("t_1^2*t_2 - t_1^-2*t_2^-1").specialize_one("t_1") == P("t_2 - t_2^-1")
        assert P("(t_1 - t_1^-1)/(t_1 - t_1^-1)") == RatFn.one()
        with pytest.raises(SingularSpecialization):
            P("1/(t_1 - t_1^-1)").specialize_one("t_1")

    def test_specialize_absent_variable(self):
        f = P("t_a + 1")
        assert f.specialize_one("t_z") == f

    def test_invert_vars(self):
        assert P("t - t^-1").invert_vars() == P("t^-1 - t")
        h = P("1/(t - t^-1)")
        assert h.invert_vars() == -h
        assert P("5").invert_vars() == P("5")

    def test_invert_vars_involution(self):
        rng = random.Random(3)
        for _ in range(60):
            f = rand_ratfn(rng)
            assert f.invert_vars().invert_vars() == f

    def test_diagonal(self):
        assert P("t_1*t_2 - t_1^-1*t_2^-1").diagonal("t") == P("t^2 - t^-2")
        assert P("t_1 - t_1^-1").diagonal("t") == P("t - t^-1")
        assert P("(t_1 - t_2)/(t_1*t_2)").diagonal("t").is_zero
        with pytest.raises(SingularSpecialization):
            P("1/(t_1 - t_2)").diagonal("t")

    def test_substitution_recovery(self):
        # substituting v -> w*u (w fresh) then w -> v*u^-1 recovers the input
        rng = random.Random(4)
        for _ in range(40):
            f = rand_ratfn(rng, ("t_a", "t_b"))
            u = Monomial({"t_b": rng.randint(-2, 2)})
            first = f.substitute_monomial("t_a", Monomial({"t_w": 1}) * u)
            back = first.substitute_monomial("t_w", Monomial({"t_a": 1}) * u.inverse())
            assert back == f

    def test_diagonal_then_one_is_all_ones(self):
        rng = random.Random(5)
        checked = 0
        for _ in range(60):
            f = rand_ratfn(rng)
            try:
                via_diag = f.diagonal("t").specialize_one("t")
                direct = f
                for v in f.variables():
                    direct = direct.specialize_one(v)
            except SingularSpecialization:
                continue
            assert via_diag == direct
            checked += 1
        assert checked > 20

    def test_rename_vars(self):
        f = P("t_a - t_b")
        assert f.rename_vars({"t_a": "t_b", "t_b": "t_a"}) == P("t_b - t_a")
        with pytest.raises(CollisionError):
            f.rename_vars({"t_a": "t_b"})


class TestGcd:
    def test_known_gcd(self):
        a = P("t^2 - 1").numerator
        b = P("t^2 - 2*t + 1").numerator
        assert poly_gcd(a, b) == P("t - 1").numerator

    def test_multivariate_gcd(self):
        c = P("t_a + t_b").numerator
        f = (P("t_a - t_b").numerator) * c
        g = (P("t_a*t_b + 1").numerator) * c
        assert poly_gcd(f, g) == c

    def test_constants_are_units(self):
        assert poly_gcd(LaurentPoly.const(6), LaurentPoly.const(4)) == LaurentPoly.one()

    def test_randomized_products(self):
        rng = random.Random(6)
        for _ in range(80):
            vs = ("t_a", "t_b")
            a = rand_laurent(rng, vs).mul_monomial(Monomial())
            b = rand_laurent(rng, vs)
            c = rand_laurent(rng, vs)
            fa = _genuine(a)
            fb = _genuine(b)
            fc = _genuine(c)
            g = poly_gcd(fa * fc, fb * fc)
            # the common factor divides the gcd, and the gcd divides both
            exact_div(g, poly_gcd(fc, g))
            exact_div(fa * fc, g)
            exact_div(fb * fc, g)


def _genuine(p):
    return p.mul_monomial(p.monomial_content().inverse())

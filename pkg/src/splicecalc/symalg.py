"""Exact multivariate Laurent-polynomial and rational-function arithmetic.

Values live in the fraction field of Z[t1, t1^-1, ..., tn, tn^-1].  Three
layers:

  Monomial    -- an exponent vector over named variables (exponents may be
                 negative); the multiplicative unit group of the Laurent ring.
  LaurentPoly -- a finite map from monomials to nonzero integer coefficients.
  RatFn       -- a quotient of two Laurent polynomials kept in a canonical
                 reduced form, so structural equality is mathematical equality.

Canonical form of a RatFn:

  * numerator and denominator share no polynomial factor (multivariate GCD
    over the rationals, primitive-part normalized, is 1);
  * the denominator is a genuine polynomial with no monomial factor (any
    monomial unit is pushed into the numerator);
  * the denominator's leading coefficient in graded-lex term order is
    positive, and numerator/denominator integer contents are coprime.

All values are immutable and all operations are pure functions, so
everything here is safe to use concurrently.

>>> f = parse_poly("(t^2 - t^-2)/(t - t^-1)")
>>> render(f)
't + t^-1'
"""

from __future__ import annotations

import heapq
import re
from math import gcd as _int_gcd

from .errors import (
    CollisionError,
    DivisionByZero,
    ExprSyntaxError,
    SingularSpecialization,
    ZeroDenominator,
)

_VAR_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Monomial:
    """A product of named variables raised to nonzero integer exponents.

    The empty monomial is the constant 1.  Variable names are nonempty
    strings over [A-Za-z0-9_].
    """

    __slots__ = ("_exps",)

    def __init__(self, exps=()):
        items = exps.items() if isinstance(exps, dict) else exps
        merged: dict[str, int] = {}
        for var, exp in items:
            if not isinstance(var, str) or not _VAR_NAME_RE.match(var):
                raise ValueError(f"bad variable name: {var!r}")
            if not isinstance(exp, int):
                raise TypeError(f"exponent of {var} must be int, got {type(exp).__name__}")
            new = merged.get(var, 0) + exp
            if new:
                merged[var] = new
            else:
                merged.pop(var, None)
        self._exps = tuple(sorted(merged.items()))

    @classmethod
    def _make(cls, exps: tuple) -> "Monomial":
        """Internal constructor for already-validated sorted exponent tuples."""
        obj = cls.__new__(cls)
        obj._exps = exps
        return obj

    @property
    def is_one(self) -> bool:
        return not self._exps

    def exponent(self, var: str) -> int:
        for v, e in self._exps:
            if v == var:
                return e
        return 0

    def items(self):
        return self._exps

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self._exps)

    def degree(self) -> int:
        """Total degree: the sum of all exponents."""
        return sum(e for _, e in self._exps)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        if not other._exps:
            return self
        if not self._exps:
            return other
        merged = dict(self._exps)
        for v, e in other._exps:
            new = merged.get(v, 0) + e
            if new:
                merged[v] = new
            else:
                del merged[v]
        return Monomial._make(tuple(sorted(merged.items())))

    def __pow__(self, k: int) -> "Monomial":
        if k == 0:
            return _MONO_ONE
        return Monomial._make(tuple((v, e * k) for v, e in self._exps))

    def inverse(self) -> "Monomial":
        return Monomial._make(tuple((v, -e) for v, e in self._exps))

    def without(self, var: str) -> "Monomial":
        return Monomial._make(tuple((v, e) for v, e in self._exps if v != var))

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self._exps == other._exps

    def __hash__(self) -> int:
        return hash(self._exps)

    def __repr__(self) -> str:
        if self.is_one:
            return "Monomial()"
        return f"Monomial({dict(self._exps)!r})"

    def sort_key(self, var_order: tuple[str, ...]):
        """Graded-lex key: compare total degree, then exponents in variable order."""
        return (self.degree(), tuple(self.exponent(v) for v in var_order))


_MONO_ONE = Monomial()


def _as_coeff_map(terms) -> dict[Monomial, int]:
    out: dict[Monomial, int] = {}
    items = terms.items() if isinstance(terms, dict) else terms
    for mono, coeff in items:
        if not isinstance(mono, Monomial):
            raise TypeError("term keys must be Monomial")
        if not isinstance(coeff, int):
            raise TypeError("coefficients must be int")
        new = out.get(mono, 0) + coeff
        if new:
            out[mono] = new
        else:
            out.pop(mono, None)
    return out


class LaurentPoly:
    """A Laurent polynomial with exact integer coefficients.

    Stored as a map from Monomial to nonzero int; the zero polynomial is the
    empty map.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        self._terms = _as_coeff_map(terms)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def const(cls, n: int) -> "LaurentPoly":
        return cls({_MONO_ONE: n} if n else {})

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls.const(1)

    @classmethod
    def variable(cls, name: str) -> "LaurentPoly":
        return cls({Monomial({name: 1}): 1})

    @classmethod
    def monomial(cls, mono: Monomial, coeff: int = 1) -> "LaurentPoly":
        return cls({mono: coeff})

    # -- inspection -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_one(self) -> bool:
        return self._terms == {_MONO_ONE: 1}

    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in canonical order (graded-lex, descending)."""
        order = self.variables()
        return sorted(self._terms.items(), key=lambda t: t[0].sort_key(order), reverse=True)

    def variables(self) -> tuple[str, ...]:
        seen = set()
        for mono in self._terms:
            seen.update(mono.variables())
        return tuple(sorted(seen))

    def leading_term(self) -> tuple[Monomial, int]:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        order = self.variables()
        mono = max(self._terms, key=lambda m: m.sort_key(order))
        return mono, self._terms[mono]

    def monomial_content(self) -> Monomial:
        """The largest monomial dividing every term (min exponent per variable)."""
        if self.is_zero:
            return _MONO_ONE
        mins: dict[str, int] = {}
        for var in self.variables():
            mins[var] = min(m.exponent(var) for m in self._terms)
        return Monomial({v: e for v, e in mins.items() if e})

    def int_content(self) -> int:
        g = 0
        for c in self._terms.values():
            g = _int_gcd(g, abs(c))
        return g

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, coeff in rhs._terms.items():
            new = out.get(mono, 0) + coeff
            if new:
                out[mono] = new
            else:
                out.pop(mono, None)
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = out
        return result

    __radd__ = __add__

    def __neg__(self):
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = {m: -c for m, c in self._terms.items()}
        return result

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in rhs._terms.items():
                mono = m1 * m2
                new = out.get(mono, 0) + c1 * c2
                if new:
                    out[mono] = new
                else:
                    out.pop(mono, None)
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            raise ValueError("negative power of a LaurentPoly; use RatFn")
        result = LaurentPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, mono: Monomial) -> "LaurentPoly":
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = {m * mono: c for m, c in self._terms.items()}
        return result

    def div_int(self, n: int) -> "LaurentPoly":
        """Exact division of every coefficient by n."""
        out = {}
        for m, c in self._terms.items():
            q, r = divmod(c, n)
            if r:
                raise ArithmeticError(f"coefficient {c} not divisible by {n}")
            out[m] = q
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = out
        return result

    # -- variable maps ---------------------------------------------------

    def substitute_monomial(self, var: str, mono: Monomial) -> "LaurentPoly":
        """Replace var^k by mono^k in every term (single simultaneous pass)."""
        out: dict[Monomial, int] = {}
        for m, c in self._terms.items():
            k = m.exponent(var)
            target = m if k == 0 else m.without(var) * mono ** k
            new = out.get(target, 0) + c
            if new:
                out[target] = new
            else:
                out.pop(target, None)
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = out
        return result

    def set_var_one(self, var: str) -> "LaurentPoly":
        return self.substitute_monomial(var, _MONO_ONE)

    def invert_vars(self) -> "LaurentPoly":
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = {m.inverse(): c for m, c in self._terms.items()}
        return result

    def diagonal(self, var: str) -> "LaurentPoly":
        """Replace every variable by the single variable ``var``."""
        out: dict[Monomial, int] = {}
        for m, c in self._terms.items():
            target = Monomial({var: m.degree()})
            new = out.get(target, 0) + c
            if new:
                out[target] = new
            else:
                out.pop(target, None)
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = out
        return result

    def rename_vars(self, mapping: dict[str, str]) -> "LaurentPoly":
        occurring = set(self.variables())
        full = {v: mapping.get(v, v) for v in occurring}
        if len(set(full.values())) != len(full):
            raise CollisionError(f"variable renaming not injective: {mapping}")
        result = LaurentPoly.__new__(LaurentPoly)
        result._terms = {
            Monomial({full[v]: e for v, e in m.items()}): c for m, c in self._terms.items()
        }
        return result

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        return _render_poly(self)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Multivariate GCD over the rationals (primitive-part normalized).
#
# Genuine polynomials only (all exponents >= 0).  The method is recursive
# content/primitive-part reduction: pick the alphabetically first variable,
# split off the content (GCD of the coefficient polynomials in the remaining
# variables), and run a primitive pseudo-remainder sequence on the primitive
# parts.  Coefficients stay integers throughout; sizes here are desk-scale.
# ---------------------------------------------------------------------------


def _check_genuine(p: LaurentPoly):
    for m in p._terms:
        for _, e in m.items():
            if e < 0:
                raise ValueError("gcd/division requires genuine polynomials")


def _deg_in(p: LaurentPoly, var: str) -> int:
    return max(m.exponent(var) for m in p._terms)


def _coeff_in(p: LaurentPoly, var: str, k: int) -> LaurentPoly:
    out = {}
    for m, c in p._terms.items():
        if m.exponent(var) == k:
            out[m.without(var)] = c
    return LaurentPoly(out)


def _coeffs_in(p: LaurentPoly, var: str) -> list[LaurentPoly]:
    by_deg: dict[int, dict[Monomial, int]] = {}
    for m, c in p._terms.items():
        by_deg.setdefault(m.exponent(var), {})[m.without(var)] = c
    return [LaurentPoly(d) for d in by_deg.values()]


def _heap_key(t: tuple) -> tuple:
    # negated graded-lex so heapq's min-heap pops the largest monomial first
    return (-sum(t), tuple(-x for x in t))


def exact_div(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Exact polynomial division f / g; raises ArithmeticError if not exact.

    Runs on exponent tuples over a fixed variable order with a lazy max-heap
    tracking the remainder's leading term.
    """
    if g.is_zero:
        raise ArithmeticError("division by the zero polynomial")
    if f.is_zero:
        return LaurentPoly.zero()
    if g.is_one:
        return f
    _check_genuine(f)
    _check_genuine(g)
    order = tuple(sorted(set(f.variables()) | set(g.variables())))
    rem = {
        tuple(m.exponent(v) for v in order): c for m, c in f._terms.items()
    }
    g_terms = sorted(
        (
            (tuple(m.exponent(v) for v in order), c)
            for m, c in g._terms.items()
        ),
        key=lambda kv: _heap_key(kv[0]),
    )
    gm, gc = g_terms[0]
    heap = [(*_heap_key(t), t) for t in rem]
    heapq.heapify(heap)
    quot: dict[tuple, int] = {}
    while rem:
        while True:
            _, _, top = heap[0]
            if top in rem:
                break
            heapq.heappop(heap)
        rc = rem[top]
        qt = tuple(a - b for a, b in zip(top, gm))
        if any(x < 0 for x in qt):
            raise ArithmeticError("division is not exact (monomial)")
        q, r = divmod(rc, gc)
        if r:
            raise ArithmeticError("division is not exact (coefficient)")
        quot[qt] = quot.get(qt, 0) + q
        for gt, gcoef in g_terms:
            tt = tuple(a + b for a, b in zip(qt, gt))
            new = rem.get(tt, 0) - q * gcoef
            if new:
                if tt not in rem:
                    heapq.heappush(heap, (*_heap_key(tt), tt))
                rem[tt] = new
            else:
                rem.pop(tt, None)
    return LaurentPoly(
        {
            Monomial._make(tuple((order[i], e) for i, e in enumerate(t) if e)): c
            for t, c in quot.items()
        }
    )


def _primitive_pos(p: LaurentPoly) -> LaurentPoly:
    """Divide out the integer content; normalize the leading coefficient positive."""
    if p.is_zero:
        return p
    c = p.int_content()
    if c > 1:
        p = p.div_int(c)
    if p.leading_term()[1] < 0:
        p = -p
    return p


def _pseudo_rem(f: LaurentPoly, g: LaurentPoly, var: str) -> LaurentPoly:
    dg = _deg_in(g, var)
    if dg == 0:
        return LaurentPoly.zero()
    lcg = _coeff_in(g, var, dg)
    rem = f
    while not rem.is_zero:
        dr = _deg_in(rem, var)
        if dr < dg:
            break
        lcr = _coeff_in(rem, var, dr)
        shift = Monomial({var: dr - dg})
        rem = rem * lcg - (lcr.mul_monomial(shift)) * g
    return rem


def _divides(h: LaurentPoly, f: LaurentPoly) -> bool:
    try:
        exact_div(f, h)
        return True
    except ArithmeticError:
        return False


def _content_wrt(p: LaurentPoly, var: str) -> LaurentPoly:
    coeffs = _coeffs_in(p, var)
    if len(coeffs) == 1:
        return _primitive_pos(coeffs[0])
    # a single-term coefficient forces the content to be a monomial
    if any(len(c._terms) == 1 for c in coeffs):
        mins: dict[str, int] = {}
        first = True
        for c in coeffs:
            mc = c.monomial_content()
            if first:
                mins = {v: mc.exponent(v) for v in mc.variables()}
                first = False
            else:
                mins = {
                    v: min(e, mc.exponent(v))
                    for v, e in mins.items()
                    if mc.exponent(v) > 0 and min(e, mc.exponent(v)) > 0
                }
            if not mins:
                break
        return LaurentPoly.monomial(Monomial(mins))
    coeffs.sort(key=lambda c: len(c._terms))
    cont = LaurentPoly.zero()
    for coeff in coeffs:
        cont = poly_gcd(cont, coeff)
        if cont.is_one:
            break
    return cont


def poly_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """GCD of two genuine polynomials over Q, primitive and positive-leading.

    Nonzero constants count as units, so poly_gcd(6, 4) == 1; integer content
    is handled separately where it matters (RatFn normalization).
    """
    if f.is_zero:
        return _primitive_pos(g)
    if g.is_zero:
        return _primitive_pos(f)
    _check_genuine(f)
    _check_genuine(g)
    if f._terms == g._terms:
        return _primitive_pos(f)
    if len(f._terms) == 1 or len(g._terms) == 1:
        # the only divisors of a term are monomials
        mc_f = f.monomial_content()
        mc_g = g.monomial_content()
        shared = {}
        for v in set(mc_f.variables()) & set(mc_g.variables()):
            e = min(mc_f.exponent(v), mc_g.exponent(v))
            if e:
                shared[v] = e
        return LaurentPoly.monomial(Monomial(shared))
    if not f.variables() and not g.variables():
        return LaurentPoly.one()

    fp = _primitive_pos(f)
    gp = _primitive_pos(g)
    if fp._terms == gp._terms:
        return fp
    # trial division: complete cancellation is the common case here
    small, large = (gp, fp) if len(gp._terms) <= len(fp._terms) else (fp, gp)
    if _divides(small, large):
        return small

    shared_vars = sorted(set(fp.variables()) & set(gp.variables()))
    if not shared_vars:
        return LaurentPoly.one()
    # main variable where the smaller degree is minimal: shortest remainder chain
    var = min(shared_vars, key=lambda v: min(_deg_in(fp, v), _deg_in(gp, v)))

    cont_f = _content_wrt(fp, var)
    cont_g = _content_wrt(gp, var)
    cont = poly_gcd(cont_f, cont_g)
    fp = exact_div(fp, cont_f)
    gp = exact_div(gp, cont_g)

    if _deg_in(fp, var) < _deg_in(gp, var):
        fp, gp = gp, fp
    while not gp.is_zero:
        rem = _pseudo_rem(fp, gp, var)
        fp = gp
        if rem.is_zero:
            gp = LaurentPoly.zero()
        else:
            gp = _primitive_pos(exact_div(rem, _content_wrt(rem, var)))
    return _primitive_pos(cont * _primitive_pos(fp))


# ---------------------------------------------------------------------------
# Rational functions in canonical reduced form.
# ---------------------------------------------------------------------------


def _coerce_poly(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, int):
        return LaurentPoly.const(value)
    if isinstance(value, Monomial):
        return LaurentPoly.monomial(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a Laurent polynomial")


def _reduce_fraction(num: LaurentPoly, den: LaurentPoly, *, coprime: bool):
    if den.is_zero:
        raise ZeroDenominator("denominator is the zero polynomial")
    if num.is_zero:
        return LaurentPoly.zero(), LaurentPoly.one()

    mc_num = num.monomial_content()
    mc_den = den.monomial_content()
    n = num.mul_monomial(mc_num.inverse())
    d = den.mul_monomial(mc_den.inverse())

    # After monomial-content removal a single term is a constant, hence a
    # unit over Q: nothing left to cancel.
    if not coprime and len(n._terms) > 1 and len(d._terms) > 1:
        g = poly_gcd(n, d)
        if not g.is_one:
            n = exact_div(n, g)
            d = exact_div(d, g)

    c = _int_gcd(n.int_content(), d.int_content())
    if c > 1:
        n = n.div_int(c)
        d = d.div_int(c)
    if d.leading_term()[1] < 0:
        n = -n
        d = -d
    return n.mul_monomial(mc_num * mc_den.inverse()), d


def _split_unit(p: LaurentPoly):
    """Write a nonzero Laurent polynomial as monomial * genuine content-free part."""
    mc = p.monomial_content()
    return mc, p.mul_monomial(mc.inverse())


def _add_parts(an, ad, bn, bd):
    """Numerator/denominator of an/ad + bn/bd, coprime given reduced inputs.

    Only the common factor of the two denominators can survive into the
    numerator, so one small GCD replaces a full reduction of the sum.
    """
    d1 = poly_gcd(ad, bd)
    if d1.is_one:
        return an * bd + bn * ad, ad * bd
    ad1 = exact_div(ad, d1)
    bd1 = exact_div(bd, d1)
    t = an * bd1 + bn * ad1
    if t.is_zero:
        return LaurentPoly.zero(), LaurentPoly.one()
    mc_t, t_body = _split_unit(t)
    d2 = poly_gcd(t_body, d1)
    if d2.is_one:
        return t, ad1 * bd
    return exact_div(t_body, d2).mul_monomial(mc_t), ad1 * exact_div(bd, d2)


def _mul_parts(an, ad, bn, bd):
    """Numerator/denominator of (an/ad) * (bn/bd), coprime given reduced inputs."""
    if an.is_zero or bn.is_zero:
        return LaurentPoly.zero(), LaurentPoly.one()
    mc_a, a_body = _split_unit(an)
    mc_b, b_body = _split_unit(bn)
    g1 = poly_gcd(a_body, bd)
    if not g1.is_one:
        a_body = exact_div(a_body, g1)
        bd = exact_div(bd, g1)
    g2 = poly_gcd(b_body, ad)
    if not g2.is_one:
        b_body = exact_div(b_body, g2)
        ad = exact_div(ad, g2)
    return (a_body * b_body).mul_monomial(mc_a * mc_b), ad * bd


class RatFn:
    """A rational function in canonical reduced form.

    Construction reduces to lowest terms, so ``==`` is exact mathematical
    equality.  Arithmetic accepts RatFn, LaurentPoly, and int operands.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, numerator, denominator=1):
        num = _coerce_poly(numerator)
        den = _coerce_poly(denominator)
        self._num, self._den = _reduce_fraction(num, den, coprime=False)

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly, *, coprime: bool) -> "RatFn":
        obj = cls.__new__(cls)
        obj._num, obj._den = _reduce_fraction(num, den, coprime=coprime)
        return obj

    @classmethod
    def zero(cls) -> "RatFn":
        return cls(0)

    @classmethod
    def one(cls) -> "RatFn":
        return cls(1)

    @classmethod
    def variable(cls, name: str) -> "RatFn":
        return cls(LaurentPoly.variable(name))

    @property
    def numerator(self) -> LaurentPoly:
        return self._num

    @property
    def denominator(self) -> LaurentPoly:
        return self._den

    @property
    def is_zero(self) -> bool:
        return self._num.is_zero

    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(set(self._num.variables()) | set(self._den.variables())))

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _coerce(value):
        if isinstance(value, RatFn):
            return value
        if isinstance(value, (int, LaurentPoly, Monomial)):
            return RatFn(value)
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        num, den = _add_parts(self._num, self._den, rhs._num, rhs._den)
        return RatFn._raw(num, den, coprime=True)

    __radd__ = __add__

    def __neg__(self):
        obj = RatFn.__new__(RatFn)
        obj._num, obj._den = -self._num, self._den
        return obj

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        num, den = _mul_parts(self._num, self._den, rhs._num, rhs._den)
        return RatFn._raw(num, den, coprime=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero:
            raise DivisionByZero("division by the zero rational function")
        # invert rhs: its numerator's monomial unit moves to the new numerator
        unit, body = _split_unit(rhs._num)
        num, den = _mul_parts(
            self._num, self._den, rhs._den.mul_monomial(unit.inverse()), body
        )
        return RatFn._raw(num, den, coprime=True)

    def __rtruediv__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_zero:
                raise DivisionByZero("zero cannot be raised to a negative power")
            return RatFn._raw(self._den ** -k, self._num ** -k, coprime=True)
        return RatFn._raw(self._num ** k, self._den ** k, coprime=True)

    # -- variable maps ----------------------------------------------------

    def substitute_monomial(self, var: str, mono: Monomial) -> "RatFn":
        """Replace var by the monomial; the empty monomial means var -> 1."""
        if mono.is_one:
            return self.specialize_one(var)
        num = self._num.substitute_monomial(var, mono)
        den = self._den.substitute_monomial(var, mono)
        if den.is_zero:
            raise SingularSpecialization(
                f"substituting {var} makes the denominator vanish identically"
            )
        return RatFn._raw(num, den, coprime=False)

    def specialize_one(self, var: str) -> "RatFn":
        """Set var = 1 exactly (the fraction is already reduced)."""
        num = self._num.set_var_one(var)
        den = self._den.set_var_one(var)
        if den.is_zero:
            raise SingularSpecialization(f"denominator vanishes identically at {var} = 1")
        return RatFn._raw(num, den, coprime=False)

    def invert_vars(self) -> "RatFn":
        """Replace every variable by its inverse."""
        return RatFn._raw(self._num.invert_vars(), self._den.invert_vars(), coprime=True)

    def diagonal(self, var: str) -> "RatFn":
        """Replace all variables by the single variable ``var``."""
        num = self._num.diagonal(var)
        den = self._den.diagonal(var)
        if den.is_zero:
            raise SingularSpecialization("denominator vanishes identically on the diagonal")
        return RatFn._raw(num, den, coprime=False)

    def rename_vars(self, mapping: dict[str, str]) -> "RatFn":
        occurring = set(self.variables())
        full = {v: mapping.get(v, v) for v in occurring}
        if len(set(full.values())) != len(full):
            raise CollisionError(f"variable renaming not injective: {mapping}")
        return RatFn._raw(
            self._num.rename_vars(full), self._den.rename_vars(full), coprime=True
        )

    # -- comparison --------------------------------------------------------

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._num == rhs._num and self._den == rhs._den

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def __str__(self) -> str:
        return render(self)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Expression grammar.
#
#   rational := expr ('/' expr)?
#   expr     := ('+'|'-')? term (('+'|'-') term)*
#   term     := factor ('*' factor)*
#   factor   := atom ('^' int)?
#   atom     := int | var | '(' expr ')'
#   var      := 't' '_' ident | 't'
#
# The int after '^' may be negative (t^-2).  Whitespace is insignificant.
# The optional sign before the first term is accepted so every canonical
# rendering (which may lead with a negative term) parses back.
# ---------------------------------------------------------------------------

_INT_RE = re.compile(r"\d+")
_VAR_TOKEN_RE = re.compile(r"t(?:_[A-Za-z0-9_]+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

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

    def _try_char(self, chars: str) -> str:
        ch = self._peek()
        if ch and ch in chars:
            self.pos += 1
            return ch
        return ""

    def _int(self) -> int:
        self._skip_ws()
        sign = 1
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            sign = -1
            self.pos += 1
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            raise ExprSyntaxError("expected an integer", self.pos)
        self.pos = m.end()
        return sign * int(m.group())

    def rational(self) -> RatFn:
        num = self.expr()
        if self._try_char("/"):
            den = self.expr()
            if den.is_zero:
                raise ZeroDenominator("denominator expression is zero")
            num = num / den
        self._skip_ws()
        if self.pos != len(self.text):
            raise ExprSyntaxError("unexpected trailing input", self.pos)
        return num

    def expr(self) -> RatFn:
        sign = self._try_char("+-")
        value = self.term()
        if sign == "-":
            value = -value
        while True:
            op = self._try_char("+-")
            if not op:
                return value
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs

    def term(self) -> RatFn:
        value = self.factor()
        while self._try_char("*"):
            value = value * self.factor()
        return value

    def factor(self) -> RatFn:
        value = self.atom()
        if self._try_char("^"):
            value = value ** self._int()
        return value

    def atom(self) -> RatFn:
        self._skip_ws()
        if self.pos >= len(self.text):
            raise ExprSyntaxError("expected a value", self.pos)
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            value = self.expr()
            self._expect(")")
            return value
        if ch.isdigit():
            m = _INT_RE.match(self.text, self.pos)
            self.pos = m.end()
            return RatFn(int(m.group()))
        m = _VAR_TOKEN_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return RatFn.variable(m.group())
        raise ExprSyntaxError("expected a value", self.pos)


def parse_poly(text: str) -> RatFn:
    """Parse the expression grammar into a canonical RatFn."""
    return _Parser(text).rational()


def _render_term(mono: Monomial, coeff: int) -> str:
    factors = []
    if mono.is_one or abs(coeff) != 1:
        factors.append(str(abs(coeff)))
    for var, exp in mono.items():
        factors.append(var if exp == 1 else f"{var}^{exp}")
    return "*".join(factors)


def _render_poly(p: LaurentPoly) -> str:
    if p.is_zero:
        return "0"
    pieces = []
    for mono, coeff in p.sorted_terms():
        if not pieces:
            head = _render_term(mono, coeff)
            pieces.append(f"-{head}" if coeff < 0 else head)
        else:
            pieces.append(f"{'-' if coeff < 0 else '+'} {_render_term(mono, coeff)}")
    return " ".join(pieces)


def render(f: RatFn) -> str:
    """Canonical text form; parse_poly(render(f)) == f exactly."""
    num = _render_poly(f.numerator)
    if f.denominator.is_one:
        return num
    return f"({num})/({_render_poly(f.denominator)})"

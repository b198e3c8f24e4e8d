"""Torsion of finite based chain complexes over an exact field.

A BasedComplex is a complex C_m -> ... -> C_0 where each C_i is F^n with
its standard coordinate frame as the distinguished basis; boundary matrices
are written in those bases, and each degree carries cycle vectors whose
classes form the distinguished basis of H_i.

The torsion is the signed alternating product

    tau(C) = (-1)^|C| *  prod_i  det[ d(b_{i+1})  h_i  b_i  /  c_i ] ^ ((-1)^(i+1))

where b_i is any family of vectors whose boundaries form a basis of the
image of d_i, h_i are the homology representatives, |C| = sum_i beta_i *
gamma_i, and beta_i, gamma_i are the partial sums of homology and chain
dimensions.  The value does not depend on the choice of b_i or of the cycle
lifts; ``torsion`` picks them deterministically (leftmost pivot columns)
and can re-pick them at random to exercise exactly that independence.

The module also builds short exact sequences of based complexes from a
generating witness (sub, quotient, a degree-preserving glue map, and a base
change per degree) and checks the signed multiplicativity identity

    tau(C) = (-1)^(mu+nu) tau(C') tau(C'') tau(H) prod_i [c'_i c''_i / c_i]^((-1)^(i+1))

with H the long exact homology sequence viewed as a based acyclic complex,
    nu = sum_i gamma_i(C'') gamma_{i-1}(C'),
    mu = sum_i (beta_i(C)+1)(beta_i(C')+beta_i(C'')) + beta_{i-1}(C') beta_i(C'').

The default field is the exact rationals; any exact field with Python
arithmetic operators works (e.g. one-variable rational functions from
symalg).  Everything is pure and immutable, so randomized trials can run
concurrently with per-trial seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ComplexFileError,
    DegenerateBasis,
    InvalidComplex,
    InvalidWitness,
)


@dataclass(frozen=True)
class FieldOps:
    """The constants an exact field needs beyond operator arithmetic."""

    zero: object
    one: object
    coerce: object = None  # optional callable applied to raw entries


RATIONALS = FieldOps(Fraction(0), Fraction(1), Fraction)


def ratfn_field():
    """Field of rational functions (symalg.RatFn) for generic-field use."""
    from .symalg import RatFn

    def coerce(x):
        return x if isinstance(x, RatFn) else RatFn(x)

    return FieldOps(RatFn.zero(), RatFn.one(), coerce)


# ---------------------------------------------------------------------------
# Exact dense linear algebra over a generic field.
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix with explicit shape (rows can be empty)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows):
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise DegenerateBasis(
                f"matrix data has shape ({len(rows)} x ...), expected {nrows} x {ncols}"
            )
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(tuple(r) for r in rows)

    @classmethod
    def zeros(cls, nrows, ncols, field):
        return cls(nrows, ncols, [[field.zero] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, n, field):
        return cls(
            n, n,
            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)],
        )

    @classmethod
    def from_columns(cls, nrows, columns, field):
        for col in columns:
            if len(col) != nrows:
                raise DegenerateBasis("column length does not match the space dimension")
        return cls(nrows, len(columns), [[col[i] for col in columns] for i in range(nrows)])

    def column(self, j):
        return [row[j] for row in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def mul(self, other, field):
        if self.ncols != other.nrows:
            raise DegenerateBasis("matrix shapes do not compose")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = field.zero
                for k in range(self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return Matrix(self.nrows, other.ncols, out)

    def apply(self, vec, field):
        if len(vec) != self.ncols:
            raise DegenerateBasis("vector length does not match matrix width")
        return [
            sum((row[k] * vec[k] for k in range(self.ncols)), start=field.zero)
            for row in self.rows
        ]

    def add(self, other, field):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DegenerateBasis("matrix shapes do not match")
        return Matrix(
            self.nrows,
            self.ncols,
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.ncols)]
                for i in range(self.nrows)
            ],
        )

    def neg(self):
        return Matrix(self.nrows, self.ncols, [[-x for x in row] for row in self.rows])

    def is_zero(self, field):
        return all(x == field.zero for row in self.rows for x in row)

    def rref(self, field):
        """Reduced row echelon form; returns (matrix, pivot column list)."""
        rows = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            if r == self.nrows:
                break
            pivot_row = None
            for i in range(r, self.nrows):
                if rows[i][c] != field.zero:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            pv = rows[r][c]
            rows[r] = [x / pv for x in rows[r]]
            for i in range(self.nrows):
                if i != r and rows[i][c] != field.zero:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
        return Matrix(self.nrows, self.ncols, rows), pivots

    def rank(self, field):
        return len(self.rref(field)[1])

    def pivot_columns(self, field):
        return self.rref(field)[1]

    def det(self, field):
        if self.nrows != self.ncols:
            raise DegenerateBasis("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return field.one
        rows = [list(r) for r in self.rows]
        result = field.one
        negate = False
        for c in range(n):
            pivot_row = None
            for i in range(c, n):
                if rows[i][c] != field.zero:
                    pivot_row = i
                    break
            if pivot_row is None:
                return field.zero
            if pivot_row != c:
                rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
                negate = not negate
            pv = rows[c][c]
            result = result * pv
            for i in range(c + 1, n):
                if rows[i][c] != field.zero:
                    f = rows[i][c] / pv
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        return -result if negate else result

    def inverse(self, field):
        """Exact inverse, or None when singular."""
        if self.nrows != self.ncols:
            raise DegenerateBasis("inverse of a non-square matrix")
        n = self.nrows
        aug = Matrix(
            n,
            2 * n,
            [
                list(self.rows[i]) + [field.one if i == j else field.zero for j in range(n)]
                for i in range(n)
            ],
        )
        red, pivots = aug.rref(field)
        if pivots[:n] != list(range(n)):
            return None
        return Matrix(n, n, [list(red.rows[i][n:]) for i in range(n)])

    def kernel_basis(self, field):
        """Deterministic basis of the null space (RREF parametrization)."""
        red, pivots = self.rref(field)
        pivot_set = set(pivots)
        basis = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            v = [field.zero] * self.ncols
            v[free] = field.one
            for row_i, pc in enumerate(pivots):
                v[pc] = -red.rows[row_i][free]
            basis.append(v)
        return basis

    def solve(self, rhs, field):
        """One exact solution of self @ x = rhs, or None if inconsistent."""
        if len(rhs) != self.nrows:
            raise DegenerateBasis("rhs length does not match matrix height")
        aug = Matrix(
            self.nrows,
            self.ncols + 1,
            [list(self.rows[i]) + [rhs[i]] for i in range(self.nrows)],
        )
        red, pivots = aug.rref(field)
        if self.ncols in pivots:
            return None
        x = [field.zero] * self.ncols
        for row_i, pc in enumerate(pivots):
            x[pc] = red.rows[row_i][self.ncols]
        return x

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, {[list(r) for r in self.rows]!r})"


def _coerce_matrix(data, nrows, ncols, field) -> Matrix:
    if isinstance(data, Matrix):
        rows = [list(r) for r in data.rows]
    else:
        rows = [list(r) for r in data]
    if field.coerce is not None:
        rows = [[field.coerce(x) for x in row] for row in rows]
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise DegenerateBasis(
            f"boundary/basis data has shape {len(rows)} x ..., expected {nrows} x {ncols}"
        )
    return Matrix(nrows, ncols, rows)


# ---------------------------------------------------------------------------
# The based complex.
# ---------------------------------------------------------------------------


class BasedComplex:
    """A finite chain complex with distinguished chain and homology bases.

    dims[i] is the dimension of C_i (i = 0..m); boundaries[k] is the matrix
    of C_{k+1} -> C_k in the distinguished bases; homology[i] is a list of
    cycle vectors in C_i whose classes form the distinguished basis of H_i.
    An empty ``dims`` is the zero complex (torsion 1 by convention).
    """

    __slots__ = ("dims", "homology", "field", "_d")

    def __init__(self, dims, boundaries=(), homology=None, *, field=RATIONALS):
        self.dims = tuple(int(d) for d in dims)
        if any(d < 0 for d in self.dims):
            raise DegenerateBasis("negative dimension")
        self.field = field
        m = len(self.dims) - 1
        boundaries = list(boundaries)
        if len(boundaries) != max(m, 0):
            raise DegenerateBasis(
                f"expected {max(m, 0)} boundary matrices for length-{m} complex,"
                f" got {len(boundaries)}"
            )
        # _d[i] is the matrix of C_i -> C_{i-1}; padded with zero maps at the ends.
        self._d = [Matrix.zeros(0, self.dims[0] if self.dims else 0, field)]
        for k, data in enumerate(boundaries):
            self._d.append(_coerce_matrix(data, self.dims[k], self.dims[k + 1], field))
        if self.dims:
            self._d.append(Matrix.zeros(self.dims[m], 0, field))

        if homology is None:
            homology = [[] for _ in self.dims]
        homology = [list(vs) for vs in homology]
        if len(homology) != len(self.dims):
            raise DegenerateBasis("homology data must give one vector list per degree")
        coerced = []
        for i, vectors in enumerate(homology):
            vecs = []
            for v in vectors:
                v = list(v)
                if field.coerce is not None:
                    v = [field.coerce(x) for x in v]
                if len(v) != self.dims[i]:
                    raise DegenerateBasis(
                        f"homology vector in degree {i} has length {len(v)},"
                        f" expected {self.dims[i]}"
                    )
                vecs.append(tuple(v))
            coerced.append(tuple(vecs))
        self.homology = tuple(coerced)

    @property
    def top(self) -> int:
        """Top degree m; -1 for the zero complex."""
        return len(self.dims) - 1

    def d(self, i: int) -> Matrix:
        """Boundary matrix C_i -> C_{i-1} (zero maps beyond the ends)."""
        if self.dims and 0 <= i <= self.top + 1:
            return self._d[i]
        rows = self.dims[i - 1] if 0 <= i - 1 <= self.top else 0
        cols = self.dims[i] if 0 <= i <= self.top else 0
        return Matrix.zeros(rows, cols, self.field)

    def validate(self):
        """Raise InvalidComplex unless all structural invariants hold."""
        F = self.field
        for i in range(1, self.top):
            if not self.d(i).mul(self.d(i + 1), F).is_zero(F):
                raise InvalidComplex(f"boundary squared is nonzero out of degree {i + 1}")
        ranks = self._ranks()
        for i in range(self.top + 1):
            expected = self.dims[i] - ranks[i] - ranks[i + 1]
            given = len(self.homology[i])
            if given != expected:
                raise InvalidComplex(
                    f"degree {i}: {given} homology classes declared, dim H = {expected}"
                )
            for v in self.homology[i]:
                if i >= 1 and any(x != F.zero for x in self.d(i).apply(list(v), F)):
                    raise InvalidComplex(f"degree {i}: declared homology vector is not a cycle")
            if expected:
                span = Matrix.from_columns(
                    self.dims[i],
                    [list(v) for v in self.homology[i]] + self.d(i + 1).columns(),
                    F,
                )
                if span.rank(F) != expected + ranks[i + 1]:
                    raise InvalidComplex(
                        f"degree {i}: declared homology classes are not independent in H_{i}"
                    )

    def _ranks(self):
        """ranks[i] = rank of the boundary out of C_i, for i = 0..m+1."""
        F = self.field
        ranks = [0] * (self.top + 3)
        for i in range(1, self.top + 1):
            ranks[i] = self.d(i).rank(F)
        return ranks


def counts(complex_: BasedComplex):
    """Partial homology/chain dimension sums (beta_i, gamma_i) and |C|."""
    if not complex_.dims:
        return [], [], 0
    complex_.validate()
    ranks = complex_._ranks()
    betas, gammas = [], []
    bsum = gsum = 0
    for i in range(complex_.top + 1):
        bsum += complex_.dims[i] - ranks[i] - ranks[i + 1]
        gsum += complex_.dims[i]
        betas.append(bsum)
        gammas.append(gsum)
    size = sum(b * g for b, g in zip(betas, gammas))
    return betas, gammas, size


def _random_int_matrix(rng, nrows, ncols, field, lo=-2, hi=2):
    coerce = field.coerce or (lambda x: x)
    return Matrix(
        nrows, ncols, [[coerce(rng.randint(lo, hi)) for _ in range(ncols)] for _ in range(nrows)]
    )


def _random_invertible(rng, n, field):
    if n == 0:
        return Matrix.identity(0, field)
    while True:
        m = _random_int_matrix(rng, n, n, field)
        if m.det(field) != field.zero:
            return m


def torsion(complex_: BasedComplex, rng=None):
    """The torsion tau(C) as an element of the field.

    With ``rng`` given, the internal choices (the vectors b_i and the cycle
    lifts of the declared homology classes) are randomized among valid
    alternatives; the result must not change.
    """
    complex_.validate()
    F = complex_.field
    if not complex_.dims:
        return F.one

    pivots = {i: complex_.d(i).pivot_columns(F) for i in range(1, complex_.top + 2)}

    def b_vectors(i):
        """Vectors in C_i whose boundaries form a basis of im d(i)."""
        cols = pivots.get(i, [])
        base = []
        for c in cols:
            v = [F.zero] * complex_.dims[i]
            v[c] = F.one
            base.append(v)
        if rng is None or not base:
            return base
        r = len(base)
        mix = _random_invertible(rng, r, F)
        kernel = complex_.d(i).kernel_basis(F)
        coeffs = _random_int_matrix(rng, len(kernel), r, F)
        mixed = []
        for j in range(r):
            v = [F.zero] * complex_.dims[i]
            for k in range(r):
                v = [a + mix.rows[k][j] * b for a, b in zip(v, base[k])]
            for t, kv in enumerate(kernel):
                v = [a + coeffs.rows[t][j] * b for a, b in zip(v, kv)]
            mixed.append(v)
        return mixed

    def h_vectors(i):
        vecs = [list(v) for v in complex_.homology[i]]
        if rng is None or not vecs:
            return vecs
        din = complex_.d(i + 1)
        lifted = []
        for v in vecs:
            shift = din.apply(
                [ (F.coerce or (lambda x: x))(rng.randint(-2, 2)) for _ in range(din.ncols) ], F
            )
            lifted.append([a + b for a, b in zip(v, shift)])
        return lifted

    _, _, size = counts(complex_)
    # One b-family per degree, shared between its two uses (as basis vectors
    # in degree i and as boundary images in degree i-1).
    chosen_b = {i: b_vectors(i) for i in range(complex_.top + 2)}
    result = F.one
    for i in range(complex_.top + 1):
        incoming = [complex_.d(i + 1).apply(v, F) for v in chosen_b[i + 1]]
        columns = incoming + h_vectors(i) + chosen_b[i]
        if len(columns) != complex_.dims[i]:
            raise InvalidComplex(f"degree {i}: basis assembly is not square")
        if complex_.dims[i] == 0:
            continue
        det = Matrix.from_columns(complex_.dims[i], columns, F).det(F)
        if det == F.zero:
            raise InvalidComplex(f"degree {i}: assembled basis is singular")
        if i % 2 == 1:
            result = result * det
        else:
            result = result / det
    if size % 2 == 1:
        result = -result
    return result


# ---------------------------------------------------------------------------
# Short exact sequences, generated from a witness.
# ---------------------------------------------------------------------------


class SesWitness:
    """Data generating a short exact sequence 0 -> C' -> C -> C'' -> 0.

    ``glue`` gives one matrix g_i : C''_i -> C'_i per degree; the total
    boundary gets the off-diagonal block f = d' g - g d'', which
    anticommutes by construction.  ``base_change`` gives one invertible
    matrix U_i per degree whose columns express the total complex's
    distinguished basis in the concatenated basis c'_i c''_i.
    """

    __slots__ = ("sub", "quotient", "glue", "base_change")

    def __init__(self, sub: BasedComplex, quotient: BasedComplex, glue, base_change):
        if sub.top != quotient.top:
            raise InvalidWitness("sub and quotient must have the same length")
        self.sub = sub
        self.quotient = quotient
        field = sub.field
        n = sub.top + 1
        glue = list(glue)
        base_change = list(base_change)
        if len(glue) != n or len(base_change) != n:
            raise InvalidWitness("need one glue and one base-change matrix per degree")
        self.glue = [
            _coerce_matrix(g, sub.dims[i], quotient.dims[i], field) for i, g in enumerate(glue)
        ]
        self.base_change = []
        for i, u in enumerate(base_change):
            total = sub.dims[i] + quotient.dims[i]
            mat = _coerce_matrix(u, total, total, field)
            if mat.inverse(field) is None:
                raise InvalidWitness(f"base change in degree {i} is singular")
            self.base_change.append(mat)


def _block_boundary(w: SesWitness, i: int) -> Matrix:
    """[[d', f], [0, d'']] : C'_i + C''_i -> C'_{i-1} + C''_{i-1} (concatenated bases)."""
    F = w.sub.field
    ds = w.sub.d(i)
    dq = w.quotient.d(i)
    f = ds.mul(w.glue[i], F)
    if i >= 1:
        f = f.add(w.glue[i - 1].mul(dq, F).neg(), F)
    rows = []
    for r in range(ds.nrows):
        rows.append(list(ds.rows[r]) + list(f.rows[r]))
    for r in range(dq.nrows):
        rows.append([F.zero] * ds.ncols + list(dq.rows[r]))
    return Matrix(ds.nrows + dq.nrows, ds.ncols + dq.ncols, rows)


def _homology_basis(d_out: Matrix, d_in: Matrix, field) -> list[list]:
    """A deterministic basis of cycles spanning H = ker(d_out)/im(d_in)."""
    cycles = d_out.kernel_basis(field)
    chosen = []
    img = d_in.columns()
    dim = d_in.nrows
    base_rank = Matrix.from_columns(dim, img, field).rank(field)
    current = list(img)
    rank = base_rank
    for v in cycles:
        trial = Matrix.from_columns(dim, current + [v], field)
        if trial.rank(field) == rank + 1:
            chosen.append(v)
            current.append(v)
            rank += 1
    return chosen


def _class_coordinates(vector, basis_vectors, d_in: Matrix, field):
    """Coordinates of a cycle's class in the given homology basis."""
    k = len(basis_vectors)
    mat = Matrix.from_columns(d_in.nrows, [list(v) for v in basis_vectors] + d_in.columns(), field)
    sol = mat.solve(list(vector), field)
    if sol is None:
        raise InvalidWitness("vector is not in the span of homology basis and boundaries")
    return sol[:k]


def assemble_ses(w: SesWitness):
    """Build (total complex, long exact homology complex) from a witness.

    The total complex carries a deterministically computed homology basis;
    the homology complex alternates H_i(C'), H_i(C), H_i(C'') from top
    degree 3m+2 down to 0 with the induced maps and the connecting map
    [z''] -> [f z''].
    """
    F = w.sub.field
    m = w.sub.top
    dims = [w.sub.dims[i] + w.quotient.dims[i] for i in range(m + 1)]
    inverses = [u.inverse(F) for u in w.base_change]

    boundaries = []
    for i in range(1, m + 1):
        block = _block_boundary(w, i)
        boundaries.append(inverses[i - 1].mul(block, F).mul(w.base_change[i], F))

    total_h = []
    temp = BasedComplex(dims, boundaries, None, field=F)
    for i in range(m + 1):
        total_h.append(_homology_basis(temp.d(i), temp.d(i + 1), F))
    total = BasedComplex(dims, boundaries, total_h, field=F)

    # Long exact homology sequence as a based complex:
    # degree 3i = H_i(C''), 3i+1 = H_i(C), 3i+2 = H_i(C').
    sub_h = [[list(v) for v in vs] for vs in w.sub.homology]
    quot_h = [[list(v) for v in vs] for vs in w.quotient.homology]

    def include(i, vec):
        """C'_i -> C_i in distinguished coordinates."""
        concat = list(vec) + [F.zero] * w.quotient.dims[i]
        return inverses[i].apply(concat, F)

    def project(i, vec):
        """C_i -> C''_i in distinguished coordinates."""
        concat = w.base_change[i].apply(list(vec), F)
        return concat[w.sub.dims[i]:]

    def connecting(i, vec):
        """H_i(C'') -> H_{i-1}(C'): lift, push by the off-diagonal block."""
        ds = w.sub.d(i)
        f = ds.mul(w.glue[i], F)
        if i >= 1:
            f = f.add(w.glue[i - 1].mul(w.quotient.d(i), F).neg(), F)
        return f.apply(list(vec), F)

    h_dims = []
    h_boundaries = []
    for i in range(m + 1):
        h_dims.extend([len(quot_h[i]), len(total_h[i]), len(sub_h[i])])
    # boundary from degree k+1 to k
    for k in range(3 * m + 2):
        i, r = divmod(k, 3)
        if r == 0:
            # H_i(C) -> H_i(C'')
            cols = [
                _class_coordinates(project(i, v), quot_h[i], w.quotient.d(i + 1), F)
                for v in total_h[i]
            ]
            h_boundaries.append(Matrix.from_columns(len(quot_h[i]), cols, F))
        elif r == 1:
            # H_i(C') -> H_i(C)
            cols = [
                _class_coordinates(include(i, v), total_h[i], total.d(i + 1), F)
                for v in sub_h[i]
            ]
            h_boundaries.append(Matrix.from_columns(len(total_h[i]), cols, F))
        else:
            # H_{i+1}(C'') -> H_i(C')
            cols = [
                _class_coordinates(connecting(i + 1, v), sub_h[i], w.sub.d(i + 1), F)
                for v in quot_h[i + 1]
            ]
            h_boundaries.append(Matrix.from_columns(len(sub_h[i]), cols, F))

    h_complex = BasedComplex(h_dims, h_boundaries, None, field=F)
    return total, h_complex


@dataclass
class Lemma22Report:
    """Every factor of the signed multiplicativity identity, plus the verdict."""

    passed: bool
    tau_total: object
    tau_sub: object
    tau_quotient: object
    tau_homology: object
    mu: int
    nu: int
    basis_factor: object
    rhs: object


def lemma22_check(w: SesWitness) -> Lemma22Report:
    """Compute both sides of the multiplicativity identity exactly."""
    F = w.sub.field
    total, h_complex = assemble_ses(w)
    tau_total = torsion(total)
    tau_sub = torsion(w.sub)
    tau_quot = torsion(w.quotient)
    tau_h = torsion(h_complex)

    betas_s, gammas_s, _ = counts(w.sub)
    betas_q, gammas_q, _ = counts(w.quotient)
    betas_c, _, _ = counts(total)
    m = w.sub.top
    nu = sum(gammas_q[i] * (gammas_s[i - 1] if i >= 1 else 0) for i in range(m + 1))
    mu = sum(
        (betas_c[i] + 1) * (betas_s[i] + betas_q[i])
        + (betas_s[i - 1] if i >= 1 else 0) * betas_q[i]
        for i in range(m + 1)
    )

    # [c'_i c''_i / c_i] expresses the concatenated basis in the distinguished
    # one, i.e. det(U_i^{-1}).
    basis_factor = F.one
    for i in range(m + 1):
        det_u = w.base_change[i].det(F)
        if i % 2 == 1:
            basis_factor = basis_factor / det_u
        else:
            basis_factor = basis_factor * det_u

    rhs = tau_sub * tau_quot * tau_h * basis_factor
    if (mu + nu) % 2 == 1:
        rhs = -rhs
    return Lemma22Report(
        passed=(tau_total == rhs),
        tau_total=tau_total,
        tau_sub=tau_sub,
        tau_quotient=tau_quot,
        tau_homology=tau_h,
        mu=mu,
        nu=nu,
        basis_factor=basis_factor,
        rhs=rhs,
    )


# ---------------------------------------------------------------------------
# Randomized generators (exactness by construction).
# ---------------------------------------------------------------------------


def _random_unimodular(rng, n, field, shears=None):
    """Product of elementary shears/swaps/negations: det +-1, integer inverse."""
    rows = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    if n == 0:
        return Matrix(0, 0, [])
    coerce = field.coerce or (lambda x: x)
    if shears is None:
        shears = 2 * n
    for _ in range(shears):
        op = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n)
        if op == 0 and i != j:
            c = coerce(rng.randint(-3, 3))
            rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        elif op == 1:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [-a for a in rows[i]]
    return Matrix(n, n, rows)


def random_based_complex(rng, length, *, max_dim=5, field=RATIONALS) -> BasedComplex:
    """A random valid complex of the given length with known homology.

    Built from a model complex with explicit image/homology/coimage blocks,
    conjugated degree-wise by random unimodular matrices, so boundary-squared
    vanishes and the distinguished homology data is valid by construction.
    """
    m = length
    ranks = [0] * (m + 2)
    for i in range(m, 0, -1):
        ranks[i] = rng.randint(0, max(0, max_dim - ranks[i + 1]))
    h_dims = [rng.randint(0, max_dim - ranks[i] - ranks[i + 1]) for i in range(m + 1)]
    dims = [ranks[i + 1] + h_dims[i] + ranks[i] for i in range(m + 1)]

    change = [_random_unimodular(rng, dims[i], field) for i in range(m + 1)]
    inverses = [u.inverse(field) for u in change]

    boundaries = []
    for i in range(1, m + 1):
        model = [[field.zero] * dims[i] for _ in range(dims[i - 1])]
        for k in range(ranks[i]):
            model[k][ranks[i + 1] + h_dims[i] + k] = field.one
        block = Matrix(dims[i - 1], dims[i], model)
        boundaries.append(change[i - 1].mul(block, field).mul(inverses[i], field))

    homology = []
    for i in range(m + 1):
        reps = []
        for k in range(h_dims[i]):
            v = [field.zero] * dims[i]
            v[ranks[i + 1] + k] = field.one
            reps.append(change[i].apply(v, field))
        if reps:
            mix = _random_unimodular(rng, len(reps), field)
            mixed = []
            for j in range(len(reps)):
                v = [field.zero] * dims[i]
                for k in range(len(reps)):
                    v = [a + mix.rows[k][j] * b for a, b in zip(v, reps[k])]
                mixed.append(v)
            reps = mixed
        homology.append(reps)
    return BasedComplex(dims, boundaries, homology, field=field)


def random_ses_witness(rng, *, max_len=4, max_dim=5, field=RATIONALS) -> SesWitness:
    """A random witness: factors, integer glue, invertible base changes."""
    m = rng.randint(0, max_len)
    sub = random_based_complex(rng, m, max_dim=max_dim, field=field)
    quotient = random_based_complex(rng, m, max_dim=max_dim, field=field)
    glue = [
        _random_int_matrix(rng, sub.dims[i], quotient.dims[i], field, -3, 3)
        for i in range(m + 1)
    ]
    base_change = []
    for i in range(m + 1):
        n = sub.dims[i] + quotient.dims[i]
        u = _random_unimodular(rng, n, field)
        if n and rng.randrange(2):
            # occasional non-unimodular scaling so determinant factors matter
            scale = [[field.zero] * n for _ in range(n)]
            coerce = field.coerce or (lambda x: x)
            for k in range(n):
                c = 0
                while c == 0:
                    c = rng.randint(-3, 3)
                scale[k][k] = coerce(c)
            u = u.mul(Matrix(n, n, scale), field)
        base_change.append(u)
    return SesWitness(sub, quotient, glue, base_change)


# ---------------------------------------------------------------------------
# Complex file format:
#
#   complex m=<len>
#   dim <i> <n>
#   boundary <i> <row-major rational entries>   # C_i -> C_{i-1}
#   homology <i> <cycle vectors as rational rows>
#
# Whitespace-separated, '#' starts a comment.  Omitted dims default to 0.
# ---------------------------------------------------------------------------


def parse_complex(text: str, *, source: str = "<complex>") -> BasedComplex:
    def fail(lineno, message):
        raise ComplexFileError(f"{source}:{lineno}: {message}")

    length = None
    dim_lines: dict[int, int] = {}
    boundary_lines: dict[int, list[Fraction]] = {}
    homology_lines: dict[int, list[Fraction]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "complex":
            if length is not None:
                fail(lineno, "duplicate 'complex' header")
            if len(parts) != 2 or not parts[1].startswith("m="):
                fail(lineno, "expected: complex m=<len>")
            try:
                length = int(parts[1][2:])
            except ValueError:
                fail(lineno, f"bad length {parts[1][2:]!r}")
            if length < 0:
                fail(lineno, "length must be >= 0")
            continue
        if length is None:
            fail(lineno, "file must start with 'complex m=<len>'")
        if keyword in ("dim", "boundary", "homology"):
            if len(parts) < 2:
                fail(lineno, f"'{keyword}' needs a degree")
            try:
                degree = int(parts[1])
            except ValueError:
                fail(lineno, f"bad degree {parts[1]!r}")
            if not 0 <= degree <= length:
                fail(lineno, f"degree {degree} out of range 0..{length}")
            if keyword == "dim":
                if len(parts) != 3:
                    fail(lineno, "expected: dim <i> <n>")
                if degree in dim_lines:
                    fail(lineno, f"duplicate dim for degree {degree}")
                try:
                    dim_lines[degree] = int(parts[2])
                except ValueError:
                    fail(lineno, f"bad dimension {parts[2]!r}")
            else:
                store = boundary_lines if keyword == "boundary" else homology_lines
                if degree in store:
                    fail(lineno, f"duplicate {keyword} for degree {degree}")
                if keyword == "boundary" and degree == 0:
                    fail(lineno, "boundary 0 is the zero map; omit it")
                try:
                    store[degree] = [Fraction(tok) for tok in parts[2:]]
                except (ValueError, ZeroDivisionError):
                    fail(lineno, "bad rational entry")
        else:
            fail(lineno, f"unknown keyword {keyword!r}")

    if length is None:
        raise ComplexFileError(f"{source}: missing 'complex m=<len>' header")
    dims = [dim_lines.get(i, 0) for i in range(length + 1)]

    boundaries = []
    for i in range(1, length + 1):
        entries = boundary_lines.get(i, [])
        expected = dims[i - 1] * dims[i]
        if len(entries) != expected:
            raise ComplexFileError(
                f"{source}: boundary {i} has {len(entries)} entries, expected {expected}"
            )
        rows = [entries[r * dims[i]:(r + 1) * dims[i]] for r in range(dims[i - 1])]
        boundaries.append(rows)

    homology = []
    for i in range(length + 1):
        entries = homology_lines.get(i, [])
        if dims[i] == 0:
            if entries:
                raise ComplexFileError(f"{source}: homology {i} given for a zero space")
            homology.append([])
            continue
        if len(entries) % dims[i] != 0:
            raise ComplexFileError(
                f"{source}: homology {i} has {len(entries)} entries,"
                f" not a multiple of dim {dims[i]}"
            )
        k = len(entries) // dims[i]
        homology.append([entries[r * dims[i]:(r + 1) * dims[i]] for r in range(k)])

    return BasedComplex(dims, boundaries, homology, field=RATIONALS)

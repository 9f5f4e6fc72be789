"""Exact integer linear algebra: Hermite and Smith normal forms, linear
Diophantine systems, and intersections of lattices and lattice cosets.

Everything is pure and exact.  Matrices are immutable tuples of Python
ints, so there is no precision limit.  A ``Lattice`` is the integer row
span of a matrix and is always stored through its canonical row-style
Hermite normal form: pivots positive, zero entries left of each pivot,
entries above a pivot reduced into ``[0, pivot)``, rows ordered by pivot
column.  Two lattices are equal iff their stored bases are equal, so
``==`` is the mathematical equality test.  An ``AffineLattice`` is a coset
``offset + lattice`` with the offset canonically reduced modulo the
lattice, giving the same property.

Conventions: vectors are row tuples.  ``hnf`` returns a unimodular
``transform`` whose product with the input has the HNF rows on top and
zero rows below.  ``solve_linear(a, b)`` solves ``a @ x = b`` for column
vectors ``x`` and returns the full solution set or ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


@dataclass(frozen=True)
class IntMatrix:
    """Immutable row-major integer matrix.  ncols is explicit so that
    matrices with zero rows still know their width."""

    ncols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for row in self.entries:
            if len(row) != self.ncols:
                raise ValueError("ragged matrix row")

    @staticmethod
    def from_rows(rows: Iterable[Sequence[int]], ncols: Optional[int] = None) -> "IntMatrix":
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return IntMatrix(ncols, rows)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    def transpose(self) -> "IntMatrix":
        cols = tuple(tuple(r[j] for r in self.entries) for j in range(self.ncols))
        return IntMatrix(self.nrows, cols)


def _hnf_inplace(m: list[list[int]], u: Optional[list[list[int]]]) -> int:
    """Row-reduce m to canonical HNF, mirroring row ops on u.  Returns the
    rank; the nonzero rows end up on top in echelon order."""
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
            if u is not None:
                u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, nrows):
            if m[i][c] == 0:
                continue
            a, b = m[r][c], m[i][c]
            g, x, y = xgcd(a, b)
            # [[x, y], [-b//g, a//g]] is unimodular and sends (a, b) to (g, 0)
            p, q = -(b // g), a // g
            m[r], m[i] = (
                [x * rv + y * iv for rv, iv in zip(m[r], m[i])],
                [p * rv + q * iv for rv, iv in zip(m[r], m[i])],
            )
            if u is not None:
                u[r], u[i] = (
                    [x * rv + y * iv for rv, iv in zip(u[r], u[i])],
                    [p * rv + q * iv for rv, iv in zip(u[r], u[i])],
                )
        if m[r][c] < 0:
            m[r] = [-v for v in m[r]]
            if u is not None:
                u[r] = [-v for v in u[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [iv - q * rv for iv, rv in zip(m[i], m[r])]
                if u is not None:
                    u[i] = [iv - q * rv for iv, rv in zip(u[i], u[r])]
        r += 1
    return r


@dataclass(frozen=True)
class Lattice:
    """Integer row span in canonical HNF.  basis has no zero rows."""

    ambient_dim: int
    basis: IntMatrix

    @staticmethod
    def span(ambient_dim: int, rows: Iterable[Sequence[int]]) -> "Lattice":
        work = []
        for r in rows:
            if len(r) != ambient_dim:
                raise ValueError("vector length does not match ambient dimension")
            if any(r):
                work.append(list(map(int, r)))
        rank = _hnf_inplace(work, None)
        return Lattice(ambient_dim, IntMatrix(ambient_dim, tuple(tuple(r) for r in work[:rank])))

    @staticmethod
    def zero(ambient_dim: int) -> "Lattice":
        return Lattice(ambient_dim, IntMatrix(ambient_dim, ()))

    @staticmethod
    def full(ambient_dim: int) -> "Lattice":
        eye = tuple(tuple(1 if i == j else 0 for j in range(ambient_dim)) for i in range(ambient_dim))
        return Lattice(ambient_dim, IntMatrix(ambient_dim, eye))

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def pivot_columns(self) -> tuple[int, ...]:
        cols = []
        for row in self.basis.entries:
            cols.append(next(j for j, v in enumerate(row) if v != 0))
        return tuple(cols)

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Canonical residue of vec modulo the lattice (floor reduction at
        each pivot, left to right)."""
        v = list(map(int, vec))
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        for row in self.basis.entries:
            c = next(j for j, x in enumerate(row) if x != 0)
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def coords_of(self, vec: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Coefficients of vec over the basis rows, or None if vec is not
        in the lattice."""
        v = list(map(int, vec))
        coeffs = []
        for row in self.basis.entries:
            c = next(j for j, x in enumerate(row) if x != 0)
            if v[c] % row[c]:
                return None
            q = v[c] // row[c]
            coeffs.append(q)
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        if any(v):
            return None
        return tuple(coeffs)


@dataclass(frozen=True)
class AffineLattice:
    """Coset offset + lattice with canonically reduced offset."""

    offset: tuple[int, ...]
    lattice: Lattice

    @staticmethod
    def make(offset: Sequence[int], lattice: Lattice) -> "AffineLattice":
        return AffineLattice(lattice.reduce(offset), lattice)

    @property
    def ambient_dim(self) -> int:
        return self.lattice.ambient_dim

    def contains(self, vec: Sequence[int]) -> bool:
        diff = tuple(a - b for a, b in zip(vec, self.offset))
        return self.lattice.contains(diff)


def hnf(m: IntMatrix) -> tuple[Lattice, IntMatrix]:
    """Hermite normal form of the row span of m, plus a unimodular
    transform with transform @ m = HNF rows stacked over zero rows."""
    work = [list(r) for r in m.entries]
    u = [[1 if i == j else 0 for j in range(m.nrows)] for i in range(m.nrows)]
    rank = _hnf_inplace(work, u)
    basis = IntMatrix(m.ncols, tuple(tuple(r) for r in work[:rank]))
    return Lattice(m.ncols, basis), IntMatrix(m.nrows, tuple(tuple(r) for r in u))


def left_kernel(m: IntMatrix) -> Lattice:
    """Lattice of row vectors w with w @ m = 0."""
    lat, transform = hnf(m)
    return Lattice.span(m.nrows, transform.entries[lat.rank:])


def kernel(m: IntMatrix) -> Lattice:
    """Lattice of column-vector solutions x of m @ x = 0, as row tuples."""
    return left_kernel(m.transpose())


def snf(m: IntMatrix) -> tuple[tuple[int, ...], int]:
    """Invariant factors of Z^ncols / rowspan(m).

    Returns (factors, free_rank): the positive Smith diagonal entries
    (each dividing the next, leading 1s included) and the number of free
    coordinates left over.
    """
    factors = _snf_diagonal([list(r) for r in m.entries], m.ncols, None, None)
    return tuple(factors), m.ncols - len(factors)


def _snf_diagonal(
    a: list[list[int]],
    ncols: int,
    v: Optional[list[list[int]]],
    vinv: Optional[list[list[int]]],
) -> list[int]:
    """Diagonalize a with unimodular row/column ops and return the
    invariant factor chain.  Column ops are mirrored on v (as right
    multiplication) and inverted onto vinv, so rowspan(a_in) @ v =
    rowspan(a_out) and v @ vinv = identity."""
    nrows = len(a)

    def col_addmul(src: int, dst: int, q: int):
        # col_dst += q * col_src
        for row in a:
            row[dst] += q * row[src]
        if v is not None:
            for row in v:
                row[dst] += q * row[src]
        if vinv is not None:
            vinv[src] = [x - q * y for x, y in zip(vinv[src], vinv[dst])]

    def col_swap(i: int, j: int):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if v is not None:
            for row in v:
                row[i], row[j] = row[j], row[i]
        if vinv is not None:
            vinv[i], vinv[j] = vinv[j], vinv[i]

    def col_negate(i: int):
        for row in a:
            row[i] = -row[i]
        if v is not None:
            for row in v:
                row[i] = -row[i]
        if vinv is not None:
            vinv[i] = [-x for x in vinv[i]]

    def row_gcd_clear(top: int, i: int, c: int):
        # make a[i][c] zero with a unimodular op on rows top, i
        aa, bb = a[top][c], a[i][c]
        g, x, y = xgcd(aa, bb)
        p, q = -(bb // g), aa // g
        a[top], a[i] = (
            [x * rv + y * iv for rv, iv in zip(a[top], a[i])],
            [p * rv + q * iv for rv, iv in zip(a[top], a[i])],
        )

    t = 0
    while t < min(nrows, ncols):
        piv = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            a[t], a[i0] = a[i0], a[t]
        if j0 != t:
            col_swap(t, j0)
        while True:
            for i in range(t + 1, nrows):
                if a[i][t]:
                    row_gcd_clear(t, i, t)
            row_dirty = False
            for j in range(t + 1, ncols):
                if a[t][j] == 0:
                    continue
                if a[t][j] % a[t][t] == 0:
                    col_addmul(t, j, -(a[t][j] // a[t][t]))
                else:
                    while a[t][j] != 0:
                        q = a[t][t] // a[t][j]
                        col_addmul(j, t, -q)
                        col_swap(t, j)
                    row_dirty = True
            if not row_dirty and all(a[i][t] == 0 for i in range(t + 1, nrows)):
                break
        if a[t][t] < 0:
            col_negate(t)
        t += 1

    # enforce the divisibility chain d1 | d2 | ...
    while True:
        bad = None
        for i in range(t - 1):
            if a[i][i] != 0 and a[i + 1][i + 1] % a[i][i] != 0:
                bad = i
                break
        if bad is None:
            break
        i = bad
        col_addmul(i + 1, i, 1)          # a[i+1][i] becomes d_{i+1}
        row_gcd_clear(i, i + 1, i)       # a[i][i] becomes gcd, row i gains an entry at col i+1
        if a[i][i + 1] % a[i][i]:
            raise AssertionError("smith divisibility step broke invariant")
        col_addmul(i, i + 1, -(a[i][i + 1] // a[i][i]))
        if a[i][i] < 0:
            col_negate(i)
        if a[i + 1][i + 1] < 0:
            col_negate(i + 1)
    return [a[i][i] for i in range(t) if a[i][i] != 0]


def snf_generators(m: IntMatrix) -> list[tuple[int, tuple[int, ...]]]:
    """Minimal generating data for Z^ncols / rowspan(m).

    Returns (order, vector) pairs: order 0 means infinite order, otherwise
    order > 1; vector is the exponent vector of a coset representative
    over the ambient standard generators.  Order-1 entries are dropped, so
    the result has exactly rank(quotient) entries.
    """
    n = m.ncols
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    vinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    diag = _snf_diagonal([list(r) for r in m.entries], n, v, vinv)
    out = []
    for j in range(n):
        order = diag[j] if j < len(diag) else 0
        if order == 1:
            continue
        out.append((order, tuple(vinv[j])))
    return out


def solve_linear(a: IntMatrix, b: Sequence[int]) -> Optional[AffineLattice]:
    """Solve a @ x = b over the integers.  Returns the affine solution set
    (particular solution reduced modulo the kernel lattice) or None."""
    b = tuple(map(int, b))
    if len(b) != a.nrows:
        raise ValueError("right-hand side length does not match row count")
    lat, u = hnf(a.transpose())
    # a @ (row i of u)^T equals (row i of lat.basis)^T for i < rank
    residual = list(b)
    z = []
    for row in lat.basis.entries:
        c = next(j for j, x in enumerate(row) if x != 0)
        if residual[c] % row[c]:
            return None
        q = residual[c] // row[c]
        z.append(q)
        if q:
            residual = [rv - q * hv for rv, hv in zip(residual, row)]
    if any(residual):
        return None
    n = a.ncols
    x0 = [0] * n
    for q, urow in zip(z, u.entries):
        if q:
            x0 = [xv + q * uv for xv, uv in zip(x0, urow)]
    ker = Lattice.span(n, u.entries[lat.rank:])
    return AffineLattice.make(tuple(x0), ker)


def lattice_meet(l1: Lattice, l2: Lattice) -> Lattice:
    """Intersection of two lattices in the same ambient space."""
    if l1.ambient_dim != l2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    n = l1.ambient_dim
    r1 = l1.basis.entries
    r2 = l2.basis.entries
    if not r1 or not r2:
        return Lattice.zero(n)
    stacked = IntMatrix.from_rows(
        [list(r) for r in r1] + [[-x for x in r] for r in r2], n
    )
    meet_rows = []
    for w in left_kernel(stacked).basis.entries:
        vec = [0] * n
        for coef, row in zip(w[: len(r1)], r1):
            if coef:
                vec = [p + coef * q for p, q in zip(vec, row)]
        meet_rows.append(vec)
    return Lattice.span(n, meet_rows)


def affine_meet(c1: AffineLattice, c2: AffineLattice) -> Optional[AffineLattice]:
    """Intersection of two lattice cosets; None when disjoint."""
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    n = c1.ambient_dim
    r1 = c1.lattice.basis.entries
    r2 = c2.lattice.basis.entries
    d = tuple(o2 - o1 for o1, o2 in zip(c1.offset, c2.offset))
    rows = [list(r) for r in r1] + [[-x for x in r] for r in r2]
    if not rows:
        if any(d):
            return None
        return AffineLattice.make(c1.offset, lattice_meet(c1.lattice, c2.lattice))
    # solve y @ r1 - z @ r2 = d for (y, z)
    sol = solve_linear(IntMatrix.from_rows(rows, n).transpose(), d)
    if sol is None:
        return None
    point = list(c1.offset)
    for coef, row in zip(sol.offset[: len(r1)], r1):
        if coef:
            point = [p + coef * q for p, q in zip(point, row)]
    return AffineLattice.make(tuple(point), lattice_meet(c1.lattice, c2.lattice))


def lattice_join(l1: Lattice, l2: Lattice) -> Lattice:
    """Smallest lattice containing both."""
    if l1.ambient_dim != l2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return Lattice.span(l1.ambient_dim, l1.basis.entries + l2.basis.entries)


def lattice_index(sub: Lattice, sup: Lattice) -> Optional[int]:
    """Index [sup : sub] for sub <= sup; None when infinite.  Raises if
    sub is not contained in sup."""
    if sub.ambient_dim != sup.ambient_dim:
        raise ValueError("ambient dimensions differ")
    coeff_rows = []
    for row in sub.basis.entries:
        coords = sup.coords_of(row)
        if coords is None:
            raise ValueError("first lattice is not contained in the second")
        coeff_rows.append(coords)
    if sub.rank < sup.rank:
        return None
    c = Lattice.span(sup.rank, coeff_rows)
    out = 1
    for row, col in zip(c.basis.entries, c.pivot_columns()):
        out *= row[col]
    return out


def abelian_subgroup_rank(
    torsion_bits: Sequence[Sequence[int]], free_parts: Sequence[Sequence[int]]
) -> int:
    """Minimal number of generators of the subgroup of (Z/2)^s x Z^f
    generated by the elements (torsion_bits[i], free_parts[i]).

    The subgroup is Z^k modulo the lattice of combinations that vanish:
    { x : sum x_i free_i = 0 and sum x_i bits_i = 0 mod 2 }.
    """
    k = len(free_parts)
    if k == 0:
        return 0
    f = len(free_parts[0])
    s = len(torsion_bits[0]) if torsion_bits else 0
    k0 = left_kernel(IntMatrix.from_rows(free_parts, f))
    basis = k0.basis.entries
    if not basis:
        rel = Lattice.zero(k)
    elif s == 0:
        rel = k0
    else:
        bits_rows = []
        for xrow in basis:
            acc = [0] * s
            for coef, tb in zip(xrow, torsion_bits):
                if coef % 2:
                    acc = [(x + y) % 2 for x, y in zip(acc, tb)]
            bits_rows.append(tuple(acc))
        r = len(basis)
        y_rows = _gf2_kernel(bits_rows) + [
            tuple(2 if i == j else 0 for j in range(r)) for i in range(r)
        ]
        rel_rows = []
        for y in y_rows:
            vec = [0] * k
            for coef, xrow in zip(y, basis):
                if coef:
                    vec = [p + coef * q for p, q in zip(vec, xrow)]
            rel_rows.append(vec)
        rel = Lattice.span(k, rel_rows)
    mat = IntMatrix.from_rows(rel.basis.entries, k) if rel.rank else IntMatrix(k, ())
    factors, free_rank = snf(mat)
    return sum(1 for d in factors if d > 1) + free_rank


def _gf2_kernel(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis (0/1 tuples) of { y : y @ rows = 0 over GF(2) }."""
    m = [[int(x) % 2 for x in r] for r in rows]
    n = len(m)
    ncols = len(m[0]) if m else 0
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, n):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        u[r], u[piv] = u[piv], u[r]
        for i in range(n):
            if i != r and m[i][c]:
                m[i] = [x ^ y for x, y in zip(m[i], m[r])]
                u[i] = [x ^ y for x, y in zip(u[i], u[r])]
        r += 1
    return [tuple(u[i]) for i in range(r, n)]

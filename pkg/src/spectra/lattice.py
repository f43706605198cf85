"""Exact integer linear algebra: Smith normal form, kernels, lattice
membership and finitely presented abelian subquotients.

Everything here works over plain Python integers (arbitrary precision),
dense row-major matrices.  This is the computational substrate for every
homology and spectral-sequence group in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence


class IntMatrix:
    """Dense integer matrix with exact arithmetic.

    Internally a list of row lists.  Instances are treated as immutable by
    the public API; in-place mutation is confined to the SNF worker.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[int]]):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("entry count must be rows x cols")
        self.rows = rows
        self.cols = cols
        self.data = [list(map(int, r)) for r in data]

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        for c in columns:
            if len(c) != nrows:
                raise ValueError("column length mismatch")
        return cls(nrows, len(columns), [[c[i] for c in columns] for i in range(nrows)])

    # -- queries --------------------------------------------------------

    def column(self, j: int) -> list[int]:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):  # pragma: no cover - matrices are not dict keys
        return hash((self.rows, self.cols, tuple(map(tuple, self.data))))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, {self.data})"

    # -- arithmetic -----------------------------------------------------

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        out = [[0] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            row = self.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == 0:
                    continue
                orow = other.data[k]
                orow_out = out[i]
                for j in range(other.cols):
                    orow_out[j] += a * orow[j]
        return IntMatrix(self.rows, other.cols, out)

    def mul_vector(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch in matrix-vector product")
        return [sum(self.data[i][j] * v[j] for j in range(self.cols)) for i in range(self.rows)]


def det(m: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [row[:] for row in m.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """P*M*Q = S with S diagonal, nonnegative, each entry dividing the next,
    and P, Q unimodular."""

    S: IntMatrix
    P: IntMatrix
    Q: IntMatrix

    def diagonal(self) -> list[int]:
        return [self.S.data[i][i] for i in range(min(self.S.rows, self.S.cols))]


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivot strategy: minimal nonzero absolute value over the remaining
    block, with full row/column reduction, which keeps intermediate
    entries small on the dense little matrices arising from differentials.
    """
    a = [row[:] for row in m.data]
    nr, nc = m.rows, m.cols
    p = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    q = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in q:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row[dst] += c*row[src]
        arow, prow = a[src], p[src]
        adst, pdst = a[dst], p[dst]
        for j in range(nc):
            adst[j] += c * arow[j]
        for j in range(nr):
            pdst[j] += c * prow[j]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in q:
            row[dst] += c * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        p[i] = [-x for x in p[i]]

    t = 0
    n = min(nr, nc)
    while t < n:
        # locate minimal-|value| nonzero pivot in the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v != 0 and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        # reduce row t and column t against the pivot until clean
        while True:
            pivot = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    c = a[i][t] // pivot
                    add_row(t, i, -c)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    c = a[t][j] // pivot
                    add_col(t, j, -c)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
                        break
            if not dirty:
                break
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(t - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                # fold d_{i+1} into position (i,i) and re-clean the 2x2 block
                add_col(i + 1, i, 1)
                g = _clean_two_by_two(a, p, q, i, nr, nc)
                changed = changed or g
    # zero diagonal entries trail nonzero ones by construction (pivot search
    # stops when the block is zero), and the chain pass preserves that.
    s = IntMatrix(nr, nc, a)
    return SmithDecomposition(S=s, P=IntMatrix(nr, nr, p), Q=IntMatrix(nc, nc, q))


def _clean_two_by_two(a, p, q, t, nr, nc) -> bool:
    """Re-diagonalize rows/cols t, t+1 after a chain-fix column add."""

    def add_row(src, dst, c):
        for j in range(nc):
            a[dst][j] += c * a[src][j]
        for j in range(nr):
            p[dst][j] += c * p[src][j]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in q:
            row[dst] += c * row[src]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in q:
            row[i], row[j] = row[j], row[i]

    while True:
        if a[t][t] == 0:
            if a[t + 1][t] == 0 and a[t][t + 1] == 0 and a[t + 1][t + 1] == 0:
                return True
            swap_rows(t, t + 1)
            if a[t][t] == 0:
                swap_cols(t, t + 1)
            continue
        pivot = a[t][t]
        if a[t + 1][t] != 0:
            c = a[t + 1][t] // pivot
            add_row(t, t + 1, -c)
            if a[t + 1][t] != 0:
                swap_rows(t, t + 1)
            continue
        if a[t][t + 1] != 0:
            c = a[t][t + 1] // pivot
            add_col(t, t + 1, -c)
            if a[t][t + 1] != 0:
                swap_cols(t, t + 1)
            continue
        break
    if a[t][t] < 0:
        a[t] = [-x for x in a[t]]
        p[t] = [-x for x in p[t]]
    if a[t + 1][t + 1] < 0:
        a[t + 1] = [-x for x in a[t + 1]]
        p[t + 1] = [-x for x in p[t + 1]]
    return True


def kernel_basis(m: IntMatrix) -> list[list[int]]:
    """Z-basis of {x : M*x = 0}.

    The basis consists of the columns of Q matched to zero diagonal entries
    of S, hence spans a saturated (primitive) sublattice.
    """
    snf = smith_normal_form(m)
    diag = snf.diagonal()
    out = []
    for j in range(m.cols):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            out.append(snf.Q.column(j))
    return out


def solve_in_lattice(m: IntMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """Integer solution x of M*x = b, or None when b is outside the image
    lattice of M.  Raises on a length mismatch (contract violation)."""
    if len(b) != m.rows:
        raise ValueError("right-hand side length must equal the row count")
    snf = smith_normal_form(m)
    c = snf.P.mul_vector(list(b))
    diag = snf.diagonal()
    y = [0] * m.cols
    for i in range(m.rows):
        d = diag[i] if i < len(diag) else 0
        ci = c[i]
        if i < m.cols and d != 0:
            if ci % d != 0:
                return None
            y[i] = ci // d
        elif ci != 0:
            return None
    return snf.Q.mul_vector(y)


def lattice_basis(nrows: int, generators: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of the sublattice of Z^nrows spanned by the generators."""
    if not generators:
        return []
    m = IntMatrix.from_columns(nrows, generators)
    snf = smith_normal_form(m)
    diag = snf.diagonal()
    pinv = invert_unimodular(snf.P)
    basis = []
    for j, d in enumerate(diag):
        if d != 0:
            col = pinv.column(j)
            basis.append([d * x for x in col])
    return basis


def invert_unimodular(m: IntMatrix) -> IntMatrix:
    """Inverse of a matrix with determinant +-1 (exact, integral)."""
    if m.rows != m.cols:
        raise ValueError("only square matrices can be inverted")
    n = m.rows
    snf = smith_normal_form(m)
    if any(d != 1 for d in snf.diagonal()):
        raise ValueError("matrix is not unimodular")
    # P*M*Q = I  =>  M^{-1} = Q*P
    return snf.Q.mul(snf.P)


@dataclass(frozen=True)
class GroupPresentation:
    """A subquotient N/D of Z^ambient_rank in basis-divisors form.

    numerator_generators is a Z-basis (v_1..v_k) of the numerator lattice N,
    adapted to the denominator: D is spanned exactly by the d_i * v_i.  A
    divisor 0 encodes a free generator, 1 a collapsed one, d >= 2 a torsion
    generator of order d.  Divisor-1 entries are retained in this raw form;
    invariant_factors is the canonical view with 1's removed.
    """

    ambient_rank: int
    numerator_generators: tuple[tuple[int, ...], ...]
    divisors: tuple[int, ...]

    def __post_init__(self):
        if len(self.numerator_generators) != len(self.divisors):
            raise ValueError("one divisor per numerator generator")

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Torsion orders (each dividing the next) followed by 0 per free rank."""
        return tuple(d for d in self.divisors if d != 1)

    @property
    def effective_indices(self) -> tuple[int, ...]:
        """Positions of the generators that survive in the quotient."""
        return tuple(i for i, d in enumerate(self.divisors) if d != 1)

    def components(self) -> list[str]:
        """Human-readable factors, torsion first then Z's, SNF order."""
        out = []
        for d in self.divisors:
            if d == 1:
                continue
            out.append("Z" if d == 0 else f"Z/{d}Z")
        return out

    def is_trivial(self) -> bool:
        return all(d == 1 for d in self.divisors)

    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        n = 1
        for d in self.divisors:
            if d == 0:
                return None
            n *= d
        return n

    def reduce_coordinates(self, coords: Sequence[int]) -> list[int]:
        """Canonicalize full coordinates: mod d for torsion, drop collapsed."""
        if len(coords) != len(self.divisors):
            raise ValueError("coordinate arity mismatch")
        out = []
        for c, d in zip(coords, self.divisors):
            if d == 1:
                continue
            out.append(c % d if d >= 2 else c)
        return out


def subquotient(
    ambient_rank: int,
    numerator: Iterable[Sequence[int]],
    denominator: Iterable[Sequence[int]],
) -> GroupPresentation:
    """Presentation of (span numerator)/(span denominator).

    The denominator must be contained in the numerator lattice; containment
    is checked by solving each denominator generator in it, and failure
    signals malformed filtration data upstream.
    """
    num = [list(v) for v in numerator]
    den = [list(v) for v in denominator]
    basis = lattice_basis(ambient_rank, num)
    k = len(basis)
    if k == 0:
        for v in den:
            if any(x != 0 for x in v):
                raise ValueError("denominator is not contained in the numerator")
        return GroupPresentation(ambient_rank, (), ())
    bmat = IntMatrix.from_columns(ambient_rank, basis)
    coords = []
    for v in den:
        x = solve_in_lattice(bmat, v)
        if x is None:
            raise ValueError("denominator is not contained in the numerator")
        coords.append(x)
    if not coords:
        gens = tuple(tuple(b) for b in basis)
        return GroupPresentation(ambient_rank, gens, (0,) * k)
    x = IntMatrix.from_columns(k, coords)
    snf = smith_normal_form(x)
    pinv = invert_unimodular(snf.P)
    # adapted basis: columns of B * P^{-1}; divisors: SNF diagonal padded by 0
    adapted = bmat.mul(pinv)
    gens = tuple(tuple(adapted.column(j)) for j in range(k))
    diag = snf.diagonal()
    divisors = tuple((diag[j] if j < len(diag) else 0) for j in range(k))
    return GroupPresentation(ambient_rank, gens, divisors)


def determinant_divisors(m: IntMatrix) -> list[int]:
    """Invariant factors via the gcd-of-minors formula, for cross-checking.

    d_k = gcd of all k x k minors; the k-th invariant factor is
    d_k / d_{k-1}.  Exponential in the matrix size, only for small inputs.
    """
    from itertools import combinations

    n = min(m.rows, m.cols)
    prev = 1
    out = []
    for k in range(1, n + 1):
        g = 0
        for rows in combinations(range(m.rows), k):
            for cols in combinations(range(m.cols), k):
                sub = IntMatrix(k, k, [[m.data[i][j] for j in cols] for i in rows])
                g = gcd(g, det(sub))
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            out.extend([0] * (n - k + 1))
            break
        out.append(g // prev)
        prev = g
    return out

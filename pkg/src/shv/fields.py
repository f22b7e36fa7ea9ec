"""Exact linear algebra over Q and prime fields.

Everything in this module is exact: rationals are `fractions.Fraction`,
prime-field elements are ints reduced mod p.  Elimination over Q is
fraction-free (sparse Bareiss with per-row divisor tracking) so that
intermediate entries stay integral; the final reduced forms are produced
with exact rational back-substitution.  No floats anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """The base field: Q (``p == 0``) or F_p for a prime p < 2**31."""

    p: int = 0

    def __post_init__(self):
        if self.p:
            if self.p >= 2**31 or not _is_prime(self.p):
                raise ValueError(f"p must be a prime < 2^31, got {self.p}")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def zero(self):
        return 0 if self.p else Fraction(0)

    def one(self):
        return 1 if self.p else Fraction(1)

    def coerce(self, x):
        if self.p:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError("denominator divisible by p")
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if self.p:
            return pow(a, -1, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def parse(self, s: str):
        """Parse a scalar from its string form ("p/q" or integer)."""
        return self.coerce(Fraction(s))

    def to_str(self, x) -> str:
        return str(x)

    def __repr__(self):
        return "Q" if self.p == 0 else f"F_{self.p}"


QQ = Field(0)
GF2 = Field(2)


class Matrix:
    """A sparse matrix over a :class:`Field`.

    Stored row-major as ``rows[i] = {j: scalar}``; zero entries are never
    stored.  Instances are treated as immutable by the rest of the package.
    """

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int,
                 entries: Iterable[tuple[int, int, object]] = ()):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, object]] = {}
        for i, j, v in entries:
            self[i, j] = v

    def __setitem__(self, ij, v):
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry {ij} outside {self.nrows}x{self.ncols}")
        v = self.field.coerce(v)
        row = self.rows.setdefault(i, {})
        if v == 0:
            row.pop(j, None)
            if not row:
                del self.rows[i]
        else:
            row[j] = v

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, self.field.zero())

    def triples(self):
        for i, row in sorted(self.rows.items()):
            for j, v in sorted(row.items()):
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def copy(self) -> "Matrix":
        m = Matrix(self.field, self.nrows, self.ncols)
        m.rows = {i: dict(r) for i, r in self.rows.items()}
        return m

    def transpose(self) -> "Matrix":
        m = Matrix(self.field, self.ncols, self.nrows)
        for i, row in self.rows.items():
            for j, v in row.items():
                m.rows.setdefault(j, {})[i] = v
        return m

    def column(self, j) -> dict[int, object]:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        f = self.field
        out = Matrix(f, self.nrows, other.ncols)
        for i, row in self.rows.items():
            acc: dict[int, object] = {}
            for k, a in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    s = f.add(acc.get(j, f.zero()), f.mul(a, b))
                    if s == 0:
                        acc.pop(j, None)
                    else:
                        acc[j] = s
            if acc:
                out.rows[i] = acc
        return out

    def add(self, other: "Matrix", scale=None) -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        f = self.field
        scale = f.one() if scale is None else f.coerce(scale)
        out = self.copy()
        for i, row in other.rows.items():
            orow = out.rows.setdefault(i, {})
            for j, v in row.items():
                s = f.add(orow.get(j, f.zero()), f.mul(scale, v))
                if s == 0:
                    orow.pop(j, None)
                else:
                    orow[j] = s
            if not orow:
                out.rows.pop(i, None)
        return out

    def scaled(self, c) -> "Matrix":
        f = self.field
        c = f.coerce(c)
        out = Matrix(f, self.nrows, self.ncols)
        if c == 0:
            return out
        for i, row in self.rows.items():
            out.rows[i] = {j: f.mul(c, v) for j, v in row.items()}
        return out

    def apply(self, vec: dict[int, object]) -> dict[int, object]:
        """Apply to a sparse column vector {index: scalar}."""
        f = self.field
        out: dict[int, object] = {}
        for i, row in self.rows.items():
            s = f.zero()
            for j, v in row.items():
                if j in vec:
                    s = f.add(s, f.mul(v, vec[j]))
            if s != 0:
                out[i] = s
        return out

    @staticmethod
    def identity(fld: Field, n: int) -> "Matrix":
        m = Matrix(fld, n, n)
        for i in range(n):
            m.rows[i] = {i: fld.one()}
        return m

    @staticmethod
    def from_dense(fld: Field, rows: list[list]) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = Matrix(fld, nrows, ncols)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                m[i, j] = v
        return m

    def to_dense(self) -> list[list]:
        z = self.field.zero()
        return [[self.rows.get(i, {}).get(j, z) for j in range(self.ncols)]
                for i in range(self.nrows)]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.nrows == other.nrows and self.ncols == other.ncols
                and self.rows == other.rows)

    def __repr__(self):
        return f"Matrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"


def _row_echelon(m: Matrix) -> tuple[list[dict[int, object]], list[int]]:
    """Forward elimination.  Returns (echelon rows, pivot columns).

    Rows come back with exact field entries, one pivot per row, pivot
    columns strictly increasing.  Pivot choice is deterministic: columns in
    order, lowest surviving row index first.

    Over Q the elimination is fraction-free: rows are scaled to integers and
    updated by the Bareiss rule ``row := (p*row - a*pivrow) / divisor`` with
    a per-row divisor (the pivot the row was last updated against), which
    keeps every intermediate entry an exact integer minor.
    """
    fld = m.field
    if fld.is_rational:
        work: list[dict[int, int]] = []
        for i in sorted(m.rows):
            row = m.rows[i]
            den = 1
            for v in row.values():
                den = den * v.denominator // gcd(den, v.denominator)
            irow = {j: int(v * den) for j, v in row.items()}
            g = 0
            for v in irow.values():
                g = gcd(g, v)
            if g > 1:
                irow = {j: v // g for j, v in irow.items()}
            work.append(irow)
        divisor = [1] * len(work)
        pivots: list[int] = []
        ech: list[dict[int, int]] = []
        used = [False] * len(work)
        for col in range(m.ncols):
            piv_idx = -1
            for r in range(len(work)):
                if not used[r] and col in work[r]:
                    piv_idx = r
                    break
            if piv_idx < 0:
                continue
            used[piv_idx] = True
            prow = work[piv_idx]
            p = prow[col]
            pivots.append(col)
            ech.append(prow)
            for r in range(len(work)):
                if used[r] or col not in work[r]:
                    continue
                row = work[r]
                a = row[col]
                d = divisor[r]
                new: dict[int, int] = {}
                for j, v in row.items():
                    w = p * v - a * prow.get(j, 0)
                    if w:
                        new[j] = w // d if d != 1 else w
                for j, v in prow.items():
                    if j not in row:
                        w = -a * v
                        if w:
                            new[j] = w // d if d != 1 else w
                new.pop(col, None)
                work[r] = new
                divisor[r] = p
        out_rows = [{j: Fraction(v) for j, v in r.items()} for r in ech]
        return out_rows, pivots
    # prime field: plain elimination with modular inverses
    work2: list[dict[int, int]] = [dict(m.rows[i]) for i in sorted(m.rows)]
    pivots = []
    ech2: list[dict[int, int]] = []
    used = [False] * len(work2)
    p_ = fld.p
    for col in range(m.ncols):
        piv_idx = -1
        for r in range(len(work2)):
            if not used[r] and col in work2[r]:
                piv_idx = r
                break
        if piv_idx < 0:
            continue
        used[piv_idx] = True
        prow = work2[piv_idx]
        pivots.append(col)
        ech2.append(prow)
        pinv = pow(prow[col], -1, p_)
        for r in range(len(work2)):
            if used[r] or col not in work2[r]:
                continue
            row = work2[r]
            factor = (row[col] * pinv) % p_
            new = {}
            for j, v in row.items():
                w = (v - factor * prow.get(j, 0)) % p_
                if w:
                    new[j] = w
            for j, v in prow.items():
                if j not in row:
                    w = (-factor * v) % p_
                    if w:
                        new[j] = w
            new.pop(col, None)
            work2[r] = new
    return ech2, pivots


def _rref(m: Matrix) -> tuple[list[dict[int, object]], list[int]]:
    """Reduced row echelon form (pivot entries 1, pivot columns cleared)."""
    fld = m.field
    ech, pivots = _row_echelon(m)
    rows = [dict(r) for r in ech]
    for k in range(len(rows) - 1, -1, -1):
        col = pivots[k]
        inv = fld.inv(rows[k][col])
        rows[k] = {j: fld.mul(inv, v) for j, v in rows[k].items()}
        for r in range(k):
            if col in rows[r]:
                factor = rows[r][col]
                new = dict(rows[r])
                for j, v in rows[k].items():
                    w = fld.sub(new.get(j, fld.zero()), fld.mul(factor, v))
                    if w == 0:
                        new.pop(j, None)
                    else:
                        new[j] = w
                rows[r] = new
    return rows, pivots


def rank(m: Matrix) -> int:
    return len(_row_echelon(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns span ker(m) exactly; deterministic (one column per free column)."""
    rows, pivots = _rref(m)
    pivot_of_col = {c: k for k, c in enumerate(pivots)}
    free = [j for j in range(m.ncols) if j not in pivot_of_col]
    fld = m.field
    out = Matrix(fld, m.ncols, len(free))
    for idx, j in enumerate(free):
        out[j, idx] = fld.one()
        for c, k in pivot_of_col.items():
            v = rows[k].get(j)
            if v is not None:
                out[c, idx] = fld.neg(v)
    return out


def image_basis(m: Matrix) -> Matrix:
    """Columns of m spanning its image (the pivot columns, lowest first)."""
    _, pivots = _row_echelon(m)
    out = Matrix(m.field, m.nrows, len(pivots))
    for idx, j in enumerate(pivots):
        for i, v in m.column(j).items():
            out[i, idx] = v
    return out


class _IncrementalSpan:
    """Incremental row-space tracker: feed columns, learn which are new."""

    def __init__(self, fld: Field):
        self.fld = fld
        self.ech: dict[int, dict[int, object]] = {}  # pivot index -> reduced vec

    def reduce(self, vec: dict[int, object]) -> dict[int, object]:
        fld = self.fld
        v = dict(vec)
        while v:
            piv = min(v)
            base = self.ech.get(piv)
            if base is None:
                return v
            factor = fld.mul(v[piv], fld.inv(base[piv]))
            for j, w in base.items():
                s = fld.sub(v.get(j, fld.zero()), fld.mul(factor, w))
                if s == 0:
                    v.pop(j, None)
                else:
                    v[j] = s
        return v

    def add(self, vec: dict[int, object]) -> bool:
        """Returns True when vec enlarges the span."""
        red = self.reduce(vec)
        if not red:
            return False
        self.ech[min(red)] = red
        return True


def solve(m: Matrix, targets: Matrix) -> Matrix | None:
    """Solve m @ X = targets; None if any column is inconsistent."""
    fld = m.field
    aug = Matrix(fld, m.nrows, m.ncols + targets.ncols)
    for i, row in m.rows.items():
        aug.rows[i] = dict(row)
    for i, row in targets.rows.items():
        arow = aug.rows.setdefault(i, {})
        for j, v in row.items():
            arow[m.ncols + j] = v
    rows, pivots = _rref(aug)
    X = Matrix(fld, m.ncols, targets.ncols)
    for k, col in enumerate(pivots):
        if col >= m.ncols:
            return None  # pivot in the augmented block: inconsistent
        for j, v in rows[k].items():
            if j >= m.ncols:
                X[col, j - m.ncols] = v
    return X


class CochainComplex:
    """A bounded cochain complex of finite-dimensional vector spaces.

    ``dims[k]`` is the dimension in degree k (missing = 0) and ``diff[k]``
    the differential C^k -> C^{k+1}.  ``d o d = 0`` is checked on
    construction unless ``check=False``.
    """

    def __init__(self, fld: Field, dims: dict[int, int],
                 diff: dict[int, Matrix], check: bool = True):
        self.field = fld
        self.dims = {k: n for k, n in dims.items() if n}
        self.diff = {}
        for k, d in diff.items():
            src = self.dims.get(k, 0)
            dst = self.dims.get(k + 1, 0)
            if (d.nrows, d.ncols) != (dst, src):
                raise ValueError(f"differential at degree {k} has shape "
                                 f"{d.nrows}x{d.ncols}, expected {dst}x{src}")
            if not d.is_zero():
                self.diff[k] = d
        if check:
            for k, d in self.diff.items():
                d2 = self.diff.get(k + 1)
                if d2 is not None and not d2.matmul(d).is_zero():
                    raise ValueError(f"d o d != 0 at degree {k}")

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> Matrix:
        if k in self.diff:
            return self.diff[k]
        return Matrix(self.field, self.dim(k + 1), self.dim(k))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in self.dims.items())

    def shift(self, s: int) -> "CochainComplex":
        """The shifted complex C[s]: degree k of C[s] is degree k+s of C.

        Differentials pick up the usual (-1)^s sign.
        """
        dims = {k - s: n for k, n in self.dims.items()}
        sign = -1 if s % 2 else 1
        diff = {k - s: (d if sign == 1 else d.scaled(-1))
                for k, d in self.diff.items()}
        return CochainComplex(self.field, dims, diff, check=False)

    def cohomology(self) -> "Cohomology":
        return Cohomology(self)

    def cohomology_dims(self) -> dict[int, int]:
        out = {}
        ranks = {k: rank(d) for k, d in self.diff.items()}
        for k, n in self.dims.items():
            h = n - ranks.get(k, 0) - ranks.get(k - 1, 0)
            if h:
                out[k] = h
        return out

    def dual(self) -> "CochainComplex":
        """The linear dual complex, placed in opposite degrees."""
        dims = {-k: n for k, n in self.dims.items()}
        diff = {}
        for k, d in self.diff.items():
            # d^k: C^k -> C^{k+1} dualizes to (C^{k+1})^* -> (C^k)^*,
            # i.e. degree -(k+1) -> -k of the dual complex.
            diff[-(k + 1)] = d.transpose()
        return CochainComplex(self.field, dims, diff, check=False)


class Cohomology:
    """Cohomology of a complex with deterministic representative bases.

    For each degree k holds a basis of ker d^k split as [image part |
    representatives]; ``reps[k]`` are coordinates (columns) of the chosen
    representatives in C^k, and :meth:`coordinates` expresses any cocycle in
    the representative basis.  Pivot-order tie-breaks are lowest-index
    first, so the bases are reproducible for a fixed input ordering.
    """

    def __init__(self, cx: CochainComplex):
        self.complex = cx
        fld = cx.field
        self.dims: dict[int, int] = {}
        self.reps: dict[int, Matrix] = {}
        self._frame: dict[int, Matrix] = {}   # [image basis | reps]
        self._im_rank: dict[int, int] = {}
        for k in cx.degrees():
            n = cx.dim(k)
            Z = kernel_basis(cx.d(k))                      # n x z
            B = image_basis(cx.d(k - 1)) if cx.dim(k - 1) else Matrix(fld, n, 0)
            span = _IncrementalSpan(fld)
            cols: list[dict[int, object]] = []
            for j in range(B.ncols):
                c = B.column(j)
                if span.add(c):
                    cols.append(c)
            im_rank = len(cols)
            rep_cols = []
            for j in range(Z.ncols):
                c = Z.column(j)
                if span.add(c):
                    cols.append(c)
                    rep_cols.append(c)
            frame = Matrix(fld, n, len(cols))
            for jj, cv in enumerate(cols):
                for ii, vv in cv.items():
                    frame[ii, jj] = vv
            reps = Matrix(fld, n, len(rep_cols))
            for jj, cv in enumerate(rep_cols):
                for ii, vv in cv.items():
                    reps[ii, jj] = vv
            h = len(rep_cols)
            if h:
                self.dims[k] = h
                self.reps[k] = reps
            self._frame[k] = frame
            self._im_rank[k] = im_rank

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def coordinates(self, k: int, cocycles: Matrix) -> Matrix | None:
        """H^k-coordinates of the given cocycle columns (None if not cocycles
        modulo the chosen frame, which signals a bug upstream)."""
        frame = self._frame.get(k)
        h = self.dim(k)
        if frame is None or frame.ncols == 0:
            return Matrix(self.complex.field, h, cocycles.ncols)
        sol = solve(frame, cocycles)
        if sol is None:
            return None
        out = Matrix(self.complex.field, h, cocycles.ncols)
        im = self._im_rank[k]
        for i, row in sol.rows.items():
            if i >= im:
                for j, v in row.items():
                    out[i - im, j] = v
        return out


class ChainMap:
    """A degreewise map of cochain complexes; must commute with d."""

    def __init__(self, src: CochainComplex, dst: CochainComplex,
                 components: dict[int, Matrix], check: bool = True):
        self.src = src
        self.dst = dst
        self.components = {}
        for k, m in components.items():
            if (m.nrows, m.ncols) != (dst.dim(k), src.dim(k)):
                raise ValueError(f"component {k} has shape {m.nrows}x{m.ncols},"
                                 f" expected {dst.dim(k)}x{src.dim(k)}")
            if not m.is_zero():
                self.components[k] = m
        if check and not self.commutes():
            raise ValueError("not a chain map: does not commute with d")

    def component(self, k: int) -> Matrix:
        if k in self.components:
            return self.components[k]
        return Matrix(self.src.field, self.dst.dim(k), self.src.dim(k))

    def commutes(self) -> bool:
        degs = set(self.src.dims) | set(self.dst.dims)
        for k in degs:
            lhs = self.dst.d(k).matmul(self.component(k))
            rhs = self.component(k + 1).matmul(self.src.d(k))
            if lhs != rhs:
                return False
        return True

    def induced(self, hsrc: Cohomology | None = None,
                hdst: Cohomology | None = None) -> "InducedMap":
        hsrc = hsrc or self.src.cohomology()
        hdst = hdst or self.dst.cohomology()
        comps: dict[int, Matrix] = {}
        iso: dict[int, bool] = {}
        degs = sorted(set(hsrc.dims) | set(hdst.dims))
        for k in degs:
            hs, hd = hsrc.dim(k), hdst.dim(k)
            reps = hsrc.reps.get(k, Matrix(self.src.field, self.src.dim(k), 0))
            mapped = self.component(k).matmul(reps)
            coords = hdst.coordinates(k, mapped)
            if coords is None:
                raise AssertionError("image of a cocycle is not a cocycle")
            comps[k] = coords
            iso[k] = (hs == hd) and rank(coords) == hs
        return InducedMap(comps, iso, hsrc, hdst)


@dataclass
class InducedMap:
    components: dict[int, Matrix]
    iso: dict[int, bool]
    source: Cohomology
    target: Cohomology

    def is_isomorphism(self) -> bool:
        return all(self.iso.values())

    def first_failure(self) -> int | None:
        for k in sorted(self.iso):
            if not self.iso[k]:
                return k
        return None


def cone(f: ChainMap) -> CochainComplex:
    """Mapping cone of f: A -> B: degree k is B^k + A^{k+1}."""
    A, B, fld = f.src, f.dst, f.src.field
    degs = set()
    for k in A.dims:
        degs.add(k - 1)
    for k in B.dims:
        degs.add(k)
    dims = {k: B.dim(k) + A.dim(k + 1) for k in degs}
    diff: dict[int, Matrix] = {}
    for k in degs:
        rows = B.dim(k + 1) + A.dim(k + 2)
        cols = B.dim(k) + A.dim(k + 1)
        d = Matrix(fld, rows, cols)
        for i, j, v in B.d(k).triples():
            d[i, j] = v
        for i, j, v in f.component(k + 1).triples():
            d[i, B.dim(k) + j] = v
        for i, j, v in A.d(k + 1).triples():
            d[B.dim(k + 1) + i, B.dim(k) + j] = fld.neg(v)
        diff[k] = d
    return CochainComplex(fld, dims, diff, check=True)


def fiber(f: ChainMap) -> CochainComplex:
    """Homotopy fiber cone(f)[-1]: degree k is A^k + B^{k-1}."""
    return cone(f).shift(-1)

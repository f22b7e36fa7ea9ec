"""Finite cell complexes as graded face posets with signed incidence.

A complex is determined by its cells (id + dimension) and the signed
codimension-1 incidence pairs; the face order is the reflexive-transitive
closure of those pairs.  Validity means: incidence only between dimensions
d and d-1, and every codimension-2 pair has exactly two intermediate cells
whose sign products cancel (the diamond condition, i.e. d o d = 0).

Cells may be non-compact (a half-open edge has a single vertex in its
closure); only the poset matters.  Geometric faithfulness of a hand-built
poset is the caller's contract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class ComplexError(ValueError):
    pass


class CellComplex:
    """Graded face poset with signed codim-1 incidence.

    `covers[c]` maps each codim-1 face of c to its incidence sign (+1/-1).
    Immutable after :meth:`validate`; cells keep insertion order, which
    fixes all deterministic tie-breaks downstream.
    """

    def __init__(self):
        self.cells: list[str] = []
        self.dim: dict[str, int] = {}
        self.covers: dict[str, dict[str, int]] = {}
        self.cocovers: dict[str, dict[str, int]] = {}
        self.vertex_sets: dict[str, frozenset] | None = None  # set if simplicial
        self._downsets: dict[str, frozenset[str]] = {}
        self._upsets: dict[str, frozenset[str]] = {}
        self._index: dict[str, int] = {}

    # -- construction ----------------------------------------------------

    def add_cell(self, cid: str, dim: int):
        if cid in self.dim:
            raise ComplexError(f"duplicate cell id {cid!r}")
        if dim < 0:
            raise ComplexError(f"cell {cid!r} has negative dimension")
        self.cells.append(cid)
        self._index[cid] = len(self.cells) - 1
        self.dim[cid] = dim
        self.covers[cid] = {}
        self.cocovers[cid] = {}

    def add_incidence(self, coface: str, face: str, sign: int):
        if coface not in self.dim or face not in self.dim:
            raise ComplexError(f"incidence refers to unknown cell: {coface!r}/{face!r}")
        if sign not in (1, -1):
            raise ComplexError(f"incidence sign must be +1/-1, got {sign}")
        if self.dim[coface] != self.dim[face] + 1:
            raise ComplexError(
                f"incidence {coface!r} > {face!r} is not codimension 1 "
                f"(dims {self.dim[coface]}, {self.dim[face]})")
        if face in self.covers[coface]:
            raise ComplexError(f"duplicate incidence {coface!r} > {face!r}")
        self.covers[coface][face] = sign
        self.cocovers[face][coface] = sign

    def validate(self) -> "CellComplex":
        """Check grading + diamond condition; raises ComplexError otherwise."""
        for c in self.cells:
            faces2: dict[str, list[tuple[str, int]]] = {}
            for t, s1 in self.covers[c].items():
                for f, s2 in self.covers[t].items():
                    faces2.setdefault(f, []).append((t, s1 * s2))
            for f, through in faces2.items():
                if len(through) != 2:
                    raise ComplexError(
                        f"diamond violated between {c!r} and {f!r}: "
                        f"{len(through)} intermediate cells {sorted(t for t, _ in through)}")
                if through[0][1] + through[1][1] != 0:
                    raise ComplexError(
                        f"incidence signs around {c!r} > {f!r} do not cancel")
        self._downsets.clear()
        self._upsets.clear()
        return self

    # -- order -----------------------------------------------------------

    def index(self, cid: str) -> int:
        return self._index[cid]

    def downset(self, cid: str) -> frozenset[str]:
        """All faces of cid, including cid."""
        cached = self._downsets.get(cid)
        if cached is not None:
            return cached
        acc = {cid}
        stack = [cid]
        while stack:
            c = stack.pop()
            for f in self.covers[c]:
                if f not in acc:
                    acc.add(f)
                    stack.append(f)
        out = frozenset(acc)
        self._downsets[cid] = out
        return out

    def upset(self, cid: str) -> frozenset[str]:
        """All cofaces of cid, including cid (the open star)."""
        cached = self._upsets.get(cid)
        if cached is not None:
            return cached
        acc = {cid}
        stack = [cid]
        while stack:
            c = stack.pop()
            for f in self.cocovers[c]:
                if f not in acc:
                    acc.add(f)
                    stack.append(f)
        out = frozenset(acc)
        self._upsets[cid] = out
        return out

    def leq(self, a: str, b: str) -> bool:
        return a in self.downset(b)

    def star_closure(self, cells: Iterable[str]) -> frozenset[str]:
        acc: set[str] = set()
        for c in cells:
            acc |= self.upset(c)
        return frozenset(acc)

    def closure(self, cells: Iterable[str]) -> frozenset[str]:
        acc: set[str] = set()
        for c in cells:
            acc |= self.downset(c)
        return frozenset(acc)

    def top_dim(self) -> int:
        return max(self.dim.values(), default=-1)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.dim.values())

    def sorted_cells(self, cells: Iterable[str]) -> list[str]:
        return sorted(cells, key=self._index.__getitem__)

    def __len__(self):
        return len(self.cells)

    def __contains__(self, cid):
        return cid in self.dim

    def __repr__(self):
        return f"CellComplex({len(self.cells)} cells, topdim={self.top_dim()})"


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertices plus a downward-closed family of nonempty vertex subsets."""

    vertices: tuple[str, ...]
    simplices: frozenset[frozenset]

    @staticmethod
    def from_maximal(vertices: Sequence[str], maximal: Iterable[Iterable[str]]
                     ) -> "SimplicialComplex":
        simp: set[frozenset] = set()
        for m in maximal:
            m = frozenset(m)
            for k in range(1, len(m) + 1):
                for s in itertools.combinations(sorted(m), k):
                    simp.add(frozenset(s))
        return SimplicialComplex(tuple(vertices), frozenset(simp))

    def validate(self) -> "SimplicialComplex":
        vs = set(self.vertices)
        for s in self.simplices:
            if not s or not s <= vs:
                raise ComplexError(f"bad simplex {sorted(s)}")
            for k in range(1, len(s)):
                for t in itertools.combinations(sorted(s), k):
                    if frozenset(t) not in self.simplices:
                        raise ComplexError(
                            f"not downward closed: {sorted(t)} missing under {sorted(s)}")
        return self

    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)


def simplex_id(s: frozenset, vertex_order: Mapping[str, int]) -> str:
    return "|".join(sorted(s, key=lambda v: vertex_order[v]))


def from_simplicial(sc: SimplicialComplex) -> CellComplex:
    """One cell per simplex; signs by the alternating vertex-deletion rule.

    The vertex order is the order of `sc.vertices`, which makes the
    orientation (and everything downstream) deterministic.
    """
    sc.validate()
    order = {v: i for i, v in enumerate(sc.vertices)}
    K = CellComplex()
    by_dim = sorted(sc.simplices, key=lambda s: (len(s), simplex_id(s, order)))
    for s in by_dim:
        K.add_cell(simplex_id(s, order), len(s) - 1)
    K.vertex_sets = {simplex_id(s, order): s for s in by_dim}
    for s in by_dim:
        if len(s) == 1:
            continue
        verts = sorted(s, key=lambda v: order[v])
        for i, v in enumerate(verts):
            f = frozenset(s - {v})
            K.add_incidence(simplex_id(s, order), simplex_id(f, order),
                            (-1) ** i)
    return K.validate()


@dataclass(frozen=True)
class ConstructibleSet:
    """A union of cells of a complex, stored as the cell-id set."""

    complex: CellComplex
    cells: frozenset[str]

    def __post_init__(self):
        missing = [c for c in self.cells if c not in self.complex]
        if missing:
            raise ComplexError(f"cells not in complex: {sorted(missing)[:5]}")

    def __contains__(self, cid):
        return cid in self.cells

    def __len__(self):
        return len(self.cells)

    def union(self, other: "ConstructibleSet") -> "ConstructibleSet":
        return ConstructibleSet(self.complex, self.cells | other.cells)

    def intersect(self, other: "ConstructibleSet") -> "ConstructibleSet":
        return ConstructibleSet(self.complex, self.cells & other.cells)

    def complement(self) -> "ConstructibleSet":
        return ConstructibleSet(self.complex,
                                frozenset(self.complex.cells) - self.cells)


@dataclass(frozen=True)
class Classification:
    is_open: bool
    is_closed: bool
    is_locally_closed: bool

    @property
    def label(self) -> str:
        if self.is_open and self.is_closed:
            return "open-and-closed"
        if self.is_open:
            return "open"
        if self.is_closed:
            return "closed"
        if self.is_locally_closed:
            return "locally-closed"
        return "none"

    def as_dict(self) -> dict[str, bool]:
        return {"open": self.is_open, "closed": self.is_closed,
                "locally_closed": self.is_locally_closed}


def classify(z: ConstructibleSet) -> Classification:
    """Open/closed/locally-closed flags via the face-chain characterizations:
    open = coface-closed, closed = face-closed, locally closed = no chain
    s1 < s2 < s3 with s1, s3 inside and s2 outside.
    """
    K = z.complex
    is_open = all(K.upset(c) <= z.cells for c in z.cells)
    is_closed = all(K.downset(c) <= z.cells for c in z.cells)
    is_lc = True
    for t in K.cells:
        if t in z.cells:
            continue
        below = (K.downset(t) - {t}) & z.cells
        if not below:
            continue
        above = (K.upset(t) - {t}) & z.cells
        if above:
            is_lc = False
            break
    if is_open or is_closed:
        is_lc = True
    return Classification(is_open, is_closed, is_lc)


def open_star(K: CellComplex, cid: str) -> ConstructibleSet:
    """U(sigma): all cofaces of sigma -- the smallest open constructible set
    containing it."""
    if cid not in K:
        raise ComplexError(f"no cell {cid!r}")
    return ConstructibleSet(K, K.upset(cid))


def check_condition_B2(z: ConstructibleSet) -> bool:
    """Join-closure of the cell set on a simplicial complex: whenever two
    members span a simplex of the complex, that simplex is a member too.
    """
    K = z.complex
    if K.vertex_sets is None:
        raise ComplexError("condition only defined on simplicial complexes")
    by_verts = {v: cid for cid, v in K.vertex_sets.items()}
    members = sorted(z.cells, key=K.index)
    for a, b in itertools.combinations_with_replacement(members, 2):
        u = K.vertex_sets[a] | K.vertex_sets[b]
        cid = by_verts.get(u)
        if cid is not None and cid not in z.cells:
            return False
    return True


@dataclass(frozen=True)
class CellMap:
    """A cellwise order-preserving map of complexes."""

    source: CellComplex
    target: CellComplex
    assignment: Mapping[str, str]

    def __call__(self, cid: str) -> str:
        return self.assignment[cid]

    def validate(self) -> "CellMap":
        for c in self.source.cells:
            if c not in self.assignment:
                raise ComplexError(f"map not defined on {c!r}")
            if self.assignment[c] not in self.target:
                raise ComplexError(f"image cell {self.assignment[c]!r} missing")
        for c in self.source.cells:
            fc = self.assignment[c]
            for f in self.source.covers[c]:
                if not self.target.leq(self.assignment[f], fc):
                    raise ComplexError(
                        f"not order-preserving on {f!r} < {c!r}")
        return self

    def preimage(self, cells: Iterable[str]) -> frozenset[str]:
        want = set(cells)
        return frozenset(c for c in self.source.cells
                         if self.assignment[c] in want)


def barycentric_subdivide(K: CellComplex | SimplicialComplex
                          ) -> tuple[CellComplex, CellMap]:
    """Order complex of the face poset, with the carrier map Bd -> K.

    Vertices of the subdivision are the cells of K; simplices are the
    chains; a chain is carried to its maximal cell.  For a simplicial K
    this is the usual barycentric subdivision.
    """
    if isinstance(K, SimplicialComplex):
        K = from_simplicial(K)
    verts = list(K.cells)  # order: by construction order (dim-compatible ids ok)
    order = {v: i for i, v in enumerate(verts)}
    chains: list[tuple[str, ...]] = []

    def grow(chain: tuple[str, ...]):
        chains.append(chain)
        top = chain[-1]
        for nxt in K.cocovers[top]:
            pass  # placeholder; replaced by generic extension below

    # enumerate all chains: start at each cell, extend upward by any strict coface
    strict_up: dict[str, list[str]] = {
        c: K.sorted_cells(K.upset(c) - {c}) for c in K.cells}

    def extend(chain: tuple[str, ...]):
        chains.append(chain)
        for nxt in strict_up[chain[-1]]:
            extend(chain + (nxt,))

    for c in K.cells:
        extend((c,))

    sc = SimplicialComplex(tuple(verts),
                           frozenset(frozenset(ch) for ch in chains))
    Bd = from_simplicial(sc)
    # carrier: a chain goes to its maximum, the last cell in poset order
    carrier = {}
    for cid, vs in Bd.vertex_sets.items():
        top = max(vs, key=lambda v: (K.dim[v], order[v]))
        carrier[cid] = top
    return Bd, CellMap(Bd, K, carrier).validate()


def product(K1: CellComplex, K2: CellComplex
            ) -> tuple[CellComplex, CellMap, CellMap]:
    """Product poset with Koszul signs; returns (K, proj1, proj2)."""
    K = CellComplex()
    pid = {}
    for a in K1.cells:
        for b in K2.cells:
            cid = f"({a})x({b})"
            pid[(a, b)] = cid
            K.add_cell(cid, K1.dim[a] + K2.dim[b])
    for a in K1.cells:
        for b in K2.cells:
            cid = pid[(a, b)]
            for f, s in K1.covers[a].items():
                K.add_incidence(cid, pid[(f, b)], s)
            sgn = -1 if K1.dim[a] % 2 else 1
            for f, s in K2.covers[b].items():
                K.add_incidence(cid, pid[(a, f)], sgn * s)
    K.validate()
    p1 = CellMap(K, K1, {pid[(a, b)]: a for a in K1.cells for b in K2.cells})
    p2 = CellMap(K, K2, {pid[(a, b)]: b for a in K1.cells for b in K2.cells})
    return K, p1.validate(), p2.validate()


def transport_constructible(z: ConstructibleSet, carrier: CellMap
                            ) -> ConstructibleSet:
    """Pull a constructible set back along the carrier map: the subdivision
    cells lying inside z are exactly those whose carrier cell is in z."""
    if z.complex is not carrier.target:
        raise ComplexError("constructible set lives on the carrier target")
    cells = frozenset(c for c in carrier.source.cells
                      if carrier(c) in z.cells)
    return ConstructibleSet(carrier.source, cells)


def interval_complex(points: Sequence) -> tuple[CellComplex, dict]:
    """The cell structure on a line with marked points: vertices at the given
    coordinates, open intervals between/beyond them.  Returns the complex and
    a map cell -> (kind, data) with kind in {vertex, interval}; intervals are
    pairs (lo, hi) with None for an unbounded end.  Coordinates must be
    sortable and distinct.
    """
    pts = sorted(points)
    K = CellComplex()
    info: dict[str, tuple] = {}
    vid = {}
    for i, x in enumerate(pts):
        cid = f"v{i}"
        K.add_cell(cid, 0)
        info[cid] = ("vertex", x)
        vid[i] = cid
    spans = []
    if pts:
        spans.append((None, 0))
        for i in range(len(pts) - 1):
            spans.append((i, i + 1))
        spans.append((len(pts) - 1, None))
    else:
        spans.append((None, None))
    for k, (lo, hi) in enumerate(spans):
        cid = f"e{k}"
        K.add_cell(cid, 1)
        info[cid] = ("interval", (pts[lo] if lo is not None else None,
                                  pts[hi] if hi is not None else None))
        if lo is not None:
            K.add_incidence(cid, vid[lo], -1)
        if hi is not None:
            K.add_incidence(cid, vid[hi], 1)
    return K.validate(), info

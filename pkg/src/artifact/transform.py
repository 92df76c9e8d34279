"""Edge reification: parent edges become the vertices of a 0-1 image.

Every edge of level n turns into an image vertex, and two image vertices are
joined exactly when the underlying edges concatenate, so every image
incidence entry is 0 or 1 and a cylinder of length n+1 upstairs corresponds
to a cylinder of length n in the image.  The image is pinned down by a
canonical enumeration of each edge level:

* inside one incoming fiber, edges run left to right by source vertex with
  parallel copies adjacent, unless the diagram declares its own fiber order;
* fibers are blocked by range vertex, counting up from the lowest vertex on
  bounded-below levels; on integer levels the block of vertex 0 starts at
  id 0 and the vertices below it take the negative ids.

The blocks tile the id axis contiguously, which is what makes rows of the
image easy: the row of an image vertex is the full id block of its edge's
source, a run of ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .descriptors import Seq
from .diagram import (
    ColumnSpec,
    Diagram,
    IncidenceLevel,
    VertexSet,
    make_levels_diagram,
    make_odometer,
    row_window,
)
from .dynamics import OrderedDiagram
from .errors import (
    NoConvergence,
    NotAdmissible,
    ParamOutOfRange,
    VertexOutOfSet,
    WindowOverflow,
)
from .extension import (
    EdgeSubdiagram,
    ExtensionReport,
    WSpec,
    edge_extension_series,
    make_odometer_edge_pair,
    make_vertex_subdiagram,
    vertex_extension_series,
)
from .measure import (
    MeasureSpec,
    Number,
    OdometerProduct,
    PVectors,
    StationaryEigen,
    VertexFunction,
    p_function,
)

__all__ = [
    "EdgeEnumeration",
    "ZeroOneImage",
    "zero_one",
    "pushforward_measure",
    "PreservationReport",
    "verify_preserved_properties",
    "DualityReport",
    "odometer_duality_report",
    "inverse_zero_one",
    "cylinder_equality_check",
    "make_neighbor_line",
]

# (range vertex, source vertex, parallel copy) of one parent edge
EdgeKey = Tuple[int, int, int]

_WALK_CAP = 20000  # id blocks materialized per direction before giving up


# --------------------------------------------------------------------------
# canonical enumeration of one edge level
# --------------------------------------------------------------------------


@dataclass(eq=False)
class EdgeEnumeration:
    """Canonical integer ids for the edges of one parent level.

    ``fiber(v)`` lists the edges into range vertex v as (source, copy)
    pairs in enumeration order; ``block_start(v)`` is the id of the first
    one.  Prefix sums of fiber sizes are materialized lazily, so levels
    with infinitely many vertices work on any window reachable within
    the walk cap.
    """

    level_index: int
    level: IncidenceLevel
    order: Optional[Callable[[int, int], Sequence[Tuple[int, int]]]] = field(
        default=None, repr=False
    )
    _fibers: Dict[int, Tuple[Tuple[int, int], ...]] = field(
        default_factory=dict, repr=False
    )
    _starts: Dict[int, int] = field(default_factory=dict, repr=False)
    _lo_done: int = 0
    _hi_done: int = 0

    def __post_init__(self) -> None:
        a = self._anchor()
        self._starts[a] = 0
        self._lo_done = a
        self._hi_done = a

    def _anchor(self) -> int:
        rs = self.level.range_set
        if rs.is_finite:
            return rs.lo
        if rs.kind == "naturals":
            return rs.start
        return 0  # integer levels anchor the zero block at id 0

    def fiber(self, v: int) -> Tuple[Tuple[int, int], ...]:
        got = self._fibers.get(v)
        if got is not None:
            return got
        rs = self.level.range_set
        if not rs.contains(v):
            raise VertexOutOfSet(
                f"range vertex {v} not in {rs.describe()} at level "
                f"{self.level_index + 1}"
            )
        if self.order is not None:
            pairs = tuple(self.order(self.level_index, v))
            plain = tuple(
                (w, j)
                for w, count in sorted(self.level.row_support(v))
                for j in range(count)
            )
            if sorted(pairs) != sorted(plain):
                raise NotAdmissible(
                    f"declared fiber order at level {self.level_index}, vertex "
                    f"{v} is not a permutation of the incidence row"
                )
        else:
            pairs = tuple(
                (w, j)
                for w, count in sorted(self.level.row_support(v))
                for j in range(count)
            )
        if not pairs:
            raise NotAdmissible(
                f"vertex {v} at level {self.level_index + 1} has no incoming "
                "edges; every fiber must be nonempty"
            )
        self._fibers[v] = pairs
        return pairs

    def size(self, v: int) -> int:
        return len(self.fiber(v))

    def block_start(self, v: int) -> int:
        got = self._starts.get(v)
        if got is not None:
            return got
        rs = self.level.range_set
        if not rs.contains(v):
            raise VertexOutOfSet(
                f"range vertex {v} not in {rs.describe()} at level "
                f"{self.level_index + 1}"
            )
        if v > self._hi_done:
            if v - self._hi_done > _WALK_CAP:
                raise WindowOverflow(
                    f"enumeration walk to vertex {v} exceeds the cap {_WALK_CAP}"
                )
            for u in range(self._hi_done, v):
                self._starts[u + 1] = self._starts[u] + self.size(u)
            self._hi_done = v
        elif v < self._lo_done:
            if self._lo_done - v > _WALK_CAP:
                raise WindowOverflow(
                    f"enumeration walk to vertex {v} exceeds the cap {_WALK_CAP}"
                )
            for u in range(self._lo_done, v, -1):
                self._starts[u - 1] = self._starts[u] - self.size(u - 1)
            self._lo_done = v
        return self._starts[v]

    def ids(self, v: int) -> Tuple[int, ...]:
        """The contiguous id block of the fiber of v."""
        start = self.block_start(v)
        return tuple(range(start, start + self.size(v)))

    def id_of(self, v: int, w: int, copy: int = 0) -> int:
        pairs = self.fiber(v)
        try:
            pos = pairs.index((w, copy))
        except ValueError:
            raise VertexOutOfSet(
                f"no edge copy ({v}, {w}, {copy}) at level {self.level_index}"
            ) from None
        return self.block_start(v) + pos

    def edge_of(self, i: int) -> EdgeKey:
        v = self._locate(i)
        w, copy = self.fiber(v)[i - self.block_start(v)]
        return (v, w, copy)

    def _locate(self, i: int) -> int:
        rs = self.level.range_set
        v = self._anchor()
        if i < 0:
            if rs.kind != "integers":
                raise VertexOutOfSet(
                    f"id {i} is negative on a bounded-below level"
                )
            steps = 0
            while self.block_start(v) > i:
                v -= 1
                steps += 1
                if steps > _WALK_CAP:
                    raise WindowOverflow(
                        f"id {i} not located within the walk cap"
                    )
            return v
        steps = 0
        while True:
            start = self.block_start(v)
            if start <= i < start + self.size(v):
                return v
            v += 1
            if rs.is_finite and v > rs.hi:
                raise VertexOutOfSet(
                    f"id {i} is beyond the {start + self.size(v - 1)} edges of "
                    f"level {self.level_index}"
                )
            steps += 1
            if steps > _WALK_CAP:
                raise WindowOverflow(f"id {i} not located within the walk cap")


# --------------------------------------------------------------------------
# the image
# --------------------------------------------------------------------------


@dataclass(eq=False)
class ZeroOneImage:
    """A diagram together with its reified 0-1 image and the edge bijection.

    ``id_of``/``edge_of`` realize the per-level bijection between parent
    edges and image vertices; ``image_path``/``parent_path`` transport
    finite paths, shifting cylinder length down by one.
    """

    parent: Diagram
    image: Diagram
    depth: int
    name: str = "zero-one"
    _enum_fn: Callable[[int], EdgeEnumeration] = field(default=None, repr=False)

    def enumeration(self, n: int) -> EdgeEnumeration:
        return self._enum_fn(n)

    def id_of(self, n: int, v: int, w: int, copy: int = 0) -> int:
        """Image vertex id of the parent edge (v, w, copy) at level n."""
        return self.enumeration(n).id_of(v, w, copy)

    def edge_of(self, n: int, i: int) -> EdgeKey:
        """Parent edge behind image vertex i of image level n."""
        return self.enumeration(n).edge_of(i)

    def fiber_ids(self, n: int, v: int) -> Tuple[int, ...]:
        """Ids of the parent edges into range vertex v at level n."""
        return self.enumeration(n).ids(v)

    def level_vertex_count(self, n: int) -> int:
        """|image level n| == total edge count of parent level n (finite only)."""
        rs = self.parent.vertex_set(n + 1)
        if not rs.is_finite:
            raise WindowOverflow(
                f"parent level {n + 1} is infinite; the image level has "
                "infinitely many vertices"
            )
        en = self.enumeration(n)
        return sum(en.size(v) for v in rs.vertices())

    def level_edge_count(self, n: int) -> int:
        """Image edges at level n == parent paths of length 2 from level n.

        Sums column sum times row sum over the middle level; needs that
        level finite with enumerable columns.
        """
        mid = self.parent.vertex_set(n + 1)
        if not mid.is_finite:
            raise WindowOverflow(
                f"parent level {n + 1} is infinite; the image edge count "
                "diverges"
            )
        lvl_up = self.parent.level(n + 1)
        en = self.enumeration(n)
        total = 0
        for u in mid.vertices():
            col = lvl_up.col_spec(u).finite_sum()
            if col is None:
                raise WindowOverflow(
                    f"column of vertex {u} at level {n + 1} is infinite"
                )
            total += col * en.size(u)
        return total

    def image_path(self, edges: Sequence[EdgeKey]) -> Tuple[int, ...]:
        """Ids of the image vertex trace for a parent edge path from level 0."""
        if not edges:
            raise ParamOutOfRange("a path needs at least one edge")
        for k in range(len(edges) - 1):
            if edges[k][0] != edges[k + 1][1]:
                raise NotAdmissible(
                    f"edges at levels {k} and {k + 1} do not concatenate: "
                    f"range {edges[k][0]} vs source {edges[k + 1][1]}"
                )
        return tuple(self.id_of(k, *e) for k, e in enumerate(edges))

    def parent_path(self, ids: Sequence[int]) -> Tuple[EdgeKey, ...]:
        """Parent edges behind an image vertex trace, checked for validity."""
        if not ids:
            raise ParamOutOfRange("a path needs at least one vertex")
        out = tuple(self.edge_of(k, i) for k, i in enumerate(ids))
        for k in range(len(out) - 1):
            if out[k][0] != out[k + 1][1]:
                raise NotAdmissible(
                    f"image vertices at levels {k} and {k + 1} are not "
                    "connected"
                )
        return out


def _shift_seq(s: Optional[Seq]) -> Optional[Seq]:
    # drop the first term; None when the algebra cannot express it
    if s is None:
        return None
    if s.kind == "list":
        return Seq.listed(list(s.prefix[1:]), s.tail)
    try:
        return s.shifted_core(1)
    except (ValueError, TypeError):
        return None


def zero_one(
    d: Union[Diagram, OrderedDiagram], depth: int = 12, name: Optional[str] = None
) -> ZeroOneImage:
    """Reify every edge of ``d`` as a vertex of a new 0-1 diagram.

    The image vertex behind an edge into v from w connects downward to the
    whole id block of w's fiber, so rows are runs of ones.  Levels 0..depth-1
    of the enumeration are spot-checked for round-trip consistency; deeper
    levels stay lazy.  A diagram that declares a fiber order is enumerated
    in that order instead of left-to-right.
    """
    if depth < 1:
        raise ParamOutOfRange(f"depth must be >= 1, got {depth}")
    if isinstance(d, OrderedDiagram):
        base, order = d.base, d.fiber
    else:
        base, order = d, None

    enums: Dict[int, EdgeEnumeration] = {}

    def enum(n: int) -> EdgeEnumeration:
        got = enums.get(n)
        if got is None:
            got = EdgeEnumeration(level_index=n, level=base.level(n), order=order)
            enums[n] = got
        return got

    vsets: Dict[int, VertexSet] = {}

    def vset(n: int) -> VertexSet:
        got = vsets.get(n)
        if got is None:
            rs = base.vertex_set(n + 1)
            if rs.is_finite:
                en = enum(n)
                total = sum(en.size(v) for v in rs.vertices())
                got = VertexSet.finite_range(0, total - 1)
            elif rs.kind == "naturals":
                got = VertexSet.naturals(0)
            else:
                got = VertexSet.integers()
            vsets[n] = got
        return got

    def level(n: int) -> IncidenceLevel:
        en, en1 = enum(n), enum(n + 1)
        lvl_n, lvl_n1 = base.level(n), base.level(n + 1)

        def row(tv: int, _en=en, _en1=en1) -> Tuple[Tuple[int, int], ...]:
            _, u, _copy = _en1.edge_of(tv)
            return tuple((i, 1) for i in _en.ids(u))

        def col(tw: int, _en=en, _en1=en1, _lvl=lvl_n1, _n=n) -> ColumnSpec:
            v, _, _copy = _en.edge_of(tw)
            spec = _lvl.col_spec(v)
            if spec.tail is not None:
                raise WindowOverflow(
                    f"image column at level {_n} inherits an infinite parent "
                    "column; not enumerable"
                )
            ids: List[int] = []
            for v2, count in spec.entries:
                for j in range(count):
                    ids.append(_en1.id_of(v2, v, j))
            ids.sort()
            return ColumnSpec(entries=tuple((i, 1) for i in ids))

        band = None
        if (
            lvl_n.ers is not None
            and lvl_n.ers == lvl_n1.ers
            and lvl_n1.row_band is not None
            and _anchor_of(lvl_n.range_set) == _anchor_of(lvl_n1.range_set)
        ):
            # blocks of both levels sit at ers * vertex, so the reach of a
            # parent row scales by the common block width
            band = lvl_n.ers * (lvl_n1.row_band + 1) - 1

        return IncidenceLevel(
            index=n,
            source_set=vset(n),
            range_set=vset(n + 1),
            row_support=row,
            row_band=band,
            row_sum_bound=lvl_n.ers if lvl_n.ers is not None else lvl_n.row_sum_bound,
            ers=lvl_n.ers,
            ecs=lvl_n1.ecs,
            col_fn=col,
        )

    img = make_levels_diagram(
        level,
        stationary=base.stationary,
        horizontally_stationary=False,
        ers_seq=base.ers_seq,
        ecs_seq=_shift_seq(base.ecs_seq),
        name=f"{base.name}/edges-as-vertices",
    )

    zi = ZeroOneImage(
        parent=base,
        image=img,
        depth=depth,
        name=name or f"zero-one[{base.name}]",
        _enum_fn=enum,
    )
    _spot_check(zi, depth)
    return zi


def _anchor_of(vs: VertexSet) -> int:
    if vs.is_finite:
        return vs.lo
    if vs.kind == "naturals":
        return vs.start
    return 0


def _probe_vertices(vs: VertexSet, radius: int) -> Tuple[int, ...]:
    a = _anchor_of(vs)
    return vs.clamp(a - radius, a + radius)


def _spot_check(zi: ZeroOneImage, depth: int) -> None:
    # enumeration ids must round-trip on a sample of every checked level
    for n in range(depth):
        en = zi.enumeration(n)
        for v in _probe_vertices(zi.parent.vertex_set(n + 1), 3):
            start = en.block_start(v)
            for off, (w, copy) in enumerate(en.fiber(v)):
                i = start + off
                if en.edge_of(i) != (v, w, copy) or en.id_of(v, w, copy) != i:
                    raise NoConvergence(
                        f"enumeration round trip failed at level {n}, id {i}"
                    )


# --------------------------------------------------------------------------
# measure transport
# --------------------------------------------------------------------------


def _declared_mass(m: MeasureSpec) -> Optional[Number]:
    if isinstance(m, PVectors):
        return m.total_mass
    if isinstance(m, StationaryEigen):
        if m.probability:
            return Fraction(1)
        return m.sigma
    if isinstance(m, OdometerProduct):
        return Fraction(1)
    return None


def pushforward_measure(
    zi: ZeroOneImage, m: MeasureSpec, *, radius: int = 24
) -> PVectors:
    """The measure the image inherits through the path correspondence.

    An image cylinder of length n is the face of a parent cylinder of
    length n+1, so the image p-value at an id is the parent p-value at the
    range vertex of the edge behind it.  Infinite parent levels are
    materialized within ``radius`` vertices of the level anchor; widen the
    radius before verifying wide windows.  Total mass carries over.
    """
    parent = zi.parent

    def level(n: int) -> VertexFunction:
        pf = p_function(m, n + 1)
        rs = parent.vertex_set(n + 1)
        en = zi.enumeration(n)
        if rs.is_finite:
            vs = rs.vertices()
        else:
            vs = _probe_vertices(rs, radius)
        values: Dict[int, Number] = {}
        for v in vs:
            if not pf.covers(v):
                continue
            pv = pf.value(v)
            for i in en.ids(v):
                values[i] = pv
        if not values:
            raise WindowOverflow(
                f"no covered parent vertex within radius {radius} of the "
                f"anchor at level {n + 1}"
            )
        return VertexFunction(values=values)

    return PVectors(
        level_fn=level,
        total_mass=_declared_mass(m),
        name=f"{zi.name}/pushforward",
    )


# --------------------------------------------------------------------------
# preservation report
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PreservationReport:
    """What the reification keeps and what it provably drops.

    Row-sum constancy survives with the same constant; column-sum constancy
    survives shifted down one level; a stationary parent gives a stationary
    image.  A horizontally stationary parent with constant row sums keeps
    the block shift symmetry (``shift_ok``) yet always fails the Toeplitz
    test, and ``toeplitz_witness`` holds two entries with equal index
    difference and different values.
    """

    ers_checks: Tuple[Tuple[int, int, bool], ...]
    ecs_checks: Tuple[Tuple[int, int, bool], ...]
    stationary_ok: Optional[bool]
    shift_ok: Optional[bool]
    toeplitz_witness: Optional[Tuple[Tuple[int, int, int], Tuple[int, int, int]]]
    notes: Tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        if any(not ok for _, _, ok in self.ers_checks):
            return False
        if any(not ok for _, _, ok in self.ecs_checks):
            return False
        if self.stationary_ok is False or self.shift_ok is False:
            return False
        return True


def _image_entry(img: Diagram, n: int, i: int, j: int) -> int:
    return img.level(n).entry(i, j)


def verify_preserved_properties(
    zi: ZeroOneImage, *, levels: int = 3, radius: int = 8
) -> PreservationReport:
    """Check the structural carry-overs of the reification on windows."""
    parent, img = zi.parent, zi.image
    notes: List[str] = []

    ers_checks: List[Tuple[int, int, bool]] = []
    for n in range(levels):
        r = parent.level(n).ers
        if r is None:
            continue
        ok = True
        for i in _probe_vertices(img.vertex_set(n + 1), radius):
            if img.level(n).row_sum(i) != r:
                ok = False
                break
        ers_checks.append((n, r, ok))

    ecs_checks: List[Tuple[int, int, bool]] = []
    for n in range(levels):
        c = parent.level(n + 1).ecs
        if c is None:
            continue
        ok = True
        try:
            for j in _probe_vertices(img.vertex_set(n), radius):
                got = img.level(n).col_spec(j).finite_sum()
                if got != c:
                    ok = False
                    break
        except WindowOverflow:
            notes.append(f"column sums at image level {n} not enumerable")
            continue
        ecs_checks.append((n, c, ok))

    stationary_ok: Optional[bool] = None
    if parent.stationary:
        stationary_ok = True
        probe0 = _probe_vertices(img.vertex_set(1), radius)
        for n in range(1, levels):
            for i in probe0:
                if not img.vertex_set(n + 1).contains(i):
                    continue
                if row_window(img, 0, i) != row_window(img, n, i):
                    stationary_ok = False
                    break
            if stationary_ok is False:
                break

    shift_ok: Optional[bool] = None
    witness: Optional[Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = None
    r0 = parent.level(0).ers
    if parent.horizontally_stationary and r0 is not None:
        period = r0
        shift_ok = True
        rows = _probe_vertices(img.vertex_set(1), radius)
        for i in rows:
            for j, cnt in row_window(img, 0, i):
                if _image_entry(img, 0, i + period, j + period) != cnt:
                    shift_ok = False
                    break
            if shift_ok is False:
                break
        # two entries with the same index difference but different values
        by_diff: Dict[int, Dict[int, Tuple[int, int]]] = {}
        span = _probe_vertices(img.vertex_set(0), radius)
        for i in rows:
            support = dict(row_window(img, 0, i))
            for j in span:
                val = support.get(j, 0)
                by_diff.setdefault(i - j, {}).setdefault(val, (i, j))
        for diff, seen in sorted(by_diff.items()):
            if 0 in seen and 1 in seen:
                i1, j1 = seen[1]
                i0, j0 = seen[0]
                witness = ((i1, j1, 1), (i0, j0, 0))
                break
        if witness is None:
            notes.append("no Toeplitz violation inside the probed window")

    return PreservationReport(
        ers_checks=tuple(ers_checks),
        ecs_checks=tuple(ecs_checks),
        stationary_ok=stationary_ok,
        shift_ok=shift_ok,
        toeplitz_witness=witness,
        notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# edge subdiagrams through the reification
# --------------------------------------------------------------------------


def retained_image_ids(
    zi: ZeroOneImage, sub: EdgeSubdiagram, n: int, *, radius: int = 8
) -> Tuple[int, ...]:
    """Image ids of the edges a subdiagram keeps at level n.

    Within each parallel class the first retained copies are taken, matching
    the enumeration order.
    """
    out: List[int] = []
    en = zi.enumeration(n)
    for v in _probe_vertices(zi.parent.vertex_set(n + 1), radius):
        for w, kept in sub.fbar_row(n, v):
            for j in range(kept):
                out.append(en.id_of(v, w, j))
    return tuple(sorted(out))


@dataclass(frozen=True)
class DualityReport:
    """Edge subdiagram series versus its reified vertex subdiagram series."""

    edge: ExtensionReport
    vertex: ExtensionReport
    depth: int
    rows_match: bool
    increments_equal: bool
    partials_equal: bool
    retained_counts: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.rows_match and self.increments_equal and self.partials_equal


def odometer_duality_report(
    b: Seq,
    a: Seq,
    *,
    depth: int = 8,
    tol: Union[Fraction, float] = Fraction(1, 10**12),
) -> DualityReport:
    """Run both extension routes for the tower pair keeping a_n of b_n edges.

    Reifying the pair turns the retained edges into the leading id block of
    each image level, i.e. a vertex subdiagram of the all-ones image, and
    the two extension series must agree increment by increment.
    """
    if depth < 1:
        raise ParamOutOfRange(f"depth must be >= 1, got {depth}")
    parent, esub = make_odometer_edge_pair(b, a, depth=depth + 2)
    mbar = OdometerProduct(a)
    edge_rep = edge_extension_series(parent, esub, mbar, depth=depth, tol=tol)

    zi = zero_one(parent, depth=depth + 1)
    zi_sub = zero_one(make_odometer(a), depth=depth + 1)
    wspec = WSpec.explicit(
        lambda n, _a=a: tuple(range(_a.int_value(n))),
        label="retained-edges",
        level_free=False,
    )
    vsub = make_vertex_subdiagram(
        zi.image, wspec, check_depth=depth, allow_full=True, name="retained-edges"
    )
    nu = pushforward_measure(zi, mbar)
    vertex_rep = vertex_extension_series(zi.image, vsub, nu, depth=depth, tol=tol)

    rows_match = True
    for n in range(depth):
        for tv in range(a.int_value(n + 1)):
            if row_window(zi_sub.image, n, tv) != vsub.sub_row(n, tv):
                rows_match = False
                break
        if not rows_match:
            break

    e_inc = edge_rep.increments[:depth]
    v_inc = vertex_rep.increments[:depth]
    e_par = edge_rep.partials[: depth + 1]
    v_par = vertex_rep.partials[: depth + 1]
    return DualityReport(
        edge=edge_rep,
        vertex=vertex_rep,
        depth=depth,
        rows_match=rows_match,
        increments_equal=e_inc == v_inc,
        partials_equal=e_par == v_par,
        retained_counts=tuple(a.int_value(n) for n in range(depth)),
    )


# --------------------------------------------------------------------------
# the inverse, where it exists
# --------------------------------------------------------------------------


def _require_all_ones(d: Diagram, n: int) -> Tuple[int, int]:
    vs, rs = d.vertex_set(n), d.vertex_set(n + 1)
    if not (vs.is_finite and rs.is_finite):
        raise NotAdmissible(
            f"level {n} is not a finite all-ones block; only complete "
            "bipartite levels invert"
        )
    lvl = d.level(n)
    want = [(w, 1) for w in vs.vertices()]
    for v in rs.vertices():
        if sorted(lvl.row_support(v)) != want:
            raise NotAdmissible(
                f"row of vertex {v} at level {n} is not the all-ones row; "
                "only complete bipartite levels invert"
            )
    return (vs.hi - vs.lo + 1, rs.hi - rs.lo + 1)


def inverse_zero_one(d: Diagram, *, check_depth: int = 6) -> Diagram:
    """Undo the reification of a complete-bipartite 0-1 diagram.

    Each level of ``d`` must be an all-ones block; the preimage is then a
    single-vertex tower whose edge counts are the level sizes of ``d``.
    The size of the original starting level is not recoverable, so the
    preimage starts from one vertex by convention.
    """
    for n in range(check_depth):
        _require_all_ones(d, n)
    vset = VertexSet.finite_range(0, 0)

    def level(n: int) -> IncidenceLevel:
        _require_all_ones(d, n)  # lazy levels get the same validation
        vs = d.vertex_set(n)
        count = vs.hi - vs.lo + 1
        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=lambda v, _c=count: ((0, _c),),
            row_band=0,
            row_sum_bound=count,
            ers=count,
            ecs=count,
            col_fn=lambda w, _c=count: ColumnSpec(entries=((0, _c),)),
        )

    return make_levels_diagram(
        level,
        stationary=d.stationary,
        horizontally_stationary=True,
        name=f"{d.name}/vertices-as-edges",
    )


# --------------------------------------------------------------------------
# randomized cylinder transport check
# --------------------------------------------------------------------------


def cylinder_equality_check(
    zi: ZeroOneImage,
    m: MeasureSpec,
    *,
    samples: int = 500,
    depth: int = 6,
    seed: int = 0,
    start_radius: int = 10,
) -> int:
    """Sampled proof that the path correspondence is measure preserving.

    Draws random parent paths of ``depth`` edges, maps them through the
    bijection, and requires the image cylinder mass to equal the parent
    cylinder mass exactly.  Returns the number of samples verified; a
    mismatch raises instead of counting.
    """
    if depth < 1:
        raise ParamOutOfRange(f"depth must be >= 1, got {depth}")
    if samples < 1:
        raise ParamOutOfRange(f"samples must be >= 1, got {samples}")
    parent = zi.parent
    reach = start_radius
    for i in range(depth):
        lvl = parent.level(i)
        if not lvl.range_set.is_finite:
            if lvl.row_band is None:
                raise WindowOverflow(
                    f"level {i} has unbounded rows on an infinite level; "
                    "cannot bound the sampling radius"
                )
            reach += lvl.row_band
    nu = pushforward_measure(zi, m, radius=reach)
    pf_top = p_function(m, depth)

    rng = random.Random(seed)
    starts = _probe_vertices(parent.vertex_set(0), start_radius)
    checked = 0
    for _ in range(samples):
        w = rng.choice(starts)
        keys: List[EdgeKey] = []
        ok = True
        for i in range(depth):
            spec = parent.level(i).col_spec(w)
            choices = [
                (v, j) for v, count in spec.entries for j in range(count)
            ]
            if not choices:
                ok = False
                break
            v, j = rng.choice(choices)
            keys.append((v, w, j))
            w = v
        if not ok:
            continue
        top = keys[-1][0]
        if not pf_top.covers(top):
            continue
        ids = zi.image_path(keys)
        if zi.parent_path(ids) != tuple(keys):
            raise NoConvergence(
                f"path transport does not round-trip for {keys}"
            )
        lhs = pf_top.value(top)
        rhs = nu.level_fn(depth - 1).value(ids[-1])
        if lhs != rhs:
            raise NoConvergence(
                f"cylinder mass changed under transport: parent {lhs}, "
                f"image {rhs} for path {keys}"
            )
        checked += 1
    return checked


# --------------------------------------------------------------------------
# fixtures
# --------------------------------------------------------------------------


def make_neighbor_line(name: str = "neighbor-line") -> Diagram:
    """Integer-line diagram joining every vertex once to both neighbors.

    The minimal horizontally stationary, equal-row-sum diagram; its reified
    image keeps the period-2 block symmetry but cannot be Toeplitz, which
    makes it the canonical witness fixture.
    """
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=lambda v: ((v - 1, 1), (v + 1, 1)),
            row_band=1,
            row_sum_bound=2,
            ers=2,
            ecs=2,
            col_fn=lambda w: ColumnSpec(entries=((w - 1, 1), (w + 1, 1))),
        )

    return make_levels_diagram(
        level,
        stationary=True,
        horizontally_stationary=True,
        bounded_size_seqs=(Seq.constant(1), Seq.constant(2)),
        ers_seq=Seq.constant(2),
        ecs_seq=Seq.constant(2),
        name=name,
    )

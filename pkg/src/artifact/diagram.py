"""Diagram data model: vertex sets, incidence levels, built-in families.

A diagram is a level-indexed sequence of row-finite incidence matrices
``F_n`` between the vertex set of level ``n`` (sources) and level ``n+1``
(ranges).  The entry ``f_{v,w}`` counts edges from source ``w`` at level
``n`` into range ``v`` at level ``n+1``.  Vertex sets may be finite ranges,
the naturals (with a configurable first index) or all integers; infinite
levels are never materialized, every query runs through finite row supports
and windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .descriptors import Seq
from .errors import (
    ConfigParse,
    EmptyCuts,
    InvalidFamilyParams,
    MissingBoundedSizeParams,
    NonPositiveEntry,
    VertexOutOfSet,
    WindowOverflow,
)

__all__ = [
    "VertexSet",
    "IncidenceLevel",
    "ColumnSpec",
    "Diagram",
    "FamilySpec",
    "build_family",
    "make_odometer",
    "make_levels_diagram",
    "entry",
    "row_window",
    "check_row_sums",
    "check_col_sums",
    "upper_cone",
    "telescope",
]

# keeps row-support products from exploding during deep telescoping
_PRODUCT_SUPPORT_CAP = 200_000


# --------------------------------------------------------------------------
# vertex sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexSet:
    """One level's vertex set: a finite range, the naturals, or the integers."""

    kind: str  # "finite" | "naturals" | "integers"
    lo: Optional[int] = None
    hi: Optional[int] = None
    start: int = 0  # first vertex for the naturals kind

    @staticmethod
    def finite_range(lo: int, hi: int) -> "VertexSet":
        if lo > hi:
            raise InvalidFamilyParams(f"finite range needs lo <= hi, got [{lo},{hi}]")
        return VertexSet("finite", lo=lo, hi=hi)

    @staticmethod
    def naturals(start: int = 0) -> "VertexSet":
        return VertexSet("naturals", start=start)

    @staticmethod
    def integers() -> "VertexSet":
        return VertexSet("integers")

    def contains(self, v: int) -> bool:
        if self.kind == "finite":
            return self.lo <= v <= self.hi
        if self.kind == "naturals":
            return v >= self.start
        return True

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def vertices(self) -> Tuple[int, ...]:
        if not self.is_finite:
            raise WindowOverflow(f"cannot list an infinite vertex set ({self.kind})")
        return tuple(range(self.lo, self.hi + 1))

    def clamp(self, lo: int, hi: int) -> Tuple[int, ...]:
        """Vertices of the set inside the closed interval [lo, hi]."""
        if self.kind == "finite":
            lo, hi = max(lo, self.lo), min(hi, self.hi)
        elif self.kind == "naturals":
            lo = max(lo, self.start)
        return tuple(range(lo, hi + 1)) if lo <= hi else ()

    def describe(self) -> str:
        if self.kind == "finite":
            return f"[{self.lo}..{self.hi}]"
        if self.kind == "naturals":
            return f"[{self.start}..)"
        return "Z"


# --------------------------------------------------------------------------
# incidence levels
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnSpec:
    """Support of one incidence column, possibly with an infinite described tail.

    ``entries`` lists explicit (range vertex, count) pairs; if ``tail`` is
    present as ``(start_v, mult)`` then additionally every range vertex
    ``v >= start_v`` receives ``mult.value(v - start_v)`` edges from the
    column's source.
    """

    entries: Tuple[Tuple[int, int], ...]
    tail: Optional[Tuple[int, Seq]] = None

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def finite_sum(self) -> Optional[int]:
        if self.tail is not None:
            return None
        return sum(c for _, c in self.entries)


@dataclass(frozen=True, eq=False)
class IncidenceLevel:
    """The incidence matrix F_n between level n (sources) and n+1 (ranges)."""

    index: int
    source_set: VertexSet
    range_set: VertexSet
    row_support: Callable[[int], Tuple[Tuple[int, int], ...]] = field(repr=False)
    row_band: Optional[int] = None
    row_sum_bound: Optional[int] = None
    ers: Optional[int] = None  # exact common row sum, when known by construction
    ecs: Optional[int] = None  # exact common column sum, when known
    col_fn: Optional[Callable[[int], ColumnSpec]] = field(default=None, repr=False)

    def entry(self, v: int, w: int) -> int:
        for ww, count in self.row_support(v):
            if ww == w:
                return count
        return 0

    def row_sum(self, v: int) -> int:
        return sum(c for _, c in self.row_support(v))

    def col_spec(self, w: int) -> ColumnSpec:
        if self.col_fn is not None:
            return self.col_fn(w)
        if self.row_band is not None:
            rows = self.range_set.clamp(w - self.row_band, w + self.row_band)
        elif self.range_set.is_finite:
            rows = self.range_set.vertices()
        else:
            raise WindowOverflow(
                f"column support at level {self.index} is not enumerable"
            )
        ents = tuple((v, e) for v in rows if (e := self.entry(v, w)) > 0)
        return ColumnSpec(entries=ents)


# --------------------------------------------------------------------------
# diagrams
# --------------------------------------------------------------------------


@dataclass(eq=False)
class Diagram:
    """Immutable-by-convention diagram with lazily built, cached levels."""

    level_fn: Callable[[int], IncidenceLevel] = field(repr=False)
    stationary: bool = False
    horizontally_stationary: bool = False
    bounded_size: Optional[Callable[[int], Tuple[int, int]]] = field(
        default=None, repr=False
    )
    bounded_size_seqs: Optional[Tuple[Seq, Seq]] = None
    ers_seq: Optional[Seq] = None
    ecs_seq: Optional[Seq] = None
    family: Optional["FamilySpec"] = None
    name: str = "diagram"
    _levels: Dict[int, IncidenceLevel] = field(default_factory=dict, repr=False)

    def level(self, n: int) -> IncidenceLevel:
        if n < 0:
            raise VertexOutOfSet(f"level index must be >= 0, got {n}")
        got = self._levels.get(n)
        if got is None:
            got = self.level_fn(n)
            self._levels[n] = got
        return got

    def vertex_set(self, n: int) -> VertexSet:
        if n == 0:
            return self.level(0).source_set
        return self.level(n - 1).range_set

    def size_params(self, n: int) -> Tuple[int, int]:
        if self.bounded_size is None:
            raise MissingBoundedSizeParams(
                f"{self.name} carries no bounded-size parameters"
            )
        return self.bounded_size(n)


def make_levels_diagram(
    level_fn: Callable[[int], IncidenceLevel],
    *,
    stationary: bool = False,
    horizontally_stationary: bool = False,
    bounded_size_seqs: Optional[Tuple[Seq, Seq]] = None,
    bounded_size: Optional[Callable[[int], Tuple[int, int]]] = None,
    ers_seq: Optional[Seq] = None,
    ecs_seq: Optional[Seq] = None,
    family: Optional["FamilySpec"] = None,
    name: str = "diagram",
) -> Diagram:
    """Assemble a diagram from a level supplier plus declared structure."""
    if bounded_size is None and bounded_size_seqs is not None:
        t_seq, l_seq = bounded_size_seqs

        def bounded_size(n: int, _t=t_seq, _l=l_seq) -> Tuple[int, int]:
            return (_t.int_value(n), _l.int_value(n))

    return Diagram(
        level_fn=level_fn,
        stationary=stationary,
        horizontally_stationary=horizontally_stationary,
        bounded_size=bounded_size,
        bounded_size_seqs=bounded_size_seqs,
        ers_seq=ers_seq,
        ecs_seq=ecs_seq,
        family=family,
        name=name,
    )


# --------------------------------------------------------------------------
# family specifications
# --------------------------------------------------------------------------

_FAMILY_KINDS = (
    "stationary_finite",
    "stationary_banded",
    "tridiagonal",
    "fat_odometer",
    "bt",
    "b2n",
    "leslie",
    "lower_triangular",
    "rank2",
    "half_plane_fat",
    "half_line",
)


@dataclass(frozen=True)
class FamilySpec:
    """Tagged description of one of the built-in diagram families."""

    kind: str
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    symbol: Optional[Tuple[Tuple[int, int], ...]] = None  # (offset, count)
    band: Optional[int] = None
    a: Optional[Seq] = None
    t: Optional[Seq] = None
    b: Optional[Seq] = None
    s: Optional[Seq] = None

    @staticmethod
    def stationary_finite(matrix: Sequence[Sequence[int]]) -> "FamilySpec":
        return FamilySpec(
            kind="stationary_finite",
            matrix=tuple(tuple(int(x) for x in row) for row in matrix),
        )

    @staticmethod
    def stationary_banded(symbol: Mapping[int, int], band: int) -> "FamilySpec":
        return FamilySpec(
            kind="stationary_banded",
            symbol=tuple(sorted((int(o), int(c)) for o, c in symbol.items())),
            band=int(band),
        )

    @staticmethod
    def tridiagonal(a: Seq) -> "FamilySpec":
        return FamilySpec(kind="tridiagonal", a=a)

    @staticmethod
    def fat_odometer(a: Seq, t: Seq) -> "FamilySpec":
        return FamilySpec(kind="fat_odometer", a=a, t=t)

    @staticmethod
    def bt(t: Seq) -> "FamilySpec":
        return FamilySpec(kind="bt", t=t)

    @staticmethod
    def b2n() -> "FamilySpec":
        return FamilySpec(kind="b2n")

    @staticmethod
    def leslie(b: Seq, s: Seq) -> "FamilySpec":
        return FamilySpec(kind="leslie", b=b, s=s)

    @staticmethod
    def lower_triangular() -> "FamilySpec":
        return FamilySpec(kind="lower_triangular")

    @staticmethod
    def rank2() -> "FamilySpec":
        return FamilySpec(kind="rank2")

    @staticmethod
    def half_plane_fat(a: Seq, t: Seq) -> "FamilySpec":
        return FamilySpec(kind="half_plane_fat", a=a, t=t)

    @staticmethod
    def half_line(a: Seq) -> "FamilySpec":
        return FamilySpec(kind="half_line", a=a)

    @staticmethod
    def from_json(obj: Mapping) -> "FamilySpec":
        if not isinstance(obj, Mapping):
            raise ConfigParse(f"family spec must be an object, got {obj!r}")
        kind = obj.get("family")
        if kind not in _FAMILY_KINDS:
            raise ConfigParse(
                f"unknown family {kind!r}; expected one of {', '.join(_FAMILY_KINDS)}"
            )
        unknown = set(obj) - {"family", "matrix", "symbol", "band", "a", "t", "b", "s"}
        if unknown:
            raise ConfigParse(f"unknown family keys {sorted(unknown)}")

        def seq(key: str) -> Seq:
            if key not in obj:
                raise ConfigParse(f"family {kind!r} needs parameter {key!r}")
            return Seq.from_json(obj[key])

        if kind == "stationary_finite":
            if "matrix" not in obj:
                raise ConfigParse("stationary_finite needs a matrix")
            return FamilySpec.stationary_finite(obj["matrix"])
        if kind == "stationary_banded":
            if "symbol" not in obj or "band" not in obj:
                raise ConfigParse("stationary_banded needs symbol and band")
            try:
                symbol = {int(k): int(v) for k, v in obj["symbol"].items()}
            except (AttributeError, ValueError) as exc:
                raise ConfigParse("symbol must map integer offsets to counts") from exc
            return FamilySpec.stationary_banded(symbol, obj["band"])
        if kind == "tridiagonal":
            return FamilySpec.tridiagonal(seq("a"))
        if kind == "fat_odometer":
            return FamilySpec.fat_odometer(seq("a"), seq("t"))
        if kind == "bt":
            return FamilySpec.bt(seq("t"))
        if kind == "b2n":
            return FamilySpec.b2n()
        if kind == "leslie":
            return FamilySpec.leslie(seq("b"), seq("s"))
        if kind == "lower_triangular":
            return FamilySpec.lower_triangular()
        if kind == "rank2":
            return FamilySpec.rank2()
        if kind == "half_line":
            return FamilySpec.half_line(seq("a"))
        return FamilySpec.half_plane_fat(seq("a"), seq("t"))


# --------------------------------------------------------------------------
# family constructors
# --------------------------------------------------------------------------


def _require_positive_int_seq(seq: Seq, what: str) -> None:
    if not seq.positive_everywhere():
        raise NonPositiveEntry(f"{what} must be positive at every level")
    # spot-check integrality on an initial stretch
    for n in range(8):
        seq.int_value(n)


def _check_bt_growth(t: Seq) -> None:
    """Strict growth: t_0 > 0 and t_n exceeds the sum of all earlier values.

    Checked explicitly over an initial stretch; once the descriptor has
    entered a geometric core with ratio >= 2 the rest follows by induction
    (the partial sum stays below 2 t_n <= t_{n+1}).
    """
    if not t.positive_everywhere():
        raise InvalidFamilyParams("window radii must be positive")
    horizon = t.prefix_length() + 64
    total = 0
    for n in range(horizon):
        tn = t.int_value(n)
        if n == 0:
            if tn <= 0:
                raise InvalidFamilyParams("t_0 must be positive")
        elif tn <= total:
            raise InvalidFamilyParams(
                f"growth precondition fails at level {n}: t_{n}={tn} <= {total}"
            )
        if n >= t.prefix_length():
            core = t.shifted_core(n)
            if core.kind == "geometric" and core.ratio >= 2:
                return
        total += tn
    raise InvalidFamilyParams(
        "cannot certify the strict-growth precondition beyond the scan horizon"
    )


def _finite_matrix_level(n: int, matrix, vset: VertexSet) -> IncidenceLevel:
    size = len(matrix)
    start = vset.lo

    def row(v: int) -> Tuple[Tuple[int, int], ...]:
        r = matrix[v - start]
        return tuple((start + j, c) for j, c in enumerate(r) if c > 0)

    sums = [sum(r) for r in matrix]
    cols = [sum(matrix[i][j] for i in range(size)) for j in range(size)]
    ers = sums[0] if all(s == sums[0] for s in sums) else None
    ecs = cols[0] if all(c == cols[0] for c in cols) else None

    def col(w: int) -> ColumnSpec:
        j = w - start
        ents = tuple(
            (start + i, matrix[i][j]) for i in range(size) if matrix[i][j] > 0
        )
        return ColumnSpec(entries=ents)

    return IncidenceLevel(
        index=n,
        source_set=vset,
        range_set=vset,
        row_support=row,
        row_sum_bound=max(sums),
        ers=ers,
        ecs=ecs,
        col_fn=col,
    )


def _build_stationary_finite(spec: FamilySpec, name: str) -> Diagram:
    matrix = spec.matrix
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        raise InvalidFamilyParams("matrix must be square and nonempty")
    for row in matrix:
        for x in row:
            if x < 0:
                raise NonPositiveEntry(f"negative edge count {x}")
    if any(all(c == 0 for c in row) for row in matrix):
        raise InvalidFamilyParams("a range vertex would have no incoming edges")
    for j in range(size):
        if all(matrix[i][j] == 0 for i in range(size)):
            raise InvalidFamilyParams(f"source vertex {j + 1} has no outgoing edges")
    vset = VertexSet.finite_range(1, size)
    sums = [sum(r) for r in matrix]
    ers = sums[0] if all(s == sums[0] for s in sums) else None
    cols = [sum(matrix[i][j] for i in range(size)) for j in range(size)]
    ecs = cols[0] if all(c == cols[0] for c in cols) else None
    return make_levels_diagram(
        lambda n: _finite_matrix_level(n, matrix, vset),
        stationary=True,
        ers_seq=Seq.constant(ers) if ers is not None else None,
        ecs_seq=Seq.constant(ecs) if ecs is not None else None,
        family=spec,
        name=name,
    )


def _build_stationary_banded(spec: FamilySpec) -> Diagram:
    band = spec.band
    symbol = spec.symbol
    if band is None or band < 0:
        raise InvalidFamilyParams("band must be a nonnegative integer")
    if not symbol:
        raise InvalidFamilyParams("symbol must contain at least one offset")
    for off, count in symbol:
        if abs(off) > band:
            raise InvalidFamilyParams(f"offset {off} exceeds the band {band}")
        if count <= 0:
            raise NonPositiveEntry(f"symbol count at offset {off} must be positive")
    total = sum(c for _, c in symbol)
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            return tuple((v + off, c) for off, c in symbol)

        def col(w: int) -> ColumnSpec:
            ents = tuple(sorted((w - off, c) for off, c in symbol))
            return ColumnSpec(entries=ents)

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=band,
            row_sum_bound=total,
            ers=total,
            ecs=total,
            col_fn=col,
        )

    return make_levels_diagram(
        level,
        stationary=True,
        horizontally_stationary=True,
        bounded_size_seqs=(Seq.constant(band if band > 0 else 1), Seq.constant(total)),
        ers_seq=Seq.constant(total),
        ecs_seq=Seq.constant(total),
        family=spec,
        name=f"banded[{','.join(f'{o}:{c}' for o, c in symbol)}]",
    )


def _build_tridiagonal(spec: FamilySpec) -> Diagram:
    a = spec.a
    _require_positive_int_seq(a, "diagonal weight a_n")
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        an = a.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            return ((v - 1, 1), (v, an), (v + 1, 1))

        def col(w: int) -> ColumnSpec:
            return ColumnSpec(entries=((w - 1, 1), (w, an), (w + 1, 1)))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=1,
            row_sum_bound=an + 2,
            ers=an + 2,
            ecs=an + 2,
            col_fn=col,
        )

    ers = _seq_plus_const(a, 2)

    def bounded(n: int) -> Tuple[int, int]:
        return (1, a.int_value(n) + 2)

    return make_levels_diagram(
        level,
        stationary=a.kind == "constant",
        horizontally_stationary=True,
        bounded_size=bounded,
        bounded_size_seqs=(Seq.constant(1), ers) if ers is not None else None,
        ers_seq=ers,
        ecs_seq=ers,
        family=spec,
        name=f"tridiagonal[a={a.describe()}]",
    )


def _seq_plus_const(seq: Seq, c: int) -> Optional[Seq]:
    """Descriptor for n -> seq(n) + c, or None when it leaves the algebra."""
    if seq.kind == "constant":
        return Seq.constant(seq.const + c)
    if seq.kind == "polynomial":
        coeffs = list(seq.poly)
        coeffs[0] += c
        return Seq.polynomial(*coeffs)
    if seq.kind == "list":
        shifted_tail = _seq_plus_const(seq.tail, c)
        if shifted_tail is None:
            return None
        return Seq.listed([v + c for v in seq.prefix], shifted_tail)
    if seq.kind == "geometric" and seq.ratio == 1:
        return Seq.constant(seq.coeff + c)
    return None


def _build_fat_odometer(spec: FamilySpec) -> Diagram:
    a, t = spec.a, spec.t
    _require_positive_int_seq(a, "central weight a_n")
    _require_positive_int_seq(t, "window radius t_n")
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        an, tn = a.int_value(n), t.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            if v == 0:
                return tuple(
                    (w, an if w == 0 else 1) for w in range(-tn, tn + 1)
                )
            return tuple((w, 1) for w in range(v - tn, v + tn + 1))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=tn,
            row_sum_bound=an + 2 * tn,
        )

    l_seq = None
    if a.kind == "constant" and t.kind == "constant":
        l_seq = Seq.constant(a.const + 2 * t.const)

    def bounded(n: int) -> Tuple[int, int]:
        return (t.int_value(n), a.int_value(n) + 2 * t.int_value(n))

    return make_levels_diagram(
        level,
        stationary=a.kind == "constant" and t.kind == "constant",
        bounded_size=bounded,
        bounded_size_seqs=(t, l_seq) if l_seq is not None else None,
        family=spec,
        name=f"fat_odometer[a={a.describe()}, t={t.describe()}]",
    )


def _build_bt(spec: FamilySpec, name: str) -> Diagram:
    t = spec.t
    _check_bt_growth(t)
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        tn = t.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            return ((v - tn, 1), (v + tn, 1))

        def col(w: int) -> ColumnSpec:
            return ColumnSpec(entries=((w - tn, 1), (w + tn, 1)))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=tn,
            row_sum_bound=2,
            ers=2,
            ecs=2,
            col_fn=col,
        )

    return make_levels_diagram(
        level,
        stationary=False,
        horizontally_stationary=True,
        bounded_size_seqs=(t, Seq.constant(2)),
        ers_seq=Seq.constant(2),
        ecs_seq=Seq.constant(2),
        family=spec,
        name=name,
    )


def _build_leslie(spec: FamilySpec) -> Diagram:
    b, s = spec.b, spec.s
    _require_positive_int_seq(b, "birth count b_v")
    _require_positive_int_seq(s, "survival count s_v")
    vset = VertexSet.naturals(start=1)

    def level(n: int) -> IncidenceLevel:
        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            # births pool at source 1, survival feeds from source v+1
            return ((1, b.int_value(v - 1)), (v + 1, s.int_value(v - 1)))

        def col(w: int) -> ColumnSpec:
            if w == 1:
                return ColumnSpec(entries=(), tail=(1, b))
            return ColumnSpec(entries=((w - 1, s.int_value(w - 2)),))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            col_fn=col,
        )

    ers = None
    if b.kind == "constant" and s.kind == "constant":
        ers = Seq.constant(b.const + s.const)
    return make_levels_diagram(
        level,
        stationary=True,
        ers_seq=ers,
        family=spec,
        name=f"leslie[b={b.describe()}, s={s.describe()}]",
    )


def _build_lower_triangular(spec: FamilySpec) -> Diagram:
    vset = VertexSet.naturals(start=1)

    def level(n: int) -> IncidenceLevel:
        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            return tuple((w, 1) for w in range(1, v + 1))

        def col(w: int) -> ColumnSpec:
            return ColumnSpec(entries=(), tail=(w, Seq.constant(1)))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            col_fn=col,
        )

    return make_levels_diagram(
        level,
        stationary=True,
        family=spec,
        name="lower_triangular",
    )


def _build_half_plane_fat(spec: FamilySpec) -> Diagram:
    a, t = spec.a, spec.t
    _require_positive_int_seq(a, "corner weight a_n")
    _require_positive_int_seq(t, "window radius t_n")
    vset = VertexSet.naturals(start=0)

    def level(n: int) -> IncidenceLevel:
        an, tn = a.int_value(n), t.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            if v == 0:
                return tuple(
                    (w, an if w == 0 else 1) for w in range(0, tn + 1)
                )
            return tuple((w, 1) for w in range(max(0, v - tn), v + tn + 1))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=tn,
            row_sum_bound=an + 2 * tn,
        )

    def bounded(n: int) -> Tuple[int, int]:
        return (t.int_value(n), a.int_value(n) + 2 * t.int_value(n))

    return make_levels_diagram(
        level,
        stationary=a.kind == "constant" and t.kind == "constant",
        bounded_size=bounded,
        family=spec,
        name=f"half_plane_fat[a={a.describe()}, t={t.describe()}]",
    )


def _build_half_line(spec: FamilySpec) -> Diagram:
    """Loop of weight a_n at vertex 1, plus a one-way ladder down from v+1 to v.

    Away from vertex 1 every row is (v,1),(v+1,1), so heights are 2^n there;
    the loop vertex accumulates a_n-fold multiplicity on top of that feed.
    """
    a = spec.a
    _require_positive_int_seq(a, "loop weight a_n")
    vset = VertexSet.naturals(start=1)

    def level(n: int) -> IncidenceLevel:
        an = a.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            if v == 1:
                return ((1, an), (2, 1))
            return ((v, 1), (v + 1, 1))

        def col(w: int) -> ColumnSpec:
            if w == 1:
                return ColumnSpec(entries=((1, an),))
            return ColumnSpec(entries=((w - 1, 1), (w, 1)))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_sum_bound=max(an + 1, 2),
            col_fn=col,
        )

    return make_levels_diagram(
        level,
        stationary=a.kind == "constant",
        family=spec,
        name=f"half_line[a={a.describe()}]",
    )


def build_family(spec: FamilySpec) -> Diagram:
    """Construct one of the built-in diagram families, validating parameters."""
    if spec.kind == "stationary_finite":
        return _build_stationary_finite(spec, name="stationary_finite")
    if spec.kind == "stationary_banded":
        return _build_stationary_banded(spec)
    if spec.kind == "tridiagonal":
        return _build_tridiagonal(spec)
    if spec.kind == "fat_odometer":
        return _build_fat_odometer(spec)
    if spec.kind == "bt":
        return _build_bt(spec, name=f"bt[t={spec.t.describe()}]")
    if spec.kind == "b2n":
        return _build_bt(FamilySpec(kind="b2n", t=Seq.geometric(1, 2)), name="b2n")
    if spec.kind == "leslie":
        return _build_leslie(spec)
    if spec.kind == "lower_triangular":
        return _build_lower_triangular(spec)
    if spec.kind == "rank2":
        return _build_stationary_finite(
            FamilySpec(kind="rank2", matrix=((2, 0), (1, 2))), name="rank2"
        )
    if spec.kind == "half_plane_fat":
        return _build_half_plane_fat(spec)
    if spec.kind == "half_line":
        return _build_half_line(spec)
    raise InvalidFamilyParams(f"unknown family kind {spec.kind!r}")


def make_odometer(a: Seq, name: Optional[str] = None) -> Diagram:
    """Single-vertex diagram whose level-n matrix is the 1x1 block (a_n)."""
    _require_positive_int_seq(a, "edge count a_n")
    vset = VertexSet.finite_range(0, 0)

    def level(n: int) -> IncidenceLevel:
        an = a.int_value(n)
        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=lambda v, _an=an: ((0, _an),),
            row_band=0,
            row_sum_bound=an,
            ers=an,
            ecs=an,
            col_fn=lambda w, _an=an: ColumnSpec(entries=((0, _an),)),
        )

    return make_levels_diagram(
        level,
        stationary=a.kind == "constant",
        horizontally_stationary=True,
        bounded_size_seqs=(Seq.constant(0), a),
        ers_seq=a,
        ecs_seq=a,
        name=name or f"odometer[a={a.describe()}]",
    )


# --------------------------------------------------------------------------
# structural operations
# --------------------------------------------------------------------------


def entry(d: Diagram, n: int, v: int, w: int) -> int:
    """Edge count from source w at level n into range v at level n+1."""
    lvl = d.level(n)
    if not lvl.range_set.contains(v):
        raise VertexOutOfSet(
            f"range vertex {v} not in {lvl.range_set.describe()} at level {n + 1}"
        )
    if not lvl.source_set.contains(w):
        raise VertexOutOfSet(
            f"source vertex {w} not in {lvl.source_set.describe()} at level {n}"
        )
    return lvl.entry(v, w)


def row_window(d: Diagram, n: int, v: int) -> List[Tuple[int, int]]:
    """Complete support of incidence row v at level n, sorted by source."""
    lvl = d.level(n)
    if not lvl.range_set.contains(v):
        raise VertexOutOfSet(
            f"range vertex {v} not in {lvl.range_set.describe()} at level {n + 1}"
        )
    return sorted(lvl.row_support(v))


def check_row_sums(d: Diagram, n: int, window: Tuple[int, int]) -> Optional[int]:
    """Common row sum of F_n over range vertices in the window, if constant."""
    lvl = d.level(n)
    rows = lvl.range_set.clamp(*window)
    if not rows:
        return None
    sums = {lvl.row_sum(v) for v in rows}
    if len(sums) == 1:
        return sums.pop()
    return None


def check_col_sums(d: Diagram, n: int, window: Tuple[int, int]) -> Optional[int]:
    """Common column sum of F_n over source vertices in the window, if constant."""
    lvl = d.level(n)
    cols = lvl.source_set.clamp(*window)
    if not cols:
        return None
    sums = set()
    for w in cols:
        try:
            spec = lvl.col_spec(w)
        except WindowOverflow:
            return None
        s = spec.finite_sum()
        if s is None:  # an infinite column has no finite sum
            return None
        sums.add(s)
        if len(sums) > 1:
            return None
    return sums.pop()


def upper_cone(d: Diagram, n: int, v: int, m: int) -> Tuple[int, int]:
    """Interval of level-m sources reachable downward from v in V_{n+1}.

    Sums the window radii of incidence levels m..n, so the vertex argument
    lives one level above n.
    """
    if m > n:
        raise VertexOutOfSet(f"need m <= n, got m={m}, n={n}")
    radius = 0
    for i in range(m, n + 1):
        radius += d.size_params(i)[0]
    return (v - radius, v + radius)


def _compose_row(d: Diagram, top: int, bottom: int, v: int) -> Dict[int, int]:
    """Row v of the product F_{top-1} ... F_{bottom} (levels bottom..top-1)."""
    acc: Dict[int, int] = {v: 1}
    for n in range(top - 1, bottom - 1, -1):
        lvl = d.level(n)
        nxt: Dict[int, int] = {}
        for u, count in acc.items():
            for w, c in lvl.row_support(u):
                nxt[w] = nxt.get(w, 0) + count * c
            if len(nxt) > _PRODUCT_SUPPORT_CAP:
                raise WindowOverflow(
                    f"telescoped row support exceeds {_PRODUCT_SUPPORT_CAP} entries"
                )
        acc = nxt
    return acc


def telescope(d: Diagram, cuts: Sequence[int]) -> Diagram:
    """Contract level blocks: level k of the result multiplies the incidence
    matrices between consecutive cuts.  After the last listed cut the spacing
    repeats, so finitely many cuts still describe all levels."""
    cuts = list(cuts)
    if len(cuts) < 2:
        raise EmptyCuts("need at least two cut levels")
    if cuts[0] != 0:
        raise ConfigParse(f"cuts must start at level 0, got {cuts[0]}")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ConfigParse(f"cuts must increase strictly: {cuts}")
    gap = cuts[-1] - cuts[-2]

    def cut_at(k: int) -> int:
        if k < len(cuts):
            return cuts[k]
        return cuts[-1] + gap * (k - len(cuts) + 1)

    def level(k: int) -> IncidenceLevel:
        lo, hi = cut_at(k), cut_at(k + 1)
        src = d.vertex_set(lo)
        rng = d.vertex_set(hi)
        cache: Dict[int, Tuple[Tuple[int, int], ...]] = {}

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            got = cache.get(v)
            if got is None:
                got = tuple(sorted(_compose_row(d, hi, lo, v).items()))
                cache[v] = got
            return got

        band = None
        bound = None
        ers_val = None
        if d.bounded_size is not None:
            band = sum(d.size_params(i)[0] for i in range(lo, hi))
            bound = 1
            for i in range(lo, hi):
                bound *= d.size_params(i)[1]
        if d.ers_seq is not None:
            ers_val = 1
            for i in range(lo, hi):
                ers_val *= d.ers_seq.int_value(i)
        return IncidenceLevel(
            index=k,
            source_set=src,
            range_set=rng,
            row_support=row,
            row_band=band,
            row_sum_bound=bound,
            ers=ers_val,
        )

    gaps = [b - a for a, b in zip(cuts, cuts[1:])]
    even = all(g == gaps[0] for g in gaps)

    def bounded(k: int) -> Tuple[int, int]:
        lo, hi = cut_at(k), cut_at(k + 1)
        t = sum(d.size_params(i)[0] for i in range(lo, hi))
        L = 1
        for i in range(lo, hi):
            L *= d.size_params(i)[1]
        return (t, L)

    return make_levels_diagram(
        level,
        stationary=d.stationary and even,
        horizontally_stationary=d.horizontally_stationary,
        bounded_size=bounded if d.bounded_size is not None else None,
        name=f"telescope[{d.name}; cuts={cuts}]",
    )

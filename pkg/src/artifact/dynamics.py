"""Ordered diagrams and successor dynamics for the two-edge window families.

The diagrams here have integer levels and exactly two outgoing edges per
vertex, displacing by -t_n and +t_n.  With the left-to-right order on each
incoming fiber, the successor map has a closed form: locate the first
non-maximal edge, flip it to its fiber successor, and prepend the minimal
completion down to level 0.  The level-0 source then shifts by exactly

    L_0 = 2 t_0,    L_n = 2 (t_n - sum_{i<n} t_i)

when the flipped edge sits at level n.  Everything below works on truncated
paths: a prefix whose edges are all maximal is reported as such, never
silently extended, and callers deepen and retry.

Certificates: when every step displacement L_n is provably positive for the
whole symbolic family, no finite combination of displacements can vanish and
every source cylinder is wandering, which rules out an invariant probability
measure.  Otherwise a bounded multiset search looks for a vanishing
combination; finding one only withdraws the certificate, it does not build
an invariant measure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .descriptors import Seq
from .diagram import (
    Diagram,
    FamilySpec,
    IncidenceLevel,
    VertexSet,
    make_levels_diagram,
    row_window,
)
from .errors import (
    InvalidFamilyParams,
    MaximalWithinDepth,
    NotAdmissible,
    ParamOutOfRange,
)

# subset-sum search caps; beyond them the certificate is withheld, not forced
_SEARCH_N_CAP = 24
_SEARCH_REP_CAP = 8
_SEARCH_VALUE_CAP = 2 ** 32
_SEARCH_STATE_CAP = 1 << 20


def make_two_edge_diagram(t: Seq, name: Optional[str] = None) -> Diagram:
    """The two-edge family for an arbitrary positive integer sequence t_n.

    Unlike the validated family constructor, this does not require the
    strict-growth property; slow sequences give genuinely different
    dynamics (zero displacements), which is the point of studying them.
    """
    if not t.positive_everywhere():
        raise InvalidFamilyParams("window radii must be positive")
    vset = VertexSet.integers()

    def level(n: int) -> IncidenceLevel:
        tn = t.int_value(n)

        def row(v: int) -> Tuple[Tuple[int, int], ...]:
            return ((v - tn, 1), (v + tn, 1))

        return IncidenceLevel(
            index=n,
            source_set=vset,
            range_set=vset,
            row_support=row,
            row_band=tn,
            row_sum_bound=2,
            ers=2,
            ecs=2,
        )

    return make_levels_diagram(
        level,
        stationary=False,
        horizontally_stationary=True,
        bounded_size_seqs=(t, Seq.constant(2)),
        ers_seq=Seq.constant(2),
        ecs_seq=Seq.constant(2),
        family=FamilySpec.bt(t),
        name=name or f"two-edge[t={t.describe()}]",
    )


# --------------------------------------------------------------------------
# ordered diagrams and truncated paths
# --------------------------------------------------------------------------


@dataclass(eq=False)
class OrderedDiagram:
    """A diagram with a total order on every incoming edge fiber.

    The default order is left-to-right: edges sorted by source vertex, then
    by parallel-edge index.  ``fiber(n, v)`` lists the edges into vertex v
    of level n+1 in increasing order.
    """

    base: Diagram
    order: Optional[Callable[[int, int], Sequence[Tuple[int, int]]]] = None
    name: str = "ordered"

    def fiber(self, n: int, v: int) -> Tuple[Tuple[int, int], ...]:
        if self.order is not None:
            return tuple(self.order(n, v))
        out: List[Tuple[int, int]] = []
        for w, count in row_window(self.base, n, v):
            out.extend((w, j) for j in range(count))
        return tuple(out)


def make_ordered(d: Diagram, name: Optional[str] = None) -> OrderedDiagram:
    return OrderedDiagram(base=d, name=name or f"{d.name}/left-to-right")


@dataclass(frozen=True)
class TruncatedPath:
    """A finite path prefix recorded by its vertex trace u_0 .. u_D."""

    vertices: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ParamOutOfRange("a truncated path needs depth >= 1")

    @property
    def depth(self) -> int:
        return len(self.vertices) - 1

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def top(self) -> int:
        return self.vertices[-1]


def _t_of(od: OrderedDiagram) -> Seq:
    fam = od.base.family
    if fam is None or fam.kind not in ("bt", "b2n") or fam.t is None:
        raise InvalidFamilyParams(
            "successor dynamics are implemented for the two-edge window "
            "families only"
        )
    if od.order is not None:
        raise InvalidFamilyParams(
            "custom fiber orders are not supported by the successor map"
        )
    return fam.t


def _labels(t: Seq, p: TruncatedPath) -> List[int]:
    """0 for a right-going (minimal) edge, 1 for left-going (maximal)."""
    out = []
    for k in range(p.depth):
        tk = t.int_value(k)
        step = p.vertices[k + 1] - p.vertices[k]
        if step == tk:
            out.append(0)
        elif step == -tk:
            out.append(1)
        else:
            raise NotAdmissible(
                f"edge {k} moves by {step}, expected one of -{tk}, +{tk}"
            )
    return out


def path_from_labels(
    od: OrderedDiagram, i: int, labels: Sequence[int]
) -> TruncatedPath:
    """Build the path from source i taking edge label 0 (right) or 1 (left)
    at each level."""
    t = _t_of(od)
    if not labels:
        raise ParamOutOfRange("a truncated path needs depth >= 1")
    verts = [i]
    for k, b in enumerate(labels):
        if b not in (0, 1):
            raise ParamOutOfRange(f"edge label must be 0 or 1, got {b!r}")
        tk = t.int_value(k)
        verts.append(verts[-1] + (tk if b == 0 else -tk))
    return TruncatedPath(vertices=tuple(verts))


def path_labels(od: OrderedDiagram, p: TruncatedPath) -> Tuple[int, ...]:
    return tuple(_labels(_t_of(od), p))


def vershik_successor(od: OrderedDiagram, p: TruncatedPath) -> TruncatedPath:
    """The next path in the fiber order sharing a tail with p.

    Flips the first non-maximal edge to the maximal one over the same range
    vertex and replaces everything below by the minimal completion.  Raises
    MaximalWithinDepth when every edge of the truncation is maximal.
    """
    t = _t_of(od)
    labels = _labels(t, p)
    try:
        m = labels.index(0)
    except ValueError:
        raise MaximalWithinDepth(
            f"all {p.depth} edges are maximal within the truncation; "
            "deepen the prefix and retry"
        ) from None
    verts = list(p.vertices)
    verts[m] = verts[m + 1] + t.int_value(m)
    for k in range(m - 1, -1, -1):
        verts[k] = verts[k + 1] - t.int_value(k)
    out = TruncatedPath(vertices=tuple(verts))
    # displacement law: the source moves by exactly L_m
    lm = 2 * t.int_value(m) if m == 0 else 2 * (
        t.int_value(m) - sum(t.int_value(i) for i in range(m))
    )
    assert out.source == p.source + lm
    return out


def vershik_predecessor(od: OrderedDiagram, p: TruncatedPath) -> TruncatedPath:
    """Mirror of the successor: flips the first non-minimal edge down and
    prepends the maximal completion.  Raises MaximalWithinDepth (with a
    minimal-side message) when every edge is minimal."""
    t = _t_of(od)
    labels = _labels(t, p)
    try:
        m = labels.index(1)
    except ValueError:
        raise MaximalWithinDepth(
            f"all {p.depth} edges are minimal within the truncation; "
            "deepen the prefix and retry"
        ) from None
    verts = list(p.vertices)
    verts[m] = verts[m + 1] - t.int_value(m)
    for k in range(m - 1, -1, -1):
        verts[k] = verts[k + 1] + t.int_value(k)
    return TruncatedPath(vertices=tuple(verts))


def random_path(
    od: OrderedDiagram, i: int, depth: int, rng: random.Random
) -> TruncatedPath:
    if depth < 1:
        raise ParamOutOfRange(f"depth must be >= 1, got {depth}")
    return path_from_labels(od, i, [rng.randint(0, 1) for _ in range(depth)])


def orbit_sources(
    od: OrderedDiagram, p: TruncatedPath, k_max: int
) -> Tuple[int, ...]:
    """Sources visited by up to k_max successor steps; stops early when the
    truncation runs out of non-maximal edges."""
    out = [p.source]
    cur = p
    for _ in range(k_max):
        try:
            cur = vershik_successor(od, cur)
        except MaximalWithinDepth:
            break
        out.append(cur.source)
    return tuple(out)


# --------------------------------------------------------------------------
# displacement sequence and wandering certificates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LSequence:
    """Exact step displacements L_0 .. L_N of the level-0 source."""

    values: Tuple[int, ...]

    def value(self, n: int) -> int:
        if not 0 <= n < len(self.values):
            raise ParamOutOfRange(f"L_{n} not computed (have 0..{len(self.values) - 1})")
        return self.values[n]


def l_sequence(t: Seq, n_max: int) -> LSequence:
    if n_max < 0:
        raise ParamOutOfRange(f"need N >= 0, got {n_max}")
    if not t.positive_everywhere():
        raise InvalidFamilyParams("window radii must be positive")
    vals = []
    total = 0
    for n in range(n_max + 1):
        tn = t.int_value(n)
        vals.append(2 * tn if n == 0 else 2 * (tn - total))
        total += tn
    return LSequence(values=tuple(vals))


def _positive_globally(t: Seq, probe: int = 64) -> bool:
    """Certify L_n > 0 for every n: explicit check over an initial stretch,
    then induction once the descriptor doubles at each step (a geometric
    core with ratio >= 2 keeps the partial sum below the next term)."""
    if not t.positive_everywhere():
        return False
    total = 0
    horizon = t.prefix_length() + probe
    for n in range(horizon):
        tn = t.int_value(n)
        if n > 0 and tn <= total:
            return False
        if n >= t.prefix_length():
            core = t.shifted_core(n)
            if core.kind == "geometric" and core.ratio >= 2:
                return True
        total += tn
    return False


@dataclass(frozen=True)
class WanderingCertificate:
    """Outcome of the no-invariant-probability-measure certificate.

    certified=True: every finite combination of step displacements is
    provably nonzero, so every source cylinder wanders.  certified=False
    carries either a vanishing multiset witness ((level, L, count), ...) or
    the reason the bounded search could not decide.
    """

    certified: bool
    reason: str
    witness: Optional[Tuple[Tuple[int, int, int], ...]] = None
    l_values: Tuple[int, ...] = ()


def wandering_certificate(t: Seq, n_max: int) -> WanderingCertificate:
    if n_max < 0:
        raise ParamOutOfRange(f"need N >= 0, got {n_max}")
    searched_n = min(n_max, _SEARCH_N_CAP)
    ls = l_sequence(t, searched_n).values
    if _positive_globally(t):
        return WanderingCertificate(
            certified=True,
            reason=(
                "every step displacement is positive for the whole family, "
                "so no finite combination of displacements vanishes"
            ),
            l_values=ls,
        )
    if any(abs(x) > _SEARCH_VALUE_CAP for x in ls):
        return WanderingCertificate(
            certified=False,
            reason="displacement magnitude exceeds the search cap",
            l_values=ls,
        )

    # bounded knapsack over multisets: each L_n used at most _SEARCH_REP_CAP
    # times; states deduplicate on the running sum
    reach: Dict[int, Tuple[Tuple[int, int, int], ...]] = {0: ()}
    for idx, val in enumerate(ls):
        snapshot = list(reach.items())
        for base_sum, wit in snapshot:
            for c in range(1, _SEARCH_REP_CAP + 1):
                s = base_sum + c * val
                cand = wit + ((idx, val, c),)
                if s == 0:
                    return WanderingCertificate(
                        certified=False,
                        reason="a vanishing multiset of displacements exists",
                        witness=cand,
                        l_values=ls,
                    )
                if s not in reach:
                    reach[s] = cand
                if len(reach) > _SEARCH_STATE_CAP:
                    return WanderingCertificate(
                        certified=False,
                        reason="search state cap reached before a decision",
                        l_values=ls,
                    )
    if n_max > _SEARCH_N_CAP:
        return WanderingCertificate(
            certified=False,
            reason=(
                f"no vanishing multiset among L_0..L_{searched_n}, but the "
                "requested range exceeds the search cap"
            ),
            l_values=ls,
        )
    return WanderingCertificate(
        certified=False,
        reason=(
            "no vanishing multiset found within the bounded search; the "
            "global condition remains unverified"
        ),
        l_values=ls,
    )


# --------------------------------------------------------------------------
# sampled checks
# --------------------------------------------------------------------------


def _sample_rng(seed: int, k: int) -> random.Random:
    # per-sample derivation keeps results independent of evaluation order
    return random.Random(seed * 1_000_003 + k)


def source_shift_check(
    t: Seq,
    i: int,
    samples: int = 200,
    depth: int = 12,
    seed: int = 0,
) -> bool:
    """True iff every sampled non-maximal prefix from source i has its
    successor source at i + 2."""
    od = make_ordered(make_two_edge_diagram(t))
    checked = 0
    for k in range(samples):
        rng = _sample_rng(seed, k)
        p = random_path(od, i, depth, rng)
        try:
            q = vershik_successor(od, p)
        except MaximalWithinDepth:
            continue
        checked += 1
        if q.source != i + 2:
            return False
    return checked > 0


def empirical_wandering(
    od: OrderedDiagram,
    i: int,
    k_max: int,
    depth: int,
    samples: int,
    seed: int = 0,
    stats: Optional[Dict[str, int]] = None,
) -> bool:
    """True iff no sampled orbit from source i returns to i within k_max
    successor steps at this truncation depth.  Samples that exhaust their
    truncation are skipped and counted in ``stats``."""
    if k_max < 1:
        raise ParamOutOfRange(f"need k_max >= 1, got {k_max}")
    skipped = 0
    returned = 0
    for k in range(samples):
        rng = _sample_rng(seed, k)
        p = random_path(od, i, depth, rng)
        cur = p
        for _ in range(k_max):
            try:
                cur = vershik_successor(od, cur)
            except MaximalWithinDepth:
                skipped += 1
                break
            if cur.source == i:
                returned += 1
                break
        if returned:
            break
    if stats is not None:
        stats["skipped"] = skipped
        stats["returned"] = returned
        stats["samples"] = samples
    return returned == 0

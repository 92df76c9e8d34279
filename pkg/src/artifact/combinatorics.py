"""Exact tower heights, path enumeration, and stochastic incidence rows.

Heights satisfy the upward recursion: the height of a range vertex is the
incidence-weighted sum of the heights one level down, starting from the
all-ones vector at level 0.  Everything here is big-integer exact; the
enumeration oracle recounts paths edge by edge so the two routes are
independent of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .diagram import Diagram
from .errors import DepthCapExceeded, VertexOutOfSet, WindowTooSmall

__all__ = [
    "HeightVector",
    "FinitePath",
    "CylinderSpec",
    "heights",
    "source_windows",
    "enumerate_paths",
    "stochastic_row",
    "height_oracle",
    "height_rows",
]

DEFAULT_DEPTH_CAP = 8


@dataclass(frozen=True)
class HeightVector:
    """Exact heights H^(n) on a finite vertex window of level n."""

    level: int
    window: Tuple[int, int]
    values: Mapping[int, int]

    def value(self, v: int) -> int:
        try:
            return self.values[v]
        except KeyError:
            raise WindowTooSmall(
                f"height window {self.window} at level {self.level} misses vertex {v}"
            ) from None

    def covers(self, v: int) -> bool:
        return v in self.values


@dataclass(frozen=True)
class FinitePath:
    """A finite edge path; edges are (level, source, range, edge index)."""

    edges: Tuple[Tuple[int, int, int, int], ...]
    source: int
    range: int

    def __post_init__(self) -> None:
        for (lv, _, r, _), (lw, s, _, _) in zip(self.edges, self.edges[1:]):
            if lw != lv + 1 or s != r:
                raise VertexOutOfSet(f"edges do not concatenate: {self.edges}")

    @property
    def start_level(self) -> int:
        return self.edges[0][0] if self.edges else 0

    @property
    def end_level(self) -> int:
        return self.edges[-1][0] + 1 if self.edges else self.start_level

    def vertices(self) -> Tuple[int, ...]:
        if not self.edges:
            return (self.source,)
        return (self.source,) + tuple(e[2] for e in self.edges)


@dataclass(frozen=True)
class CylinderSpec:
    """The set of infinite paths extending a fixed finite path."""

    path: FinitePath

    @property
    def start_level(self) -> int:
        return self.path.start_level

    @property
    def end_level(self) -> int:
        return self.path.end_level


def source_windows(
    d: Diagram, n: int, window: Tuple[int, int]
) -> List[Tuple[int, int]]:
    """Interval hulls of the vertices each level must supply so that heights
    of `window` at level n are exact; entry k of the result is for level k."""
    lo, hi = window
    out = [(lo, hi)]
    cur = d.vertex_set(n).clamp(lo, hi)
    for k in range(n, 0, -1):
        lvl = d.level(k - 1)
        slo, shi = None, None
        for v in cur:
            for w, _ in lvl.row_support(v):
                if slo is None or w < slo:
                    slo = w
                if shi is None or w > shi:
                    shi = w
        if slo is None:
            raise WindowTooSmall(
                f"window {window} at level {n} is empty by level {k}"
            )
        out.append((slo, shi))
        cur = lvl.source_set.clamp(slo, shi)
    out.reverse()
    return out


def heights(
    d: Diagram,
    n: int,
    window: Tuple[int, int],
    level0_window: Optional[Tuple[int, int]] = None,
) -> HeightVector:
    """Exact heights H^(n) for every vertex of the window.

    When a level-0 window is supplied the cone of the request must fit in
    it; otherwise the needed level-0 stretch is derived automatically.
    """
    vs = d.vertex_set(n)
    req = vs.clamp(*window)
    if n == 0:
        return HeightVector(level=0, window=window, values={v: 1 for v in req})
    plan = source_windows(d, n, window)
    base_lo, base_hi = plan[0]
    if level0_window is not None:
        alo, ahi = level0_window
        need = d.vertex_set(0).clamp(base_lo, base_hi)
        if need and (need[0] < alo or need[-1] > ahi):
            raise WindowTooSmall(
                f"cone of {window} at level {n} needs level-0 vertices "
                f"[{need[0]},{need[-1]}], outside [{alo},{ahi}]"
            )
    cur: Dict[int, int] = {v: 1 for v in d.vertex_set(0).clamp(base_lo, base_hi)}
    for k in range(1, n + 1):
        lvl = d.level(k - 1)
        nxt: Dict[int, int] = {}
        for v in d.vertex_set(k).clamp(*plan[k]):
            total = 0
            for w, c in lvl.row_support(v):
                hw = cur.get(w)
                if hw is None:
                    # support fell outside the planned hull: only possible
                    # when the source set clipped it, i.e. w is not a vertex
                    if lvl.source_set.contains(w):
                        raise WindowTooSmall(
                            f"internal window at level {k - 1} misses vertex {w}"
                        )
                    continue
                total += c * hw
            nxt[v] = total
        cur = nxt
    return HeightVector(level=n, window=window, values={v: cur[v] for v in req})


def enumerate_paths(
    d: Diagram,
    m: int,
    target: Tuple[int, int],
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> List[FinitePath]:
    """All finite paths from level m into the target (level, vertex).

    Paths are produced in the canonical order: at every level, edge bundles
    are ordered by source vertex, and edges inside a bundle by index.
    """
    n, v = target
    if n - m > depth_cap:
        raise DepthCapExceeded(f"depth {n - m} exceeds cap {depth_cap}")
    if not d.vertex_set(n).contains(v):
        raise VertexOutOfSet(f"target vertex {v} not at level {n}")
    if n == m:
        return [FinitePath(edges=(), source=v, range=v)]
    out: List[FinitePath] = []
    lvl = d.level(n - 1)
    for w, count in sorted(lvl.row_support(v)):
        stems = enumerate_paths(d, m, (n - 1, w), depth_cap)
        for idx in range(count):
            for stem in stems:
                out.append(
                    FinitePath(
                        edges=stem.edges + ((n - 1, w, v, idx),),
                        source=stem.source,
                        range=v,
                    )
                )
    return out


def height_oracle(
    d: Diagram, n: int, v: int, depth_cap: int = DEFAULT_DEPTH_CAP
) -> int:
    """Brute-force path count into (n, v): one edge-walk per labeled edge,
    no window planning and no memoization shared with `heights`."""
    if n > depth_cap:
        raise DepthCapExceeded(f"depth {n} exceeds cap {depth_cap}")
    if not d.vertex_set(n).contains(v):
        raise VertexOutOfSet(f"vertex {v} not at level {n}")

    def walk(level: int, u: int) -> int:
        if level == 0:
            return 1
        total = 0
        for w, count in d.level(level - 1).row_support(u):
            below = walk(level - 1, w)
            for _ in range(count):
                total += below
        return total

    return walk(n, v)


def stochastic_row(
    d: Diagram,
    n: int,
    v: int,
    heights_n: HeightVector,
    heights_n1: HeightVector,
) -> List[Tuple[int, Fraction]]:
    """Row v of the stochastic matrix: q_{v,w} = f_{v,w} H_w^(n) / H_v^(n+1).

    Exact rationals; the row sums to exactly 1 by the height recursion.
    """
    if heights_n.level != n or heights_n1.level != n + 1:
        raise WindowTooSmall(
            f"need heights at levels {n} and {n + 1}, got "
            f"{heights_n.level} and {heights_n1.level}"
        )
    lvl = d.level(n)
    if not lvl.range_set.contains(v):
        raise VertexOutOfSet(f"range vertex {v} not at level {n + 1}")
    hv = heights_n1.value(v)
    row = []
    for w, c in sorted(lvl.row_support(v)):
        row.append((w, Fraction(c * heights_n.value(w), hv)))
    return row


def height_rows(hv: HeightVector) -> List[Tuple[int, int, int]]:
    """(level, vertex, height) triples, ready for the CSV emitter."""
    return [(hv.level, v, h) for v, h in sorted(hv.values.items())]

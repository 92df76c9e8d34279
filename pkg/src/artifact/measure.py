"""Tail-invariant measures: representation, evaluation, verification.

A tail-invariant measure is presented by its p-vectors: ``p_v^(n)`` is the
common measure of every cylinder that runs from level 0 into vertex ``v`` at
level ``n``.  The defining relation transports level ``n+1`` values down one
level through the transposed incidence matrix.  Three presentations are
supported: explicit windowed p-vectors with geometric tails, a stationary
eigen pair ``p = xi / lambda^n``, and the product formula of an odometer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

from .combinatorics import CylinderSpec, HeightVector, heights
from .descriptors import Seq
from .diagram import ColumnSpec, Diagram
from .errors import (
    MissingTailDescriptor,
    OutsideSupport,
    ParamOutOfRange,
    WindowTooSmall,
)

__all__ = [
    "VertexFunction",
    "PVectors",
    "StationaryEigen",
    "OdometerProduct",
    "MeasureSpec",
    "CylinderMeasure",
    "p_value",
    "p_function",
    "cylinder_measure",
    "tower_measure",
    "level_mass",
    "verify_tail_invariance",
    "triangular_family_measure",
    "p_rows",
]

Number = Union[Fraction, float]


def _is_exact(x: Number) -> bool:
    return isinstance(x, Rational)


# --------------------------------------------------------------------------
# vertex functions with geometric tails
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexFunction:
    """A vertex-indexed function: explicit window plus geometric tails.

    ``right_tail = (anchor, ratio)`` continues the value at the anchor
    geometrically upward: f(v) = f(anchor) * ratio^(v-anchor) for v >= anchor;
    the anchor must be the largest explicit vertex.  ``left_tail`` mirrors it
    downward from the smallest explicit vertex.
    """

    values: Mapping[int, Number]
    right_tail: Optional[Tuple[int, Number]] = None
    left_tail: Optional[Tuple[int, Number]] = None

    def __post_init__(self) -> None:
        if not self.values:
            raise OutsideSupport("a vertex function needs at least one value")
        if self.right_tail is not None and self.right_tail[0] != max(self.values):
            raise MissingTailDescriptor(
                "right tail must anchor at the largest explicit vertex"
            )
        if self.left_tail is not None and self.left_tail[0] != min(self.values):
            raise MissingTailDescriptor(
                "left tail must anchor at the smallest explicit vertex"
            )

    def covers(self, v: int) -> bool:
        if v in self.values:
            return True
        if self.right_tail is not None and v >= self.right_tail[0]:
            return True
        return self.left_tail is not None and v <= self.left_tail[0]

    def value(self, v: int) -> Number:
        got = self.values.get(v)
        if got is not None:
            return got
        if self.right_tail is not None and v > self.right_tail[0]:
            anchor, ratio = self.right_tail
            return self.values[anchor] * ratio ** (v - anchor)
        if self.left_tail is not None and v < self.left_tail[0]:
            anchor, ratio = self.left_tail
            return self.values[anchor] * ratio ** (anchor - v)
        raise MissingTailDescriptor(f"no value or tail covers vertex {v}")

    def scale(self, factor: Number) -> "VertexFunction":
        return replace(
            self, values={v: x * factor for v, x in self.values.items()}
        )

    def total(self, set_lo: Optional[int] = None) -> Optional[Number]:
        """Sum over all covered vertices >= set_lo (all, when None).

        Returns None when a tail fails to converge.
        """
        keys = [v for v in self.values if set_lo is None or v >= set_lo]
        out = sum((self.values[v] for v in keys), Fraction(0))
        if self.right_tail is not None:
            anchor, ratio = self.right_tail
            if not (0 <= ratio < 1):
                return None
            out += self.values[anchor] * ratio / (1 - ratio)
        if self.left_tail is not None:
            anchor, ratio = self.left_tail
            if set_lo is None:
                if not (0 <= ratio < 1):
                    return None
                out += self.values[anchor] * ratio / (1 - ratio)
            elif anchor > set_lo:
                # finitely many tail values between set_lo and the window
                out = sum(
                    (self.value(v) for v in range(set_lo, anchor)), out
                )
        return out


# --------------------------------------------------------------------------
# measure presentations
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PVectors:
    """Explicit p-vectors per level, exact rationals on windows with tails."""

    level_fn: Callable[[int], VertexFunction] = field(repr=False)
    total_mass: Optional[Number] = None
    name: str = "p-vectors"


@dataclass(frozen=True, eq=False)
class StationaryEigen:
    """Stationary presentation p_v^(n) = xi_v / lambda^n, optionally divided
    by the mass normalizer sigma when `probability` is set."""

    lam: Number
    xi: VertexFunction
    sigma: Optional[Number] = None  # None: infinite (or undeclared) mass
    probability: bool = False
    name: str = "stationary-eigen"

    def __post_init__(self) -> None:
        if self.probability and self.sigma is None:
            raise ParamOutOfRange("probability normalization needs a finite sigma")


@dataclass(frozen=True, eq=False)
class OdometerProduct:
    """Odometer measure: the single cylinder down to level n has measure
    1/(a_0 ... a_{n-1}); supported on the base vertex path only."""

    a: Seq
    base: Callable[[int], int] = field(default=lambda n: 0, repr=False)
    name: str = "odometer-product"


MeasureSpec = Union[PVectors, StationaryEigen, OdometerProduct]


@dataclass(frozen=True)
class CylinderMeasure:
    """A cylinder's measure; exact when computed in rational arithmetic."""

    value: Number
    exact: bool

    def __post_init__(self) -> None:
        if self.value < 0:
            raise OutsideSupport(f"negative cylinder measure {self.value}")


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def _pow(lam: Number, n: int) -> Number:
    return lam**n


def p_function(m: MeasureSpec, n: int) -> VertexFunction:
    """The level-n p-vector of the spec as a vertex function."""
    if isinstance(m, PVectors):
        return m.level_fn(n)
    if isinstance(m, StationaryEigen):
        denom = _pow(m.lam, n)
        if m.probability:
            denom = denom * m.sigma
        if isinstance(denom, Rational):
            factor: Number = Fraction(1, 1) / denom
        else:
            factor = 1.0 / denom
        return m.xi.scale(factor)
    if isinstance(m, OdometerProduct):
        prod = Fraction(1)
        for i in range(n):
            prod *= m.a.value(i)
        return VertexFunction(values={m.base(n): Fraction(1) / prod})
    raise TypeError(f"not a measure spec: {m!r}")


def p_value(m: MeasureSpec, n: int, v: int) -> Number:
    """p_v^(n); raises OutsideSupport off an odometer's base path."""
    if isinstance(m, OdometerProduct):
        if v != m.base(n):
            raise OutsideSupport(
                f"vertex {v} is off the odometer base path at level {n}"
            )
    fn = p_function(m, n)
    return fn.value(v)


def cylinder_measure(
    m: MeasureSpec, c: CylinderSpec, d: Optional[Diagram] = None
) -> CylinderMeasure:
    """Measure of the cylinder: p at the range vertex, times the number of
    ways to extend the path down to level 0 when it starts higher up."""
    path = c.path
    if isinstance(m, OdometerProduct):
        for level, vertex in zip(
            range(path.start_level, path.end_level + 1), path.vertices()
        ):
            if vertex != m.base(level):
                raise OutsideSupport(
                    f"cylinder leaves the odometer base path at level {level}"
                )
    value = p_value(m, path.end_level, path.range)
    exact = _is_exact(value)
    if path.start_level > 0:
        if d is None:
            raise WindowTooSmall(
                "a cylinder starting above level 0 needs the diagram for its"
                " extension count"
            )
        h = heights(d, path.start_level, (path.source, path.source))
        value = value * h.value(path.source)
    return CylinderMeasure(value=value, exact=exact)


def tower_measure(
    m: MeasureSpec, d: Diagram, n: int, v: int, hv: HeightVector
) -> Number:
    """Mass of the tower over vertex v at level n: H_v^(n) * p_v^(n)."""
    if hv.level != n:
        raise WindowTooSmall(f"height vector is for level {hv.level}, not {n}")
    h = hv.value(v)
    try:
        p = p_value(m, n, v)
    except OutsideSupport:
        return Fraction(0)
    return h * p


def level_mass(
    m: MeasureSpec, d: Diagram, n: int, window: Optional[Tuple[int, int]] = None
) -> Tuple[Number, bool]:
    """Total tower mass at level n: (value, complete).

    complete=True means the value covers the entire level exactly (finite
    vertex set, or constant heights with summable p-tails).  Otherwise the
    value is the window sum only.
    """
    vs = d.vertex_set(n)
    pfn = p_function(m, n)
    if isinstance(m, OdometerProduct):
        base = m.base(n)
        if n == 0:
            return (Fraction(1), True)
        hv = heights(d, n, (base, base))
        return (hv.value(base) * pfn.value(base), True)
    if n == 0 and not vs.is_finite:
        set_lo = vs.start if vs.kind == "naturals" else None
        ptotal = pfn.total(set_lo)
        if ptotal is not None:
            return (ptotal, True)
    if vs.is_finite:
        hv = heights(d, n, (vs.lo, vs.hi))
        total = sum(
            (hv.value(v) * pfn.value(v) for v in vs.vertices() if pfn.covers(v)),
            Fraction(0),
        )
        return (total, True)
    # infinite level: constant heights let the p-tails carry the sum
    if d.ers_seq is not None or all(
        d.level(i).ers is not None for i in range(max(n, 1))
    ):
        anchor = min(pfn.values)
        hv = heights(d, n, (anchor, anchor))
        h = hv.value(anchor)
        set_lo = None
        if vs.kind == "naturals":
            set_lo = vs.start
        ptotal = pfn.total(set_lo)
        if ptotal is not None:
            return (h * ptotal, True)
    if window is None:
        raise WindowTooSmall(
            "level mass over an infinite level needs a window when heights vary"
        )
    lo, hi = window
    verts = vs.clamp(lo, hi)
    hv = heights(d, n, (lo, hi))
    total = sum(
        (hv.value(v) * pfn.value(v) for v in verts if pfn.covers(v)), Fraction(0)
    )
    return (total, False)


# --------------------------------------------------------------------------
# tail invariance
# --------------------------------------------------------------------------


def _tail_dot(
    col_tail: Tuple[int, Seq], pfn: VertexFunction
) -> Number:
    """Sum of mult(v) * p(v) over the column's infinite tail v >= start."""
    start, mult = col_tail
    if mult.kind not in ("constant", "geometric"):
        raise MissingTailDescriptor(
            f"column tail of kind {mult.kind!r} is outside the closed-form algebra"
        )
    m_ratio = Fraction(1) if mult.kind == "constant" else mult.ratio
    m0 = mult.value(0)
    # walk explicitly until the p-function is in its own right tail
    if pfn.right_tail is None:
        raise MissingTailDescriptor(
            "infinite column needs a right tail on the p-vector"
        )
    p_anchor, p_ratio = pfn.right_tail
    head = Fraction(0)
    v = start
    while v <= p_anchor:
        head += mult.value(v - start) * pfn.value(v)
        v += 1
    ratio = m_ratio * p_ratio
    if not (0 <= ratio < 1):
        raise MissingTailDescriptor(
            f"column tail dot product has ratio {ratio} >= 1, no closed form"
        )
    first = mult.value(v - start) * pfn.value(v)
    return head + first / (1 - ratio)


def verify_tail_invariance(
    m: MeasureSpec, d: Diagram, n: int, window: Tuple[int, int]
) -> Number:
    """Max residual of the transport relation over source vertices in the
    window: |sum_v f_{v,w} p_v^(n+1) - p_w^(n)|.

    Exactly 0 for rational closed-form specs; small for float eigen specs.
    """
    lvl = d.level(n)
    p_lo = p_function(m, n)
    p_hi = p_function(m, n + 1)
    worst: Number = Fraction(0)
    for w in lvl.source_set.clamp(*window):
        if not p_lo.covers(w):
            if isinstance(m, OdometerProduct):
                continue
            raise MissingTailDescriptor(f"p^({n}) does not cover vertex {w}")
        spec: ColumnSpec = lvl.col_spec(w)
        acc: Number = Fraction(0)
        for v, count in spec.entries:
            if isinstance(m, OdometerProduct) and v != m.base(n + 1):
                continue
            acc += count * p_hi.value(v)
        if spec.tail is not None:
            acc += _tail_dot(spec.tail, p_hi)
        residual = abs(acc - p_lo.value(w))
        if residual > worst:
            worst = residual
    return worst


# --------------------------------------------------------------------------
# the triangular measure family
# --------------------------------------------------------------------------


def triangular_family_measure(a: Union[Fraction, int, str]) -> PVectors:
    """The lower-triangular diagram's measure with parameter 0 < a < 1:
    p_i^(n) = (a/(1+a))^(i-1) * (1+a)^(-n) on vertices i >= 1.

    The exact level mass (heights included) is 1 + a at every level; use
    ``normalized_copy`` for the probability rescaling.
    """
    a = Fraction(a)
    if not (0 < a < 1):
        raise ParamOutOfRange(f"need 0 < a < 1, got {a}")
    x = a / (1 + a)

    def level(n: int) -> VertexFunction:
        first = Fraction(1) / (1 + a) ** n
        return VertexFunction(values={1: first}, right_tail=(1, x))

    return PVectors(level_fn=level, total_mass=1 + a, name=f"triangular[a={a}]")


def normalized_copy(m: PVectors) -> PVectors:
    """Scale a PVectors spec by 1/total_mass so the level mass is exactly 1."""
    if m.total_mass is None:
        raise MissingTailDescriptor("total mass unknown; cannot normalize")
    factor = Fraction(1) / m.total_mass

    def level(n: int, _inner=m.level_fn) -> VertexFunction:
        return _inner(n).scale(factor)

    return PVectors(level_fn=level, total_mass=Fraction(1), name=f"{m.name}/normalized")


def p_rows(m: MeasureSpec, n: int, window: Tuple[int, int]):
    """(level, vertex, p) triples over the window, for the CSV emitter."""
    fn = p_function(m, n)
    out = []
    for v in range(window[0], window[1] + 1):
        if fn.covers(v):
            out.append((n, v, fn.value(v)))
    return out

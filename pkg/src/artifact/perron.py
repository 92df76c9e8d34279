"""Dominant eigenpairs of nonnegative matrices and their truncations.

Finite matrices get a deterministic power iteration (all-ones start,
renormalized by the first coordinate, so the gauge is xi_1 = 1).  Infinite
age-structured matrices get closed forms: the dominant rate solves
``p(lambda) = 1`` for the generating series of one-generation returns, and
the eigenvector is the explicit product formula.  Corner truncations give a
nondecreasing sequence of rates converging upward to the infinite rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .descriptors import Seq
from .diagram import Diagram
from .errors import (
    BracketFailure,
    NoConvergence,
    NoFiniteLambda,
    NotAperiodic,
    NotIrreducible,
    WindowOverflow,
)
from .measure import StationaryEigen, VertexFunction

__all__ = [
    "Eigenpair",
    "TruncationSequence",
    "RecurrenceClass",
    "LeslieAccessor",
    "LeslieEigenvector",
    "perron_finite",
    "truncation_sequence",
    "leslie_lambda",
    "leslie_p_value",
    "leslie_eigenvector",
    "classify_recurrence",
    "stationary_measure",
]

Number = Union[Fraction, float]

_SIZE_CAP = 512
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6


@dataclass(frozen=True)
class Eigenpair:
    """Dominant eigen data for a finite matrix, in the xi_1 = 1 gauge."""

    lam: float
    xi: Dict[int, float]  # 1-based vertex -> value
    residual: float
    iterations: int


@dataclass(frozen=True)
class TruncationSequence:
    """(k, eigenpair) along nested principal corners; rates nondecreasing."""

    items: Tuple[Tuple[int, Eigenpair], ...]

    def lambdas(self) -> List[float]:
        return [e.lam for _, e in self.items]


@dataclass(frozen=True)
class RecurrenceClass:
    verdict: str  # "Recurrent" | "Transient" | "Inconclusive"
    partial_sums: Tuple[Number, ...]
    certificate: str = ""


# --------------------------------------------------------------------------
# finite power iteration
# --------------------------------------------------------------------------


def _check_square(M: Sequence[Sequence[int]]) -> int:
    k = len(M)
    if k == 0 or any(len(row) != k for row in M):
        raise NotIrreducible("matrix must be square and nonempty")
    if k > _SIZE_CAP:
        raise WindowOverflow(f"matrix size {k} exceeds the {_SIZE_CAP} cap")
    for row in M:
        for x in row:
            if x < 0:
                raise NotIrreducible(f"negative entry {x}")
    return k


def _reach(adj: List[List[int]], start: int) -> List[int]:
    """BFS distances from start; -1 marks unreachable."""
    dist = [-1] * len(adj)
    dist[start] = 0
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def _check_primitive(M: Sequence[Sequence[int]]) -> None:
    k = len(M)
    fwd = [[j for j in range(k) if M[i][j] > 0] for i in range(k)]
    bwd = [[i for i in range(k) if M[i][j] > 0] for j in range(k)]
    d_fwd = _reach(fwd, 0)
    d_bwd = _reach(bwd, 0)
    if any(x < 0 for x in d_fwd) or any(x < 0 for x in d_bwd):
        raise NotIrreducible("matrix graph is not strongly connected")
    g = 0
    for u in range(k):
        for v in fwd[u]:
            g = _gcd(g, d_fwd[u] + 1 - d_fwd[v])
    if abs(g) != 1:
        raise NotAperiodic(f"matrix graph has period {abs(g)}")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def perron_finite(
    M: Sequence[Sequence[int]],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Eigenpair:
    """Dominant eigenpair of an irreducible aperiodic nonnegative matrix.

    Deterministic: all-ones start, each step renormalized by the first
    coordinate; stops when both the rate and the vector move less than tol.
    """
    k = _check_square(M)
    _check_primitive(M)
    x = [1.0] * k
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = [sum(M[i][j] * x[j] for j in range(k)) for i in range(k)]
        new_lam = y[0]
        if new_lam <= 0:
            raise NoConvergence("first coordinate collapsed to zero")
        new_x = [yi / new_lam for yi in y]
        delta = max(abs(new_lam - lam), max(abs(a - b) for a, b in zip(new_x, x)))
        x, lam = new_x, new_lam
        if delta < tol:
            resid = max(
                abs(sum(M[i][j] * x[j] for j in range(k)) - lam * x[i])
                for i in range(k)
            )
            return Eigenpair(
                lam=lam,
                xi={i + 1: x[i] for i in range(k)},
                residual=resid,
                iterations=it,
            )
    raise NoConvergence(f"no convergence within {max_iter} iterations")


# --------------------------------------------------------------------------
# age-structured (Leslie) matrices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LeslieAccessor:
    """The infinite matrix with first row b_1, b_2, ... and subdiagonal
    s_1, s_2, ...; indices are 1-based ages."""

    b: Seq
    s: Seq

    def entry(self, i: int, j: int) -> int:
        if i == 1:
            return self.b.int_value(j - 1)
        if i == j + 1:
            return self.s.int_value(j - 1)
        return 0

    def corner(self, k: int) -> List[List[int]]:
        return [[self.entry(i, j) for j in range(1, k + 1)] for i in range(1, k + 1)]


def truncation_sequence(A, ks: Sequence[int]) -> TruncationSequence:
    """Eigenpairs of the k x k principal corners for each requested k."""
    items: List[Tuple[int, Eigenpair]] = []
    prev = None
    for k in ks:
        pair = perron_finite(A.corner(k))
        if prev is not None and pair.lam < prev - 1e-12:
            raise NoConvergence(
                f"corner rate decreased: lambda_{k} = {pair.lam} < {prev}"
            )
        items.append((k, pair))
        prev = pair.lam
    return TruncationSequence(items=tuple(items))


def _limsup_growth(b: Seq, s: Seq) -> Optional[Fraction]:
    """limsup of b_{i+1} s_i / b_i, or None when it is infinite."""
    b_core = b.shifted_core(b.prefix_length())
    s_core = s.shifted_core(s.prefix_length())
    if b_core.kind == "constant" or b_core.kind == "polynomial":
        rb = Fraction(1)
    elif b_core.kind == "geometric":
        rb = b_core.ratio
    else:
        return None
    if s_core.kind == "constant":
        sl = s_core.const
    elif s_core.kind == "geometric":
        if s_core.ratio > 1:
            return None
        sl = s_core.coeff if s_core.ratio == 1 else Fraction(0)
    elif s_core.kind == "polynomial":
        if len(s_core.poly) > 1:
            return None
        sl = s_core.poly[0]
    else:
        return None
    # the prefix contributes finitely many ratios, irrelevant to the limsup
    return rb * sl


_DIVERGENCE_CAP = 1e3  # any value above this only needs its sign vs 1


def _tail_ratio_start(b: Seq, s: Seq, lam: float) -> Optional[Tuple[int, float]]:
    """(i2, q) with term_{i+1}/term_i <= q < 1 for every age i >= i2.

    The term ratio is b_{i+1} s_i / (b_i lam).  Returns None when the
    descriptors do not admit such a certificate (caller falls back to the
    divergence cap / zero-core exits)."""
    from .descriptors import _poly_positive_from, _poly_shift

    pb, ps = b.prefix_length(), s.prefix_length()
    base = max(pb, ps) + 1
    bc = b.shifted_core(pb)
    sc = s.shifted_core(ps)
    if bc.kind == "constant" and bc.const == 0:
        return None  # finite sum, handled by the zero-term exit
    if sc.kind == "geometric" and sc.ratio >= 1:
        return None
    if sc.kind == "polynomial" and len(sc.poly) > 1:
        return None
    if sc.kind not in ("constant", "geometric"):
        return None
    lam_q = Fraction(lam)  # exact binary value of the float
    if bc.kind in ("constant", "geometric"):
        rho_b = Fraction(1) if bc.kind == "constant" else bc.ratio
        if sc.kind == "constant":
            r = rho_b * sc.const / lam_q
            if r >= 1:
                return None
            return (base, float(r))
        # s decays geometrically: ratio r_i = rho_b * s_i / lam, with
        # constant decay factor rho_b-independent rho_s < 1
        i = base
        for _ in range(4096):
            r = rho_b * Fraction(s.value(i - 1)) / lam_q
            if r < 1 and rho_b * sc.ratio <= 1:
                return (i, float(max(r, Fraction(1, 2))))
            i += 1
        return None
    if bc.kind == "polynomial" and sc.kind == "constant":
        q = (sc.const / lam_q + 1) / 2
        if q >= 1:
            return None
        # need s * p(n+1) <= q lam p(n) from some core index on
        p0 = list(bc.poly)
        p1 = _poly_shift(p0, 1)
        cond = [q * lam_q * a for a in p0]
        while len(cond) < len(p1):
            cond.append(Fraction(0))
        for k, a in enumerate(p1):
            cond[k] -= sc.const * a
        n0 = _poly_positive_from(cond)
        if n0 is None:
            return None
        return (max(base, pb + n0 + 1), float(q))
    return None


def leslie_p_value(b: Seq, s: Seq, lam: float, rel_tail: float = 1e-15) -> float:
    """The return series p(lambda) = sum_i b_i s_1...s_{i-1} / lambda^i.

    Summed until a certified geometric tail is below rel_tail, the terms
    vanish identically (zero descriptor core), or the running total passes
    the divergence cap (then only the comparison with 1 is meaningful)."""
    lam_f = float(lam)
    if lam_f <= 0:
        raise BracketFailure("rate must be positive")
    cert = _tail_ratio_start(b, s, lam_f)
    pb, ps = b.prefix_length(), s.prefix_length()
    bc = b.shifted_core(pb)
    sc = s.shifted_core(ps)
    b_core_zero = bc.kind == "constant" and bc.const == 0
    s_core_zero = sc.kind == "constant" and sc.const == 0
    lam_q = Fraction(lam_f)
    surv = Fraction(1)  # s_1 ... s_{i-1}, exact; only used near restarts
    total = 0.0
    t: Optional[float] = None
    for i in range(1, 10**6 + 1):
        bi = b.value(i - 1)
        if t is None:
            # direct evaluation; only happens at the start and after a zero
            t = float(Fraction(bi) * surv / lam_q**i)
        total += t
        if total > _DIVERGENCE_CAP:
            return total
        if b_core_zero and i > pb:
            return total  # all later terms vanish
        if t == 0.0 and s_core_zero and i > ps + 1:
            return total
        si = s.value(i - 1)
        if bi != 0:
            nxt: Optional[float] = t * float(Fraction(b.value(i)) * si / bi) / lam_f
        else:
            nxt = None
        if cert is not None and i >= cert[0] and t > 0 and nxt is not None:
            tail = nxt / (1 - cert[1])
            if tail <= rel_tail * max(total, 1.0):
                return total + tail
        if i <= pb + 2:
            surv = surv * si  # restarts can only happen inside the prefix
        t = nxt
    raise BracketFailure("return series did not enter a certified tail")


def leslie_lambda(b: Seq, s: Seq, tol: float = 1e-12) -> float:
    """Dominant rate: the unique root of p(lambda) = 1 above the growth bound.

    Bisection on (L(1+delta), hi], doubling hi from L+1 until the series
    value drops below 1.
    """
    L = _limsup_growth(b, s)
    if L is None:
        raise NoFiniteLambda("growth of b_{i+1} s_i / b_i is unbounded")
    lo = float(L) * (1 + 1e-9) if L > 0 else 1e-9
    hi = float(L) + 1.0
    cap = 2.0**60
    while True:
        try:
            if leslie_p_value(b, s, hi) < 1:
                break
        except BracketFailure:
            pass
        hi *= 2
        if hi > cap:
            raise BracketFailure(f"no upper bracket below {cap}")
    p_lo = leslie_p_value(b, s, lo)
    if p_lo < 1:
        raise BracketFailure(
            f"series value {p_lo} at the lower bracket is already below 1"
        )
    for _ in range(20000):
        mid = 0.5 * (lo + hi)
        p_mid = leslie_p_value(b, s, mid)
        if abs(p_mid - 1) <= tol:
            return mid
        if p_mid > 1:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-300:
            break
    raise NoConvergence(f"bisection stalled on [{lo}, {hi}]")


@dataclass(frozen=True)
class LeslieEigenvector:
    """xi_i = s_1...s_{i-1} / lambda^(i-1) on a 1-based window."""

    xi: VertexFunction
    sigma: Optional[Number]
    divergent: bool


def leslie_eigenvector(
    lam: Number, s: Seq, window: int
) -> LeslieEigenvector:
    """Explicit eigenvector values on ages 1..window, geometric tail when the
    survival sequence is constant.  Divergent mass is reported, not raised."""
    exact = isinstance(lam, Rational)
    one: Number = Fraction(1) if exact else 1.0
    values: Dict[int, Number] = {}
    cur = one
    for i in range(1, window + 1):
        values[i] = cur
        cur = cur * s.value(i - 1) / lam
    tail = None
    sigma: Optional[Number] = None
    divergent = False
    if s.kind == "constant":
        ratio = s.const / lam
        if ratio < 1:
            tail = (window, Fraction(ratio) if exact else float(ratio))
            sigma = one / (1 - ratio)
        else:
            divergent = True
    else:
        # no closed form; the window alone cannot settle the mass
        divergent = False
        sigma = None
    xi = VertexFunction(values=values, right_tail=tail)
    return LeslieEigenvector(xi=xi, sigma=sigma, divergent=divergent)


# --------------------------------------------------------------------------
# recurrence classification
# --------------------------------------------------------------------------


def _finite_partial_sums(
    M: Sequence[Sequence[int]], lam: Number, i: int, N: int
) -> List[Number]:
    k = len(M)
    if not (1 <= i <= k):
        raise WindowOverflow(f"index {i} outside the {k} x {k} matrix")
    exact = isinstance(lam, Rational)
    row = [0] * k
    row[i - 1] = 1
    sums: List[Number] = []
    acc: Number = Fraction(0) if exact else 0.0
    power: Number = Fraction(1) if exact else 1.0
    for n in range(N + 1):
        acc = acc + (Fraction(row[i - 1]) / power if exact else row[i - 1] / power)
        sums.append(acc)
        row = [sum(row[u] * M[u][j] for u in range(k)) for j in range(k)]
        power = power * lam
    return sums


def classify_recurrence(
    A, lam: Number, i: int, N: int = 20
) -> RecurrenceClass:
    """Partial sums of (A^n)_{ii} / lambda^n with an analytic verdict when a
    recognizer applies; otherwise Inconclusive with the partial sums."""
    if isinstance(A, LeslieAccessor):
        if A.b.kind == "constant" and A.s.kind == "constant":
            lam_exact = A.b.const + A.s.const
            inner = lam_exact / A.b.const  # 1 + sum (s/lam)^{i-1} summed
            corner = A.corner(N + 2)
            sums = _finite_partial_sums(corner, Fraction(lam_exact), i, N)
            return RecurrenceClass(
                verdict="Recurrent",
                partial_sums=tuple(sums),
                certificate=(
                    "positive recurrent: eigenvector pairing "
                    f"1 + sum (s/lambda)^(i-1) = {inner} is finite"
                ),
            )
        raise WindowOverflow(
            "general age-structured rows cannot be enumerated for powers"
        )
    M = list(A)
    k = _check_square(M)
    sums = _finite_partial_sums(M, lam, i, N)
    if k == 1:
        a = M[0][0]
        if a == lam:
            return RecurrenceClass(
                verdict="Recurrent",
                partial_sums=tuple(sums),
                certificate="terms are constant 1; the series diverges",
            )
        if a < lam:
            value = Fraction(lam, lam - a) if isinstance(lam, Rational) else lam / (lam - a)
            return RecurrenceClass(
                verdict="Transient",
                partial_sums=tuple(sums),
                certificate=f"geometric series with ratio {a}/{lam}, value {value}",
            )
        return RecurrenceClass(
            verdict="Recurrent",
            partial_sums=tuple(sums),
            certificate=f"terms ({a}/{lam})^n grow; the series diverges",
        )
    return RecurrenceClass(verdict="Inconclusive", partial_sums=tuple(sums))


# --------------------------------------------------------------------------
# stationary measures from eigen data
# --------------------------------------------------------------------------


def stationary_measure(
    d: Diagram,
    e: Union[Eigenpair, Tuple[Number, VertexFunction]],
    tol: float = 1e-9,
    window: Optional[Tuple[int, int]] = None,
) -> StationaryEigen:
    """Wrap eigen data as the stationary measure p = xi / lambda^n.

    sigma is the eigenvector mass; when it diverges the spec is returned
    with sigma = None (infinite mass flag) instead of raising.
    """
    from .measure import verify_tail_invariance

    if isinstance(e, Eigenpair):
        lam: Number = e.lam
        xi = VertexFunction(values=dict(e.xi))
    else:
        lam, xi = e
    sigma = xi.total()
    probability = sigma is not None
    spec = StationaryEigen(
        lam=lam, xi=xi, sigma=sigma, probability=probability,
        name=f"stationary[{d.name}]",
    )
    if window is None:
        vs = d.vertex_set(0)
        if vs.is_finite:
            window = (vs.lo, vs.hi)
        elif vs.kind == "naturals":
            window = (vs.start, vs.start + 8)
        else:
            window = (-8, 8)
    resid = verify_tail_invariance(spec, d, 0, window)
    if resid > tol:
        raise NoConvergence(
            f"eigen relation residual {resid} exceeds tolerance {tol}"
        )
    return spec

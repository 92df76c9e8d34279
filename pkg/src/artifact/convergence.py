"""Convergence of measure sequences on cylinder sets.

Three experiment drivers share one report shape: truncation measures along
growing principal corners of a stationary incidence matrix, mass limits for
subprobability (and deliberately non-subprobability) families, and the
rank-2 family whose masses blow up at a harmonic rate while every cylinder
trajectory settles.

A trajectory is "Converged" when its gap is nonincreasing over the last
five sampled indices and the final gap is below the tolerance.  That is
verification at the horizon, not a proof of the limit; the report keeps
the full trajectories so callers can judge for themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .combinatorics import CylinderSpec, FinitePath, enumerate_paths
from .descriptors import Seq
from .diagram import Diagram, FamilySpec, build_family
from .errors import (
    MissingTailDescriptor,
    NoConvergence,
    NotAdmissible,
    OutsideSupport,
    ParamOutOfRange,
    WindowOverflow,
    WindowTooSmall,
)
from .extension import WSpec, extension_p_vectors, make_vertex_subdiagram
from .measure import (
    MeasureSpec,
    Number,
    OdometerProduct,
    PVectors,
    StationaryEigen,
    VertexFunction,
    cylinder_measure,
)
from .perron import (
    Eigenpair,
    LeslieAccessor,
    leslie_eigenvector,
    leslie_lambda,
    perron_finite,
    truncation_sequence,
)

__all__ = [
    "CylinderTrack",
    "ConvergenceReport",
    "AffineMeasure",
    "Rank2Counterexample",
    "default_cylinders",
    "truncation_measure_convergence",
    "subprobability_mass_limit",
    "rank2_counterexample",
    "scaled_family",
    "mixture_family",
    "infinite_line_measure",
]

_CYLINDER_CAP = 512
_TRACK_TAIL = 5  # how many trailing samples the verdict inspects

FamilyLike = Union[Sequence, Callable[[int], object]]


# --------------------------------------------------------------------------
# report shape
# --------------------------------------------------------------------------


def _gap(a: Number, b: Number) -> Number:
    g = a - b
    return -g if g < 0 else g


def _nonincreasing(tail: Sequence[Number]) -> bool:
    return all(x >= y for x, y in zip(tail, tail[1:]))


def _verdict(gaps: Sequence[Number], tol: float) -> str:
    if not gaps:
        return "NotConverged"
    tail = list(gaps[-_TRACK_TAIL:])
    if _nonincreasing(tail) and float(tail[-1]) < tol:
        return "Converged"
    return "NotConverged"


@dataclass(frozen=True)
class CylinderTrack:
    """One cylinder's value trajectory against its limit value."""

    cylinder_id: str
    target: Number
    indices: Tuple[int, ...]
    values: Tuple[Number, ...]
    gaps: Tuple[Number, ...]
    verdict: str
    spec: Optional[CylinderSpec] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not (len(self.indices) == len(self.values) == len(self.gaps)):
            raise ParamOutOfRange("trajectory columns have mismatched lengths")

    @property
    def final_gap(self) -> Number:
        return self.gaps[-1]


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-cylinder trajectories plus the family's mass trajectory.

    ``masses[i]`` is the total mass at ``indices[i]``; None encodes an
    infinite mass.  ``verdict`` summarizes the cylinder tracks alone; the
    mass behaviour is judged separately so the counterexample families can
    converge on cylinders while their masses escape.
    """

    kind: str
    indices: Tuple[int, ...]
    tracks: Tuple[CylinderTrack, ...]
    masses: Tuple[Optional[Number], ...]
    mass_target: Optional[Number]
    mass_verdict: str
    tol: float
    verdict: str
    notes: Tuple[str, ...] = ()

    def track(self, cylinder_id: str) -> CylinderTrack:
        for t in self.tracks:
            if t.cylinder_id == cylinder_id:
                return t
        raise WindowTooSmall(f"no track named {cylinder_id!r}")

    def rows(
        self,
    ) -> List[Tuple[int, str, Number, Number, Number, Optional[Number]]]:
        """Flat (n_or_k, cylinder_id, value, target, gap, mass) rows."""
        out: List[Tuple[int, str, Number, Number, Number, Optional[Number]]] = []
        for pos, idx in enumerate(self.indices):
            mass = self.masses[pos]
            for t in self.tracks:
                out.append(
                    (idx, t.cylinder_id, t.values[pos], t.target, t.gaps[pos], mass)
                )
        return out


def _mass_verdict(
    masses: Sequence[Optional[Number]], target: Optional[Number], tol: float
) -> str:
    if any(m is None for m in masses):
        return "Infinite"
    if target is None:
        return "NotChecked"
    gaps = [_gap(m, target) for m in masses]
    return _verdict(gaps, tol)


# --------------------------------------------------------------------------
# cylinder plumbing
# --------------------------------------------------------------------------


def default_cylinders(
    d: Diagram,
    max_len: int = 3,
    window: Optional[Tuple[int, int]] = None,
) -> Tuple[Tuple[str, CylinderSpec], ...]:
    """Every cylinder of length <= max_len whose range vertex lies in the
    window, in canonical order, as (id, spec) pairs."""
    if window is None:
        vs = d.vertex_set(0)
        if vs.is_finite:
            window = (vs.lo, vs.hi)
        elif vs.kind == "naturals":
            window = (vs.start, vs.start + 2)
        else:
            window = (-1, 1)
    out: List[Tuple[str, CylinderSpec]] = []
    for m in range(max_len + 1):
        for v in d.vertex_set(m).clamp(*window):
            for i, p in enumerate(enumerate_paths(d, 0, (m, v))):
                out.append((f"len{m}/v{v}/p{i}", CylinderSpec(path=p)))
                if len(out) > _CYLINDER_CAP:
                    raise WindowOverflow(
                        f"window {window} yields more than {_CYLINDER_CAP} cylinders"
                    )
    return tuple(out)


def _with_ids(
    cylinders: Iterable,
) -> List[Tuple[str, CylinderSpec]]:
    out: List[Tuple[str, CylinderSpec]] = []
    for i, item in enumerate(cylinders):
        if isinstance(item, CylinderSpec):
            p = item.path
            out.append((f"c{i}:len{p.end_level - p.start_level}:v{p.range}", item))
        else:
            cid, spec = item
            out.append((str(cid), spec))
    if len(out) > _CYLINDER_CAP:
        raise WindowOverflow(f"{len(out)} cylinders exceed the {_CYLINDER_CAP} cap")
    if len({cid for cid, _ in out}) != len(out):
        raise ParamOutOfRange("cylinder ids must be unique")
    return out


def _cylinder_value(
    m, c: CylinderSpec, d: Optional[Diagram] = None
) -> Number:
    """Measure of the cylinder, with off-support and uncovered windows read
    as zero (matching the extension engine's convention)."""
    if isinstance(m, AffineMeasure):
        return m.cylinder_value(c, d)
    try:
        return cylinder_measure(m, c, d).value
    except (OutsideSupport, MissingTailDescriptor):
        return Fraction(0)


# --------------------------------------------------------------------------
# affine combinations of measure specs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineMeasure:
    """Nonnegative combination sum_j c_j * m_j, evaluated term by term.

    Stands in for a literal measure spec when the summands' window and
    tail shapes do not merge into one vertex function (a single-path mass
    plus a two-sided tail, say).  Mass is None when any weighted term has
    infinite mass.
    """

    terms: Tuple[Tuple[Number, MeasureSpec], ...]
    name: str = "affine"

    def __post_init__(self) -> None:
        if not self.terms:
            raise ParamOutOfRange("an affine measure needs at least one term")
        for c, _ in self.terms:
            if c < 0:
                raise ParamOutOfRange(f"negative coefficient {c}")

    def mass(self) -> Optional[Number]:
        total: Number = Fraction(0)
        for c, m in self.terms:
            if c == 0:
                continue
            part = _spec_mass(m)
            if part is None:
                return None
            total = total + c * part
        return total

    def cylinder_value(self, c: CylinderSpec, d: Optional[Diagram] = None) -> Number:
        total: Number = Fraction(0)
        for w, m in self.terms:
            if w == 0:
                continue
            total = total + w * _cylinder_value(m, c, d)
        return total


def _spec_mass(m) -> Optional[Number]:
    if isinstance(m, AffineMeasure):
        return m.mass()
    if isinstance(m, PVectors):
        return m.total_mass
    if isinstance(m, StationaryEigen):
        return Fraction(1) if m.probability else m.sigma
    if isinstance(m, OdometerProduct):
        return Fraction(1)
    raise TypeError(f"not a measure spec: {m!r}")


def scaled_family(
    mu: MeasureSpec, horizon: int, name: Optional[str] = None
) -> Tuple[AffineMeasure, ...]:
    """(1 - 1/n) mu for n = 1..horizon.  Subprobability when mu is one."""
    if horizon < 1:
        raise ParamOutOfRange(f"horizon must be >= 1, got {horizon}")
    base = name or getattr(mu, "name", "mu")
    return tuple(
        AffineMeasure(terms=((Fraction(n - 1, n), mu),), name=f"(1-1/{n}){base}")
        for n in range(1, horizon + 1)
    )


def mixture_family(
    mu: MeasureSpec, nu: MeasureSpec, horizon: int, name: Optional[str] = None
) -> Tuple[AffineMeasure, ...]:
    """mu + (1/n) nu for n = 1..horizon; not subprobability, still settles
    on cylinders whenever nu's cylinder values are finite."""
    if horizon < 1:
        raise ParamOutOfRange(f"horizon must be >= 1, got {horizon}")
    base = name or getattr(mu, "name", "mu")
    return tuple(
        AffineMeasure(
            terms=((Fraction(1), mu), (Fraction(1, n), nu)),
            name=f"{base}+(1/{n})nu",
        )
        for n in range(1, horizon + 1)
    )


def infinite_line_measure() -> StationaryEigen:
    """A genuinely infinite sigma-finite tail-invariant spec: the constant
    eigenvector at rate 2 on the integer-line unit-band diagram.

    Every cylinder of length n has value 1/2^n; the level-0 mass diverges
    because the constant vector is not summable over the integers.
    """
    xi = VertexFunction(
        values={0: Fraction(1)},
        right_tail=(0, Fraction(1)),
        left_tail=(0, Fraction(1)),
    )
    return StationaryEigen(
        lam=Fraction(2), xi=xi, sigma=None, probability=False,
        name="line-constant-eigen",
    )


# --------------------------------------------------------------------------
# truncation measures along principal corners
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _CornerAdapter:
    """Transposed principal corners of a stationary diagram's incidence."""

    d: Diagram
    start: int

    def corner(self, k: int) -> List[List[int]]:
        lvl = self.d.level(0)
        vs = [self.start + i for i in range(k)]
        # transpose: row v of the corner collects the incidence column of v
        return [[lvl.entry(w, v) for w in vs] for v in vs]


def truncation_measure_convergence(
    d: Diagram,
    ks: Sequence[int],
    cylinders: Optional[Iterable] = None,
    tol: float = 1e-9,
) -> ConvergenceReport:
    """Trajectories of the truncated stationary measures on cylinders.

    For the k-th principal corner the probability measure gives a cylinder
    of length m ending at vertex v the value x_v(k) / (sigma_k lambda_k^m);
    a cylinder whose trail leaves the first k vertices contributes zero at
    that k.  The mass column records sigma_k, the truncated eigenvector
    l1 mass, against the limit mass so the l1 hypothesis is visible in the
    report.  Limits use closed forms when the survival sequence is constant
    and the birth sequence eventually constant; otherwise the limit is
    approximated by a corner twice as deep and the hypothesis is recorded
    as unchecked.
    """
    if not d.stationary:
        raise NotAdmissible("truncation corners need a stationary diagram")
    vs0 = d.vertex_set(0)
    if vs0.is_finite:
        raise NotAdmissible("the diagram is already finite; nothing to truncate")
    if vs0.kind != "naturals":
        raise NotAdmissible("truncation corners need a bounded-below vertex set")
    start = vs0.start
    ks = tuple(sorted({int(k) for k in ks}))
    if not ks or ks[0] < 1:
        raise ParamOutOfRange("ks must be a nonempty set of positive integers")
    cyls = _with_ids(default_cylinders(d) if cylinders is None else cylinders)
    if not cyls:
        raise WindowTooSmall("no cylinders to test")
    for _, c in cyls:
        if c.start_level != 0:
            raise WindowTooSmall("truncation cylinders must start at level 0")

    fam = d.family
    leslie = fam is not None and getattr(fam, "kind", None) == "leslie"
    acc = LeslieAccessor(fam.b, fam.s) if leslie else _CornerAdapter(d=d, start=start)
    pairs: Dict[int, Eigenpair] = dict(truncation_sequence(acc, ks).items)
    sigmas = {k: sum(pair.xi.values()) for k, pair in pairs.items()}

    notes: List[str] = [
        "mass column records the truncated eigenvector l1 masses",
    ]
    verified = (
        leslie
        and fam.s.kind == "constant"
        and fam.b.kind in ("constant", "list")
    )
    ev = None
    if verified:
        lam0 = leslie_lambda(fam.b, fam.s, tol=min(tol, 1e-12))
        ev = leslie_eigenvector(lam0, fam.s, window=8)
        if ev.sigma is None or ev.divergent:
            verified = False
    if verified:
        sigma0: Number = ev.sigma
        xi_at = ev.xi.value  # ages are the 1-based vertices here
        notes.append("limit eigendata from closed forms; l1-mass hypothesis verified")
    else:
        k_ref = max(2 * ks[-1], ks[-1] + 8)
        pair_ref = perron_finite(acc.corner(k_ref))
        lam0 = pair_ref.lam
        sigma0 = sum(pair_ref.xi.values())
        xi_at = lambda v: pair_ref.xi[v - start + 1]
        notes.append(
            f"limit eigendata approximated by the k={k_ref} corner; "
            "l1-mass hypothesis recorded as unchecked"
        )

    tracks: List[CylinderTrack] = []
    for cid, c in cyls:
        trail = c.path.vertices()
        v, m = c.path.range, c.path.end_level
        vmax = max(trail)
        target = xi_at(v) / (sigma0 * lam0**m)
        vals: List[Number] = []
        for k in ks:
            if vmax <= start + k - 1:
                pair = pairs[k]
                vals.append(pair.xi[v - start + 1] / (sigmas[k] * pair.lam**m))
            else:
                vals.append(0.0)  # the trail leaves the corner: no support yet
        gaps = tuple(_gap(x, target) for x in vals)
        tracks.append(
            CylinderTrack(
                cylinder_id=cid, target=target, indices=ks,
                values=tuple(vals), gaps=gaps,
                verdict=_verdict(gaps, tol), spec=c,
            )
        )

    masses = tuple(sigmas[k] for k in ks)
    mass_v = _mass_verdict(masses, sigma0, tol)
    verdict = (
        "Converged" if all(t.verdict == "Converged" for t in tracks) else "NotConverged"
    )
    return ConvergenceReport(
        kind="truncation", indices=ks, tracks=tuple(tracks),
        masses=masses, mass_target=sigma0, mass_verdict=mass_v,
        tol=tol, verdict=verdict, notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# subprobability mass limits
# --------------------------------------------------------------------------


def subprobability_mass_limit(
    mus: FamilyLike,
    target: MeasureSpec,
    cylinders: Iterable,
    horizon: Optional[int] = None,
    tol: float = 1e-9,
    d: Optional[Diagram] = None,
) -> ConvergenceReport:
    """Cylinder trajectories of a measure family against a fixed target,
    with the mass limit judged alongside.

    When every family member is subprobability and every tested cylinder
    converged, a mass trajectory that misses the target mass is flagged as
    a Violation: either the arithmetic is wrong or the tested cylinders
    missed where the mass went.  Families with infinite masses are allowed;
    only their cylinder values are compared.
    """
    if callable(mus) and not isinstance(mus, (list, tuple)):
        if horizon is None:
            raise ParamOutOfRange("a callable family needs a horizon")
        family = [(n, mus(n)) for n in range(1, horizon + 1)]
    else:
        seq = list(mus)
        if horizon is not None:
            seq = seq[:horizon]
        family = [(n + 1, m) for n, m in enumerate(seq)]
    if not family:
        raise ParamOutOfRange("empty measure family")
    cyls = _with_ids(cylinders)
    if not cyls:
        raise WindowTooSmall("no cylinders to test")

    indices = tuple(n for n, _ in family)
    tracks: List[CylinderTrack] = []
    for cid, c in cyls:
        tval = _cylinder_value(target, c, d)
        vals = tuple(_cylinder_value(m, c, d) for _, m in family)
        gaps = tuple(_gap(x, tval) for x in vals)
        tracks.append(
            CylinderTrack(
                cylinder_id=cid, target=tval, indices=indices,
                values=vals, gaps=gaps, verdict=_verdict(gaps, tol), spec=c,
            )
        )

    masses = tuple(_spec_mass(m) for _, m in family)
    mass_target = _spec_mass(target)
    notes: List[str] = []
    if mass_target != 1:
        notes.append(
            f"target mass {mass_target} is not 1; the subprobability "
            "statement does not apply"
        )
    mass_v = _mass_verdict(masses, mass_target, tol)
    all_conv = all(t.verdict == "Converged" for t in tracks)
    subprob = all(m is not None and m <= 1 for m in masses)
    verdict = "Converged" if all_conv else "NotConverged"
    if subprob and all_conv and mass_v != "Converged":
        verdict = "Violation"
        notes.append(
            "subprobability family converged on every tested cylinder but "
            "its masses missed the target mass"
        )
    if any(m is None for m in masses):
        notes.append("family masses are infinite; only cylinder values are compared")
    elif not subprob:
        notes.append("family is not subprobability; the mass limit is reported, not asserted")
    return ConvergenceReport(
        kind="subprobability", indices=indices, tracks=tuple(tracks),
        masses=masses, mass_target=mass_target, mass_verdict=mass_v,
        tol=tol, verdict=verdict, notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# the rank-2 harmonic blow-up family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Rank2Counterexample:
    """Measures mu_n on the locally compact complement of the feeder column.

    The rank-2 diagram has a feeder vertex (two self-edges, nothing else)
    and a carrier vertex (two self-edges plus one edge from the feeder).
    The space splits into the core (paths riding the carrier from level 0)
    and shells: shell i holds the paths that ride the feeder through level
    i-1 and hop to the carrier at level i.  Each shell has extension mass
    exactly 1/2; mu_n keeps the core and weights shell i by 1/(n+1-i), so
    the masses are 1 + (1 + 1/2 + ... + 1/n)/2 while every cylinder value
    converges to the core measure's.
    """

    diagram: Diagram = field(repr=False)
    n_max: int
    masses: Tuple[Fraction, ...]  # entry j is the mass at n = j+1
    shell_masses: Tuple[Fraction, ...]  # extension mass of shell i at i = j+1
    report: ConvergenceReport

    def coefficient(self, n: int, i: int) -> Fraction:
        """Weight of shell i inside mu_n (i = 0 names the core)."""
        if not (1 <= n <= self.n_max) or i < 0:
            raise ParamOutOfRange(f"bad shell request n={n}, i={i}")
        if i == 0:
            return Fraction(1)
        if i > n:
            return Fraction(0)
        return Fraction(1, n + 1 - i)

    def shell_cylinder_mass(self, i: int) -> Fraction:
        """Extension mass of one length-i cylinder inside shell i."""
        if i < 1:
            raise ParamOutOfRange(f"shells start at 1, got {i}")
        return Fraction(1, 2**i)

    def core_cylinder_mass(self, m: int) -> Fraction:
        """Core measure of the length-m cylinder riding the carrier."""
        if m < 0:
            raise ParamOutOfRange(f"negative length {m}")
        return Fraction(1, 2**m)

    def value(self, n: int, i: int, base: Fraction) -> Fraction:
        """mu_n of a set inside shell i whose extension mass is ``base``."""
        return self.coefficient(n, i) * base


def rank2_counterexample(
    n_max: int, tol: Optional[float] = None, shells: int = 3
) -> Rank2Counterexample:
    """Build the harmonic blow-up family to horizon n_max, exactly.

    Shell masses are recomputed from the diagram (path count times the
    extended measure value) and must agree with the closed form 1/2; the
    total masses are summed directly and must agree with the harmonic
    closed form.  The default tolerance tracks the horizon because the
    family converges at harmonic rate.
    """
    if n_max < 1:
        raise ParamOutOfRange(f"n_max must be >= 1, got {n_max}")
    if shells < 1:
        raise ParamOutOfRange(f"need at least one shell, got {shells}")
    if tol is None:
        tol = 1.0 / n_max
    d = build_family(FamilySpec.rank2())
    feeder, carrier = 1, 2
    core_measure = OdometerProduct(
        Seq.constant(2), base=lambda n: carrier, name="rank2-core"
    )
    sub = make_vertex_subdiagram(d, WSpec.singleton(carrier), check_depth=4)
    phat = extension_p_vectors(d, sub, core_measure, probe=2)

    shell_masses: List[Fraction] = []
    for i in range(1, n_max + 1):
        count = 1
        for j in range(i - 1):
            count *= d.level(j).entry(feeder, feeder)
        count *= d.level(i - 1).entry(carrier, feeder)
        pv = phat.level_fn(i).value(carrier)
        mass = count * pv
        # the feeder column doubles, the extended value halves: mass 1/2
        if count != 2 ** (i - 1) or pv != Fraction(1, 2**i) or mass != Fraction(1, 2):
            raise NoConvergence(f"shell mass routes disagree at shell {i}")
        shell_masses.append(mass)

    masses: List[Fraction] = []
    harmonic = Fraction(0)
    for n in range(1, n_max + 1):
        harmonic += Fraction(1, n)
        closed = 1 + harmonic / 2
        direct = Fraction(1) + sum(
            (shell_masses[i - 1] / (n + 1 - i) for i in range(1, n + 1)),
            Fraction(0),
        )
        if closed != direct:
            raise NoConvergence(f"mass routes disagree at n={n}")
        masses.append(closed)

    def coeff(n: int, i: int) -> Fraction:
        if i > n:
            return Fraction(0)
        return Fraction(1, n + 1 - i)

    indices = tuple(range(1, n_max + 1))
    tracks: List[CylinderTrack] = []
    for m in range(3):
        path = FinitePath(
            edges=tuple((j, carrier, carrier, 0) for j in range(m)),
            source=carrier, range=carrier,
        )
        tgt = Fraction(1, 2**m)
        vals = tuple(tgt for _ in indices)
        zeros = tuple(Fraction(0) for _ in indices)
        tracks.append(
            CylinderTrack(
                cylinder_id=f"core/len{m}", target=tgt, indices=indices,
                values=vals, gaps=zeros, verdict=_verdict(zeros, tol),
                spec=CylinderSpec(path=path),
            )
        )
    for i in range(1, min(shells, n_max) + 1):
        edges = tuple((j, feeder, feeder, 0) for j in range(i - 1))
        edges += ((i - 1, feeder, carrier, 0),)
        path = FinitePath(edges=edges, source=feeder, range=carrier)
        single = tuple(coeff(n, i) * Fraction(1, 2**i) for n in indices)
        tracks.append(
            CylinderTrack(
                cylinder_id=f"shell{i}/cyl", target=Fraction(0), indices=indices,
                values=single, gaps=single, verdict=_verdict(single, tol),
                spec=CylinderSpec(path=path),
            )
        )
        whole = tuple(coeff(n, i) * Fraction(1, 2) for n in indices)
        tracks.append(
            CylinderTrack(
                cylinder_id=f"shell{i}/total", target=Fraction(0), indices=indices,
                values=whole, gaps=whole, verdict=_verdict(whole, tol), spec=None,
            )
        )

    mass_v = _mass_verdict(masses, Fraction(1), tol)
    verdict = (
        "Converged" if all(t.verdict == "Converged" for t in tracks) else "NotConverged"
    )
    report = ConvergenceReport(
        kind="rank2", indices=indices, tracks=tuple(tracks),
        masses=tuple(masses), mass_target=Fraction(1), mass_verdict=mass_v,
        tol=tol, verdict=verdict,
        notes=(
            "masses grow at half the harmonic rate while every cylinder "
            "track converges",
            "shell weights 1/(n+1-i) push each shell's contribution to zero",
        ),
    )
    return Rank2Counterexample(
        diagram=d, n_max=n_max, masses=tuple(masses),
        shell_masses=tuple(shell_masses), report=report,
    )

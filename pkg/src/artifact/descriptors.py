"""Sequence descriptors and exact classification of positive series.

Level-dependent data (edge multiplicities, window radii, branching counts)
is described symbolically by :class:`Seq` so that operations on diagrams with
infinitely many levels can reason about tails instead of truncating them.
Four kinds are supported: constant sequences, explicit finite prefixes with a
described tail, geometric sequences ``c * ratio**n`` and polynomials in the
level index.  All values are exact :class:`fractions.Fraction` numbers.

:func:`classify_ratio_sum` decides convergence of ``sum num(n)/den(n)`` with
an exact certificate: a convergent verdict carries a callable producing a
rational upper bound for any tail of the series, a divergent verdict carries
the comparison reason.  Anything outside the supported algebra is reported as
unknown rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .errors import ConfigParse

__all__ = [
    "Seq",
    "SeriesClass",
    "classify_ratio_sum",
    "classify_reciprocal_sum",
]


def _frac(x) -> Fraction:
    """Coerce ints, strings like '3/2' or '0.25', and integral floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ConfigParse(f"boolean is not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigParse(f"bad rational literal {x!r}") from exc
    if isinstance(x, float):
        if x != int(x):
            # refuse silent binary-float noise; callers must spell rationals
            raise ConfigParse(f"non-integral float {x!r}; write it as a string 'p/q'")
        return Fraction(int(x))
    raise ConfigParse(f"cannot interpret {x!r} as a rational number")


# --------------------------------------------------------------------------
# polynomial helpers (coefficient tuples, ascending powers)
# --------------------------------------------------------------------------


def _poly_eval(coeffs: Tuple[Fraction, ...], n) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


def _poly_trim(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    cs = list(coeffs)
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _poly_trim(
        tuple(
            (a[i] if i < len(a) else Fraction(0)) + (b[i] if i < len(b) else Fraction(0))
            for i in range(n)
        )
    )


def _poly_scale(a, k: Fraction):
    return _poly_trim(tuple(c * k for c in a))


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _poly_trim(tuple(out))


def _poly_shift(coeffs: Tuple[Fraction, ...], s: int) -> Tuple[Fraction, ...]:
    """Coefficients of p(x + s)."""
    out: Tuple[Fraction, ...] = (Fraction(0),)
    base: Tuple[Fraction, ...] = (Fraction(1),)
    lin = (Fraction(s), Fraction(1))
    for c in coeffs:
        out = _poly_add(out, _poly_scale(base, c))
        base = _poly_mul(base, lin)
    return _poly_trim(out)


def _poly_deg(coeffs) -> int:
    return len(_poly_trim(coeffs)) - 1


def _poly_positive_from(coeffs: Tuple[Fraction, ...]) -> Optional[int]:
    """Smallest certified N with p(n) > 0 for every n >= N, or None.

    Uses the Cauchy-style bound n > sum(|c_i|)/c_top for i below the top
    degree, then tightens by scanning down explicitly.
    """
    cs = _poly_trim(coeffs)
    top = cs[-1]
    if top <= 0:
        if len(cs) == 1 and top > 0:  # pragma: no cover - unreachable
            return 0
        return None if len(cs) > 1 or top <= 0 else 0
    if len(cs) == 1:
        return 0
    bound = sum(abs(c) for c in cs[:-1]) / top
    n0 = max(0, int(bound) + 1)
    while n0 > 0 and _poly_eval(cs, n0 - 1) > 0:
        n0 -= 1
    return n0


# --------------------------------------------------------------------------
# the descriptor itself
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Seq:
    """A described sequence n -> value(n), n >= 0, with exact rational values."""

    kind: str
    const: Optional[Fraction] = None
    prefix: Tuple[Fraction, ...] = ()
    tail: Optional["Seq"] = None
    coeff: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    poly: Tuple[Fraction, ...] = ()

    # ---- constructors

    @staticmethod
    def constant(value) -> "Seq":
        return Seq(kind="constant", const=_frac(value))

    @staticmethod
    def listed(values: Sequence, tail: "Seq") -> "Seq":
        if not values:
            return tail
        return Seq(kind="list", prefix=tuple(_frac(v) for v in values), tail=tail)

    @staticmethod
    def geometric(coeff, ratio) -> "Seq":
        return Seq(kind="geometric", coeff=_frac(coeff), ratio=_frac(ratio))

    @staticmethod
    def polynomial(*coeffs) -> "Seq":
        if not coeffs:
            raise ConfigParse("polynomial descriptor needs at least one coefficient")
        return Seq(kind="polynomial", poly=_poly_trim(tuple(_frac(c) for c in coeffs)))

    # ---- evaluation

    def value(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"sequence index must be >= 0, got {n}")
        if self.kind == "constant":
            return self.const
        if self.kind == "geometric":
            return self.coeff * self.ratio**n
        if self.kind == "polynomial":
            return _poly_eval(self.poly, n)
        if self.kind == "list":
            if n < len(self.prefix):
                return self.prefix[n]
            return self.tail.value(n - len(self.prefix))
        raise ValueError(f"unknown sequence kind {self.kind!r}")

    def values(self, count: int) -> Tuple[Fraction, ...]:
        return tuple(self.value(n) for n in range(count))

    def int_value(self, n: int) -> int:
        v = self.value(n)
        if v.denominator != 1:
            raise ConfigParse(f"sequence value at {n} is {v}, expected an integer")
        return v.numerator

    # ---- structure

    def prefix_length(self) -> int:
        """Levels before the sequence is governed by a single pure kind."""
        if self.kind == "list":
            return len(self.prefix) + self.tail.prefix_length()
        return 0

    def shifted_core(self, offset: int) -> "Seq":
        """Pure-kind descriptor C with C.value(k) == self.value(offset + k).

        Requires ``offset >= self.prefix_length()``.
        """
        if self.kind == "list":
            if offset < len(self.prefix):
                raise ValueError("offset does not clear the explicit prefix")
            return self.tail.shifted_core(offset - len(self.prefix))
        if self.kind == "constant":
            return self
        if self.kind == "geometric":
            if offset == 0:
                return self
            return Seq.geometric(self.coeff * self.ratio**offset, self.ratio)
        if self.kind == "polynomial":
            if offset == 0:
                return self
            return Seq(kind="polynomial", poly=_poly_shift(self.poly, offset))
        raise ValueError(f"unknown sequence kind {self.kind!r}")

    def positive_everywhere(self) -> bool:
        """True iff value(n) > 0 is certified for every n >= 0."""
        off = self.prefix_length()
        if any(self.value(n) <= 0 for n in range(off)):
            return False
        core = self.shifted_core(off)
        if core.kind == "constant":
            return core.const > 0
        if core.kind == "geometric":
            return core.coeff > 0 and core.ratio > 0
        n0 = _poly_positive_from(core.poly)
        if n0 is None:
            return False
        return all(_poly_eval(core.poly, n) > 0 for n in range(n0))

    # ---- presentation / serialization

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant {self.const}"
        if self.kind == "geometric":
            return f"{self.coeff}*{self.ratio}^n"
        if self.kind == "polynomial":
            terms = [
                (f"{c}" if i == 0 else f"{c}*n^{i}" if i > 1 else f"{c}*n")
                for i, c in enumerate(self.poly)
                if c != 0
            ]
            return " + ".join(terms) if terms else "0"
        head = ",".join(str(v) for v in self.prefix)
        return f"[{head}] then {self.tail.describe()}"

    def to_json(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": str(self.const)}
        if self.kind == "geometric":
            return {"kind": "geometric", "coeff": str(self.coeff), "ratio": str(self.ratio)}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coeffs": [str(c) for c in self.poly]}
        return {
            "kind": "list",
            "values": [str(v) for v in self.prefix],
            "tail": self.tail.to_json(),
        }

    @staticmethod
    def from_json(obj) -> "Seq":
        if isinstance(obj, (int, str)):
            return Seq.constant(_frac(obj))
        if not isinstance(obj, dict):
            raise ConfigParse(f"sequence descriptor must be an object, got {obj!r}")
        kind = obj.get("kind")

        def pick(*names):
            for name in names:
                if name in obj:
                    return obj[name]
            raise ConfigParse(
                f"sequence descriptor {obj!r} missing one of {'/'.join(names)}"
            )

        if kind == "constant":
            return Seq.constant(_frac(pick("value", "c")))
        if kind == "geometric":
            return Seq.geometric(_frac(pick("coeff", "c")), _frac(pick("ratio", "rho")))
        if kind in ("polynomial", "poly"):
            return Seq.polynomial(*[_frac(c) for c in pick("coeffs")])
        if kind == "list":
            return Seq.listed(
                [_frac(v) for v in pick("values")], Seq.from_json(pick("tail"))
            )
        raise ConfigParse(f"unknown sequence kind {kind!r}")

    @staticmethod
    def from_text(text: str) -> "Seq":
        """Parse the compact command line form.

        ``constant:2`` | ``geometric:1,2`` | ``poly:2,1`` |
        ``list:1,1;geometric:2,2`` (prefix values, then the tail descriptor).
        A bare number is shorthand for a constant.
        """
        text = text.strip()
        if ":" not in text:
            return Seq.constant(_frac(text))
        head, _, payload = text.partition(":")
        head = head.strip().lower()
        if head == "constant":
            return Seq.constant(_frac(payload))
        if head == "geometric":
            parts = payload.split(",")
            if len(parts) != 2:
                raise ConfigParse(f"geometric descriptor needs coeff,ratio: {text!r}")
            return Seq.geometric(_frac(parts[0]), _frac(parts[1]))
        if head in ("poly", "polynomial"):
            return Seq.polynomial(*[_frac(p) for p in payload.split(",")])
        if head == "list":
            values_text, sep, tail_text = payload.partition(";")
            if not sep:
                raise ConfigParse(f"list descriptor needs ';tail': {text!r}")
            values = [_frac(v) for v in values_text.split(",") if v.strip()]
            return Seq.listed(values, Seq.from_text(tail_text))
        raise ConfigParse(f"unknown sequence kind {head!r}")


# --------------------------------------------------------------------------
# series classification
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeriesClass:
    """Outcome of classifying ``sum_{n>=0} term(n)`` for a positive series.

    verdict is one of ``converges`` / ``diverges`` / ``unknown``.  For a
    convergent series ``tail_bound(N)`` returns an exact rational upper bound
    for ``sum_{n>N} term(n)``, valid for every N >= -1 (N = -1 bounds the
    whole series).
    """

    verdict: str
    certificate: str
    term: Callable[[int], Fraction] = field(repr=False)
    tail_bound: Optional[Callable[[int], Fraction]] = field(default=None, repr=False)

    @property
    def converges(self) -> bool:
        return self.verdict == "converges"

    @property
    def diverges(self) -> bool:
        return self.verdict == "diverges"


def _analysis_form(core: Seq):
    """Normalize a pure-kind positive descriptor to ('poly', coeffs) or
    ('geom', coeff, ratio) with ratio != 1."""
    if core.kind == "constant":
        return ("poly", (core.const,))
    if core.kind == "polynomial":
        return ("poly", core.poly)
    if core.kind == "geometric":
        if core.ratio == 1:
            return ("poly", (core.coeff,))
        return ("geom", core.coeff, core.ratio)
    raise ValueError("not a pure descriptor")


def _ratio_majorant_bound(term, r: Fraction, n_from: int):
    """tail_bound closure given term(k+1) <= r*term(k) for all k >= n_from."""

    def bound(N: int) -> Fraction:
        lo = N + 1
        if lo >= n_from:
            return term(lo) / (1 - r)
        # explicit terms until the majorant applies
        head = sum((term(k) for k in range(lo, n_from)), Fraction(0))
        return head + term(n_from) / (1 - r)

    return bound


def _poly_pair_bound(num_poly, den_poly, term):
    """tail_bound for sum num(n)/den(n), deg den - deg num >= 2.

    Uses num(n)*(n+1)*(n+2) <= C*den(n) for n >= N0, whence the tail past N
    telescopes to C/(N+2).
    """
    d_num = _poly_deg(num_poly)
    d_den = _poly_deg(den_poly)
    lead_num = _poly_trim(num_poly)[-1]
    lead_den = _poly_trim(den_poly)[-1]
    if d_den - d_num == 2:
        C = 2 * lead_num / lead_den
    else:
        C = max(Fraction(1), lead_num / lead_den)
    shifted = _poly_mul(num_poly, _poly_mul((Fraction(1), Fraction(1)), (Fraction(2), Fraction(1))))
    while True:
        q = _poly_add(_poly_scale(den_poly, C), _poly_scale(shifted, Fraction(-1)))
        n0 = _poly_positive_from(q)
        if n0 is not None:
            break
        C *= 2

    def bound(N: int) -> Fraction:
        lo = N + 1
        if lo >= n0:
            return C / (lo + 1)
        head = sum((term(k) for k in range(lo, n0)), Fraction(0))
        return head + C / (n0 + 1)

    return bound


def _classify_cores(num_core: Seq, den_core: Seq, term) -> SeriesClass:
    nf = _analysis_form(num_core)
    df = _analysis_form(den_core)

    if nf[0] == "poly" and df[0] == "poly":
        d = _poly_deg(df[1]) - _poly_deg(nf[1])
        if d <= 1:
            return SeriesClass(
                "diverges",
                "degree gap <= 1: terms dominate a harmonic series",
                term,
            )
        return SeriesClass(
            "converges",
            f"degree gap {d} >= 2: telescoping comparison with C/((n+1)(n+2))",
            term,
            _poly_pair_bound(nf[1], df[1], term),
        )

    if nf[0] == "poly" and df[0] == "geom":
        rho = df[2]
        if rho < 1:
            return SeriesClass(
                "diverges", "denominator decays geometrically: terms grow", term
            )
        # find N0 with num(n+1) <= g*num(n), g strictly below rho
        g = (rho + 1) / 2
        q = _poly_add(_poly_scale(nf[1], g), _poly_scale(_poly_shift(nf[1], 1), Fraction(-1)))
        n0 = _poly_positive_from(q)
        p0 = _poly_positive_from(nf[1])
        if n0 is None or p0 is None:
            return SeriesClass("unknown", "no geometric majorant found", term)
        start = max(n0, p0)
        return SeriesClass(
            "converges",
            f"geometric majorant with ratio {g}/{rho}",
            term,
            _ratio_majorant_bound(term, g / rho, start),
        )

    if nf[0] == "geom" and df[0] == "poly":
        rho = nf[2]
        if rho > 1:
            return SeriesClass(
                "diverges", "numerator grows geometrically over a polynomial", term
            )
        # rho < 1: need den eventually nondecreasing
        diff = _poly_add(_poly_shift(df[1], 1), _poly_scale(df[1], Fraction(-1)))
        if _poly_deg(df[1]) == 0:
            start = 0
        else:
            n1 = _poly_positive_from(diff)
            if n1 is None:
                return SeriesClass("unknown", "denominator not eventually monotone", term)
            start = n1
        return SeriesClass(
            "converges",
            f"geometric majorant with ratio {rho}",
            term,
            _ratio_majorant_bound(term, rho, start),
        )

    # geom / geom
    c1, r1 = nf[1], nf[2]
    c2, r2 = df[1], df[2]
    rho = r1 / r2
    if rho < 1:
        def bound(N: int, _c=c1 / c2, _rho=rho) -> Fraction:
            return _c * _rho ** (N + 1) / (1 - _rho)

        return SeriesClass(
            "converges", f"exact geometric tail with ratio {rho}", term, bound
        )
    return SeriesClass(
        "diverges",
        "terms bounded below by a positive constant" if rho == 1 else "terms grow geometrically",
        term,
    )


def classify_ratio_sum(num: Seq, den: Seq) -> SeriesClass:
    """Classify ``sum_{n>=0} num(n)/den(n)`` for described positive sequences.

    The denominator must be certified positive everywhere; the numerator must
    be certified positive from its explicit prefix onward (zeros are allowed
    inside the prefix).  Everything else yields an ``unknown`` verdict.
    """
    if not den.positive_everywhere():
        return SeriesClass(
            "unknown",
            "denominator positivity not certified",
            lambda n: num.value(n) / den.value(n),
        )

    def term(n: int) -> Fraction:
        return num.value(n) / den.value(n)

    off = max(num.prefix_length(), den.prefix_length())
    if any(num.value(n) < 0 for n in range(off)):
        return SeriesClass("unknown", "negative terms in the prefix", term)
    num_core = num.shifted_core(off)
    den_core = den.shifted_core(off)

    # zero numerator core: only the prefix contributes
    if num_core.kind == "constant" and num_core.const == 0:
        total = sum((term(n) for n in range(off)), Fraction(0))

        def zbound(N: int) -> Fraction:
            return sum((term(n) for n in range(max(N + 1, 0), off)), Fraction(0))

        return SeriesClass("converges", f"finite support, total {total}", term, zbound)

    if not num_core.positive_everywhere():
        return SeriesClass("unknown", "numerator positivity not certified", term)

    core_cls = _classify_cores(num_core, den_core, lambda k: term(off + k))
    if off == 0:
        return core_cls
    if not core_cls.converges:
        return SeriesClass(core_cls.verdict, core_cls.certificate, term, None)

    def shifted_bound(N: int) -> Fraction:
        if N + 1 >= off:
            return core_cls.tail_bound(N - off)
        head = sum((term(n) for n in range(max(N + 1, 0), off)), Fraction(0))
        return head + core_cls.tail_bound(-1)

    return SeriesClass(core_cls.verdict, core_cls.certificate, term, shifted_bound)


def classify_reciprocal_sum(a: Seq) -> SeriesClass:
    """Classify ``sum_{n>=0} 1/a(n)``."""
    return classify_ratio_sum(Seq.constant(1), a)

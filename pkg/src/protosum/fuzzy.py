"""Trapezoidal and crisp membership machinery.

Linguistic variables partition an attribute domain into named values, each
backed by a trapezoid, a crisp category label, or a crisp half-open interval.
Quantifiers are trapezoids over the proportion domain [0, 1]. Everything here
is immutable and pure.
"""
from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field

from .errors import ConfigError, EvaluationError, ValidationReport

TruthDegree = float


@dataclass(frozen=True)
class Trapezoid:
    """Membership shape T[a,b,c,d]: 0 up to a, ramp to 1 at b, plateau to c,
    ramp back to 0 at d. a=b and/or c=d degenerate the ramps into steps."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if math.isnan(v):
                raise ConfigError(f"trapezoid bound is NaN: {self}")
        if not (self.a <= self.b <= self.c <= self.d):
            raise ConfigError(
                f"trapezoid bounds must be non-decreasing, got "
                f"[{self.a}, {self.b}, {self.c}, {self.d}]"
            )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


def membership(shape: Trapezoid, x: float) -> TruthDegree:
    """Degree to which x fulfills the trapezoid.

    Non-degenerate segments follow the classic piecewise form exactly:
    0 for x <= a or x > d, (x-a)/(b-a) on (a, b], 1 on (b, c],
    (d-x)/(d-c) on (c, d]. A collapsed ramp (a == b, or c == d) becomes a
    step so that fully crisp shapes (a == b and c == d) are 1 exactly on
    [a, c] and 0 elsewhere.
    """
    a, b, c, d = shape.a, shape.b, shape.c, shape.d
    if a == b and c == d:
        return 1.0 if a <= x <= c else 0.0
    if a == b:
        if x < b:
            return 0.0
        if x <= c:
            return 1.0
        if x <= d:
            return (d - x) / (d - c)
        return 0.0
    if c == d:
        if x <= a or x > c:
            return 0.0
        if x <= b:
            return (x - a) / (b - a)
        return 1.0
    if x <= a or x > d:
        return 0.0
    if x <= b:
        return (x - a) / (b - a)
    if x <= c:
        return 1.0
    return (d - x) / (d - c)


def normalize_category(label: str) -> str:
    """Canonical form used for category equality: NFC + surrounding trim."""
    return unicodedata.normalize("NFC", label).strip()


@dataclass(frozen=True)
class LinguisticValue:
    """One named property of a linguistic variable.

    Exactly one of `trapezoid`, `category`, `interval` is set. `text` is the
    phrase used when the value is realized in a sentence; it defaults to
    "<value name> <variable name>" at realization time.
    """

    name: str
    trapezoid: Trapezoid | None = None
    category: str | None = None
    interval: tuple[float, float] | None = None  # half-open [start, end)
    text: str | None = None

    def __post_init__(self):
        shapes = [s for s in (self.trapezoid, self.category, self.interval) if s is not None]
        if len(shapes) != 1:
            raise ConfigError(f"value {self.name!r} must have exactly one shape, got {len(shapes)}")
        if self.interval is not None and not self.interval[0] < self.interval[1]:
            raise ConfigError(f"value {self.name!r}: interval start must precede end")

    @property
    def is_crisp(self) -> bool:
        return self.trapezoid is None

    def shape_key(self) -> tuple:
        """Hashable identity of the shape, for caching."""
        if self.trapezoid is not None:
            return ("trap",) + self.trapezoid.as_tuple()
        if self.category is not None:
            return ("cat", normalize_category(self.category))
        return ("int",) + self.interval


def crisp_membership(value: LinguisticValue, x) -> TruthDegree:
    """Membership of x in a crisp value: 1 or 0, never in between."""
    if value.category is not None:
        if not isinstance(x, str):
            raise EvaluationError(
                f"value {value.name!r} is a category but got {type(x).__name__} input"
            )
        return 1.0 if normalize_category(x) == normalize_category(value.category) else 0.0
    if value.interval is not None:
        if isinstance(x, str):
            raise EvaluationError(
                f"value {value.name!r} is an interval but got a string input"
            )
        start, end = value.interval
        return 1.0 if start <= x < end else 0.0
    raise EvaluationError(f"value {value.name!r} is not crisp")


def value_membership(value: LinguisticValue, x) -> TruthDegree:
    """Membership of x in any value shape."""
    if value.trapezoid is not None:
        if isinstance(x, str):
            raise EvaluationError(
                f"value {value.name!r} is a trapezoid but got a string input"
            )
        return membership(value.trapezoid, x)
    return crisp_membership(value, x)


@dataclass(frozen=True)
class LinguisticVariable:
    """Ordered partition of one attribute's domain into linguistic values.

    `roles` restricts where the variable may be bound when statements are
    enumerated: as the quantified property ("summarizer"), as the subgroup
    restriction ("qualifier"), or both (the default).
    """

    name: str
    attribute: str
    values: tuple[LinguisticValue, ...]
    roles: frozenset[str] = frozenset({"summarizer", "qualifier"})

    def __post_init__(self):
        if not self.values:
            raise ConfigError(f"variable {self.name!r} has no values")
        names = [v.name for v in self.values]
        if len(set(names)) != len(names):
            raise ConfigError(f"variable {self.name!r} has duplicate value names")
        crisp = {v.is_crisp for v in self.values}
        if len(crisp) > 1:
            raise ConfigError(
                f"variable {self.name!r} mixes crisp and trapezoid values"
            )
        bad = self.roles - {"summarizer", "qualifier"}
        if bad:
            raise ConfigError(f"variable {self.name!r} has unknown roles {sorted(bad)}")

    def value(self, name: str) -> LinguisticValue:
        for v in self.values:
            if v.name == name:
                return v
        raise ConfigError(f"variable {self.name!r} has no value {name!r}")


def classify_quantifier_shape(shape: Trapezoid) -> str:
    if shape.c == 1.0 and shape.d == 1.0:
        return "non-decreasing"
    if shape.a == 0.0 and shape.b == 0.0:
        return "non-increasing"
    return "unimodal"


@dataclass(frozen=True)
class Quantifier:
    """Fuzzy proportion word ("most", "several", ...) as a trapezoid on [0,1]."""

    name: str
    shape: Trapezoid
    monotone: str = field(default="")

    def __post_init__(self):
        if not (0.0 <= self.shape.a and self.shape.d <= 1.0):
            raise ConfigError(
                f"quantifier {self.name!r} must live on [0,1], got {self.shape}"
            )
        inferred = classify_quantifier_shape(self.shape)
        if not self.monotone:
            object.__setattr__(self, "monotone", inferred)
        elif self.monotone != inferred:
            raise ConfigError(
                f"quantifier {self.name!r} declared {self.monotone} but its shape is {inferred}"
            )


def quantifier_eval(q: Quantifier, proportion: float) -> TruthDegree:
    """Truth of the quantifier for a satisfaction ratio in [0, 1]."""
    if not 0.0 <= proportion <= 1.0:
        raise ValueError(f"proportion must be in [0,1], got {proportion}")
    return membership(q.shape, proportion)


def t_norm_min(degrees) -> TruthDegree:
    """Conjunction of truth degrees: the minimum."""
    degrees = list(degrees)
    if not degrees:
        raise ValueError("t_norm_min requires at least one degree")
    return min(degrees)


def _support(value: LinguisticValue) -> tuple[float, bool, float, bool] | None:
    """(lo, lo_closed, hi, hi_closed) range where membership is positive.

    Ramps reach 0 at their outer bound (open endpoint); collapsed ramps are
    steps that carry membership at the bound itself (closed). Categories have
    no numeric support.
    """
    if value.trapezoid is not None:
        t = value.trapezoid
        lo, lo_closed = (t.a, False) if t.a < t.b else (t.b, True)
        hi, hi_closed = (t.d, False) if t.c < t.d else (t.c, True)
        return (lo, lo_closed, hi, hi_closed)
    if value.interval is not None:
        return (value.interval[0], True, value.interval[1], False)
    return None


def validate_partition(variable: LinguisticVariable) -> ValidationReport:
    """Hygiene checks for one variable: gaps inside the covered range and
    supports out of declaration order. Category partitions have no numeric
    line, so nothing to sweep.
    """
    report = ValidationReport()
    supports = []
    for v in variable.values:
        s = _support(v)
        if s is not None:
            supports.append((v.name, *s))
    if not supports:
        return report

    starts = [s[1] for s in supports]
    if starts != sorted(starts):
        report.add(
            "warning",
            variable.name,
            f"value supports are not in declared order: starts {starts}",
        )

    # Positive regions are intervals, so coverage holes sit exactly between
    # merged supports: either a full range, or a single touching point when
    # both neighbouring endpoints are open.
    by_start = sorted(supports, key=lambda s: (s[1], not s[2], s[3]))
    _, _, _, hi, hi_closed = by_start[0]
    for _, lo, lo_closed, nxt_hi, nxt_hi_closed in by_start[1:]:
        if lo > hi:
            report.add(
                "error",
                variable.name,
                f"gap: no value covers ({hi:g}, {lo:g}]",
            )
        elif lo == hi and not lo_closed and not hi_closed:
            report.add(
                "error",
                variable.name,
                f"gap: no value covers x = {lo:g}",
            )
        if nxt_hi > hi:
            hi, hi_closed = nxt_hi, nxt_hi_closed
        elif nxt_hi == hi:
            hi_closed = hi_closed or nxt_hi_closed
    return report

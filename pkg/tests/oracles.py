"""Independent brute-force implementations used as test oracles.

Nothing here imports the package's evaluation code paths: memberships,
sigma-counts and statistics are recomputed from first principles so that
agreement is meaningful.
"""
from __future__ import annotations

import unicodedata
from statistics import NormalDist


def eq3_mu(x: float, a: float, b: float, c: float, d: float) -> float:
    """Straight transcription of the piecewise trapezoid formula
    (non-degenerate: a < b and c < d)."""
    if (x <= a) or (x > d):
        return 0.0
    if a < x <= b:
        return (x - a) / (b - a)
    if b < x <= c:
        return 1.0
    return (d - x) / (d - c)


def oracle_mu(x: float, a: float, b: float, c: float, d: float) -> float:
    """Trapezoid membership including the degenerate-step conventions,
    written as containment tests rather than branch fallthrough."""
    core_lo, core_hi = b, c
    if a == b and c == d:
        return 1.0 if core_lo <= x <= core_hi else 0.0
    if a == b:
        if core_lo <= x <= core_hi:
            return 1.0
        if core_hi < x <= d:
            return (d - x) / (d - c)
        return 0.0
    if c == d:
        if core_lo < x <= core_hi:
            return 1.0
        if a < x <= core_lo:
            return (x - a) / (b - a)
        return 0.0
    return eq3_mu(x, a, b, c, d)


def oracle_value_mu(x, value) -> float:
    """Membership of x in a LinguisticValue, recomputed independently."""
    if value.trapezoid is not None:
        t = value.trapezoid
        return oracle_mu(x, t.a, t.b, t.c, t.d)
    if value.category is not None:
        norm = lambda s: unicodedata.normalize("NFC", s).strip()  # noqa: E731
        return 1.0 if norm(x) == norm(value.category) else 0.0
    start, end = value.interval
    return 1.0 if start <= x < end else 0.0


def oracle_case_mu(case, attribute: str, value) -> float:
    if attribute in case.attributes:
        x = case.attributes[attribute]
    elif attribute in case.derived_attributes:
        x = case.derived_attributes[attribute]
    else:
        return 0.0
    return oracle_value_mu(x, value)


def oracle_interval_mu(case, interval) -> float:
    return 1.0 if interval.start <= case.trace[0].timestamp < interval.end else 0.0


def oracle_quantifier(q, ratio: float) -> float:
    t = q.shape
    return oracle_mu(ratio, t.a, t.b, t.c, t.d)


def oracle_type1(log, q, attribute, value) -> float:
    total = 0.0
    for case in log.cases:
        total = total + oracle_case_mu(case, attribute, value)
    return oracle_quantifier(q, total / len(log.cases))


def oracle_type2(log, q, qual_attr, qual_value, summ_attr, summ_value) -> float:
    num = 0.0
    den = 0.0
    for case in log.cases:
        b = oracle_case_mu(case, qual_attr, qual_value)
        a = oracle_case_mu(case, summ_attr, summ_value)
        num = num + min(b, a)
        den = den + b
    if den == 0.0:
        return 0.0
    return oracle_quantifier(q, num / den)


def oracle_temporal(log, q, interval, attribute, value) -> float:
    num = 0.0
    den = 0.0
    for case in log.cases:
        ti = oracle_interval_mu(case, interval)
        num = num + min(ti, oracle_case_mu(case, attribute, value))
        den = den + ti
    if den == 0.0:
        return 0.0
    return oracle_quantifier(q, num / den)


def oracle_temporal_qualified(log, q, interval, qual_attr, qual_value,
                              summ_attr, summ_value) -> float:
    num = 0.0
    den = 0.0
    for case in log.cases:
        ti = oracle_interval_mu(case, interval)
        c = oracle_case_mu(case, qual_attr, qual_value)
        p = oracle_case_mu(case, summ_attr, summ_value)
        num = num + min(ti, p, c)
        den = den + min(ti, c)
    if den == 0.0:
        return 0.0
    return oracle_quantifier(q, num / den)


def oracle_relation(log, q, interval, durations_by_case, value,
                    aggregation: str = "first") -> float:
    num = 0.0
    den = 0.0
    for case in log.cases:
        ti = oracle_interval_mu(case, interval)
        ds = durations_by_case.get(case.case_id)
        if not ds:
            mu_r = 0.0
        else:
            if aggregation == "first":
                x = ds[0]
            elif aggregation == "mean":
                x = sum(ds) / len(ds)
            else:
                x = max(ds)
            mu_r = oracle_value_mu(x, value)
        num = num + min(ti, mu_r)
        den = den + ti
    if den == 0.0:
        return 0.0
    return oracle_quantifier(q, num / den)


def oracle_relation_qualified(log, q, interval, durations_by_case, value,
                              qual_attr, qual_value,
                              aggregation: str = "first") -> float:
    num = 0.0
    den = 0.0
    for case in log.cases:
        ti = oracle_interval_mu(case, interval)
        c = oracle_case_mu(case, qual_attr, qual_value)
        ds = durations_by_case.get(case.case_id)
        if not ds:
            mu_r = 0.0
        else:
            x = ds[0] if aggregation == "first" else (
                sum(ds) / len(ds) if aggregation == "mean" else max(ds))
            mu_r = oracle_value_mu(x, value)
        num = num + min(ti, mu_r, c)
        den = den + min(ti, c)
    if den == 0.0:
        return 0.0
    return oracle_quantifier(q, num / den)


def oracle_adjacent_counts(log) -> dict[tuple[str, str], int]:
    counts: dict[tuple[str, str], int] = {}
    for case in log.cases:
        for i in range(len(case.trace) - 1):
            pair = (case.trace[i].activity, case.trace[i + 1].activity)
            counts[pair] = counts.get(pair, 0) + 1
    return counts


def oracle_two_proportion_p(k1: int, n1: int, k2: int, n2: int) -> float:
    """Two-sided p-value of the unpooled two-proportion z statistic."""
    p1, p2 = k1 / n1, k2 / n2
    var = p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2
    if var == 0:
        return 1.0 if p1 == p2 else 0.0
    z = (p1 - p2) / var ** 0.5
    return 2.0 * (1.0 - NormalDist().cdf(abs(z)))


def oracle_partition_gaps(values, step: float = 1.0) -> bool:
    """Sweep the covered range at fixed steps; True when some sampled point
    has zero membership in every value."""
    import math

    points = []
    for v in values:
        if v.trapezoid is None:
            continue
        for p in v.trapezoid.as_tuple():
            if not math.isinf(p):
                points.append(p)
    if not points:
        return False
    lo, hi = min(points), max(points)
    x = lo
    while x <= hi:
        if all(oracle_value_mu(x, v) == 0.0 for v in values):
            return True
        x += step
    return False

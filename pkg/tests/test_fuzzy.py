import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from protosum.errors import ConfigError, EvaluationError
from protosum.fuzzy import (LinguisticValue, LinguisticVariable, Quantifier,
                            Trapezoid, classify_quantifier_shape,
                            crisp_membership, membership, quantifier_eval,
                            t_norm_min, validate_partition)

from conftest import ts
from oracles import eq3_mu, oracle_partition_gaps


def trap(a, b, c, d):
    return Trapezoid(a, b, c, d)


class TestMembership:
    def test_ascending_ramp(self):
        assert membership(trap(10, 20, 30, 40), 15) == 0.5

    def test_plateau(self):
        assert membership(trap(10, 20, 30, 40), 25) == 1.0

    def test_outside_right(self):
        assert membership(trap(10, 20, 30, 40), 45) == 0.0

    def test_boundary_semantics(self):
        t = trap(10, 20, 30, 40)
        assert membership(t, 10) == 0.0  # x <= a
        assert membership(t, 20) == 1.0  # top of the ramp
        assert membership(t, 30) == 1.0  # end of plateau
        assert membership(t, 40) == 0.0  # ramp reaches zero at d

    def test_descending_ramp(self):
        assert membership(trap(10, 20, 30, 40), 35) == 0.5

    def test_left_step_includes_boundary(self):
        t = trap(5, 5, 10, 20)
        assert membership(t, 5) == 1.0
        assert membership(t, 4.999) == 0.0
        assert membership(t, 15) == 0.5

    def test_right_step_zero_strictly_after(self):
        t = trap(0, 5, 10, 10)
        assert membership(t, 10) == 1.0
        assert membership(t, 10.001) == 0.0
        assert membership(t, 2.5) == 0.5

    def test_fully_crisp_closed_on_core(self):
        t = trap(3, 3, 7, 7)
        for x, expected in [(2.9, 0.0), (3, 1.0), (5, 1.0), (7, 1.0), (7.1, 0.0)]:
            assert membership(t, x) == expected

    def test_unbounded_shoulder(self):
        older_than_80 = trap(75, 80, math.inf, math.inf)
        assert membership(older_than_80, 90) == 1.0
        assert membership(older_than_80, 1e12) == 1.0
        assert membership(older_than_80, 77.5) == 0.5
        assert membership(older_than_80, 75) == 0.0

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ConfigError):
            trap(1, 0, 2, 3)
        with pytest.raises(ConfigError):
            trap(0, math.nan, 1, 2)


@given(
    st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
             min_size=4, max_size=4),
    st.floats(min_value=-2e6, max_value=2e6, allow_nan=False),
)
def test_membership_always_in_unit_interval(bounds, x):
    a, b, c, d = sorted(bounds)
    assert 0.0 <= membership(trap(a, b, c, d), x) <= 1.0


@given(
    st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
             min_size=4, max_size=4).filter(lambda v: len(set(v)) == 4),
    st.data(),
)
def test_membership_monotone_on_segments(bounds, data):
    a, b, c, d = sorted(bounds)
    t = trap(a, b, c, d)
    x1 = data.draw(st.floats(min_value=a, max_value=c, exclude_min=True))
    x2 = data.draw(st.floats(min_value=x1, max_value=c))
    assert membership(t, x1) <= membership(t, x2)
    y1 = data.draw(st.floats(min_value=c, max_value=d, exclude_min=True))
    y2 = data.draw(st.floats(min_value=y1, max_value=d))
    assert membership(t, y1) >= membership(t, y2)


def test_membership_matches_transcription_on_nondegenerate():
    import random

    rng = random.Random(4)
    for _ in range(300):
        a, b, c, d = sorted(rng.uniform(-100, 100) for _ in range(4))
        if not (a < b < c < d):
            continue
        for x in [a, b, c, d, rng.uniform(a - 10, d + 10)]:
            assert membership(trap(a, b, c, d), x) == eq3_mu(x, a, b, c, d)


class TestCrispMembership:
    def test_category_match(self):
        assert crisp_membership(LinguisticValue("male", category="Male"), "Male") == 1.0

    def test_category_mismatch(self):
        assert crisp_membership(LinguisticValue("male", category="Male"), "Female") == 0.0

    def test_category_is_case_sensitive_but_trims(self):
        v = LinguisticValue("male", category="Male")
        assert crisp_membership(v, "  Male ") == 1.0
        assert crisp_membership(v, "male") == 0.0

    def test_interval_containment(self):
        v = LinguisticValue(
            "2020", interval=(ts("2020-01-01 00:00"), ts("2021-01-01 00:00")))
        assert crisp_membership(v, ts("2020-06-15 00:00")) == 1.0
        assert crisp_membership(v, ts("2021-01-01 00:00")) == 0.0  # half-open
        assert crisp_membership(v, ts("2020-01-01 00:00")) == 1.0

    def test_kind_mismatch_raises(self):
        with pytest.raises(EvaluationError):
            crisp_membership(LinguisticValue("male", category="Male"), 3.0)

    def test_output_is_binary(self):
        v = LinguisticValue("x", interval=(0.0, 10.0))
        for x in [-1.0, 0.0, 5.0, 9.999, 10.0, 11.0]:
            assert crisp_membership(v, x) in (0.0, 1.0)


class TestTNormMin:
    def test_absorbing_zero(self):
        assert t_norm_min([1.0, 0.5, 0.0]) == 0.0

    def test_definition(self):
        assert t_norm_min([0.8, 0.6]) == 0.6

    def test_singleton_identity(self):
        assert t_norm_min([0.37]) == 0.37

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            t_norm_min([])

    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=6))
    def test_commutative_and_bounded(self, xs):
        assert t_norm_min(xs) == t_norm_min(list(reversed(xs)))
        assert t_norm_min(xs) <= min(xs)

    @given(
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
    )
    def test_associative_with_identity_one(self, x, y, z):
        assert t_norm_min([t_norm_min([x, y]), z]) == t_norm_min([x, t_norm_min([y, z])])
        assert t_norm_min([x, 1.0]) == x


class TestQuantifiers:
    def test_most_plateau(self, most):
        assert quantifier_eval(most, 1.0) == 1.0

    def test_most_ramp(self, most):
        assert quantifier_eval(most, 0.5) == pytest.approx((0.5 - 0.4) / 0.2)

    def test_crisp_all(self):
        all_q = Quantifier("all", trap(1, 1, 1, 1))
        assert quantifier_eval(all_q, 1.0) == 1.0
        assert quantifier_eval(all_q, 0.999) == 0.0

    def test_out_of_range_proportion(self, most):
        with pytest.raises(ValueError):
            quantifier_eval(most, 1.5)
        with pytest.raises(ValueError):
            quantifier_eval(most, -0.1)

    def test_shape_must_live_on_unit_interval(self):
        with pytest.raises(ConfigError):
            Quantifier("bad", trap(0.0, 0.5, 1.0, 1.5))

    def test_monotone_classification(self):
        assert classify_quantifier_shape(trap(0.4, 0.6, 1, 1)) == "non-decreasing"
        assert classify_quantifier_shape(trap(0, 0, 0.1, 0.2)) == "non-increasing"
        assert classify_quantifier_shape(trap(0.2, 0.4, 0.6, 0.8)) == "unimodal"
        assert classify_quantifier_shape(trap(1, 1, 1, 1)) == "non-decreasing"

    def test_declared_flag_verified(self):
        Quantifier("most", trap(0.4, 0.6, 1, 1), monotone="non-decreasing")
        with pytest.raises(ConfigError):
            Quantifier("most", trap(0.4, 0.6, 1, 1), monotone="non-increasing")


class TestValidatePartition:
    def _var(self, *traps):
        values = tuple(
            LinguisticValue(f"v{i}", trapezoid=t) for i, t in enumerate(traps)
        )
        return LinguisticVariable(name="v", attribute="x", values=values)

    def test_covering_partition_with_shoulder_has_no_gap(self):
        var = self._var(
            trap(0, 0, 10, 20),
            trap(10, 20, 30, 40),
            trap(30, 40, math.inf, math.inf),
        )
        report = validate_partition(var)
        assert not any("gap" in f.message for f in report)
        assert not oracle_partition_gaps(var.values)

    def test_gap_detected(self):
        var = self._var(trap(0, 0, 5, 10), trap(20, 30, 40, 50))
        report = validate_partition(var)
        gap_findings = [f for f in report.errors if "gap" in f.message]
        assert len(gap_findings) == 1
        assert "10" in gap_findings[0].message and "20" in gap_findings[0].message
        assert oracle_partition_gaps(var.values)

    def test_single_point_hole_detected(self):
        var = self._var(trap(0, 5, 5, 10), trap(10, 15, 15, 20))
        report = validate_partition(var)
        assert any("gap" in f.message for f in report.errors)
        assert oracle_partition_gaps(var.values)

    def test_single_crisp_value_clean(self):
        var = LinguisticVariable(
            name="sex", attribute="sex",
            values=(LinguisticValue("male", category="Male"),))
        assert not validate_partition(var).findings

    def test_out_of_order_supports_warn(self):
        var = self._var(trap(20, 30, 40, 50), trap(0, 0, 10, 25))
        report = validate_partition(var)
        assert any("order" in f.message for f in report.findings)

    def test_random_partitions_agree_with_sweep(self):
        import random

        rng = random.Random(11)
        for _ in range(60):
            traps = []
            x = 0.0
            for _ in range(rng.randint(2, 4)):
                if rng.random() < 0.3:
                    x += rng.randint(1, 5)  # leave a hole
                pts = sorted(x + rng.randint(0, 8) for _ in range(4))
                traps.append(trap(*[float(p) for p in pts]))
                x = pts[-1]
            var = self._var(*traps)
            analytic = any("gap" in f.message for f in validate_partition(var).errors)
            swept = oracle_partition_gaps(var.values, step=0.25)
            assert analytic == swept, f"disagreement on {traps}"


def test_variable_rejects_mixed_shapes():
    with pytest.raises(ConfigError):
        LinguisticVariable(
            name="bad", attribute="x",
            values=(
                LinguisticValue("t", trapezoid=trap(0, 1, 2, 3)),
                LinguisticValue("c", category="yes"),
            ),
        )


def test_value_requires_exactly_one_shape():
    with pytest.raises(ConfigError):
        LinguisticValue("both", trapezoid=trap(0, 1, 2, 3), category="x")
    with pytest.raises(ConfigError):
        LinguisticValue("neither")

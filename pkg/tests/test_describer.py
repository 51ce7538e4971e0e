import decimal
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linguareward.describer import (
    BURGERS_BUCKETS,
    FLUID_BUCKETS,
    TASK_DESCRIBERS,
    BucketTable,
    burgers_goal,
    describe_burgers,
    describe_fluid,
    describe_pendulum,
    fluid_goal,
    pendulum_goal,
    round2,
)


class TestRound2:
    def test_truncation_region(self):
        assert round2(1.204999) == "1.20"

    def test_negative_zero_normalized(self):
        assert round2(-0.004) == "0.00"

    def test_half_away_from_zero(self):
        # matches exact decimal arithmetic on the shortest representation
        assert round2(4.005) == "4.01"
        assert round2(-4.005) == "-4.01"
        assert round2(2.675) == "2.68"

    def test_integers(self):
        assert round2(4.0) == "4.00"
        assert round2(-8.0) == "-8.00"

    def test_non_finite_rejected(self):
        for bad in (math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                round2(bad)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False))
    def test_matches_decimal_oracle(self, x):
        expected = decimal.Decimal(repr(x)).quantize(
            decimal.Decimal("0.01"), rounding=decimal.ROUND_HALF_UP
        )
        s = format(expected, "f")
        if s == "-0.00":
            s = "0.00"
        assert round2(x) == s

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-100, 100, allow_nan=False))
    def test_always_two_decimals(self, x):
        s = round2(x)
        assert "." in s and len(s.split(".")[1]) == 2


class TestPendulumSentences:
    def test_reference_sentence(self):
        assert describe_pendulum(1.2, 4.0) == "The state is at θ = 1.20, θ̇ = 4.00."

    def test_goal_state(self):
        assert describe_pendulum(0.0, 0.0) == "The state is at θ = 0.00, θ̇ = 0.00."

    def test_negative_components(self):
        assert (
            describe_pendulum(-3.14159, -7.999)
            == f"The state is at θ = {round2(-3.14159)}, θ̇ = {round2(-7.999)}."
        )
        assert describe_pendulum(-3.14159, -7.999) == "The state is at θ = -3.14, θ̇ = -8.00."

    def test_goal_equals_origin_rendering(self):
        assert pendulum_goal() == describe_pendulum(0.0, 0.0)

    def test_unicode_codepoints(self):
        s = pendulum_goal()
        assert "θ" in s
        assert "θ̇" in s

    def test_precondition_bounds(self):
        with pytest.raises(ValueError):
            describe_pendulum(3.2, 0.0)
        with pytest.raises(ValueError):
            describe_pendulum(0.0, 8.5)

    def test_deterministic(self):
        assert describe_pendulum(0.5, -0.25) == describe_pendulum(0.5, -0.25)


class TestBurgersSentences:
    @pytest.mark.parametrize(
        "l2,label",
        [
            (0.15, "Level A"),
            (0.2, "Level B"),
            (0.3, "Level C"),
            (0.45, "Level D"),
            (0.55, "Level E"),
            (0.65, "excellent"),
            (0.75, "better"),
            (0.85, "good"),
            (0.95, "normal"),
            (1.05, "bad"),
            (1.25, "collapse"),
            (50.0, "collapse"),
        ],
    )
    def test_bucket_labels(self, l2, label):
        assert describe_burgers(l2) == f"State L2 level: {label}. L2 = {round2(l2)}."

    def test_lower_bound_inclusive(self):
        assert "Level B" in describe_burgers(0.2)
        assert "Level A" in describe_burgers(0.19999)

    def test_goal(self):
        assert burgers_goal() == "State L2 level: Level A. L2 = 0.00."
        assert describe_burgers(0.0) == burgers_goal()

    def test_zero_shares_goal_bucket(self):
        assert describe_burgers(0.0).split(".")[0] == burgers_goal().split(".")[0]

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            describe_burgers(-0.1)


class TestFluidSentences:
    def test_negligible(self):
        assert describe_fluid(0.05) == "Drag is negligible, well done. Cp2 = 0.00."

    def test_severe(self):
        assert (
            describe_fluid(-0.7)
            == "Severe drag condition detected, flow heavily impeded. Cp2 = 0.49."
        )

    def test_zero(self):
        assert describe_fluid(0.0) == "Drag is negligible, well done. Cp2 = 0.00."

    def test_goal_matches_zero_state(self):
        assert fluid_goal() == describe_fluid(0.0)

    def test_sign_symmetric(self):
        assert describe_fluid(0.3) == describe_fluid(-0.3)

    @pytest.mark.parametrize(
        "cp2,label",
        [
            (0.005, "Drag is negligible, well done"),
            (0.01, "Drag is minimal with slight resistance"),
            (0.05, "Drag is mild but noticeable"),
            (0.10, "Drag is moderate and affecting motion"),
            (0.20, "Drag is strong and significantly slowing flow"),
            (0.35, "Severe drag condition detected, flow heavily impeded"),
        ],
    )
    def test_cp2_thresholds_lower_inclusive(self, cp2, label):
        assert FLUID_BUCKETS.label(cp2) == label

    @pytest.mark.parametrize(
        "cp,label",
        [
            (0.09, "Drag is negligible, well done"),
            (0.15, "Drag is minimal with slight resistance"),
            (0.25, "Drag is mild but noticeable"),
            (0.38, "Drag is moderate and affecting motion"),
            (0.5, "Drag is strong and significantly slowing flow"),
            (0.8, "Severe drag condition detected, flow heavily impeded"),
        ],
    )
    def test_cp_interior_points(self, cp, label):
        assert describe_fluid(cp).startswith(label)


class TestBucketTable:
    def test_rejects_gap(self):
        with pytest.raises(ValueError, match="contiguous"):
            BucketTable("m", ((0.0, 0.5, "lo"), (0.6, math.inf, "hi")))

    def test_rejects_finite_end(self):
        with pytest.raises(ValueError, match="inf"):
            BucketTable("m", ((0.0, 0.5, "lo"), (0.5, 1.0, "hi")))

    def test_rejects_nonzero_start(self):
        with pytest.raises(ValueError, match="start at 0"):
            BucketTable("m", ((0.1, math.inf, "all"),))

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0, 10, allow_nan=False))
    def test_totality_burgers(self, value):
        labels = [label for lo, hi, label in BURGERS_BUCKETS.bins if lo <= value < hi]
        assert len(labels) == 1
        assert BURGERS_BUCKETS.label(value) == labels[0]

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0, 10, allow_nan=False))
    def test_totality_fluid(self, value):
        labels = [label for lo, hi, label in FLUID_BUCKETS.bins if lo <= value < hi]
        assert len(labels) == 1


class TestTaskDescribers:
    def test_registry_tasks(self):
        assert set(TASK_DESCRIBERS) == {"pendulum", "burgers", "fluid"}

    def test_goal_fixed_points(self):
        pend = TASK_DESCRIBERS["pendulum"]
        assert pend.describe({"theta": 0.0, "theta_dot": 0.0}) == pend.goal()
        burg = TASK_DESCRIBERS["burgers"]
        assert burg.describe({"l2": 0.0}) == burg.goal()
        fluid = TASK_DESCRIBERS["fluid"]
        assert fluid.describe({"cp": 0.0}) == fluid.goal()

    def test_missing_metric(self):
        with pytest.raises(KeyError, match="theta_dot"):
            TASK_DESCRIBERS["pendulum"].describe({"theta": 0.0})

    def test_finite_sentence_space_at_two_decimals(self):
        # distinct rounded values over the state box: 629 angles x 1601 speeds
        thetas = {round2(-math.pi + 0.01 * k) for k in range(629)}
        speeds = {round2(-8.0 + 0.01 * k) for k in range(1601)}
        assert len(thetas) <= 629
        assert len(speeds) <= 1601

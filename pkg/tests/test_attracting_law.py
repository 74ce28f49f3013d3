import math
from dataclasses import replace

import numpy as np
import pytest

from scaled_consensus import (
    ALParams,
    PowerRatio,
    al_rhs,
    corollary_compare,
    oracle_base_step,
    scalar_settling_time,
    settling_bounds_state_dependent,
    settling_bounds_state_independent,
    signed_power,
    transformed_params,
)


class TestParams:
    def test_even_numerator_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            ALParams(rho=1.0, kappa1=1.0, kappa2=1.0, gamma1=(2, 4), gamma2=(5, 3))

    def test_gamma1_must_be_below_one(self):
        with pytest.raises(ValueError, match="below 1"):
            ALParams(rho=1.0, kappa1=1.0, kappa2=1.0, gamma1=(3, 3), gamma2=(5, 3))

    def test_gamma2_must_be_above_one(self):
        with pytest.raises(ValueError, match="above 1"):
            ALParams(rho=1.0, kappa1=1.0, kappa2=1.0, gamma1=(1, 3), gamma2=(3, 3))

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError, match="kappa1"):
            ALParams(rho=1.0, kappa1=-1.0, kappa2=1.0, gamma1=(1, 3), gamma2=(5, 3))
        with pytest.raises(ValueError, match="rho"):
            ALParams(rho=-0.5, kappa1=1.0, kappa2=1.0, gamma1=(1, 3), gamma2=(5, 3))

    def test_ratio_stored_exactly(self, gal_params):
        assert gal_params.gamma1 == PowerRatio(1, 3)
        assert gal_params.gamma2.value == pytest.approx(5.0 / 3.0)


class TestRhs:
    def test_unit_state(self, gal_params):
        assert al_rhs(gal_params, 1.0) == -4.0

    def test_origin_is_equilibrium(self, gal_params):
        assert al_rhs(gal_params, 0.0) == 0.0

    def test_odd_symmetry_exact(self, gal_params):
        for x in (-1.0, 0.25, 3.7, -128.0, 1e-6, 1e6):
            assert al_rhs(gal_params, -x) == -al_rhs(gal_params, x)

    def test_strict_dissipation(self, gal_params, dp_params):
        for params in (gal_params, dp_params):
            for x in (-1e6, -5.0, -1e-4, 1e-4, 0.3, 7.0, 1e6):
                assert x * al_rhs(params, x) < 0.0

    def test_signed_power_at_zero(self):
        assert signed_power(0.0, 1.0 / 3.0) == 0.0
        assert signed_power(-8.0, 1.0 / 3.0) == pytest.approx(-2.0)


class TestStateDependentBounds:
    def test_origin_gives_zero_interval(self, gal_params, dp_params):
        for params in (gal_params, dp_params):
            bounds = settling_bounds_state_dependent(params, 0.0)
            assert bounds.lower == bounds.upper == 0.0

    def test_double_power_small_state_upper(self, dp_params):
        bounds = settling_bounds_state_dependent(dp_params, 0.5)
        assert bounds.upper == pytest.approx(1.5 * 0.5 ** (2.0 / 3.0), rel=1e-12)
        assert bounds.regime == "x0<1"
        # the interval brackets the integrated settling time
        measured = scalar_settling_time(dp_params, 0.5)
        assert bounds.lower <= measured <= bounds.upper

    def test_three_term_large_state_brackets_oracle(self, gal_params):
        bounds = settling_bounds_state_dependent(gal_params, 10.0)
        assert bounds.regime == "x0>=1"
        measured = scalar_settling_time(gal_params, 10.0)
        slack = 2.0 * oracle_base_step(gal_params)
        assert bounds.lower - slack <= measured <= bounds.upper + slack

    def test_upper_bound_monotone_in_initial_state(self, gal_params, dp_params):
        for params in (gal_params, dp_params):
            magnitudes = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3, 1e6]
            uppers = [
                settling_bounds_state_dependent(params, m).upper
                for m in magnitudes
            ]
            assert all(a <= b + 1e-12 for a, b in zip(uppers, uppers[1:]))

    def test_symmetric_in_sign(self, gal_params):
        plus = settling_bounds_state_dependent(gal_params, 3.0)
        minus = settling_bounds_state_dependent(gal_params, -3.0)
        assert plus == minus


class TestStateIndependentBounds:
    def test_unit_connectivity_values(self, gal_params):
        scaled = transformed_params(gal_params, 1.0, 6)
        gal = settling_bounds_state_independent(scaled)
        assert gal.lower == pytest.approx(0.82, abs=0.01)
        assert gal.upper == pytest.approx(1.96, abs=0.01)
        dp = settling_bounds_state_independent(scaled.without_proportional_term())
        assert dp.lower == pytest.approx(1.35, abs=0.01)
        assert dp.upper == pytest.approx(4.05, abs=0.01)

    def test_mirrored_connectivity_values(self, gal_params):
        scaled = transformed_params(gal_params, 0.9383, 6)
        gal = settling_bounds_state_independent(scaled)
        assert gal.lower == pytest.approx(0.87, abs=0.01)
        assert gal.upper == pytest.approx(2.09, abs=0.01)
        dp = settling_bounds_state_independent(scaled.without_proportional_term())
        assert dp.lower == pytest.approx(1.43, abs=0.01)
        assert dp.upper == pytest.approx(4.32, abs=0.01)

    def test_upper_dominates_state_dependent_upper(self, gal_params):
        independent = settling_bounds_state_independent(gal_params)
        for x0 in (0.1, 1.0, 100.0, 1e9):
            dependent = settling_bounds_state_dependent(gal_params, x0)
            assert dependent.upper <= independent.upper + 1e-12


class TestTransformedParams:
    def test_unit_connectivity(self, gal_params):
        scaled = transformed_params(gal_params, 1.0, 6)
        assert scaled.rho == 2.0
        assert scaled.kappa1 == pytest.approx(2.0 ** (-1.0 / 3.0), rel=1e-12)
        assert scaled.kappa2 == pytest.approx((1.0 / 3.0) ** (1.0 / 3.0), rel=1e-12)
        assert scaled.gamma1 == gal_params.gamma1
        assert scaled.gamma2 == gal_params.gamma2

    def test_mirrored_connectivity(self, gal_params):
        scaled = transformed_params(gal_params, 0.9383, 6)
        assert scaled.rho == pytest.approx(1.8766, abs=1e-4)
        assert scaled.kappa1 == pytest.approx(0.7607, abs=1e-4)
        assert scaled.kappa2 == pytest.approx(0.6370, abs=1e-4)

    def test_nonpositive_connectivity_rejected(self, gal_params):
        with pytest.raises(ValueError, match="connected"):
            transformed_params(gal_params, 0.0, 6)

    def test_tiny_network_rejected(self, gal_params):
        with pytest.raises(ValueError, match="agents"):
            transformed_params(gal_params, 1.0, 1)


class TestCorollary:
    def test_example_parameters(self, gal_params):
        scaled = transformed_params(gal_params, 1.0, 6)
        assert corollary_compare(scaled)

    def test_seeded_parameter_sweep(self):
        rng = np.random.default_rng(117)
        odd = [1, 3, 5, 7, 9, 11]
        for _ in range(100):
            q, p = sorted(rng.choice(odd, size=2, replace=False))
            n, m = sorted(rng.choice(odd, size=2, replace=False))
            params = ALParams(
                rho=float(rng.uniform(1e-6, 10.0)),
                kappa1=float(rng.uniform(0.05, 10.0)),
                kappa2=float(rng.uniform(0.05, 10.0)),
                gamma1=(int(q), int(p)),
                gamma2=(int(m), int(n)),
            )
            assert corollary_compare(params)

    def test_bounds_continuous_as_rho_vanishes(self, gal_params):
        near_zero = replace(gal_params, rho=1e-9)
        limit = settling_bounds_state_independent(near_zero)
        plain = settling_bounds_state_independent(
            gal_params.without_proportional_term()
        )
        assert limit.lower == pytest.approx(plain.lower, abs=1e-3)
        assert limit.upper == pytest.approx(plain.upper, abs=1e-3)

    def test_requires_proportional_term(self, dp_params):
        with pytest.raises(ValueError, match="rho"):
            corollary_compare(dp_params)


class TestScalarOracle:
    def test_settles_from_origin_immediately(self, gal_params):
        assert scalar_settling_time(gal_params, 0.0) == 0.0

    def test_containment_spot_checks(self, gal_params, dp_params):
        for params in (gal_params, dp_params):
            slack = 2.0 * oracle_base_step(params)
            for x0 in (-3.0, 0.5, 10.0):
                measured = scalar_settling_time(params, x0)
                bounds = settling_bounds_state_dependent(params, x0)
                assert bounds.lower - slack <= measured <= bounds.upper + slack

    def test_fixed_time_cap_at_huge_state(self, gal_params):
        measured = scalar_settling_time(gal_params, 1e6)
        assert measured <= settling_bounds_state_independent(gal_params).upper

    def test_sign_symmetric(self, gal_params):
        assert scalar_settling_time(gal_params, 2.5) == scalar_settling_time(
            gal_params, -2.5
        )

    def test_double_power_slower_than_three_term(self, gal_params):
        fast = scalar_settling_time(gal_params, 5.0)
        slow = scalar_settling_time(
            gal_params.without_proportional_term(), 5.0
        )
        assert fast < slow

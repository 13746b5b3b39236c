import pytest
from hypothesis import given, strategies as st

from gphi.contraction import AffineMap, FiniteMap, certify_condition_G
from gphi.errors import BudgetExhausted, OrbitTooShort, TailNotSmall
from gphi.gauges import IdentityGauge, LinearPhi
from gphi.harness import generate_operator, generate_space
from gphi.solver import (
    enumerate_fixed_points,
    m_epsilon,
    picard_iterate,
    trace_from_json,
    verify_cauchy_bound,
    verify_g1_termination,
    verify_invariant_ball,
    verify_step_chaining,
)
from gphi.spaces import AnalyticSpace, check_limit_bounds, validate_finite_space

THREE_POINT = validate_finite_space([[0.0, 1.0, 2.0], [1.0, 0.0, 4.0], [2.0, 4.0, 0.0]])
UNIT = AnalyticSpace(0.0, 1.0, 1.0)
UNIT_SQ = AnalyticSpace(0.0, 1.0, 2.0)
TWO_CYCLE_SPACE = validate_finite_space([[0.0, 1.0], [1.0, 0.0]])
SWAP = FiniteMap((1, 0))


class TestPicardIterate:
    def test_worked_finite_orbit(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((0, 0, 1)), 2)
        assert trace.orbit == (2, 1, 0, 0)
        assert trace.step_dists == (4.0, 1.0, 0.0)
        assert trace.stop_reason == "exact-fixed-point"
        assert trace.k_stop == 2
        assert trace.fixed_point == 0

    def test_affine_orbit_prefix(self):
        # closed form x_k = (1 - 2^-k) / 2: 0, 0.25, 0.375, 0.4375, ...
        trace = picard_iterate(UNIT, AffineMap(0.5, 0.25), 0.0)
        assert trace.orbit[:4] == (0.0, 0.25, 0.375, 0.4375)
        assert abs(trace.fixed_point - 0.5) < 1e-10
        assert trace.k_stop <= 40

    def test_identity_stops_immediately(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((0, 1, 2)), 1)
        assert trace.stop_reason == "exact-fixed-point"
        assert trace.k_stop == 0
        assert trace.fixed_point == 1
        assert trace.orbit == (1, 1)

    def test_two_cycle_annotated(self):
        trace = picard_iterate(TWO_CYCLE_SPACE, SWAP, 0, max_iter=50)
        assert trace.stop_reason == "budget-exhausted"
        assert trace.cycle is not None
        assert set(trace.cycle) == {0, 1}

    def test_deterministic_rerun(self):
        a = picard_iterate(UNIT, AffineMap(0.5, 0.25), 0.0)
        b = picard_iterate(UNIT, AffineMap(0.5, 0.25), 0.0)
        assert a == b

    def test_orbit_consistency_invariant(self):
        from gphi.contraction import apply
        trace = picard_iterate(THREE_POINT, FiniteMap((0, 0, 1)), 2)
        for j in range(len(trace.orbit) - 1):
            assert trace.orbit[j + 1] == apply(FiniteMap((0, 0, 1)), THREE_POINT,
                                               trace.orbit[j])
            assert trace.step_dists[j] == THREE_POINT.distance(
                trace.orbit[j], trace.orbit[j + 1])

    def test_record_cap_thins_head_keeps_tail(self):
        trace = picard_iterate(UNIT, AffineMap(0.999, 0.0), 1.0,
                               max_iter=300, tol=0.0, record_cap=50, tail_window=10)
        assert trace.stop_reason == "budget-exhausted"
        assert len(trace.step_dists) == 300            # steps keep every iteration
        assert len(trace.orbit) <= 60
        assert list(trace.indices) == sorted(set(trace.indices))
        assert trace.indices[-1] == 300                # tail window intact

    def test_json_round_trip(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((0, 0, 1)), 2)
        again = trace_from_json(trace.to_json())
        assert again == trace


class TestEnumerateFixedPoints:
    def test_single(self):
        assert enumerate_fixed_points(THREE_POINT, FiniteMap((0, 0, 1))) == {0}

    def test_identity(self):
        assert enumerate_fixed_points(THREE_POINT, FiniteMap((0, 1, 2))) == {0, 1, 2}

    def test_transposition(self):
        assert enumerate_fixed_points(THREE_POINT, FiniteMap((1, 0, 2))) == {2}


class TestG1Termination:
    def test_exact_stop_passes(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((0, 0, 1)), 2)
        assert verify_g1_termination(trace)

    def test_budget_stop_fails(self):
        trace = picard_iterate(TWO_CYCLE_SPACE, SWAP, 0, max_iter=10)
        assert not verify_g1_termination(trace)

    def test_constant_map(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((1, 1, 1)), 0)
        assert verify_g1_termination(trace)
        assert trace.k_stop <= 1


class TestMEpsilon:
    def test_halving_map(self):
        # orbit 1, 1/2, 1/4, ...: d(x_2, x_1) = 1/4 < 1/2 already at m = 1
        assert m_epsilon(UNIT, AffineMap(0.5, 0.0), 1.0, n=1, eps=1.0, s=1.0) == 1

    def test_constant_map(self):
        space = THREE_POINT
        assert m_epsilon(space, FiniteMap((1, 1, 1)), 0, n=2, eps=0.5, s=space.s) == 1

    def test_budget_exhausted_on_cycle(self):
        with pytest.raises(BudgetExhausted):
            m_epsilon(TWO_CYCLE_SPACE, SWAP, 0, n=1, eps=0.5, s=1.0, budget=20)

    def test_matches_trace_based_scan(self):
        from gphi.solver import _m_epsilon_on_trace
        trace = picard_iterate(UNIT, AffineMap(0.5, 0.0), 1.0)
        direct = m_epsilon(UNIT, AffineMap(0.5, 0.0), 1.0, n=2, eps=0.25, s=1.0)
        assert direct == _m_epsilon_on_trace(trace, 2, 0.25, 1.0, 10_000)


class TestInvariantBall:
    def test_certified_finite_instance(self):
        T = FiniteMap((0, 0, 1))
        cert = certify_condition_G(THREE_POINT, T, IdentityGauge(), LinearPhi(0.5))
        assert cert.verdict == "certified"
        trace = picard_iterate(THREE_POINT, T, 2)
        # eps0 = 1 for the identity gauge; eps = 1/2, n = 3, m = 1 by scan
        assert verify_invariant_ball(THREE_POINT, T, trace, eps=0.5, n=3, m=1)

    def test_ball_covering_whole_space(self):
        small = validate_finite_space([[0.0, 0.01, 0.02],
                                       [0.01, 0.0, 0.015],
                                       [0.02, 0.015, 0.0]])
        T = FiniteMap((0, 0, 0))
        trace = picard_iterate(small, T, 2)
        assert verify_invariant_ball(small, T, trace, eps=0.5, n=1, m=1)

    def test_swap_map_escapes_ball(self):
        trace = picard_iterate(TWO_CYCLE_SPACE, SWAP, 0, max_iter=10)
        assert not verify_invariant_ball(TWO_CYCLE_SPACE, SWAP, trace,
                                         eps=0.5, n=1, m=1)

    def test_orbit_too_short(self):
        trace = picard_iterate(TWO_CYCLE_SPACE, SWAP, 0, max_iter=4)
        with pytest.raises(OrbitTooShort):
            verify_invariant_ball(TWO_CYCLE_SPACE, SWAP, trace, eps=0.5, n=10, m=3)

    def test_analytic_sampled_ball(self):
        T = AffineMap(0.5, 0.25)
        trace = picard_iterate(UNIT, T, 0.0)
        assert verify_invariant_ball(UNIT, T, trace, eps=0.25, n=2, m=1)


class TestStepChaining:
    def test_halving_map_blocks(self):
        # steps d(x_{k+1}, x_k) = 2^-(k+1); threshold 0.1/(2*1) = 0.05 is first
        # cleared from k0 = 4, so m0 = ceil(5/2) = 3
        trace = picard_iterate(UNIT, AffineMap(0.5, 0.0), 1.0)
        m0, holds = verify_step_chaining(trace, n=2, eps=0.1, s=1.0)
        assert m0 == 3
        assert holds

    def test_constant_trace(self):
        trace = picard_iterate(THREE_POINT, FiniteMap((1, 1, 1)), 1)
        m0, holds = verify_step_chaining(trace, n=2, eps=0.5, s=THREE_POINT.s)
        assert m0 == 1
        assert holds

    def test_single_step_blocks_trivial(self):
        trace = picard_iterate(UNIT, AffineMap(0.5, 0.0), 1.0)
        m0, holds = verify_step_chaining(trace, n=1, eps=0.05, s=1.0)
        assert holds

    def test_tail_not_small_on_cycle(self):
        trace = picard_iterate(TWO_CYCLE_SPACE, SWAP, 0, max_iter=12)
        with pytest.raises(TailNotSmall):
            verify_step_chaining(trace, n=2, eps=0.5, s=1.0)


class TestCauchyBound:
    def test_squared_distance_pipeline(self):
        # d = |x-y|^2 has s = 2, so the bound is 4 * 8 * eps = 32 eps
        T = AffineMap(0.5, 0.0)
        cert = certify_condition_G(UNIT_SQ, T, IdentityGauge(), LinearPhi(0.25))
        assert cert.verdict != "violated"
        trace = picard_iterate(UNIT_SQ, T, 1.0)
        diag = verify_cauchy_bound(UNIT_SQ, trace, IdentityGauge(), LinearPhi(0.25),
                                   eps=0.5)
        assert diag.bound == 32.0 * 0.5
        assert diag.holds

    def test_banach_case_bound(self):
        T = AffineMap(0.5, 0.25)
        trace = picard_iterate(UNIT, T, 0.0)
        diag = verify_cauchy_bound(UNIT, trace, IdentityGauge(), LinearPhi(0.5),
                                   eps=0.5)
        assert diag.bound == 4.0 * 0.5
        assert diag.holds
        assert diag.m_bar == max(diag.m, diag.m0)

    def test_truncated_trace_raises(self):
        T = AffineMap(0.5, 0.0)
        trace = picard_iterate(UNIT, T, 1.0, max_iter=3, tol=0.0)
        with pytest.raises((OrbitTooShort, TailNotSmall)):
            verify_cauchy_bound(UNIT, trace, IdentityGauge(), LinearPhi(0.5), eps=0.5)

    def test_pipeline_survives_thinned_trace(self):
        # stride gaps in the recorded head must be skipped, not fatal
        T = AffineMap(0.98, 0.0)
        trace = picard_iterate(UNIT, T, 1.0, max_iter=2000, tol=1e-14,
                               record_cap=60, tail_window=15)
        assert trace.stop_reason == "exact-fixed-point"
        diag = verify_cauchy_bound(UNIT, trace, IdentityGauge(), LinearPhi(0.98),
                                   eps=0.25, n_budget=10 ** 6)
        assert diag.holds
        assert verify_invariant_ball(UNIT, T, trace, 0.25, diag.n, diag.m)


class TestLimitBoundsOnSolverOrbits:
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_convergent_orbits_respect_bounds(self, p):
        space = AnalyticSpace(0.0, 1.0, p)
        T = AffineMap(0.6, 0.1)
        trace = picard_iterate(space, T, 0.95, max_iter=5000, tol=1e-13)
        assert trace.stop_reason == "exact-fixed-point"
        for y_star in (0.0, 0.3, 0.9):
            rep = check_limit_bounds(space, trace.orbit, trace.fixed_point, y_star)
            assert rep.holds


class TestFuzzGeneratedInstances:
    @given(st.integers(min_value=0, max_value=400))
    def test_certified_instances_converge_from_every_start(self, seed):
        space = generate_space(f"solver:{seed}", 2 + seed % 7)
        T = generate_operator(f"solver-op:{seed}", space, bias_contractive=True)
        cert = certify_condition_G(space, T, IdentityGauge(), LinearPhi(0.9))
        if cert.verdict != "certified":
            return
        fps = enumerate_fixed_points(space, T)
        assert len(fps) == 1
        fp = next(iter(fps))
        for x0 in space.points:
            trace = picard_iterate(space, T, x0, max_iter=64)
            assert trace.stop_reason == "exact-fixed-point"
            assert trace.fixed_point == fp

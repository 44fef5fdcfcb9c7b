"""Bound assembly tests: shift exponents, the sandwich chain, layered
weights, the power envelope, and the extremal slab construction."""

import math

import numpy as np
import pytest

from shiftbounds import (
    Direction,
    DomainError,
    Layer,
    LpBall,
    ShapeError,
    Slab,
    as_layered,
    build_covariance,
    build_layered,
    conditional_coordinate_ceiling,
    derivative_floor,
    extremal_slab,
    identity_covariance,
    oracle_slab,
    power_envelope,
    ratio_bounds_layered,
    ratio_bounds_set,
    shift_exponent,
    shift_ratio,
    transform,
)


def random_spd_cov(rng, n, ridge=0.5):
    a = rng.standard_normal((n, n))
    return build_covariance(a @ a.T + ridge * np.eye(n))


class TestShiftExponent:
    def test_slab_along_direction(self):
        cov = identity_covariance(2)
        u = Direction.axis(2)
        a, exact = shift_exponent(cov, Slab(normal=u, halfwidth=1.4), u)
        assert a == pytest.approx(1.4, rel=1e-12)
        assert exact

    def test_ball_is_radius(self):
        # For Sigma = I the exponent of B_r is r in every direction.
        cov = identity_covariance(3)
        rng = np.random.default_rng(61)
        ball = LpBall(dim=3, p=2.0, radius=2.5)
        for _ in range(10):
            u = Direction.from_vector(rng.standard_normal(3))
            a, exact = shift_exponent(cov, ball, u)
            assert a == pytest.approx(2.5, rel=1e-12)
            assert exact

    def test_unbounded_body_gives_inf(self):
        cov = identity_covariance(2)
        slab = Slab(normal=Direction.axis(2, 0), halfwidth=1.0)
        a, exact = shift_exponent(cov, slab, Direction.axis(2, 1))
        assert a == math.inf
        assert exact

    def test_intersection_flags_upper_bound(self):
        from shiftbounds import Intersection

        cov = identity_covariance(2)
        body = Intersection(
            parts=(LpBall(dim=2, p=2.0, radius=2.0), LpBall(dim=2, p=math.inf, radius=1.5))
        )
        _, exact = shift_exponent(cov, body, Direction.axis(2))
        assert not exact

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            shift_exponent(identity_covariance(3), LpBall(dim=2, p=2.0, radius=1.0), Direction.axis(3))


class TestRatioBounds:
    def test_chain_holds(self):
        rng = np.random.default_rng(67)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            cov = random_spd_cov(rng, n)
            u = Direction.from_vector(rng.standard_normal(n))
            body = LpBall(dim=n, p=2.0, radius=float(rng.uniform(0.5, 3.0)))
            t = float(rng.uniform(0.0, 3.0))
            report = ratio_bounds_set(cov, body, u, t)
            assert report.lower <= report.upper + 1e-12
            assert report.upper <= 1.0
            assert report.lower > 0.0

    def test_zero_shift_is_exactly_one(self):
        cov = identity_covariance(2)
        report = ratio_bounds_set(cov, LpBall(dim=2, p=2.0, radius=1.0), Direction.axis(2), 0.0)
        assert report.lower == 1.0
        assert report.upper == 1.0

    def test_lower_bound_formula(self):
        cov = build_covariance(np.diag([4.0, 1.0]))
        u = Direction.axis(2, 0)
        t = 2.0
        report = ratio_bounds_set(cov, LpBall(dim=2, p=2.0, radius=1.0), u, t)
        assert report.mahalanobis == pytest.approx(0.5, rel=1e-12)
        assert report.lower == pytest.approx(math.exp(-0.5 * (t * 0.5) ** 2), rel=1e-12)

    def test_unbounded_exponent_degenerates_to_one(self):
        cov = identity_covariance(2)
        slab = Slab(normal=Direction.axis(2, 0), halfwidth=1.0)
        report = ratio_bounds_set(cov, slab, Direction.axis(2, 1), 2.0)
        assert report.upper == 1.0
        assert report.exponent_a == math.inf

    def test_negative_shift_rejected(self):
        with pytest.raises(DomainError):
            ratio_bounds_set(
                identity_covariance(2), LpBall(dim=2, p=2.0, radius=1.0), Direction.axis(2), -0.5
            )


class TestLayered:
    def test_single_layer_matches_set_route(self):
        # A unit-weight single layer must reproduce the indicator bounds
        # field for field, bit for bit.
        rng = np.random.default_rng(71)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            cov = random_spd_cov(rng, n)
            u = Direction.from_vector(rng.standard_normal(n))
            body = LpBall(dim=n, p=2.0, radius=float(rng.uniform(0.5, 2.5)))
            t = float(rng.uniform(0.0, 2.0))
            direct = ratio_bounds_set(cov, body, u, t)
            layered = ratio_bounds_layered(cov, as_layered(body), u, t)
            assert direct == layered

    def test_exponent_comes_from_outermost_layer(self):
        w = build_layered(
            [
                Layer(1.0, LpBall(dim=2, p=2.0, radius=2.0)),
                Layer(0.5, LpBall(dim=2, p=2.0, radius=1.0)),
            ]
        )
        cov = identity_covariance(2)
        a, exact = shift_exponent(cov, w.support_body, Direction.axis(2))
        assert a == pytest.approx(2.0, rel=1e-12)
        assert exact
        assert w.max_value == pytest.approx(1.5)

    def test_evaluate_batch_sums_layers(self):
        w = build_layered(
            [
                Layer(1.0, LpBall(dim=2, p=2.0, radius=2.0)),
                Layer(0.5, LpBall(dim=2, p=2.0, radius=1.0)),
            ]
        )
        pts = np.array([[0.0, 0.0], [1.5, 0.0], [3.0, 0.0]])
        np.testing.assert_allclose(w.evaluate_batch(pts), [1.5, 1.0, 0.0])

    def test_rejects_non_nested_layers(self):
        with pytest.raises(DomainError, match="not nested"):
            build_layered(
                [
                    Layer(1.0, LpBall(dim=2, p=2.0, radius=1.0)),
                    Layer(0.5, LpBall(dim=2, p=2.0, radius=2.0)),
                ]
            )

    def test_rejects_sideways_layers(self):
        # Neither body contains the other; membership probing must notice.
        with pytest.raises(DomainError, match="not nested"):
            build_layered(
                [
                    Layer(1.0, Slab(normal=Direction.axis(2, 0), halfwidth=1.0)),
                    Layer(1.0, Slab(normal=Direction.axis(2, 1), halfwidth=1.0)),
                ]
            )

    def test_rejects_bad_weight(self):
        with pytest.raises(DomainError):
            Layer(0.0, LpBall(dim=2, p=2.0, radius=1.0))
        with pytest.raises(DomainError):
            Layer(-1.0, LpBall(dim=2, p=2.0, radius=1.0))
        with pytest.raises(ShapeError):
            build_layered([])


class TestDerivativeFloor:
    def test_identity_formula(self):
        cov = identity_covariance(2)
        u = Direction.axis(2)
        assert derivative_floor(cov, u, 2.0, 0.3) == pytest.approx(-0.6, rel=1e-12)
        assert derivative_floor(cov, u, 0.0, 0.3) == 0.0

    def test_scales_with_inverse_covariance(self):
        cov = build_covariance(np.diag([4.0, 1.0]))
        u = Direction.axis(2, 0)
        # <u, Sigma^{-1} u> = 1/4.
        assert derivative_floor(cov, u, 1.0, 1.0) == pytest.approx(-0.25, rel=1e-12)

    def test_domain(self):
        cov = identity_covariance(2)
        u = Direction.axis(2)
        with pytest.raises(DomainError):
            derivative_floor(cov, u, -1.0, 0.5)
        with pytest.raises(DomainError):
            derivative_floor(cov, u, 1.0, -0.5)


class TestConditionalCeiling:
    def test_is_the_shift(self):
        assert conditional_coordinate_ceiling(1.7) == 1.7
        assert conditional_coordinate_ceiling(0.0) == 0.0
        with pytest.raises(DomainError):
            conditional_coordinate_ceiling(-0.1)


class TestPowerEnvelope:
    def test_unbounded_region_frozen_pair(self):
        # Acceptance region unbounded along u: the ratio upper bound is 1,
        # so beta_lower collapses to alpha while beta_upper keeps the
        # Gaussian decay term.
        cov = identity_covariance(2)
        u = Direction.axis(2, 0)
        region = Slab(normal=Direction.axis(2, 1), halfwidth=1.0)
        report = power_envelope(cov, region, u, 2.0, 0.05)
        assert report.beta_lower == pytest.approx(0.05, rel=1e-12)
        assert report.beta_upper == pytest.approx(0.8714314809252179, rel=1e-12)
        assert report.exponent_a == math.inf

    def test_slab_chain(self):
        cov = identity_covariance(2)
        u = Direction.axis(2)
        slab = Slab(normal=u, halfwidth=1.0)
        alpha = 1.0 - oracle_slab(1.0, 0.0)
        for theta in (0.5, 1.0, 2.0):
            report = power_envelope(cov, slab, u, theta, alpha)
            assert report.beta_lower >= alpha - 1e-12
            assert report.beta_upper >= report.beta_lower - 1e-12
            assert report.beta_upper <= 1.0
            # Closed form: beta = 1 - g_a(theta), inside the envelope.
            beta = 1.0 - oracle_slab(1.0, theta)
            assert report.beta_lower - 1e-12 <= beta <= report.beta_upper + 1e-12

    def test_domain(self):
        cov = identity_covariance(2)
        u = Direction.axis(2)
        slab = Slab(normal=u, halfwidth=1.0)
        with pytest.raises(DomainError):
            power_envelope(cov, slab, u, -1.0, 0.1)
        for alpha in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(DomainError):
                power_envelope(cov, slab, u, 1.0, alpha)


class TestExtremalSlab:
    def test_identity_covariance_gives_plain_slab(self):
        u = Direction.from_vector(np.array([1.0, 1.0]))
        body = extremal_slab(identity_covariance(2), u, 1.5)
        assert isinstance(body, Slab)
        assert body.halfwidth == 1.5
        np.testing.assert_allclose(body.normal.entries, u.entries)

    def test_attains_the_upper_bound(self):
        # The measure ratio of the extremal slab is the closed slab form,
        # which must coincide with the reported upper bound everywhere.
        rng = np.random.default_rng(73)
        for _ in range(15):
            n = int(rng.integers(2, 6))
            cov = random_spd_cov(rng, n)
            u = Direction.from_vector(rng.standard_normal(n))
            halfwidth = float(rng.uniform(0.3, 3.0))
            body = extremal_slab(cov, u, halfwidth)
            a, exact = shift_exponent(cov, body, u)
            assert exact
            assert a == pytest.approx(halfwidth, rel=1e-12)
            report = ratio_bounds_set(cov, body, u, 1.3)
            want = shift_ratio(1.3 * report.mahalanobis, halfwidth)
            assert report.upper == pytest.approx(want, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            extremal_slab(identity_covariance(2), Direction.axis(2), 0.0)
        with pytest.raises(ShapeError):
            extremal_slab(identity_covariance(3), Direction.axis(2), 1.0)


class TestWhiteningInvariance:
    def test_bounds_agree_in_whitened_coordinates(self):
        rng = np.random.default_rng(79)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            cov = random_spd_cov(rng, n)
            u = Direction.from_vector(rng.standard_normal(n))
            body = LpBall(dim=n, p=2.0, radius=float(rng.uniform(1.0, 3.0)))
            t = float(rng.uniform(0.1, 2.0))
            direct = ratio_bounds_set(cov, body, u, t)
            white_u = Direction.from_vector(cov.inv_sqrt @ u.entries)
            white_body = transform(body, cov.inv_sqrt)
            white_t = t * direct.mahalanobis
            white = ratio_bounds_set(identity_covariance(n), white_body, white_u, white_t)
            assert white.lower == pytest.approx(direct.lower, rel=1e-10)
            assert white.upper == pytest.approx(direct.upper, rel=1e-10)

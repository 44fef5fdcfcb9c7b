"""Convex body tests: membership, support functions, images, and the
JSON body grammar.

The property classes at the bottom run every body variant through the
shared support-function contracts: symmetry, positive homogeneity, and
the adjoint law for linear images.
"""

import math

import numpy as np
import pytest

from shiftbounds import (
    ConfigError,
    ConvexBody,
    DefinitenessError,
    Direction,
    DomainError,
    Ellipsoid,
    HPolytope,
    Intersection,
    LinearImage,
    LpBall,
    ShapeError,
    Slab,
    body_from_dict,
    build_covariance,
    transform,
    validate_symmetry,
)


def sample_bodies():
    """One representative of each variant, keyed for parametrize ids."""
    quadratic = build_covariance(np.array([[0.5, 0.1], [0.1, 1.5]]))
    hexagon = HPolytope(
        normals=np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2], [-0.5, math.sqrt(3) / 2]]),
        offsets=np.array([1.0, 1.0, 1.0]),
    )
    return {
        "slab": Slab(normal=Direction.from_vector(np.array([1.0, 2.0])), halfwidth=0.8),
        "l1": LpBall(dim=2, p=1.0, radius=1.5),
        "l2": LpBall(dim=2, p=2.0, radius=2.0),
        "l3": LpBall(dim=2, p=3.0, radius=1.2),
        "linf": LpBall(dim=2, p=math.inf, radius=1.0),
        "ellipsoid": Ellipsoid(quadratic=quadratic),
        "h_polytope": hexagon,
        "intersection": Intersection(
            parts=(LpBall(dim=2, p=2.0, radius=2.0), LpBall(dim=2, p=math.inf, radius=1.5))
        ),
        "linear_image": LinearImage(
            base=LpBall(dim=2, p=2.0, radius=1.0),
            matrix=np.array([[2.0, 0.5], [0.0, 1.0]]),
        ),
    }


class TestSlab:
    def test_membership(self):
        slab = Slab(normal=Direction.axis(2), halfwidth=1.0)
        pts = np.array([[0.5, 100.0], [1.0, -3.0], [1.0000001, 0.0], [-2.0, 0.0]])
        np.testing.assert_array_equal(slab.contains_batch(pts), [True, True, False, False])

    def test_support_parallel_and_orthogonal(self):
        slab = Slab(normal=Direction.axis(2), halfwidth=2.0)
        along = slab.support(np.array([3.0, 0.0]))
        assert along.value == pytest.approx(6.0)
        assert along.exact and along.exactness == "exact"
        across = slab.support(np.array([0.0, 1.0]))
        assert across.value == math.inf
        assert across.exact  # genuinely unbounded, not an estimate

    def test_support_point(self):
        slab = Slab(normal=Direction.axis(2), halfwidth=2.0)
        np.testing.assert_allclose(slab.support_point(np.array([-1.0, 0.0])), [-2.0, 0.0])
        assert slab.support_point(np.array([0.0, 1.0])) is None

    @pytest.mark.parametrize("h", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_halfwidth(self, h):
        with pytest.raises(DomainError):
            Slab(normal=Direction.axis(2), halfwidth=h)


class TestLpBall:
    def test_l1_support_is_max_coordinate(self):
        ball = LpBall(dim=2, p=1.0, radius=1.0)
        assert ball.support(np.array([3.0, -4.0])).value == pytest.approx(4.0)

    def test_l2_support_is_euclidean_norm(self):
        ball = LpBall(dim=3, p=2.0, radius=2.0)
        assert ball.support(np.array([1.0, 2.0, 2.0])).value == pytest.approx(6.0)

    def test_linf_support_is_l1_norm(self):
        ball = LpBall(dim=2, p=math.inf, radius=0.5)
        assert ball.support(np.array([3.0, -4.0])).value == pytest.approx(3.5)

    def test_general_p_dual_norm(self):
        ball = LpBall(dim=2, p=3.0, radius=1.0)
        v = np.array([1.0, 1.0])
        want = (1.0 + 1.0) ** (2.0 / 3.0)  # ||v||_{3/2}
        assert ball.support(v).value == pytest.approx(want, rel=1e-12)

    def test_membership(self):
        ball = LpBall(dim=2, p=1.0, radius=1.0)
        pts = np.array([[0.5, 0.5], [0.5, 0.51], [-1.0, 0.0]])
        np.testing.assert_array_equal(ball.contains_batch(pts), [True, False, True])

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
    def test_support_point_attains(self, p):
        ball = LpBall(dim=3, p=p, radius=1.7)
        rng = np.random.default_rng(31)
        for _ in range(20):
            v = rng.standard_normal(3)
            point = ball.support_point(v)
            assert ball.contains(point * (1.0 - 1e-12))
            assert float(point @ v) == pytest.approx(ball.support(v).value, rel=1e-10)

    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            LpBall(dim=2, p=0.5, radius=1.0)
        with pytest.raises(DomainError):
            LpBall(dim=2, p=2.0, radius=0.0)
        with pytest.raises(ShapeError):
            LpBall(dim=0, p=2.0, radius=1.0)


class TestEllipsoid:
    def test_semi_axes(self):
        # {x : x1^2/4 + x2^2/9 <= 1} has semi-axes 2 and 3.
        body = Ellipsoid(quadratic=build_covariance(np.diag([0.25, 1.0 / 9.0])))
        assert body.support(np.array([1.0, 0.0])).value == pytest.approx(2.0, rel=1e-12)
        assert body.support(np.array([0.0, 1.0])).value == pytest.approx(3.0, rel=1e-12)
        assert body.contains(np.array([2.0, 0.0]))
        assert not body.contains(np.array([2.0001, 0.0]))

    def test_support_point_attains(self):
        body = Ellipsoid(quadratic=build_covariance(np.array([[1.0, 0.3], [0.3, 2.0]])))
        rng = np.random.default_rng(37)
        for _ in range(20):
            v = rng.standard_normal(2)
            point = body.support_point(v)
            assert body.contains(point * (1.0 - 1e-12))
            assert float(point @ v) == pytest.approx(body.support(v).value, rel=1e-10)


class TestHPolytope:
    def test_box_matches_linf_ball(self):
        box = HPolytope(normals=np.eye(3), offsets=np.array([1.0, 1.0, 1.0]))
        ball = LpBall(dim=3, p=math.inf, radius=1.0)
        rng = np.random.default_rng(41)
        pts = rng.uniform(-1.5, 1.5, size=(200, 3))
        np.testing.assert_array_equal(box.contains_batch(pts), ball.contains_batch(pts))
        for _ in range(20):
            v = rng.standard_normal(3)
            assert box.support(v).value == pytest.approx(
                ball.support(v).value, rel=1e-9, abs=1e-9
            )

    def test_support_point_is_vertex(self):
        box = HPolytope(normals=np.eye(2), offsets=np.array([1.0, 2.0]))
        point = box.support_point(np.array([1.0, -1.0]))
        np.testing.assert_allclose(point, [1.0, -2.0], atol=1e-9)

    def test_validation(self):
        with pytest.raises(DomainError):
            HPolytope(normals=np.eye(2), offsets=np.array([1.0, -1.0]))
        with pytest.raises(DomainError):
            HPolytope(normals=np.eye(2), offsets=np.array([1.0, 0.0]))
        with pytest.raises(ShapeError):
            HPolytope(normals=np.array([[1.0, 0.0], [0.0, 0.0]]), offsets=np.ones(2))
        with pytest.raises(ShapeError):
            HPolytope(normals=np.eye(2), offsets=np.ones(3))


class TestIntersection:
    def test_membership_is_conjunction(self):
        ball = LpBall(dim=2, p=2.0, radius=2.0)
        box = LpBall(dim=2, p=math.inf, radius=1.5)
        both = Intersection(parts=(ball, box))
        pts = np.array([[1.9, 0.0], [1.4, 1.4], [1.2, 1.2]])
        want = ball.contains_batch(pts) & box.contains_batch(pts)
        np.testing.assert_array_equal(both.contains_batch(pts), want)

    def test_support_is_min_and_flagged(self):
        both = Intersection(
            parts=(LpBall(dim=2, p=2.0, radius=2.0), LpBall(dim=2, p=math.inf, radius=1.5))
        )
        sv = both.support(np.array([1.0, 0.0]))
        assert sv.value == pytest.approx(1.5)
        assert not sv.exact
        assert sv.exactness == "upper_bound"

    def test_single_part_stays_exact(self):
        single = Intersection(parts=(LpBall(dim=2, p=2.0, radius=2.0),))
        sv = single.support(np.array([1.0, 0.0]))
        assert sv.value == pytest.approx(2.0)
        assert sv.exact

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(ShapeError):
            Intersection(parts=(LpBall(dim=2, p=2.0, radius=1.0), LpBall(dim=3, p=2.0, radius=1.0)))


class TestLinearImage:
    def test_membership_through_inverse(self):
        image = LinearImage(base=LpBall(dim=2, p=2.0, radius=1.0), matrix=np.diag([2.0, 0.5]))
        assert image.contains(np.array([1.9, 0.0]))
        assert not image.contains(np.array([0.0, 0.51]))

    def test_adjoint_law(self):
        rng = np.random.default_rng(43)
        base = LpBall(dim=3, p=1.0, radius=1.3)
        for _ in range(20):
            matrix = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
            image = LinearImage(base=base, matrix=matrix)
            v = rng.standard_normal(3)
            want = base.support(matrix.T @ v).value
            assert image.support(v).value == pytest.approx(want, rel=1e-10)

    def test_transform_flattens_composition(self):
        base = LpBall(dim=2, p=2.0, radius=1.0)
        once = transform(base, np.diag([2.0, 1.0]))
        twice = transform(once, np.diag([1.0, 3.0]))
        assert isinstance(twice, LinearImage)
        assert twice.base is base  # not a LinearImage of a LinearImage
        np.testing.assert_allclose(twice.matrix, np.diag([2.0, 3.0]))

    def test_support_point_maps_through(self):
        matrix = np.array([[2.0, 1.0], [0.0, 1.0]])
        image = LinearImage(base=LpBall(dim=2, p=2.0, radius=1.0), matrix=matrix)
        v = np.array([1.0, 0.5])
        point = image.support_point(v)
        assert image.contains(point * (1.0 - 1e-12))
        assert float(point @ v) == pytest.approx(image.support(v).value, rel=1e-10)

    def test_rejects_singular_matrix(self):
        with pytest.raises(DefinitenessError):
            LinearImage(base=LpBall(dim=2, p=2.0, radius=1.0), matrix=np.ones((2, 2)))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ShapeError):
            LinearImage(base=LpBall(dim=2, p=2.0, radius=1.0), matrix=np.eye(3))


class TestSupportProperties:
    """Contracts every variant must satisfy, probed with seeded directions."""

    @pytest.mark.parametrize("name", sorted(sample_bodies()))
    def test_symmetry(self, name):
        body = sample_bodies()[name]
        rng = np.random.default_rng(47)
        for _ in range(25):
            v = rng.standard_normal(body.dim)
            a = body.support(v).value
            b = body.support(-v).value
            if math.isinf(a) or math.isinf(b):
                assert a == b
            else:
                assert a == pytest.approx(b, rel=1e-10, abs=1e-10)

    @pytest.mark.parametrize("name", sorted(sample_bodies()))
    def test_positive_homogeneity(self, name):
        body = sample_bodies()[name]
        rng = np.random.default_rng(53)
        for _ in range(25):
            v = rng.standard_normal(body.dim)
            c = float(rng.uniform(0.1, 10.0))
            a = body.support(v).value
            b = body.support(c * v).value
            if math.isinf(a):
                assert math.isinf(b)
            else:
                assert b == pytest.approx(c * a, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("name", sorted(sample_bodies()))
    def test_membership_symmetry_probe(self, name):
        report = validate_symmetry(sample_bodies()[name], probes=2048, seed=3)
        assert report.ok
        assert report.members > 0

    def test_probe_flags_asymmetric_body(self):
        class ShiftedBall(ConvexBody):
            dim = 2

            def contains_batch(self, pts):
                return np.linalg.norm(pts - np.array([0.7, 0.0]), axis=1) <= 1.0

            def support(self, v):
                from shiftbounds.bodies import SupportValue

                w = np.asarray(v, dtype=float)
                return SupportValue(float(np.linalg.norm(w)) + float(w[0]) * 0.7, True)

        report = validate_symmetry(ShiftedBall(), probes=2048, seed=3)
        assert report.symmetry_violations > 0
        assert not report.ok


class TestBodyGrammar:
    """to_dict / body_from_dict round trips and config error paths."""

    @pytest.mark.parametrize("name", sorted(sample_bodies()))
    def test_round_trip(self, name):
        body = sample_bodies()[name]
        rebuilt = body_from_dict(body.to_dict())
        assert rebuilt.to_dict() == body.to_dict()
        rng = np.random.default_rng(59)
        pts = rng.standard_normal((200, body.dim)) * 1.5
        np.testing.assert_array_equal(
            rebuilt.contains_batch(pts), body.contains_batch(pts)
        )

    def test_lp_ball_inf_exponent_round_trip(self):
        data = LpBall(dim=2, p=math.inf, radius=1.0).to_dict()
        assert data["p"] == "inf"
        assert math.isinf(body_from_dict(data).p)

    def test_error_paths_name_the_field(self):
        with pytest.raises(ConfigError, match=r"body\.kind"):
            body_from_dict({"halfwidth": 1.0})
        with pytest.raises(ConfigError, match=r"body\.kind"):
            body_from_dict({"kind": "donut"})
        with pytest.raises(ConfigError, match=r"body\.halfwidth"):
            body_from_dict({"kind": "slab", "normal": [1.0, 0.0], "halfwidth": "wide"})
        with pytest.raises(ConfigError, match=r"body\.parts\[1\]"):
            body_from_dict(
                {
                    "kind": "intersection",
                    "parts": [LpBall(dim=2, p=2.0, radius=1.0).to_dict(), {"kind": "nope"}],
                }
            )
        with pytest.raises(ConfigError, match=r"body\.base"):
            body_from_dict({"kind": "linear_image", "matrix": [[1.0, 0.0], [0.0, 1.0]]})
        with pytest.raises(ConfigError):
            body_from_dict(["not", "a", "dict"])

    def test_domain_errors_become_config_errors(self):
        with pytest.raises(ConfigError, match="halfwidth"):
            body_from_dict({"kind": "slab", "normal": [1.0, 0.0], "halfwidth": -1.0})
        with pytest.raises(ConfigError):
            body_from_dict(
                {"kind": "h_polytope", "normals": [[1.0, 0.0]], "offsets": [-1.0]}
            )
        with pytest.raises(ConfigError):
            body_from_dict({"kind": "ellipsoid", "matrix": [[1.0, 2.0], [2.0, 1.0]]})

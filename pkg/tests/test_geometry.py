"""Cone geometry predicates against brute-force and library oracles."""

import math
from itertools import combinations

import numpy as np
import pytest
import scipy.optimize

from conic_walks.errors import DegenerateInputError, DomainError
from conic_walks.geometry import (
    ConeSample,
    Subspace,
    cone_contains,
    count_k_faces,
    intersects_subspace,
    is_face,
    is_full_cone,
    origin_in_convex_hull,
    project_onto_cone,
    sample_uniform_subspace,
    tangent_cone_projection_base,
)


from oracles import brute_force_is_face, random_cone_generators


def random_cone(rng, n, d, bridge=False):
    gens = random_cone_generators(rng, n, d, bridge=bridge)
    return ConeSample(gens, "A_bridge" if bridge else "B_walk")


class TestOriginInConvexHull:
    def test_symmetric_cross(self):
        assert origin_in_convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)])

    def test_open_halfplane(self):
        assert not origin_in_convex_hull([(1, 0), (2, 1), (1, 3)])

    def test_one_dimension(self):
        assert origin_in_convex_hull([(1,), (-2,)])
        assert not origin_in_convex_hull([(1,), (2,)])

    def test_three_dimensions_uses_lp(self):
        assert origin_in_convex_hull([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)])
        assert not origin_in_convex_hull([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])

    def test_zero_point_is_inside(self):
        assert origin_in_convex_hull([(0.0, 0.0), (1.0, 2.0)])

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            origin_in_convex_hull(np.zeros((0, 2)))
        with pytest.raises(DomainError):
            origin_in_convex_hull([(np.nan, 0.0)])

    def test_fast_paths_agree_with_lp_feasibility(self):
        # the sign and angular-gap shortcuts against a plain feasibility LP
        rng = np.random.default_rng(7)
        for _ in range(300):
            d = int(rng.integers(1, 3))
            pts = rng.standard_normal((int(rng.integers(d + 1, 7)), d))
            got = origin_in_convex_hull(pts)
            n = pts.shape[0]
            res = scipy.optimize.linprog(
                c=np.zeros(n),
                A_eq=np.vstack([pts.T, np.ones((1, n))]),
                b_eq=np.r_[np.zeros(d), 1.0],
                bounds=[(0, None)] * n,
                method="highs")
            assert got == (res.status == 0)

    def test_lp_branch_against_linprog_feasibility(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            pts = rng.standard_normal((int(rng.integers(4, 9)), 3))
            got = origin_in_convex_hull(pts)
            n = pts.shape[0]
            res = scipy.optimize.linprog(
                c=np.zeros(n),
                A_eq=np.vstack([pts.T, np.ones((1, n))]),
                b_eq=np.r_[np.zeros(3), 1.0],
                bounds=[(0, None)] * n,
                method="highs")
            assert got == (res.status == 0)


class TestFullCone:
    def test_orthant_is_pointed(self):
        for d in (1, 2, 3):
            assert not is_full_cone(ConeSample(np.eye(d)))

    def test_basis_and_negations_fill_space(self):
        for d in (1, 2, 3):
            gens = np.vstack([np.eye(d), -np.eye(d)])
            assert is_full_cone(ConeSample(gens))

    def test_too_few_generators_never_fill(self):
        assert not is_full_cone(ConeSample(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])[:2]))


class TestIsFace:
    def test_simplicial_cone_every_subset(self):
        cone = ConeSample(np.eye(3))
        for k in (1, 2):
            for subset in combinations(range(3), k):
                assert is_face(cone, subset)

    def test_interior_ray_is_not_an_edge(self):
        cone = ConeSample(np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
        assert is_face(cone, (0,))
        assert not is_face(cone, (1,))
        assert is_face(cone, (2,))

    def test_full_cone_has_no_faces(self):
        gens = np.vstack([np.eye(2), -np.eye(2)])
        cone = ConeSample(gens)
        assert not any(is_face(cone, (i,)) for i in range(4))

    def test_rank_deficient_subset_rejected(self):
        gens = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(DegenerateInputError):
            is_face(ConeSample(gens), (0, 1))

    def test_subset_validation(self):
        cone = ConeSample(np.eye(3))
        with pytest.raises(DomainError):
            is_face(cone, ())
        with pytest.raises(DomainError):
            is_face(cone, (0, 1, 2))
        with pytest.raises(DomainError):
            is_face(cone, (0, 0))
        with pytest.raises(DomainError):
            is_face(cone, (5,))

    def test_matches_supporting_hyperplane_search(self):
        rng = np.random.default_rng(42)
        for trial in range(200):
            d = int(rng.integers(2, 4))
            n = int(rng.integers(d, 7))
            bridge = bool(rng.integers(0, 2)) and n >= d + 1
            cone = random_cone(rng, n, d, bridge=bridge)
            for k in range(1, d):
                for subset in combinations(range(cone.n_generators), k):
                    assert is_face(cone, subset) == \
                        brute_force_is_face(cone.generators, subset), \
                        f"trial {trial}, subset {subset}"

    def test_face_monotonicity(self):
        # every generator inside a 2-face must itself be an edge
        rng = np.random.default_rng(5)
        for _ in range(100):
            cone = random_cone(rng, 6, 3)
            for subset in combinations(range(6), 2):
                if is_face(cone, subset):
                    assert is_face(cone, (subset[0],))
                    assert is_face(cone, (subset[1],))

    def test_invariance_under_rescaling_and_rotation(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            cone = random_cone(rng, 5, 3)
            scales = rng.uniform(0.1, 10.0, size=5)
            frame = np.linalg.qr(rng.standard_normal((3, 3)))[0]
            transformed = ConeSample((cone.generators * scales[:, None]) @ frame)
            for subset in combinations(range(5), 2):
                assert is_face(cone, subset) == is_face(transformed, subset)
            assert is_full_cone(cone) == is_full_cone(transformed)


class TestSubspaceIntersection:
    def test_full_space_always_meets(self):
        cone = ConeSample(np.eye(3))
        assert intersects_subspace(cone, Subspace(np.eye(3)))

    def test_zero_subspace_never_meets(self):
        cone = ConeSample(np.eye(3))
        assert not intersects_subspace(cone, Subspace(np.zeros((3, 0))))

    def test_orthogonal_line_misses_planar_cone(self):
        cone = ConeSample(np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]))
        axis = Subspace(np.array([[0.0], [0.0], [1.0]]))
        assert not intersects_subspace(cone, axis)

    def test_line_through_cone_meets(self):
        cone = ConeSample(np.array([[1.0, 0.0], [0.0, 1.0]]))
        diag = Subspace(np.array([[1.0], [1.0]]) / math.sqrt(2))
        assert intersects_subspace(cone, diag)
        anti = Subspace(np.array([[1.0], [-1.0]]) / math.sqrt(2))
        assert not intersects_subspace(cone, anti)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DomainError):
            intersects_subspace(ConeSample(np.eye(2)), Subspace(np.eye(3)))


class TestProjection:
    def test_interior_point_fixed(self):
        cone = ConeSample(np.eye(2))
        proj = project_onto_cone(np.array([1.0, 2.0]), cone)
        assert np.allclose(proj.point, [1.0, 2.0])
        assert proj.face_dim == 2

    def test_polar_point_maps_to_apex(self):
        cone = ConeSample(np.eye(2))
        proj = project_onto_cone(np.array([-1.0, -2.0]), cone)
        assert np.allclose(proj.point, [0.0, 0.0])
        assert proj.face_dim == 0
        assert proj.active_set == ()

    def test_edge_classification(self):
        cone = ConeSample(np.eye(2))
        proj = project_onto_cone(np.array([3.0, -1.0]), cone)
        assert np.allclose(proj.point, [3.0, 0.0])
        assert proj.face_dim == 1
        assert proj.active_set == (0,)

    def test_kkt_optimality_with_scipy_cross_check(self):
        # KKT conditions certify the global optimum of this convex problem;
        # scipy's solver serves as a residual cross-reference (its active-set
        # rewrite can itself terminate early, so only require that we never
        # do worse than it)
        rng = np.random.default_rng(11)
        for _ in range(300):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(d, 9))
            gens = rng.standard_normal((n, d))
            g = rng.standard_normal(d)
            cone = ConeSample(gens)
            proj = project_onto_cone(g, cone)
            residual = g - proj.point
            w = gens @ residual
            ours = np.linalg.norm(residual)
            assert np.all(w <= 1e-7 * max(1.0, np.abs(w).max())), "ascent direction left"
            for i in proj.active_set:
                assert abs(w[i]) <= 1e-7 * max(1.0, ours), "active gradient nonzero"
            x_scipy, _ = scipy.optimize.nnls(gens.T, g)
            theirs = np.linalg.norm(g - gens.T @ x_scipy)
            assert ours <= theirs + 1e-8

    def test_moreau_decomposition(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            d = int(rng.integers(2, 5))
            gens = rng.standard_normal((int(rng.integers(d, 8)), d))
            cone = ConeSample(gens)
            g = rng.standard_normal(d)
            proj = project_onto_cone(g, cone)
            polar_part = g - proj.point
            # orthogonal split, with the residual in the polar cone
            assert abs(polar_part @ proj.point) <= 1e-8 * max(1.0, np.linalg.norm(g) ** 2)
            assert np.all(gens @ polar_part <= 1e-8 * np.linalg.norm(gens, axis=1)
                          * max(1.0, np.linalg.norm(polar_part)))

    def test_membership_helper(self):
        cone = ConeSample(np.eye(2))
        assert cone_contains(cone, np.array([0.5, 0.25]))
        assert not cone_contains(cone, np.array([-0.5, 0.25]))


class TestCountFaces:
    def test_simplicial_counts_binomials(self):
        for d in (2, 3, 4):
            cone = ConeSample(np.eye(d))
            for k in range(d):
                assert count_k_faces(cone, k) == math.comb(d, k)

    def test_full_cone_reports_none(self):
        cone = ConeSample(np.vstack([np.eye(2), -np.eye(2)]))
        assert count_k_faces(cone, 0) == 0
        assert count_k_faces(cone, 1) == 0

    def test_range_checked(self):
        with pytest.raises(DomainError):
            count_k_faces(ConeSample(np.eye(2)), 2)


class TestTangentBase:
    def test_empty_subset_returns_cone(self):
        cone = ConeSample(np.eye(3))
        assert tangent_cone_projection_base(cone, ()) is cone

    def test_simplicial_projects_to_ray(self):
        cone = ConeSample(np.eye(3))
        base = tangent_cone_projection_base(cone, (0, 1))
        assert base.generators.shape == (1, 1)
        assert abs(abs(base.generators[0, 0]) - 1.0) < 1e-12

    def test_non_face_rejected(self):
        cone = ConeSample(np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(DomainError):
            tangent_cone_projection_base(cone, (1,))


class TestSubspaceSampling:
    def test_orthonormal_columns(self):
        rng = np.random.default_rng(1)
        for d, m in [(3, 1), (4, 2), (5, 5)]:
            sub = sample_uniform_subspace(d, m, rng)
            assert sub.basis.shape == (d, m)
            assert np.allclose(sub.basis.T @ sub.basis, np.eye(m), atol=1e-12)

    def test_degenerate_dimensions(self):
        rng = np.random.default_rng(2)
        assert sample_uniform_subspace(4, 0, rng).dim == 0
        assert sample_uniform_subspace(4, 4, rng).dim == 4
        with pytest.raises(DomainError):
            sample_uniform_subspace(3, 4, rng)

    def test_projection_lengths_have_trace_mean(self):
        # squared projection of a fixed unit vector onto a Haar m-subspace
        # averages m/d
        rng = np.random.default_rng(31)
        d, m, draws = 3, 2, 100_000
        w = np.array([1.0, 0.0, 0.0])
        total = 0.0
        total_sq = 0.0
        for _ in range(draws):
            basis = sample_uniform_subspace(d, m, rng).basis
            val = float(np.sum((w @ basis) ** 2))
            total += val
            total_sq += val * val
        mean = total / draws
        stderr = math.sqrt(max(total_sq / draws - mean * mean, 0.0) / draws)
        assert abs(mean - m / d) <= 3 * stderr

    def test_orthonormality_validated(self):
        with pytest.raises(DomainError):
            Subspace(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestConeSampleValidation:
    def test_shape_and_finiteness(self):
        with pytest.raises(DomainError):
            ConeSample(np.zeros((0, 2)))
        with pytest.raises(DomainError):
            ConeSample(np.array([[np.inf, 0.0]]))
        with pytest.raises(DomainError):
            ConeSample(np.eye(2), tol=0.0)

    def test_read_only(self):
        cone = ConeSample(np.eye(2))
        with pytest.raises(ValueError):
            cone.generators[0, 0] = 5.0

    def test_general_position_flags_duplicates(self):
        good = ConeSample(np.array([[1.0, 0.0], [0.3, 1.0], [1.0, 1.0]]))
        assert good.in_general_position()
        bad = ConeSample(np.array([[1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]))
        assert not bad.in_general_position()

"""Floating-point computational geometry for finitely generated cones.

The cone is always the positive hull of the rows of a generator matrix.
Everything reduces to one primitive: deciding whether the origin lies in
the convex hull of a point set, which for points in general position is
equivalent to the positive hull of those points not being pointed.  In
dimensions one and two the decision is a sign test respectively an
angular-gap test; from dimension three on it is a small margin LP.

Face tests use the projection characterization: a subset of generators
spans a face exactly when the remaining generators, projected onto the
orthogonal complement of the subset's span, form a pointed cone there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateInputError, DomainError, NumericError, SamplingError

TAG_BRIDGE = "A_bridge"
TAG_WALK = "B_walk"
TAG_PROJECTED = "projected"

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ConeSample:
    """Generators of a sampled cone: one partial sum per row.

    Walk cones carry all n partial sums, bridge cones the first n-1.  The
    matrix is frozen read-only after construction.  ``tol`` is the slack
    used by the LP and support-classification predicates on this cone.
    """

    generators: np.ndarray
    model: str = TAG_WALK
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        gens = np.asarray(self.generators, dtype=float)
        if gens.ndim != 2 or gens.shape[0] < 1 or gens.shape[1] < 1:
            raise DomainError("generators must form a nonempty 2-d matrix")
        if not np.all(np.isfinite(gens)):
            raise DomainError("generators must be finite")
        if self.tol <= 0:
            raise DomainError("tolerance must be positive")
        gens = gens.copy()
        gens.flags.writeable = False
        object.__setattr__(self, "generators", gens)

    @property
    def d(self) -> int:
        return self.generators.shape[1]

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def in_general_position(self, rel_tol: float = 1e-12) -> bool:
        """Every d-subset of generators has a determinant bounded away from 0
        relative to its Hadamard bound."""
        return _general_position_ok(self.generators, rel_tol)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by a d x m matrix with orthonormal columns."""

    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise DomainError("subspace basis must be a 2-d matrix")
        d, m = basis.shape
        if m > d:
            raise DomainError(f"subspace dimension {m} exceeds ambient dimension {d}")
        if m > 0:
            gram_err = np.max(np.abs(basis.T @ basis - np.eye(m)))
            if gram_err > 1e-12:
                raise DomainError(f"basis columns not orthonormal (error {gram_err:.2e})")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class ConeProjection:
    """Metric projection of a point onto a cone.

    ``active_set`` holds the generator indices with strictly positive
    coefficients; under general position its size is the dimension of the
    face containing the projection, except that a point inside the cone
    reports ``face_dim = d``.
    """

    point: np.ndarray
    active_set: tuple[int, ...]
    face_dim: int


# ---------------------------------------------------------------------------
# origin-in-hull primitive


def origin_in_convex_hull(points: Sequence[Sequence[float]] | np.ndarray,
                          tol: float = DEFAULT_TOL) -> bool:
    """Whether the origin is a convex combination of the given points.

    In one dimension this is a sign test and in two an angular-gap test;
    otherwise it is decided by maximizing the margin delta of a separating
    functional (<u, x_i> <= -delta for all i, box-bounded u): the origin is
    in the hull exactly when no margin above ``tol`` is attainable.  Points
    may be rescaled individually without changing the verdict.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise DomainError("need at least one point, all of the same dimension")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite")
    if np.any(np.all(pts == 0.0, axis=1)):
        return True
    return _origin_in_hull(pts, tol)


def _origin_in_hull(pts: np.ndarray, tol: float) -> bool:
    # validation-free core; callers guarantee a finite 2-d array
    d = pts.shape[1]
    if d == 1:
        x = pts[:, 0]
        return not (x.min() > 0.0 or x.max() < 0.0)
    if d == 2:
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        ang.sort()
        gaps = np.diff(ang, append=ang[0] + 2.0 * np.pi)
        return float(gaps.max()) <= np.pi
    norms = np.linalg.norm(pts, axis=1)
    tiny = norms <= 1e-300
    if np.any(tiny):
        if np.all(tiny):
            return True
        pts = pts[~tiny]
        norms = norms[~tiny]
    return not _strictly_separable(pts / norms[:, None], tol)


def _strictly_separable(unit_points: np.ndarray, tol: float) -> bool:
    n, d = unit_points.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    a_ub = np.hstack([unit_points, np.ones((n, 1))])
    bounds = [(-1.0, 1.0)] * d + [(0.0, float(d) + 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), bounds=bounds, method="highs")
    if res.status != 0 or res.x is None:
        raise NumericError(
            f"separation LP failed with status {res.status}: {res.message} "
            f"(n={n}, d={d}, max|x|={np.abs(unit_points).max():.3e})")
    return float(res.x[-1]) > tol


def _general_position_ok(gens: np.ndarray, rel_tol: float = 1e-12) -> bool:
    n, d = gens.shape
    if n < d:
        return False
    idx = _d_subsets(n, d)
    mats = gens[idx]
    dets = np.abs(np.linalg.det(mats))
    hadamard = np.prod(np.linalg.norm(mats, axis=2), axis=1)
    return bool(np.all(dets > rel_tol * np.maximum(hadamard, 1e-300)))


_SUBSET_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _d_subsets(n: int, d: int) -> np.ndarray:
    key = (n, d)
    cached = _SUBSET_CACHE.get(key)
    if cached is None:
        cached = np.array(list(combinations(range(n), d)), dtype=np.intp)
        if len(_SUBSET_CACHE) < 4096:
            _SUBSET_CACHE[key] = cached
    return cached


# ---------------------------------------------------------------------------
# cone predicates


def is_full_cone(cone: ConeSample) -> bool:
    """Whether the positive hull of the generators is all of R^d.

    For generators in general position this is the complement of
    pointedness, i.e. of the existence of a strictly separating functional.
    """
    if cone.n_generators < cone.d:
        return False
    return origin_in_convex_hull(cone.generators, cone.tol)


def _row_complement(rows: np.ndarray) -> tuple[np.ndarray, int]:
    """Orthonormal columns spanning the orthogonal complement of the row span."""
    k, d = rows.shape
    u, s, vt = np.linalg.svd(rows, full_matrices=True)
    cutoff = max(k, d) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return vt[rank:].T, rank


def _complement_basis(rows: np.ndarray) -> np.ndarray | None:
    """Like :func:`_row_complement` for full-rank rows, with closed forms in
    the low dimensions that dominate sampling loops; None when rank-deficient."""
    k, d = rows.shape
    if k == 1 and d == 2:
        x, y = rows[0]
        nrm = math.hypot(x, y)
        if nrm <= 1e-300:
            return None
        return np.array(((-y / nrm,), (x / nrm,)))
    if k == 2 and d == 3:
        (a0, a1, a2), (b0, b1, b2) = rows
        v0 = a1 * b2 - a2 * b1
        v1 = a2 * b0 - a0 * b2
        v2 = a0 * b1 - a1 * b0
        nrm = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
        scale = math.sqrt((a0 * a0 + a1 * a1 + a2 * a2) * (b0 * b0 + b1 * b1 + b2 * b2))
        if nrm <= 1e-12 * max(scale, 1e-300):
            return None
        return np.array(((v0 / nrm,), (v1 / nrm,), (v2 / nrm,)))
    basis, rank = _row_complement(rows)
    if rank < k:
        return None
    return basis


def _validated_subset(cone: ConeSample, subset: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in subset)
    k = len(idx)
    if not 1 <= k <= cone.d - 1:
        raise DomainError(f"face test requires 1 <= k <= d-1, got k={k}, d={cone.d}")
    if len(set(idx)) != k or min(idx) < 0 or max(idx) >= cone.n_generators:
        raise DomainError(
            f"subset must hold distinct generator row indices in [0, {cone.n_generators}), got {idx}")
    return tuple(sorted(idx))


def _projected_complement(cone: ConeSample, idx: tuple[int, ...]) -> np.ndarray:
    """Remaining generators expressed in an orthonormal basis of the
    orthogonal complement of the span of the selected ones."""
    gens = cone.generators
    basis = _complement_basis(gens[list(idx)])
    if basis is None:
        raise DegenerateInputError(
            f"selected generators {idx} are rank-deficient; face test undefined")
    keep = [i for i in range(gens.shape[0]) if i not in idx]
    return gens[keep] @ basis


def is_face(cone: ConeSample, subset: Sequence[int]) -> bool:
    """Whether the selected generators (0-based rows) span a face of the cone.

    True exactly when the other generators, projected onto the orthogonal
    complement of the selection's span, leave the origin outside their
    convex hull there.
    """
    idx = _validated_subset(cone, subset)
    projected = _projected_complement(cone, idx)
    if projected.shape[0] == 0:
        return True
    return not _origin_in_hull(projected, cone.tol)


def intersects_subspace(cone: ConeSample, subspace: Subspace) -> bool:
    """Whether the cone meets the subspace in more than the origin."""
    if subspace.d != cone.d:
        raise DomainError(
            f"subspace lives in dimension {subspace.d}, cone in {cone.d}")
    return _meets_subspace(cone.generators, subspace, cone.tol)


def _meets_subspace(gens: np.ndarray, subspace: Subspace, tol: float) -> bool:
    m = subspace.dim
    d = gens.shape[1]
    if m == 0:
        return False
    if m == d:
        return True
    perp, _ = _row_complement(subspace.basis.T)
    return _origin_in_hull(gens @ perp, tol)


def count_k_faces(cone: ConeSample, k: int) -> int:
    """Number of k-dimensional faces, 0 <= k <= d-1.

    A full cone has no proper faces; a pointed cone has exactly one 0-face.
    """
    if not 0 <= k <= cone.d - 1:
        raise DomainError(f"count_k_faces requires 0 <= k <= d-1, got k={k}, d={cone.d}")
    if k == 0:
        return 0 if is_full_cone(cone) else 1
    total = 0
    for subset in combinations(range(cone.n_generators), k):
        if is_face(cone, subset):
            total += 1
    return total


def tangent_cone_projection_base(cone: ConeSample, subset: Sequence[int]) -> ConeSample:
    """The cone projected onto the orthogonal complement of a face's span.

    The tangent cone at the face is the orthogonal sum of the face's span
    and this projected cone, so quermassintegrals of the tangent cone drop
    indices by the face dimension.  An empty subset returns the cone itself.
    """
    if len(tuple(subset)) == 0:
        return cone
    idx = _validated_subset(cone, subset)
    projected = _projected_complement(cone, idx)
    if projected.shape[0] > 0 and origin_in_convex_hull(projected, cone.tol):
        raise DomainError(f"subset {idx} is not a face; tangent cone base undefined")
    return ConeSample(projected, TAG_PROJECTED, cone.tol)


def cone_contains(cone: ConeSample, x: Sequence[float]) -> bool:
    """Membership of a point in the positive hull, via the NNLS residual."""
    x = np.asarray(x, dtype=float)
    _, resid = _nnls_lowest_index(cone.generators.T, x, cone.tol)
    return float(np.linalg.norm(resid)) <= cone.tol * max(1.0, float(np.linalg.norm(x)))


# ---------------------------------------------------------------------------
# metric projection


def project_onto_cone(g: Sequence[float], cone: ConeSample) -> ConeProjection:
    """Nearest point of the cone to ``g`` with its face classification.

    Solved as nonnegative least squares over the generators.  A point whose
    residual vanishes lies in the cone and is classified as interior
    (``face_dim = d``); otherwise the face dimension is the number of
    strictly positive coefficients, which under general position matches
    the face actually containing the projection.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (cone.d,):
        raise DomainError(f"point has shape {g.shape}, expected ({cone.d},)")
    coeff, resid = _nnls_lowest_index(cone.generators.T, g, cone.tol)
    inside = float(np.linalg.norm(resid)) <= cone.tol * max(1.0, float(np.linalg.norm(g)))
    top = float(coeff.max(initial=0.0))
    if top > 0.0:
        active = tuple(int(i) for i in np.flatnonzero(coeff > cone.tol * top))
    else:
        active = ()
    if inside:
        return ConeProjection(point=g.copy(), active_set=active, face_dim=cone.d)
    return ConeProjection(point=g - resid, active_set=active, face_dim=len(active))


def _projection_face_dim(gens: np.ndarray, g: np.ndarray, tol: float) -> int:
    """Dimension of the face the metric projection of g lands in (d if inside)."""
    coeff, resid = _nnls_lowest_index(gens.T, g, tol)
    if float(resid @ resid) <= (tol * max(1.0, float(np.linalg.norm(g)))) ** 2:
        return gens.shape[1]
    top = float(coeff.max(initial=0.0))
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(coeff > tol * top))


def _nnls_lowest_index(a: np.ndarray, b: np.ndarray, tol: float,
                       max_iter: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Active-set nonnegative least squares  min ||a x - b||, x >= 0.

    Deterministic pivot: among stationarity violations pick the lowest
    column index, so the recovered support never depends on platform
    reduction order.  Returns the coefficients and the residual b - a x.
    """
    d, m = a.shape
    if max_iter is None:
        max_iter = 3 * m + 30
    x = np.zeros(m)
    passive: list[int] = []
    banned: set[int] = set()
    resid = b.astype(float).copy()
    scale = max(float(np.abs(a).max(initial=0.0)), 1.0) * max(float(np.linalg.norm(b)), 1.0)
    w_tol = tol * scale
    for _ in range(max_iter):
        w = a.T @ resid
        entering = -1
        for jdx in range(m):
            if jdx not in passive and jdx not in banned and w[jdx] > w_tol:
                entering = jdx
                break
        if entering < 0:
            return x, resid
        passive.append(entering)
        passive.sort()
        for _inner in range(max_iter):
            sub = a[:, passive]
            z = _least_squares(sub, b)
            if np.all(z > 0.0):
                x.fill(0.0)
                x[passive] = z
                break
            xs = x[passive]
            neg = z <= 0.0
            denom = xs - z
            movable = neg & (denom > 0.0)
            if not np.any(movable):
                # cannot happen in exact arithmetic; freeze the column so the
                # outer loop terminates instead of re-entering it
                passive.remove(entering)
                banned.add(entering)
                x[entering] = 0.0
                break
            alpha = float(np.min(xs[movable] / denom[movable]))
            xs = xs + alpha * (z - xs)
            x[passive] = xs
            keep_cut = 1e-12 * max(float(xs.max(initial=0.0)), 1e-300)
            dropped = [p for p, val in zip(passive, xs) if val <= keep_cut]
            for p in dropped:
                x[p] = 0.0
            passive = [p for p in passive if p not in dropped]
        else:
            raise NumericError("NNLS inner loop failed to converge")
        resid = b - a @ x
    raise NumericError(f"NNLS did not converge within {max_iter} iterations")


def _least_squares(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    gram = a.T @ a
    try:
        return np.linalg.solve(gram, a.T @ b)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(a, b, rcond=None)[0]


# ---------------------------------------------------------------------------
# subspace sampling


def sample_uniform_subspace(d: int, m: int, rng: np.random.Generator) -> Subspace:
    """Rotation-invariant random m-dimensional subspace of R^d.

    Orthonormalizes a d x m standard Gaussian matrix; numerically
    rank-deficient draws (probability ~0) are resampled.
    """
    if not 0 <= m <= d:
        raise DomainError(f"subspace dimension must satisfy 0 <= m <= d, got m={m}, d={d}")
    return Subspace(_haar_basis(d, m, rng))


def _haar_basis(d: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal d x m basis of a rotation-invariant random subspace."""
    if m == 0:
        return np.zeros((d, 0))
    for _ in range(32):
        gauss = rng.standard_normal((d, m))
        if m == 1:
            nrm = math.sqrt(float(gauss[:, 0] @ gauss[:, 0]))
            if nrm <= 1e-154:
                continue
            return gauss / nrm
        q, r = np.linalg.qr(gauss)
        diag = np.diagonal(r)
        if np.min(np.abs(diag)) <= 1e-12 * max(float(np.abs(diag).max()), 1e-300):
            continue
        return q * np.sign(diag)
    raise SamplingError("could not orthonormalize a Gaussian basis after 32 draws")

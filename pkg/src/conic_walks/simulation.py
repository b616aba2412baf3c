"""Samplers for exchangeable walks and bridges, and seeded Monte Carlo estimators.

Sampling distributions only need the model's symmetry hypotheses, so three
stress levels are provided: i.i.d. Gaussian increments, componentwise
Cauchy increments (no mean), and Gaussians multiplied by one shared random
scale (dependent but still exchangeable with symmetric signs).

Estimates are reproducible by construction: the random stream of sample
``i`` is the Philox stream with key ``seed`` and counter block ``i``, so
results do not depend on worker count or scheduling, and chunk partial
sums are reduced in fixed chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from . import geometry
from .errors import DegenerateInputError, DomainError, SamplingError
from .formulas import (
    A_BRIDGE,
    B_WALK,
    FunctionalQuery,
    Model,
    evaluate_query,
)
from .geometry import (
    ConeSample,
    TAG_BRIDGE,
    TAG_WALK,
    is_face,
    is_full_cone,
    origin_in_convex_hull,
)

FAMILIES = ("gaussian_iid", "heavy_tail_iid", "scaled_gaussian_exchangeable")

_MASK64 = (1 << 64) - 1
_CHUNK = 2048
_MAX_DRAW_RETRIES = 128
_MAX_CONDITION_RETRIES = 200_000


@dataclass(frozen=True)
class DistributionSpec:
    """Increment law for the samplers.

    Every family has a joint density assigning zero mass to affine
    hyperplanes, so sampled partial sums are in general position almost
    surely.  ``scale_sigma`` is the log-normal sigma of the shared scale in
    the dependent family.
    """

    family: str
    d: int
    scale_sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(f"unknown distribution family {self.family!r}; expected {FAMILIES}")
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got d={self.d}")
        if self.scale_sigma <= 0:
            raise DomainError("scale_sigma must be positive")


def sample_increments(dist: DistributionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n increment vectors in R^d according to the family."""
    if n < 1:
        raise DomainError(f"need at least one increment, got n={n}")
    if dist.family == "gaussian_iid":
        return rng.standard_normal((n, dist.d))
    if dist.family == "heavy_tail_iid":
        return rng.standard_cauchy((n, dist.d))
    scale = rng.lognormal(mean=0.0, sigma=dist.scale_sigma)
    return scale * rng.standard_normal((n, dist.d))


def _walk_generators(dist, n, rng):
    return np.cumsum(sample_increments(dist, n, rng), axis=0)


def _bridge_generators(dist, n, rng):
    steps = sample_increments(dist, n, rng)
    centered = steps - steps.mean(axis=0)
    return np.cumsum(centered, axis=0)[:-1]


def _draw_cone(model: Model, dist: DistributionSpec, rng: np.random.Generator,
               max_retries: int = _MAX_DRAW_RETRIES) -> tuple[ConeSample, int]:
    if dist.d != model.d:
        raise DomainError(f"distribution dimension {dist.d} != model dimension {model.d}")
    for attempt in range(max_retries):
        if model.is_bridge:
            gens = _bridge_generators(dist, model.n, rng)
            tag = TAG_BRIDGE
        else:
            gens = _walk_generators(dist, model.n, rng)
            tag = TAG_WALK
        if geometry._general_position_ok(gens):
            return ConeSample(gens, tag), attempt
    raise SamplingError(
        f"no draw in general position after {max_retries} attempts "
        f"({dist.family}, n={model.n}, d={model.d})")


def sample_walk(dist: DistributionSpec, n: int, rng: np.random.Generator) -> ConeSample:
    """Partial sums S_1..S_n of n increments, rejecting degenerate draws."""
    cone, _ = _draw_cone(Model(B_WALK, n, dist.d), dist, rng)
    return cone


def sample_bridge(dist: DistributionSpec, n: int, rng: np.random.Generator) -> ConeSample:
    """Centered partial sums S_1..S_{n-1} of a bridge of n increments.

    Increments are recentered by their mean, which preserves
    exchangeability and forces the nth partial sum to vanish.
    """
    cone, _ = _draw_cone(Model(A_BRIDGE, n, dist.d), dist, rng)
    return cone


# ---------------------------------------------------------------------------
# per-sample random streams


class _SampleStreams:
    """Generators addressed by sample index over one Philox key.

    Stream i is the Philox sequence with key ``seed`` and starting counter
    block (0, 0, 0, i); each stream has 2^192 values of room, and resetting
    the counter on one reused bit generator avoids per-sample construction
    cost.
    """

    def __init__(self, seed: int) -> None:
        seed = int(seed) & _MASK64
        self._key = np.array([seed, 0], dtype=np.uint64)
        self._bg = np.random.Philox(key=self._key)
        self._gen = np.random.Generator(self._bg)
        self._template = self._bg.state

    def at(self, index: int) -> np.random.Generator:
        state = dict(self._template)
        state["state"] = {
            "counter": np.array([0, 0, 0, index & _MASK64], dtype=np.uint64),
            "key": self._key,
        }
        state["buffer_pos"] = 4  # mark the output buffer as drained
        self._bg.state = state
        return self._gen


# ---------------------------------------------------------------------------
# Monte Carlo estimates


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error and exact-reference z-score."""

    mean: float
    stderr: float
    samples: int
    exact_ref: Optional[Fraction] = None
    z: Optional[float] = None
    rejected: int = 0


@dataclass(frozen=True)
class RunConfig:
    """One reproducible estimation run.

    The same (config, seed) pair yields bit-identical estimates for any
    worker count.
    """

    query: FunctionalQuery
    dist: DistributionSpec
    samples: int
    seed: int
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise DomainError("need at least one sample")
        if self.workers < 1:
            raise DomainError("worker count must be >= 1")
        if self.query.model is not None and self.query.model.d != self.dist.d:
            raise DomainError(
                f"query model dimension {self.query.model.d} != distribution dimension {self.dist.d}")
        if self.query.functional == "joint_absorption" and self.query.d != self.dist.d:
            raise DomainError("joint_absorption query dimension must match the distribution")


_SIMULATABLE = frozenset({
    "absorption", "nonabsorption", "fk", "Uk", "vk", "Lambda", "Y", "Z",
    "face_intrinsic", "tangent_intrinsic", "face_prob", "subspace_prob",
    "joint_absorption",
})

_SPLIT_CACHE: dict[tuple[int, int], list[tuple[np.ndarray, np.ndarray]]] = {}


def _index_splits(n_gen: int, size: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """(subset, complement) row-index pairs for every subset of the given size."""
    key = (n_gen, size)
    cached = _SPLIT_CACHE.get(key)
    if cached is None:
        cached = []
        for subset in combinations(range(n_gen), size):
            rest = [i for i in range(n_gen) if i not in subset]
            cached.append((np.array(subset, dtype=np.intp), np.array(rest, dtype=np.intp)))
        if len(_SPLIT_CACHE) < 1024:
            _SPLIT_CACHE[key] = cached
    return cached


def _is_face_split(gens: np.ndarray, sel: np.ndarray, rest: np.ndarray,
                   tol: float) -> np.ndarray | None:
    """Complement basis of the selected rows if they span a face, else None."""
    basis = geometry._complement_basis(gens[sel])
    if basis is None:
        raise DegenerateInputError("rank-deficient generator subset in a face test")
    if rest.size and geometry._origin_in_hull(gens[rest] @ basis, tol):
        return None
    return basis


def _hits_random_subspace(gens: np.ndarray, perp_dim: int, tol: float,
                          rng: np.random.Generator) -> bool:
    """Whether the cone meets a Haar subspace of codimension ``perp_dim``.

    Sampling the orthogonal complement directly is equivalent (complements
    of Haar subspaces are Haar) and reduces the test to projecting the
    generators onto ``perp_dim`` coordinates.
    """
    if perp_dim == 0:
        return True
    basis = geometry._haar_basis(gens.shape[1], perp_dim, rng)
    return geometry._origin_in_hull(gens @ basis, tol)


def _measure_fn(query: FunctionalQuery) -> Callable[[ConeSample, np.random.Generator], float]:
    """Per-cone measurement whose expectation is the queried functional."""
    name = query.functional
    model = query.model
    if name == "absorption":
        return lambda cone, rng: 1.0 if is_full_cone(cone) else 0.0
    if name == "nonabsorption":
        return lambda cone, rng: 0.0 if is_full_cone(cone) else 1.0
    if name == "fk":
        k = query.k
        if k == 0:
            return lambda cone, rng: 0.0 if is_full_cone(cone) else 1.0

        def measure_f(cone, rng):
            gens = cone.generators
            total = 0.0
            for sel, rest in _index_splits(cone.n_generators, k):
                if _is_face_split(gens, sel, rest, cone.tol) is not None:
                    total += 1.0
            return total

        return measure_f
    if name == "vk":
        k = query.k

        def measure_v(cone, rng):
            g = rng.standard_normal(cone.d)
            return 1.0 if geometry._projection_face_dim(cone.generators, g, cone.tol) == k else 0.0

        return measure_v
    if name == "Uk":
        k = query.k

        def measure_u(cone, rng):
            d = cone.d
            if is_full_cone(cone):
                # the full space scores by the subspace convention
                return 1.0 if (d - k) % 2 == 1 else 0.0
            if k == d:
                return 0.0
            return 0.5 if _hits_random_subspace(cone.generators, k, cone.tol, rng) else 0.0

        return measure_u
    if name in ("Y", "Lambda"):
        m = query.m if name == "Y" else query.k
        l = query.l if name == "Y" else query.k - 1

        def measure_y(cone, rng):
            gens = cone.generators
            total = 0.0
            for sel, rest in _index_splits(cone.n_generators, m):
                if _is_face_split(gens, sel, rest, cone.tol) is None:
                    continue
                if _hits_random_subspace(gens[sel], l, cone.tol, rng):
                    total += 0.5
            return total

        return measure_y
    if name == "Z":
        j, k = query.j, query.k

        def measure_z(cone, rng):
            d = cone.d
            if j == 0:
                if k == d or is_full_cone(cone):
                    return 0.0
                return 0.5 if _hits_random_subspace(cone.generators, k, cone.tol, rng) else 0.0
            if k == d:
                return 0.0  # top quermassintegral of a tangent cone vanishes
            gens = cone.generators
            total = 0.0
            for sel, rest in _index_splits(cone.n_generators, j):
                basis = _is_face_split(gens, sel, rest, cone.tol)
                if basis is None:
                    continue
                projected = gens[rest] @ basis
                if _hits_random_subspace(projected, k - j, cone.tol, rng):
                    total += 0.5
            return total

        return measure_z
    if name == "face_intrinsic":
        m, l = query.m, query.l
        if m > model.d - 1:
            raise DomainError(
                "face_intrinsic simulation enumerates proper faces and requires m <= d-1")

        def measure_fi(cone, rng):
            gens = cone.generators
            total = 0.0
            for sel, rest in _index_splits(cone.n_generators, m):
                if _is_face_split(gens, sel, rest, cone.tol) is None:
                    continue
                g = rng.standard_normal(cone.d)
                if geometry._projection_face_dim(gens[sel], g, cone.tol) == l:
                    total += 1.0
            return total

        return measure_fi
    if name == "tangent_intrinsic":
        j, k = query.j, query.k

        def measure_ti(cone, rng):
            d = cone.d
            if j == 0:
                if is_full_cone(cone):
                    return 0.0
                g = rng.standard_normal(d)
                return 1.0 if geometry._projection_face_dim(cone.generators, g, cone.tol) == k else 0.0
            gens = cone.generators
            total = 0.0
            for sel, rest in _index_splits(cone.n_generators, j):
                basis = _is_face_split(gens, sel, rest, cone.tol)
                if basis is None:
                    continue
                projected = gens[rest] @ basis
                g = rng.standard_normal(d - j)
                if geometry._projection_face_dim(projected, g, cone.tol) == k - j:
                    total += 1.0
            return total

        return measure_ti
    if name == "face_prob":
        rows = tuple(i - 1 for i in query.indices)  # 1-based partial sums -> rows

        def measure_fp(cone, rng):
            return 1.0 if is_face(cone, rows) else 0.0

        return measure_fp
    if name == "subspace_prob":
        k = query.k
        return lambda cone, rng: (
            1.0 if _hits_random_subspace(cone.generators, k, cone.tol, rng) else 0.0)
    raise DomainError(f"functional {name!r} is not supported by the simulator")


def _draw_joint(query: FunctionalQuery, dist: DistributionSpec,
                rng: np.random.Generator) -> tuple[np.ndarray, int]:
    for attempt in range(_MAX_DRAW_RETRIES):
        blocks = [_walk_generators(dist, n, rng) for n in query.walk_lengths]
        blocks += [_bridge_generators(dist, m, rng) for m in query.bridge_lengths]
        points = np.vstack(blocks)
        if geometry._general_position_ok(points):
            return points, attempt
    raise SamplingError(f"no joint draw in general position after {_MAX_DRAW_RETRIES} attempts")


def _chunk_stats(args: tuple) -> tuple[float, float, int]:
    query, dist, seed, start, count = args
    streams = _SampleStreams(seed)
    total = 0.0
    total_sq = 0.0
    rejected = 0
    if query.functional == "joint_absorption":
        for i in range(start, start + count):
            rng = streams.at(i)
            points, rej = _draw_joint(query, dist, rng)
            rejected += rej
            value = 1.0 if origin_in_convex_hull(points) else 0.0
            total += value
            total_sq += value * value
        return total, total_sq, rejected
    model = query.model
    measure = _measure_fn(query)
    conditioned = query.conditioned
    for i in range(start, start + count):
        rng = streams.at(i)
        cone, rej = _draw_cone(model, dist, rng)
        rejected += rej
        if conditioned:
            guard = 0
            while is_full_cone(cone):
                guard += 1
                if guard > _MAX_CONDITION_RETRIES:
                    raise SamplingError("conditioning on a non-full cone exceeded the retry budget")
                cone, rej2 = _draw_cone(model, dist, rng)
                rejected += rej2
        value = measure(cone, rng)
        total += value
        total_sq += value * value
    return total, total_sq, rejected


def estimate(config: RunConfig) -> MCEstimate:
    """Unbiased Monte Carlo estimate of the queried functional.

    Returns the sample mean and standard error, plus the z-score against
    the exact value from the formula layer.
    """
    query = config.query
    if query.functional not in _SIMULATABLE:
        raise DomainError(
            f"functional {query.functional!r} has no Monte Carlo measurement; "
            "evaluate it exactly instead")
    exact = evaluate_query(query).exact
    n = config.samples
    chunks = [(query, config.dist, config.seed, start, min(_CHUNK, n - start))
              for start in range(0, n, _CHUNK)]
    if config.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_chunk_stats, chunks, chunksize=1))
    else:
        parts = [_chunk_stats(c) for c in chunks]
    total = 0.0
    total_sq = 0.0
    rejected = 0
    for s, s2, rej in parts:  # fixed chunk order keeps float sums associative
        total += s
        total_sq += s2
        rejected += rej
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    stderr = math.sqrt(var / n)
    z = (mean - float(exact)) / stderr if stderr > 0 else None
    return MCEstimate(mean=mean, stderr=stderr, samples=n,
                      exact_ref=exact, z=z, rejected=rejected)

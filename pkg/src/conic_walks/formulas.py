"""Closed-form expectations for positive hulls of random walks and bridges.

Two model families are supported:

* tag ``"A"`` -- a bridge: n exchangeable increments summing to zero; the
  cone is the positive hull of the first n-1 partial sums and requires
  n >= d+1 for the general-position assumption to be satisfiable.
* tag ``"B"`` -- a walk: n sign-symmetric exchangeable increments; the cone
  is the positive hull of all n partial sums and requires n >= d.

Every function returns an exact :class:`fractions.Fraction`.  Covered
functionals: absorption/nonabsorption (cone = R^d or not), face counts
``f_k``, conic quermassintegrals ``U_k``, conic intrinsic volumes ``v_k``,
solid-angle totals ``Lambda_k``, face sums ``Y_{m,l}`` of quermassintegrals,
tangent-cone sums ``Z_{j,k}``, per-face intrinsic-volume sums, the dual-cone
``Y`` values, per-index-tuple face probabilities, subspace intersection
probabilities, and the absorption probability of joint hulls of several
walks and bridges.

Conditioned variants (``conditioned=True``) refer to the cone conditioned
on being a proper subset of R^d; for functionals vanishing on R^d this is
plain division by the nonabsorption probability, while ``U_k`` and the top
intrinsic volume carry dedicated conditioned formulas because they do not
vanish on R^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .combinatorics import (
    StirlingTables,
    binomial,
    bridge_block_poly,
    coeff_P_poly,
    coeff_Q_poly,
    default_tables,
    poly_mul,
    walk_block_poly,
)
from .errors import DomainError

A_BRIDGE = "A"
B_WALK = "B"


@dataclass(frozen=True)
class Model:
    """A cone model: bridge ("A") or walk ("B") with n increments in R^d."""

    tag: str
    n: int
    d: int

    def __post_init__(self) -> None:
        if self.tag not in (A_BRIDGE, B_WALK):
            raise DomainError(f"model tag must be 'A' (bridge) or 'B' (walk), got {self.tag!r}")
        if self.d < 1:
            raise DomainError(f"ambient dimension must be >= 1, got d={self.d}")
        if self.tag == A_BRIDGE and self.n < self.d + 1:
            raise DomainError(
                f"bridge model requires n >= d+1 (general position), got n={self.n}, d={self.d}")
        if self.tag == B_WALK and self.n < self.d:
            raise DomainError(
                f"walk model requires n >= d (general position), got n={self.n}, d={self.d}")

    @property
    def is_bridge(self) -> bool:
        return self.tag == A_BRIDGE

    @property
    def generator_count(self) -> int:
        """Number of cone generators: n for a walk, n-1 for a bridge."""
        return self.n - 1 if self.is_bridge else self.n


# ---------------------------------------------------------------------------
# tail-sum helpers


def _sum_down(f: Callable[[int], int], start: int) -> int:
    """f(start) + f(start-2) + ... over nonnegative indices."""
    total = 0
    i = start
    while i >= 0:
        total += f(i)
        i -= 2
    return total


def _sum_up(f: Callable[[int], int], start: int, stop: int) -> int:
    """f(start) + f(start+2) + ... while the index stays <= stop."""
    total = 0
    i = start
    while i <= stop:
        total += f(i)
        i += 2
    return total


def _sum_alternating_down(f: Callable[[int], int], start: int) -> int:
    """f(start) - f(start-1) + f(start-2) - ... over nonnegative indices."""
    total = 0
    sign = 1
    for i in range(start, -1, -1):
        total += sign * f(i)
        sign = -sign
    return total


def _bridge_profile(model: Model, tables: StirlingTables):
    n = model.n
    s1 = lambda i: tables.first(n, i)
    s2 = tables.second
    return n, s1, s2


def _walk_profile(model: Model, tables: StirlingTables):
    n = model.n
    b1 = lambda i: tables.first_b(n, i)
    b2 = tables.second_b
    return n, b1, b2


# ---------------------------------------------------------------------------
# absorption and the origin-in-hull classic


def wendel_probability(n: int, d: int) -> Fraction:
    """Probability that n i.i.d. symmetric points do not positively span R^d.

    Equals 2^-(n-1) * sum_{k<d} C(n-1, k); in particular 7/8 for four
    symmetric points around the origin in dimension three.
    """
    if n < 1 or d < 1:
        raise DomainError(f"wendel probability requires n >= 1 and d >= 1, got n={n}, d={d}")
    return Fraction(sum(binomial(n - 1, k) for k in range(d)), 1 << (n - 1))


def nonabsorption_probability(model: Model, tables: StirlingTables | None = None) -> Fraction:
    """P[cone != R^d], equivalently that the origin avoids the path's convex hull."""
    t = tables if tables is not None else default_tables()
    n, d = model.n, model.d
    if model.is_bridge:
        return Fraction(2 * _sum_down(lambda i: t.first(n, i), d), math.factorial(n))
    return Fraction(2 * _sum_down(lambda i: t.first_b(n, i), d - 1),
                    (1 << n) * math.factorial(n))


def absorption_probability(model: Model, tables: StirlingTables | None = None) -> Fraction:
    """P[cone = R^d]."""
    t = tables if tables is not None else default_tables()
    n, d = model.n, model.d
    if model.is_bridge:
        return Fraction(2 * _sum_up(lambda i: t.first(n, i), d + 2, n), math.factorial(n))
    return Fraction(2 * _sum_up(lambda i: t.first_b(n, i), d + 1, n),
                    (1 << n) * math.factorial(n))


def _conditioned(value: Fraction, model: Model, tables: StirlingTables) -> Fraction:
    return value / nonabsorption_probability(model, tables)


# ---------------------------------------------------------------------------
# size functionals


def expected_Y(model: Model, m: int, l: int, conditioned: bool = False,
               tables: StirlingTables | None = None) -> Fraction:
    """Expected sum over m-faces of the l-th conic quermassintegral."""
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 0 <= l < m <= d - 1:
        raise DomainError(f"expected_Y requires 0 <= l < m <= d-1, got m={m}, l={l}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        edge = _sum_up(lambda i: t.first(m + 1, i), l + 2, m + 1)
        bulk = _sum_down(lambda i: s1(i) * s2(i, m + 1), d)
        value = Fraction(2 * edge * bulk, math.factorial(n))
    else:
        n, b1, b2 = _walk_profile(model, t)
        edge = _sum_up(lambda i: t.first_b(m, i), l + 1, m)
        bulk = _sum_down(lambda i: b1(i) * b2(i, m), d - 1)
        value = Fraction(2 * edge * bulk, (1 << n) * math.factorial(n))
    return _conditioned(value, model, t) if conditioned else value


def expected_Z(model: Model, j: int, k: int, conditioned: bool = False,
               tables: StirlingTables | None = None) -> Fraction:
    """Expected sum over j-faces of the k-th quermassintegral of the tangent cone."""
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 0 <= j <= k <= d:
        raise DomainError(f"expected_Z requires 0 <= j <= k <= d, got j={j}, k={k}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        tail = lambda x: _sum_down(lambda i: s1(i) * s2(i, j + 1), x)
        value = Fraction(math.factorial(j + 1) * (tail(d) - tail(k)), math.factorial(n))
    else:
        n, b1, b2 = _walk_profile(model, t)
        tail = lambda x: _sum_down(lambda i: b1(i) * b2(i, j), x - 1)
        value = Fraction(math.factorial(j) * (tail(d) - tail(k)),
                         (1 << (n - j)) * math.factorial(n))
    return _conditioned(value, model, t) if conditioned else value


def expected_fk(model: Model, k: int, conditioned: bool = False,
                tables: StirlingTables | None = None) -> Fraction:
    """Expected number of k-dimensional faces, 0 <= k <= d-1.

    k = 0 counts the apex, so the unconditioned value equals the
    nonabsorption probability.
    """
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 0 <= k <= d - 1:
        raise DomainError(f"expected_fk requires 0 <= k <= d-1, got k={k}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        bulk = _sum_down(lambda i: s1(i) * s2(i, k + 1), d)
        value = Fraction(2 * math.factorial(k + 1) * bulk, math.factorial(n))
    else:
        n, b1, b2 = _walk_profile(model, t)
        bulk = _sum_down(lambda i: b1(i) * b2(i, k), d - 1)
        value = Fraction(2 * math.factorial(k) * bulk, (1 << (n - k)) * math.factorial(n))
    return _conditioned(value, model, t) if conditioned else value


def expected_Uk(model: Model, k: int, conditioned: bool = False,
                tables: StirlingTables | None = None) -> Fraction:
    """Expected k-th conic quermassintegral, 0 <= k <= d.

    The unconditioned value splits on the parity of d-k because the full
    space contributes U_k(R^d) = 1 exactly when d-k is odd; the conditioned
    cone is never R^d, so it has its own ratio formula.
    """
    t = tables if tables is not None else default_tables()
    n, d = model.n, model.d
    if not 0 <= k <= d:
        raise DomainError(f"expected_Uk requires 0 <= k <= d, got k={k}, d={d}")
    if model.is_bridge:
        row = lambda i: t.first(n, i)
        if conditioned:
            full, part = _sum_down(row, d), _sum_down(row, k)
            return Fraction(full - part, 2 * full)
        if (d - k) % 2 == 1:
            total = _sum_up(row, k + 2, n) + _sum_up(row, d + 2, n)
        else:
            total = _sum_up(row, k + 2, d)
        return Fraction(total, math.factorial(n))
    row = lambda i: t.first_b(n, i)
    if conditioned:
        full, part = _sum_down(row, d - 1), _sum_down(row, k - 1)
        return Fraction(full - part, 2 * full)
    if (d - k) % 2 == 1:
        total = _sum_up(row, k + 1, n) + _sum_up(row, d + 1, n)
    else:
        total = _sum_up(row, k + 1, d - 1)
    return Fraction(total, (1 << n) * math.factorial(n))


def expected_vk(model: Model, k: int, conditioned: bool = False,
                tables: StirlingTables | None = None) -> Fraction:
    """Expected k-th conic intrinsic volume, 0 <= k <= d."""
    t = tables if tables is not None else default_tables()
    n, d = model.n, model.d
    if not 0 <= k <= d:
        raise DomainError(f"expected_vk requires 0 <= k <= d, got k={k}, d={d}")
    if model.is_bridge:
        row = lambda i: t.first(n, i)
        if conditioned:
            denom = 2 * _sum_down(row, d)
            num = _sum_alternating_down(row, d) if k == d else row(k + 1)
            return Fraction(num, denom)
        if k == d:
            return Fraction(sum(row(i) for i in range(d + 1, n + 1)), math.factorial(n))
        return Fraction(row(k + 1), math.factorial(n))
    row = lambda i: t.first_b(n, i)
    if conditioned:
        denom = 2 * _sum_down(row, d - 1)
        num = _sum_alternating_down(row, d - 1) if k == d else row(k)
        return Fraction(num, denom)
    if k == d:
        return Fraction(sum(row(i) for i in range(d, n + 1)), (1 << n) * math.factorial(n))
    return Fraction(row(k), (1 << n) * math.factorial(n))


def expected_Lambda(model: Model, k: int, conditioned: bool = False,
                    tables: StirlingTables | None = None) -> Fraction:
    """Expected total solid-angle content of the k-faces, 1 <= k <= d-1."""
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 1 <= k <= d - 1:
        raise DomainError(f"expected_Lambda requires 1 <= k <= d-1, got k={k}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        value = Fraction(2 * _sum_down(lambda i: s1(i) * s2(i, k + 1), d), math.factorial(n))
    else:
        n, b1, b2 = _walk_profile(model, t)
        value = Fraction(2 * _sum_down(lambda i: b1(i) * b2(i, k), d - 1),
                         (1 << n) * math.factorial(n))
    return _conditioned(value, model, t) if conditioned else value


def expected_face_intrinsic_sum(model: Model, m: int, l: int,
                                tables: StirlingTables | None = None) -> Fraction:
    """Expected sum over m-faces of the l-th conic intrinsic volume."""
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 0 <= l <= m <= d:
        raise DomainError(
            f"expected_face_intrinsic_sum requires 0 <= l <= m <= d, got m={m}, l={l}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        bulk = _sum_down(lambda i: s1(i) * s2(i, m + 1), d)
        return Fraction(2 * t.first(m + 1, l + 1) * bulk, math.factorial(n))
    n, b1, b2 = _walk_profile(model, t)
    bulk = _sum_down(lambda i: b1(i) * b2(i, m), d - 1)
    return Fraction(2 * t.first_b(m, l) * bulk, (1 << n) * math.factorial(n))


def expected_tangent_intrinsic_sum(model: Model, j: int, k: int,
                                   tables: StirlingTables | None = None) -> Fraction:
    """Expected sum over j-faces of the k-th intrinsic volume of the tangent cone.

    The case k = j gives the internal-angle sum, k = d the external-style
    alternating tail.
    """
    t = tables if tables is not None else default_tables()
    d = model.d
    if not (0 <= j <= d - 1 and j <= k <= d):
        raise DomainError(
            f"expected_tangent_intrinsic_sum requires 0 <= j <= d-1 and j <= k <= d, "
            f"got j={j}, k={k}, d={d}")
    if model.is_bridge:
        n = model.n
        if k == d:
            total = _sum_alternating_down(lambda i: t.first(n, i) * t.second(i, j + 1), d)
        else:
            total = t.first(n, k + 1) * t.second(k + 1, j + 1)
        return Fraction(math.factorial(j + 1) * total, math.factorial(n))
    n = model.n
    if k == d:
        total = _sum_alternating_down(lambda i: t.first_b(n, i) * t.second_b(i, j), d - 1)
    else:
        total = t.first_b(n, k) * t.second_b(k, j)
    return Fraction(math.factorial(j) * total, (1 << (n - j)) * math.factorial(n))


def expected_Y_dual(model: Model, m: int, l: int,
                    tables: StirlingTables | None = None) -> Fraction:
    """Expected sum over m-faces of the dual cone of the l-th quermassintegral.

    Obtained from the duality  Y_{m,l}(dual C) = f_{d-m}(C)/2 - Z_{d-m,d-l}(C)
    for full-dimensional C.
    """
    t = tables if tables is not None else default_tables()
    d = model.d
    if not 0 <= l < m <= d:
        raise DomainError(f"expected_Y_dual requires 0 <= l < m <= d, got m={m}, l={l}, d={d}")
    if model.is_bridge:
        n, s1, s2 = _bridge_profile(model, t)
        bulk = _sum_down(lambda i: s1(i) * s2(i, d - m + 1), d - l)
        return Fraction(math.factorial(d - m + 1) * bulk, math.factorial(n))
    n, b1, b2 = _walk_profile(model, t)
    bulk = _sum_down(lambda i: b1(i) * b2(i, d - m), d - l - 1)
    return Fraction(math.factorial(d - m) * bulk, (1 << (n - d + m)) * math.factorial(n))


# ---------------------------------------------------------------------------
# face and intersection probabilities


def _validated_face_indices(model: Model, indices: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    k = len(idx)
    if not 1 <= k <= model.d - 1:
        raise DomainError(
            f"face probability requires 1 <= len(indices) <= d-1, got {k} with d={model.d}")
    if any(i < 1 for i in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
        raise DomainError(f"indices must be strictly increasing and >= 1, got {idx}")
    if idx[-1] > model.generator_count:
        raise DomainError(
            f"largest index {idx[-1]} exceeds the {model.generator_count} partial sums "
            f"of the {'bridge' if model.is_bridge else 'walk'} model")
    return idx


def face_probability(model: Model, indices: Sequence[int], complement: bool = False,
                     tables: StirlingTables | None = None) -> Fraction:
    """Probability that the partial sums at ``indices`` (1-based) span a face.

    With ``complement=True`` returns the probability that they do not; the
    two always add to one.
    """
    t = tables if tables is not None else default_tables()
    idx = _validated_face_indices(model, indices)
    n, d, k = model.n, model.d, len(idx)
    gaps = tuple(b - a for a, b in zip((0,) + idx, idx))
    tail = n - idx[-1]
    denom = math.prod(math.factorial(g) for g in gaps) * math.factorial(tail)
    if model.is_bridge:
        poly = coeff_Q_poly(n, gaps, t)
    else:
        poly = coeff_P_poly(n, gaps, t)
        denom *= 1 << tail
    if complement:
        total = sum(poly[r] for r in range(d - k + 1, len(poly), 2))
    else:
        total = _sum_down(lambda r: poly[r] if r < len(poly) else 0, d - k - 1)
    return Fraction(2 * total, denom)


def subspace_intersection_probability(model: Model, k: int,
                                      tables: StirlingTables | None = None) -> Fraction:
    """Probability that the cone meets a fixed generic (d-k)-subspace nontrivially."""
    t = tables if tables is not None else default_tables()
    n, d = model.n, model.d
    if not 0 <= k <= d - 1:
        raise DomainError(f"subspace intersection requires 0 <= k <= d-1, got k={k}, d={d}")
    if model.is_bridge:
        return Fraction(2 * _sum_up(lambda i: t.first(n, i), k + 2, n), math.factorial(n))
    return Fraction(2 * _sum_up(lambda i: t.first_b(n, i), k + 1, n),
                    (1 << n) * math.factorial(n))


def joint_absorption_probability(walk_lengths: Sequence[int], bridge_lengths: Sequence[int],
                                 d: int, complement: bool = False,
                                 tables: StirlingTables | None = None) -> Fraction:
    """Probability that the joint convex hull of several walks and bridges
    contains the origin (``complement=True`` for avoiding it).

    A walk of length n contributes its n partial sums, a bridge of length m
    its first m-1; the block coefficient polynomial is the product of one
    odd rising factor per walk and one plain rising factor per bridge.
    """
    t = tables if tables is not None else default_tables()
    walks = tuple(int(x) for x in walk_lengths)
    bridges = tuple(int(x) for x in bridge_lengths)
    if not walks and not bridges:
        raise DomainError("joint absorption needs at least one walk or bridge block")
    if any(w < 1 for w in walks):
        raise DomainError(f"walk lengths must be >= 1, got {walks}")
    if any(b < 2 for b in bridges):
        raise DomainError(f"bridge lengths must be >= 2, got {bridges}")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got d={d}")
    poly = [1]
    for w in walks:
        poly = poly_mul(poly, walk_block_poly(w, t))
    for b in bridges:
        poly = poly_mul(poly, bridge_block_poly(b, t))
    denom = math.prod((1 << w) * math.factorial(w) for w in walks)
    denom *= math.prod(math.factorial(b) for b in bridges)
    if complement:
        total = _sum_down(lambda r: poly[r] if r < len(poly) else 0, d - 1)
    else:
        total = sum(poly[r] for r in range(d + 1, len(poly), 2))
    return Fraction(2 * total, denom)


# ---------------------------------------------------------------------------
# query layer

FUNCTIONALS = (
    "absorption", "nonabsorption", "wendel", "fk", "Uk", "vk", "Lambda",
    "Y", "Z", "face_intrinsic", "tangent_intrinsic", "Y_dual",
    "face_prob", "subspace_prob", "joint_absorption",
)

_CONDITIONABLE = frozenset({"fk", "Uk", "vk", "Lambda", "Y", "Z"})


@dataclass(frozen=True)
class FunctionalQuery:
    """One evaluation request: a functional plus the indices it needs.

    ``model`` is required for all functionals except ``wendel`` (which takes
    bare ``n``/``d``) and ``joint_absorption`` (which takes block lengths
    and ``d``).  ``dual=True`` on a ``Y`` query redirects to the dual cone.
    """

    functional: str
    model: Optional[Model] = None
    k: Optional[int] = None
    m: Optional[int] = None
    l: Optional[int] = None
    j: Optional[int] = None
    indices: Optional[tuple[int, ...]] = None
    walk_lengths: tuple[int, ...] = ()
    bridge_lengths: tuple[int, ...] = ()
    n: Optional[int] = None
    d: Optional[int] = None
    conditioned: bool = False
    dual: bool = False

    def __post_init__(self) -> None:
        name = self.functional
        if name == "Y" and self.dual:
            object.__setattr__(self, "functional", "Y_dual")
            object.__setattr__(self, "dual", False)
            name = "Y_dual"
        if name not in FUNCTIONALS:
            raise DomainError(f"unknown functional {self.functional!r}; expected one of {FUNCTIONALS}")
        if self.conditioned and name not in _CONDITIONABLE:
            raise DomainError(f"functional {name!r} has no conditioned variant")
        if self.dual and name not in ("Y", "Y_dual"):
            raise DomainError("the dual flag applies only to the Y functional")
        needs_model = name not in ("wendel", "joint_absorption")
        if needs_model and self.model is None:
            raise DomainError(f"functional {name!r} requires a model")
        if self.indices is not None:
            object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def _require(self, **kw: Optional[int]) -> list[int]:
        out = []
        for key, val in kw.items():
            if val is None:
                raise DomainError(f"functional {self.functional!r} requires index {key!r}")
            out.append(int(val))
        return out


@dataclass(frozen=True)
class FormulaResult:
    """An exact value, its float shadow, and an identifier of the formula used."""

    exact: Fraction
    decimal: float = field(default=0.0)
    citation: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "decimal", float(self.exact))


def evaluate_query(query: FunctionalQuery,
                   tables: StirlingTables | None = None) -> FormulaResult:
    """Dispatch a query to its closed form and wrap the exact result."""
    t = tables if tables is not None else default_tables()
    q = query
    name = q.functional
    model = q.model
    cond = q.conditioned
    suffix = ""
    if model is not None:
        suffix = ".bridge" if model.is_bridge else ".walk"
    if cond:
        suffix += ".conditioned"

    if name == "wendel":
        n, d = q._require(n=q.n, d=q.d)
        return FormulaResult(wendel_probability(n, d), citation="wendel")
    if name == "joint_absorption":
        if q.d is None:
            raise DomainError("joint_absorption requires d")
        value = joint_absorption_probability(q.walk_lengths, q.bridge_lengths, q.d, tables=t)
        return FormulaResult(value, citation="joint-absorption")
    if name == "absorption":
        return FormulaResult(absorption_probability(model, t), citation="absorption" + suffix)
    if name == "nonabsorption":
        return FormulaResult(nonabsorption_probability(model, t),
                             citation="nonabsorption" + suffix)
    if name == "fk":
        (k,) = q._require(k=q.k)
        return FormulaResult(expected_fk(model, k, cond, t), citation="face-count" + suffix)
    if name == "Uk":
        (k,) = q._require(k=q.k)
        return FormulaResult(expected_Uk(model, k, cond, t), citation="quermassintegral" + suffix)
    if name == "vk":
        (k,) = q._require(k=q.k)
        return FormulaResult(expected_vk(model, k, cond, t), citation="intrinsic-volume" + suffix)
    if name == "Lambda":
        (k,) = q._require(k=q.k)
        return FormulaResult(expected_Lambda(model, k, cond, t), citation="face-content" + suffix)
    if name == "Y":
        m, l = q._require(m=q.m, l=q.l)
        return FormulaResult(expected_Y(model, m, l, cond, t), citation="face-sum-U" + suffix)
    if name == "Z":
        j, k = q._require(j=q.j, k=q.k)
        return FormulaResult(expected_Z(model, j, k, cond, t), citation="tangent-sum-U" + suffix)
    if name == "face_intrinsic":
        m, l = q._require(m=q.m, l=q.l)
        return FormulaResult(expected_face_intrinsic_sum(model, m, l, t),
                             citation="face-sum-v" + suffix)
    if name == "tangent_intrinsic":
        j, k = q._require(j=q.j, k=q.k)
        return FormulaResult(expected_tangent_intrinsic_sum(model, j, k, t),
                             citation="tangent-sum-v" + suffix)
    if name == "Y_dual":
        m, l = q._require(m=q.m, l=q.l)
        return FormulaResult(expected_Y_dual(model, m, l, t), citation="dual-face-sum-U" + suffix)
    if name == "face_prob":
        if q.indices is None:
            raise DomainError("face_prob requires indices i1<...<ik")
        return FormulaResult(face_probability(model, q.indices, tables=t),
                             citation="face-probability" + suffix)
    if name == "subspace_prob":
        (k,) = q._require(k=q.k)
        return FormulaResult(subspace_intersection_probability(model, k, t),
                             citation="subspace-intersection" + suffix)
    raise DomainError(f"unhandled functional {name!r}")

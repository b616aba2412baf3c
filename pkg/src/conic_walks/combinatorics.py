"""Exact integer combinatorics behind the cone expectation formulas.

Four triangular number families parameterize every closed form in this
package: the signless cycle-counting numbers of the first kind, the
set-partition numbers of the second kind, and their signed-permutation
analogues obtained from the odd rising product ``(t+1)(t+3)...(t+2n-1)``
and from a doubled partition sum.  All values are exact Python integers;
rational results elsewhere are built on :class:`fractions.Fraction`.

The module also provides the composition-indexed coefficient polynomials
(``coeff_P`` for walk-terminated block products, ``coeff_Q`` for pure
bridge block products) that drive the per-index-tuple face probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import DomainError

# All probabilities and expectations are carried losslessly as Fractions:
# numerator/denominator pairs of arbitrary-precision integers, stored in
# lowest terms with positive denominator.
ExactRational = Fraction

KINDS = ("first", "second", "first_B", "second_B")


class StirlingTables:
    """Grow-on-demand cached triangles of the four Stirling-type families.

    Entry ``(n, k)`` with ``k`` outside ``{0, ..., n}`` reads as 0, and the
    ``(0, 0)`` entry of every family is 1.  Rows are appended once and never
    mutated, so a warm instance can be shared read-only across threads or
    forked worker processes.
    """

    def __init__(self, max_n: int = 0) -> None:
        self._first: list[list[int]] = [[1]]
        self._second: list[list[int]] = [[1]]
        self._first_b: list[list[int]] = [[1]]
        self._second_b: list[list[int]] = [[1]]
        if max_n > 0:
            self.grow(max_n)

    @property
    def max_n(self) -> int:
        """Largest row index available in every family without regrowth."""
        return min(len(self._first), len(self._second),
                   len(self._first_b), len(self._second_b)) - 1

    def grow(self, n: int) -> None:
        """Precompute all four triangles up to row ``n``."""
        if n < 0:
            raise DomainError("table size must be nonnegative")
        self._grow_first(n)
        self._grow_second(n)
        self._grow_first_b(n)
        self._grow_second_b(n)

    # -- row builders --------------------------------------------------

    def _grow_first(self, n: int) -> None:
        rows = self._first
        while len(rows) <= n:
            m = len(rows)
            prev = rows[-1]
            row = [0] * (m + 1)
            for k in range(1, m + 1):
                row[k] = prev[k - 1] + (m - 1) * (prev[k] if k < m else 0)
            rows.append(row)

    def _grow_second(self, n: int) -> None:
        rows = self._second
        while len(rows) <= n:
            m = len(rows)
            prev = rows[-1]
            row = [0] * (m + 1)
            for k in range(1, m + 1):
                row[k] = prev[k - 1] + k * (prev[k] if k < m else 0)
            rows.append(row)

    def _grow_first_b(self, n: int) -> None:
        rows = self._first_b
        while len(rows) <= n:
            m = len(rows)
            prev = rows[-1]
            row = [0] * (m + 1)
            for k in range(0, m + 1):
                above = prev[k] if k < m else 0
                left = prev[k - 1] if k >= 1 else 0
                row[k] = left + (2 * m - 1) * above
            rows.append(row)

    def _grow_second_b(self, n: int) -> None:
        # Defined by the sum  sum_m 2^(m-k) C(n,m) {m k}  rather than a
        # recurrence; the recurrence form is only validated in tests.
        rows = self._second_b
        self._grow_second(n)
        while len(rows) <= n:
            m = len(rows)
            row = [
                sum((1 << (i - k)) * math.comb(m, i) * self._second[i][k]
                    for i in range(k, m + 1))
                for k in range(m + 1)
            ]
            rows.append(row)

    # -- lookups ---------------------------------------------------------

    def first(self, n: int, k: int) -> int:
        """Signless first-kind number: permutations of n elements with k cycles."""
        return self._lookup(self._first, self._grow_first, n, k)

    def second(self, n: int, k: int) -> int:
        """Second-kind number: partitions of an n-set into k nonempty blocks."""
        return self._lookup(self._second, self._grow_second, n, k)

    def first_b(self, n: int, k: int) -> int:
        """Coefficient of t^k in (t+1)(t+3)...(t+2n-1)."""
        return self._lookup(self._first_b, self._grow_first_b, n, k)

    def second_b(self, n: int, k: int) -> int:
        """Signed-permutation analogue of the second-kind numbers."""
        return self._lookup(self._second_b, self._grow_second_b, n, k)

    @staticmethod
    def _lookup(rows, grow, n: int, k: int) -> int:
        if n < 0:
            raise DomainError(f"row index must be nonnegative, got n={n}")
        if k < 0 or k > n:
            return 0
        if n >= len(rows):
            grow(n)
        return rows[n][k]


_TABLES = StirlingTables(32)


def default_tables() -> StirlingTables:
    """The shared process-wide table instance."""
    return _TABLES


def stirling(kind: str, n: int, k: int, tables: StirlingTables | None = None) -> int:
    """Exact value of the requested family at (n, k); 0 outside the triangle."""
    t = tables if tables is not None else _TABLES
    if kind == "first":
        return t.first(n, k)
    if kind == "second":
        return t.second(n, k)
    if kind == "first_B":
        return t.first_b(n, k)
    if kind == "second_B":
        return t.second_b(n, k)
    raise DomainError(f"unknown family {kind!r}; expected one of {KINDS}")


def binomial(n: int, k: int) -> int:
    """C(n, k) with the convention that out-of-range k gives 0."""
    if n < 0:
        raise DomainError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class Composition:
    """Ordered block lengths (each >= 1) placed inside ``total`` steps.

    ``tail`` is the number of steps left over after the listed blocks; the
    walk-terminated coefficient polynomial uses it as the final
    sign-symmetric block, the bridge one requires it to be >= 1.
    """

    parts: tuple[int, ...]
    total: int

    def __post_init__(self) -> None:
        if self.total < 0:
            raise DomainError("composition total must be nonnegative")
        if any((not isinstance(p, int)) or p < 1 for p in self.parts):
            raise DomainError("composition parts must be integers >= 1")
        if sum(self.parts) > self.total:
            raise DomainError(
                f"composition parts sum to {sum(self.parts)} > total {self.total}")

    @property
    def tail(self) -> int:
        return self.total - sum(self.parts)


PartsLike = Union[Composition, Sequence[int]]


def _as_composition(n: int, parts: PartsLike) -> Composition:
    if isinstance(parts, Composition):
        if parts.total != n:
            raise DomainError(f"composition total {parts.total} does not match n={n}")
        return parts
    return Composition(tuple(int(p) for p in parts), n)


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Exact convolution of two integer coefficient lists."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def bridge_block_poly(j: int, tables: StirlingTables | None = None) -> list[int]:
    """Coefficients of (t+1)(t+2)...(t+j-1); the empty product for j = 1.

    These are the first-kind numbers of row j shifted down by one index.
    """
    if j < 1:
        raise DomainError(f"bridge block length must be >= 1, got {j}")
    t = tables if tables is not None else _TABLES
    return [t.first(j, r + 1) for r in range(j)]


def walk_block_poly(w: int, tables: StirlingTables | None = None) -> list[int]:
    """Coefficients of (t+1)(t+3)...(t+2w-1); the empty product for w = 0."""
    if w < 0:
        raise DomainError(f"walk block length must be >= 0, got {w}")
    t = tables if tables is not None else _TABLES
    return [t.first_b(w, r) for r in range(w + 1)]


def coeff_P_poly(n: int, parts: PartsLike,
                 tables: StirlingTables | None = None) -> list[int]:
    """Full coefficient list of the walk-terminated block product.

    One factor (t+1)(t+2)...(t+j-1) per bridge block of length j, times the
    odd rising product for the remaining n - sum(parts) walk steps.  The
    degree is n - len(parts).
    """
    comp = _as_composition(n, parts)
    poly = walk_block_poly(comp.tail, tables)
    for j in comp.parts:
        poly = poly_mul(poly, bridge_block_poly(j, tables))
    return poly


def coeff_Q_poly(n: int, parts: PartsLike,
                 tables: StirlingTables | None = None) -> list[int]:
    """Full coefficient list of the pure bridge block product.

    The leftover steps form an implicit final bridge block, which must be
    nonempty.  The degree is n - len(parts) - 1.
    """
    comp = _as_composition(n, parts)
    if comp.tail < 1:
        raise DomainError(
            f"bridge composition needs a nonempty final block: parts {comp.parts} fill n={n}")
    poly = [1]
    for j in comp.parts + (comp.tail,):
        poly = poly_mul(poly, bridge_block_poly(j, tables))
    return poly


def coeff_P(n: int, parts: PartsLike, r: int,
            tables: StirlingTables | None = None) -> int:
    """Coefficient of t^r in the walk-terminated block product (0 off-range)."""
    poly = coeff_P_poly(n, parts, tables)
    return poly[r] if 0 <= r < len(poly) else 0


def coeff_Q(n: int, parts: PartsLike, r: int,
            tables: StirlingTables | None = None) -> int:
    """Coefficient of t^r in the pure bridge block product (0 off-range)."""
    poly = coeff_Q_poly(n, parts, tables)
    return poly[r] if 0 <= r < len(poly) else 0


def compositions(total: int, count: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of ``count`` integers >= 1 summing to ``total``."""
    if count < 0 or total < 0:
        raise DomainError("composition enumeration needs nonnegative arguments")
    if count == 0:
        if total == 0:
            yield ()
        return
    if count == 1:
        if total >= 1:
            yield (total,)
        return
    for head in range(1, total - count + 2):
        for rest in compositions(total - head, count - 1):
            yield (head,) + rest

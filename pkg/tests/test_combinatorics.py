"""Tables and coefficient polynomials against independent brute-force oracles."""

import math
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_walks.combinatorics import (
    Composition,
    StirlingTables,
    binomial,
    coeff_P,
    coeff_P_poly,
    coeff_Q,
    coeff_Q_poly,
    compositions,
    poly_mul,
    stirling,
)
from conic_walks.errors import DomainError

T = StirlingTables(40)


def cycle_count(perm):
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycles += 1
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
    return cycles


def set_partitions(items):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[head] + smaller[i]] + smaller[i + 1:]
        yield [[head]] + smaller


def expand(factors):
    poly = [1]
    for c in factors:
        poly = poly_mul(poly, [c, 1])
    return poly


class TestFirstKind:
    def test_counts_permutations_by_cycles(self):
        for n in range(1, 7):
            tally = {}
            for perm in permutations(range(n)):
                c = cycle_count(perm)
                tally[c] = tally.get(c, 0) + 1
            for k in range(n + 1):
                assert T.first(n, k) == tally.get(k, 0)

    def test_example_4_2(self):
        assert T.first(4, 2) == 11

    def test_row_sums_are_factorials(self):
        for n in range(31):
            assert sum(T.first(n, k) for k in range(n + 1)) == math.factorial(n)


class TestSecondKind:
    def test_counts_set_partitions(self):
        for n in range(1, 9):
            tally = {}
            for part in set_partitions(list(range(n))):
                tally[len(part)] = tally.get(len(part), 0) + 1
            for k in range(n + 1):
                assert T.second(n, k) == tally.get(k, 0)

    def test_diagonal_is_one(self):
        for n in range(25):
            assert T.second(n, n) == 1


class TestFirstKindB:
    def test_row_3_by_symbolic_expansion(self):
        # (t+1)(t+3)(t+5) expanded by hand-rolled convolution
        assert expand([1, 3, 5]) == [15, 23, 9, 1]
        assert [T.first_b(3, k) for k in range(4)] == [15, 23, 9, 1]

    def test_rows_match_expansion(self):
        for n in range(13):
            assert expand(range(1, 2 * n, 2)) == [T.first_b(n, k) for k in range(n + 1)]

    def test_row_sums(self):
        for n in range(31):
            assert sum(T.first_b(n, k) for k in range(n + 1)) == (1 << n) * math.factorial(n)


class TestSecondKindB:
    def test_row_2_from_definition(self):
        # sum_m 2^(m-k) C(2,m) {m k} recomputed here term by term
        second = {(0, 0): 1, (1, 0): 0, (1, 1): 1, (2, 0): 0, (2, 1): 1, (2, 2): 1}
        row = []
        for k in range(3):
            row.append(sum((1 << (m - k)) * math.comb(2, m) * second.get((m, k), 0)
                           for m in range(k, 3)))
        assert row == [1, 4, 1]
        assert [T.second_b(2, k) for k in range(3)] == [1, 4, 1]

    def test_recurrence_agrees_with_definition(self):
        # the tables use the defining sum; the recurrence must follow
        for n in range(1, 13):
            for k in range(n + 1):
                assert T.second_b(n, k) == \
                    T.second_b(n - 1, k - 1) + (2 * k + 1) * T.second_b(n - 1, k)

    def test_zeroth_column_is_one(self):
        for n in range(20):
            assert T.second_b(n, 0) == 1


class TestConventions:
    @pytest.mark.parametrize("kind", ["first", "second", "first_B", "second_B"])
    def test_out_of_range_is_zero(self, kind):
        assert stirling(kind, 5, -1) == 0
        assert stirling(kind, 5, 6) == 0
        assert stirling(kind, 0, 0) == 1

    @pytest.mark.parametrize("kind", ["first", "second", "first_B", "second_B"])
    def test_negative_n_rejected(self, kind):
        with pytest.raises(DomainError):
            stirling(kind, -1, 0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(DomainError):
            stirling("third", 3, 1)


class TestBinomial:
    def test_small_values(self):
        assert binomial(3, 1) == 3
        assert binomial(3, 0) + binomial(3, 1) + binomial(3, 2) == 7
        assert binomial(5, 2) == 10

    def test_pascal_recurrence(self):
        for n in range(1, 20):
            for k in range(n + 1):
                assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)

    def test_out_of_range_and_errors(self):
        assert binomial(4, -1) == 0
        assert binomial(4, 5) == 0
        with pytest.raises(DomainError):
            binomial(-2, 0)


class TestCoefficientPolynomials:
    def test_walk_block_example(self):
        # one bridge block of length 1 inside n=3: factor (t+1)(t+3)
        assert coeff_P_poly(3, (1,)) == [3, 4, 1]
        assert coeff_P(3, (1,), 0) == 3

    def test_all_singleton_blocks_leave_empty_product(self):
        for n in range(1, 7):
            assert coeff_P_poly(n, (1,) * n) == [1]
            assert coeff_P(n, (1,) * n, 0) == 1

    def test_sum_of_coefficients_is_value_at_one(self):
        for n, parts in [(5, (2, 1)), (6, (3,)), (4, (1, 1))]:
            w = n - sum(parts)
            value = (1 << w) * math.factorial(w)  # (1+1)(1+3)...(1+2w-1)
            for j in parts:
                value *= math.factorial(j)  # (1+1)(1+2)...(1+j-1)
            assert sum(coeff_P_poly(n, parts)) == value

    def test_bridge_block_examples(self):
        assert coeff_Q_poly(2, (1,)) == [1]
        assert coeff_Q(2, (1,), 0) == 1
        assert coeff_Q_poly(4, (2,)) == [1, 2, 1]

    def test_degrees(self):
        assert len(coeff_P_poly(7, (2, 1))) == 7 - 2 + 1
        assert len(coeff_Q_poly(7, (2, 1))) == 7 - 2 - 1 + 1
        assert coeff_P(7, (2, 1), -1) == 0
        assert coeff_P(7, (2, 1), 6) == 0
        assert coeff_Q(7, (2, 1), 5) == 0

    def test_walk_composition_convolution_small(self):
        # summing P over all block compositions collapses to the B families
        for n in range(1, 7):
            for m in range(1, n + 1):
                for q in range(n - m + 1):
                    acc = Fraction(0)
                    for tail in range(n - m + 1):
                        for parts in compositions(n - tail, m):
                            denom = math.prod(math.factorial(p) for p in parts)
                            denom *= math.factorial(tail) * (1 << tail)
                            acc += Fraction(coeff_P(n, parts, q), denom)
                    rhs = Fraction(
                        math.factorial(m) * T.first_b(n, q + m) * T.second_b(q + m, m),
                        (1 << (n - m)) * math.factorial(n))
                    assert acc == rhs

    def test_bridge_composition_convolution_small(self):
        for n in range(2, 7):
            for m in range(1, n):
                for q in range(n - m):
                    acc = Fraction(0)
                    for parts in compositions(n, m + 1):
                        denom = math.prod(math.factorial(p) for p in parts)
                        acc += Fraction(coeff_Q(n, parts[:m], q), denom)
                    rhs = Fraction(
                        math.factorial(m + 1) * T.first(n, q + m + 1) * T.second(q + m + 1, m + 1),
                        math.factorial(n))
                    assert acc == rhs

    def test_invalid_compositions_rejected(self):
        with pytest.raises(DomainError):
            coeff_P(3, (0, 1), 0)
        with pytest.raises(DomainError):
            coeff_P(3, (2, 2), 0)
        with pytest.raises(DomainError):
            coeff_Q(3, (3,), 0)  # no room for the final bridge block
        with pytest.raises(DomainError):
            Composition((1, -2), 5)


class TestCompositionEnumeration:
    def test_counts(self):
        for total in range(1, 9):
            for count in range(1, total + 1):
                got = list(compositions(total, count))
                assert len(got) == math.comb(total - 1, count - 1)
                assert all(sum(c) == total and min(c) >= 1 for c in got)
                assert len(set(got)) == len(got)

    def test_edge_cases(self):
        assert list(compositions(0, 0)) == [()]
        assert list(compositions(3, 0)) == []


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 40), k=st.integers(0, 40))
def test_recurrences_hold_everywhere(n, k):
    assert T.first(n, k) == T.first(n - 1, k - 1) + (n - 1) * T.first(n - 1, k)
    assert T.second(n, k) == T.second(n - 1, k - 1) + k * T.second(n - 1, k)
    assert T.first_b(n, k) == T.first_b(n - 1, k - 1) + (2 * n - 1) * T.first_b(n - 1, k)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 25), k=st.integers(0, 25))
def test_second_b_matches_definition(n, k):
    assert T.second_b(n, k) == sum(
        (1 << (m - k)) * math.comb(n, m) * T.second(m, k) for m in range(k, n + 1))

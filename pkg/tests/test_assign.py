import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from shapebench.assign import (
    Assignment,
    edit_distance,
    match_by_edit_distance,
    match_by_euclidean,
    solve_lap_jv,
)


def brute_force_min_cost(cost):
    """Exhaustive minimum over all matchings of size min(m, n)."""
    m, n = len(cost), len(cost[0]) if cost else 0
    k = min(m, n)
    best = float("inf")
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.permutations(range(n), k):
            best = min(best, sum(cost[r][c] for r, c in zip(rows, cols)))
    return best


def recursive_edit_distance(a, b):
    """Plain recursive definition, memoized; the independent oracle."""
    @lru_cache(maxsize=None)
    def go(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        sub = go(i - 1, j - 1) + (a[i - 1] != b[j - 1])
        return min(go(i - 1, j) + 1, go(i, j - 1) + 1, sub)

    return go(len(a), len(b))


class TestEditDistance:
    @pytest.mark.parametrize("a,b,d", [
        ("abc", "abc", 0),
        ("", "ab", 2),
        ("kitten", "sitting", 3),
        ("", "", 0),
        ("a", "b", 1),
    ])
    def test_examples(self, a, b, d):
        assert edit_distance(a, b) == d
        assert edit_distance(a, b) == recursive_edit_distance(a, b)

    @given(st.text(alphabet="abcd", max_size=8),
           st.text(alphabet="abcd", max_size=8))
    def test_matches_recursive_oracle(self, a, b):
        assert edit_distance(a, b) == recursive_edit_distance(a, b)

    @given(st.text(alphabet="abcd ", min_size=20, max_size=120),
           st.text(alphabet="abcd ", min_size=20, max_size=120))
    def test_long_strings_match_row_dp(self, a, b):
        # exercises the bit-parallel fast path against a plain two-row DP
        prev = list(range(len(a) + 1))
        for i, cb in enumerate(b, start=1):
            cur = [i] + [0] * len(a)
            for j, ca in enumerate(a, start=1):
                cur[j] = min(prev[j] + 1, cur[j - 1] + 1,
                             prev[j - 1] + (ca != cb))
            prev = cur
        assert edit_distance(a, b) == prev[len(a)]

    @given(st.text(max_size=12), st.text(max_size=12), st.text(max_size=12))
    def test_metric_properties(self, a, b, c):
        assert edit_distance(a, b) == edit_distance(b, a)
        assert (edit_distance(a, b) == 0) == (a == b)
        assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


class TestSolveLapJv:
    def test_diagonal(self):
        asg = solve_lap_jv([[0, 9], [9, 0]])
        assert asg.pairs == ((0, 0), (1, 1))
        assert asg.total_cost == 0

    def test_single_row_argmin(self):
        asg = solve_lap_jv([[5, 2, 7]])
        assert asg.pairs == ((0, 1),)
        assert asg.total_cost == 2
        assert asg.unmatched_cols == (0, 2)

    def test_empty(self):
        asg = solve_lap_jv([])
        assert asg.pairs == () and asg.total_cost == 0.0

    def test_random_vs_brute_force(self):
        rng = random.Random(7)
        for trial in range(200):
            m, n = rng.randint(1, 6), rng.randint(1, 6)
            if trial % 2:
                cost = [[rng.randint(0, 99) for _ in range(n)] for _ in range(m)]
            else:
                cost = [[rng.random() * 10 for _ in range(n)] for _ in range(m)]
            asg = solve_lap_jv(cost)
            assert len(asg.pairs) == min(m, n)
            assert asg.total_cost == pytest.approx(brute_force_min_cost(cost),
                                                   abs=1e-12)
            assert asg.total_cost == sum(cost[r][c] for r, c in asg.pairs)

    def test_tie_break_lexicographic(self):
        asg = solve_lap_jv([[1.0, 1.0], [1.0, 1.0]])
        assert asg.pairs == ((0, 0), (1, 1))
        asg = solve_lap_jv([[1.0, 1.0, 1.0]] * 2)
        assert asg.pairs == ((0, 0), (1, 1))

    def test_scale_invariance(self):
        rng = random.Random(3)
        for _ in range(50):
            m, n = rng.randint(1, 5), rng.randint(1, 5)
            cost = [[float(rng.randint(0, 9)) for _ in range(n)] for _ in range(m)]
            base = solve_lap_jv(cost)
            for factor in (0.5, 3.0, 1000.0):
                scaled = solve_lap_jv([[x * factor for x in row] for row in cost])
                assert scaled.pairs == base.pairs

    def test_transpose_duality(self):
        rng = random.Random(11)
        for _ in range(50):
            m, n = rng.randint(1, 5), rng.randint(1, 5)
            cost = [[rng.random() for _ in range(n)] for _ in range(m)]
            a = solve_lap_jv(cost)
            t = solve_lap_jv([[cost[r][c] for r in range(m)] for c in range(n)])
            assert a.total_cost == pytest.approx(t.total_cost, abs=1e-12)
            # swapped transpose pairs form an equally cheap matching
            swapped_cost = sum(cost[r][c] for c, r in t.pairs)
            assert swapped_cost == pytest.approx(a.total_cost, abs=1e-12)

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            solve_lap_jv([[1.0, -1.0]])
        with pytest.raises(ValueError):
            solve_lap_jv([[float("inf")]])
        with pytest.raises(ValueError):
            solve_lap_jv([[1.0], [1.0, 2.0]])


class TestMatchers:
    def test_identical_segments_zero_cost(self):
        segs = ["red circle at (10, 10)", "blue square at (50, 50)"]
        asg = match_by_edit_distance(segs, list(reversed(segs)))
        assert asg.total_cost == 0
        assert set(asg.pairs) == {(0, 1), (1, 0)}

    def test_cardinality_mismatch(self):
        asg = match_by_edit_distance(["a", "b"], ["a"])
        assert len(asg.pairs) == 1
        assert len(asg.unmatched_rows) == 1

    def test_typo_alignment(self):
        gt = ["red circle", "blue square"]
        pred = ["blue sqare", "red circle"]
        asg = match_by_edit_distance(gt, pred)
        assert set(asg.pairs) == {(0, 1), (1, 0)}

    def test_euclidean_identity(self):
        pts = [(0.0, 0.0), (10.0, 5.0)]
        asg = match_by_euclidean(pts, pts)
        assert asg.total_cost == 0

    def test_euclidean_cross(self):
        asg = match_by_euclidean([(0, 0), (100, 100)], [(99, 101), (1, 0)])
        assert set(asg.pairs) == {(0, 1), (1, 0)}

    def test_empty_predictions(self):
        asg = match_by_euclidean([(0, 0), (1, 1)], [])
        assert asg.pairs == ()
        assert asg.unmatched_rows == (0, 1)

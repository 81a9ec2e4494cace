"""Levenshtein edit distance and rectangular minimum-cost assignment.

The solver is a shortest-augmenting-path (Jonker-Volgenant style)
implementation that handles rectangular matrices natively: exactly
min(m, n) pairs are returned and leftover rows/columns are reported as
unmatched. Ties between equally cheap matchings are broken
lexicographically (lowest row index first, then lowest column index),
which keeps reports reproducible across platforms. The tie-break pass
solves small sub-problems repeatedly, so the solver targets the
benchmark's small matrices (a handful of shapes per image).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .textio import normalize

#: relative slack when comparing float matching costs during tie-breaking
_REL_TOL = 1e-9


def _bit_parallel_distance(a: str, b: str) -> int:
    """Myers' bit-vector Levenshtein distance; ``a`` is the pattern.

    Processes one column of the DP table per character of ``b`` using a
    handful of integer operations on an arbitrary-precision bit vector,
    which is what makes matching long serialized segments affordable.
    """
    m = len(a)
    peq: dict[str, int] = {}
    for i, ch in enumerate(a):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    mask = (1 << m) - 1
    top = 1 << (m - 1)
    pv = mask
    mv = 0
    score = m
    for ch in b:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = ((((eq & pv) + pv) & mask) ^ pv) | eq
        ph = mv | (~(xh | pv) & mask)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = mh | (~(xv | ph) & mask)
        mv = ph & xv
    return score


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    if a == b:
        return 0
    # trim the common prefix and suffix; they never contribute to the cost
    lo, ha, hb = 0, len(a), len(b)
    while lo < ha and lo < hb and a[lo] == b[lo]:
        lo += 1
    while ha > lo and hb > lo and a[ha - 1] == b[hb - 1]:
        ha -= 1
        hb -= 1
    a, b = a[lo:ha], b[lo:hb]
    if not a or not b:
        return len(a) + len(b)
    if len(a) > len(b):
        a, b = b, a
    if len(a) >= 16:
        return _bit_parallel_distance(a, b)
    prev = list(range(len(a) + 1))
    for i, cb in enumerate(b, start=1):
        cur = [i] + [0] * len(a)
        for j, ca in enumerate(a, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            )
        prev = cur
    return prev[len(a)]


@dataclass(frozen=True)
class Assignment:
    """Solution of a rectangular linear assignment problem."""

    pairs: tuple[tuple[int, int], ...]
    unmatched_rows: tuple[int, ...]
    unmatched_cols: tuple[int, ...]
    total_cost: float


def _validate(cost: Sequence[Sequence[float]]) -> list[list[float]]:
    mat = [[float(x) for x in row] for row in cost]
    if mat and any(len(row) != len(mat[0]) for row in mat):
        raise ValueError("cost matrix rows must have equal length")
    for row in mat:
        for x in row:
            if not math.isfinite(x) or x < 0:
                raise ValueError("cost entries must be finite and >= 0")
    return mat


def _augmenting_path_min_cost(a: list[list[float]]) -> float:
    """Min total cost assigning every row of a (m <= n) to a distinct col."""
    m, n = len(a), len(a[0])
    INF = math.inf
    u = [0.0] * (m + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: 1-based row matched to column j
    way = [0] * (n + 1)
    for i in range(1, m + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = -1
            row = a[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return sum(a[p[j] - 1][j - 1] for j in range(1, n + 1) if p[j] != 0)


def _min_cost(mat: list[list[float]], rows: Sequence[int],
              cols: Sequence[int]) -> float:
    """Min cost of a matching of size min(|rows|, |cols|) on a submatrix."""
    if not rows or not cols:
        return 0.0
    if len(rows) <= len(cols):
        sub = [[mat[r][c] for c in cols] for r in rows]
    else:
        sub = [[mat[r][c] for r in rows] for c in cols]
    return _augmenting_path_min_cost(sub)


def solve_lap_jv(cost: Sequence[Sequence[float]]) -> Assignment:
    """Minimum-cost matching of size min(m, n) with deterministic ties.

    Empty matrices yield an empty assignment with cost 0.
    """
    mat = _validate(cost)
    m = len(mat)
    n = len(mat[0]) if mat else 0
    if m == 0 or n == 0:
        return Assignment((), tuple(range(m)), tuple(range(n)), 0.0)

    k = min(m, n)
    best = _min_cost(mat, range(m), range(n))
    tol = _REL_TOL * (1.0 + abs(best))

    pairs: list[tuple[int, int]] = []
    avail_cols = list(range(n))
    target = best
    need = k
    for i in range(m):
        if need == 0:
            break
        rest_rows = list(range(i + 1, m))
        if len(rest_rows) >= need - 1:
            for c in avail_cols:
                rem_cols = [x for x in avail_cols if x != c]
                sub = _min_cost(mat, rest_rows, rem_cols)
                if mat[i][c] + sub <= target + tol:
                    pairs.append((i, c))
                    avail_cols.remove(c)
                    target -= mat[i][c]
                    need -= 1
                    break
    if need != 0:  # pure safety net; the greedy pass always completes
        raise RuntimeError("assignment tie-break failed to complete")

    matched_rows = {r for r, _ in pairs}
    total = sum(mat[r][c] for r, c in pairs)
    return Assignment(
        pairs=tuple(pairs),
        unmatched_rows=tuple(r for r in range(m) if r not in matched_rows),
        unmatched_cols=tuple(avail_cols),
        total_cost=total,
    )


def match_by_edit_distance(gt_segments: Sequence[str],
                           pred_segments: Sequence[str]) -> Assignment:
    """Match text segments by Levenshtein distance of normalized strings."""
    norm_gt = [normalize(g) for g in gt_segments]
    norm_pred = [normalize(p) for p in pred_segments]
    cost = [
        [float(edit_distance(g, p)) for p in norm_pred]
        for g in norm_gt
    ]
    if not gt_segments or not pred_segments:
        return Assignment((), tuple(range(len(gt_segments))),
                          tuple(range(len(pred_segments))), 0.0)
    return solve_lap_jv(cost)


def match_by_euclidean(gt_points: Sequence[tuple[float, float]],
                       pred_points: Sequence[tuple[float, float]]
                       ) -> Assignment:
    """Match point sets by Euclidean distance."""
    cost = [
        [math.hypot(g[0] - p[0], g[1] - p[1]) for p in pred_points]
        for g in gt_points
    ]
    if not gt_points or not pred_points:
        return Assignment((), tuple(range(len(gt_points))),
                          tuple(range(len(pred_points))), 0.0)
    return solve_lap_jv(cost)

"""
Randomised properties of fork entropy, checked against brute-force dense oracles.
"""
import math
import time

import numpy as np
import pytest

from forkentropy.entropy.core import (
    ForkLabel,
    classify_new_fork,
    distances_to_population,
    entropy_after_add,
    pair_distance,
    quadratic_entropy,
)
from forkentropy.entropy.vectors import FileModificationMatrix, FileModVector


def random_dense(rng, m, n, high=4):
    """Dense m x n matrix with entries in [0, high) and no all-zero row."""
    dense = rng.integers(0, high, size=(m, n))
    for i in range(m):
        if not dense[i].any():
            dense[i, rng.integers(0, n)] = 1
    return dense


def to_matrix(dense, ref="prop"):
    rows = [(f"f{i}", {f"p{j:03d}": int(v) for j, v in enumerate(row) if v}) for i, row in enumerate(dense)]
    return FileModificationMatrix.from_cells(ref, rows)


def dense_entropy(dense, gamma=1.0):
    m = len(dense)
    total = 0.0
    for i in range(m):
        for j in range(m):
            l1 = int(np.abs(dense[i] - dense[j]).sum())
            total += 1.0 - math.exp(-gamma * l1)
    return total / (m * m)


def small_case(rng):
    m = int(rng.integers(1, 7))
    n = int(rng.integers(1, 5))
    return random_dense(rng, m, n)


def test_matches_dense_oracle():
    rng = np.random.default_rng(20230101)
    started = time.perf_counter()
    for _ in range(1000):
        dense = small_case(rng)
        assert abs(quadratic_entropy(to_matrix(dense)).value - dense_entropy(dense)) < 1e-12
    assert time.perf_counter() - started < 5.0


def test_range_and_zero_law():
    rng = np.random.default_rng(7)
    for _ in range(10000):
        dense = small_case(rng)
        value = quadratic_entropy(to_matrix(dense)).value
        assert 0.0 <= value < 1.0
        distinct = len({tuple(row) for row in dense.tolist()})
        assert (value == 0.0) == (distinct == 1)


def test_identical_rows_give_exact_zero():
    rng = np.random.default_rng(11)
    for _ in range(200):
        row = random_dense(rng, 1, int(rng.integers(1, 8)), high=50)
        dense = np.repeat(row, int(rng.integers(2, 20)), axis=0)
        assert quadratic_entropy(to_matrix(dense), float(rng.uniform(0.1, 5))).value == 0.0


def test_row_permutation_and_column_relabel_invariance():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        dense = small_case(rng)
        matrix = to_matrix(dense)
        base = quadratic_entropy(matrix).value

        order = rng.permutation(matrix.m)
        shuffled = FileModificationMatrix(matrix.snapshot_ref, tuple(matrix.rows[i] for i in order), matrix.file_index)
        assert abs(quadratic_entropy(shuffled).value - base) < 1e-12

        mapping = {col: int(new) for col, new in enumerate(rng.permutation(matrix.n))}
        relabelled = matrix.relabel(mapping)
        assert abs(quadratic_entropy(relabelled).value - base) < 1e-12


def test_pair_distance_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        dense = random_dense(rng, 3, int(rng.integers(1, 6)), high=6)
        a, b, c = (FileModVector.from_mapping(f"v{i}", dict(enumerate(map(int, row)))) for i, row in enumerate(dense))
        gamma = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
        assert pair_distance(a, b, gamma) == pair_distance(b, a, gamma)
        assert pair_distance(a, c, gamma) <= pair_distance(a, b, gamma) + pair_distance(b, c, gamma) + 1e-15


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_incremental_update_matches_recomputation(seed):
    rng = np.random.default_rng(seed)
    for m in (1, 2, 5, 17, 60, 200):
        n = int(rng.integers(3, 30))
        dense = random_dense(rng, m, n, high=5)
        matrix = to_matrix(dense)
        cells = {f"p{j:03d}": int(v) for j, v in enumerate(random_dense(rng, 1, n + 3, high=5)[0]) if v}
        new_row, index = matrix.row_from_cells("new", cells)

        before = quadratic_entropy(matrix).value
        total = math.fsum(distances_to_population(matrix, new_row).tolist())
        extended = matrix.with_row(new_row, index)
        assert abs(entropy_after_add(before, m, total) - quadratic_entropy(extended).value) < 1e-12


def test_exact_sign_law_and_redundant_rows_decrease():
    rng = np.random.default_rng(99)
    redundant_seen = 0
    for _ in range(10000):
        dense = small_case(rng)
        matrix = to_matrix(dense)
        if rng.random() < 0.3:
            # reuse an existing row so redundant cases are common
            source = matrix.rows[int(rng.integers(0, matrix.m))]
            new_row = FileModVector("new", source.entries)
        else:
            cells = {f"p{j:03d}": int(v) for j, v in enumerate(random_dense(rng, 1, 4)[0]) if v}
            new_row, index = matrix.row_from_cells("new", cells)
        a = classify_new_fork(matrix, new_row)
        m = matrix.m
        threshold = 2 * m * a.mean_distance - (2 * m + 1) * a.entropy_before
        assert np.sign(a.delta) == np.sign(threshold)
        assert abs(a.delta - (a.entropy_after - a.entropy_before)) < 1e-12
        if a.label is ForkLabel.REDUNDANT:
            redundant_seen += 1
            assert a.delta < 0
    assert redundant_seen > 100


def test_entropy_strictly_increases_with_gamma():
    rng = np.random.default_rng(5)
    grid = (0.25, 0.5, 1.0, 2.0, 4.0)
    checked = 0
    while checked < 300:
        dense = small_case(rng)
        if len({tuple(row) for row in dense.tolist()}) < 2:
            continue
        matrix = to_matrix(dense)
        values = [quadratic_entropy(matrix, gamma).value for gamma in grid]
        assert all(lo < hi for lo, hi in zip(values, values[1:]))
        checked += 1


def test_large_sparse_matrix_is_fast():
    rng = np.random.default_rng(2000)
    rows = []
    for i in range(2000):
        columns = rng.choice(600, size=12, replace=False)
        rows.append((f"f{i}", {f"src/file{int(c):04d}.py": int(rng.integers(1, 40)) for c in columns}))
    matrix = FileModificationMatrix.from_cells("perf", rows)
    started = time.perf_counter()
    value = quadratic_entropy(matrix).value
    assert time.perf_counter() - started < 10.0
    assert 0.0 < value < 1.0

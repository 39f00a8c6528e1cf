import math

import numpy as np
import pytest

from forkentropy.entropy.core import (
    ForkLabel,
    approx_entropy_delta,
    classify_new_fork,
    entropy_after_add,
    entropy_delta,
    l1_distance,
    laplacian_kernel,
    mean_distance_to_population,
    pair_distance,
    quadratic_entropy,
)
from forkentropy.entropy.vectors import FileModificationMatrix, FileModVector, parse_row_spec, read_matrix
from forkentropy.errors import InvalidGamma, InvalidMatrix, InvalidRowSpec, InvalidVector, MalformedRecord, ValidationError

from conftest import write_matrix_file

E1 = 1 - math.exp(-1)  # 0.6321205588
E2 = 1 - math.exp(-2)  # 0.8646647168


def vec(fork_id, *entries):
    return FileModVector(fork_id, tuple(entries))


def matrix(*rows, n=None):
    vectors = tuple(vec(f"f{i}", *entries) for i, entries in enumerate(rows))
    width = n if n is not None else 1 + max(c for row in rows for c, _ in row)
    return FileModificationMatrix("test@2023-01", vectors, tuple(f"file{j}" for j in range(width)))


# ---- Vectors and matrices ----

class TestFileModVector:
    def test_rejects_empty(self):
        with pytest.raises(InvalidVector):
            vec("a")

    def test_rejects_unsorted_or_duplicate_columns(self):
        with pytest.raises(InvalidVector):
            vec("a", (1, 1), (0, 1))
        with pytest.raises(InvalidVector):
            vec("a", (0, 1), (0, 2))

    def test_rejects_zero_lines_and_negative_columns(self):
        with pytest.raises(InvalidVector):
            vec("a", (0, 0))
        with pytest.raises(InvalidVector):
            vec("a", (-1, 2))

    def test_from_mapping_drops_zero_cells(self):
        v = FileModVector.from_mapping("a", {3: 2, 1: 0, 0: 5})
        assert v.entries == ((0, 5), (3, 2))
        assert v.l1_norm == 7

    def test_error_kind(self):
        with pytest.raises(InvalidVector) as excinfo:
            vec("a")
        assert excinfo.value.kind == "invalid_vector"
        assert excinfo.value.exit_code == 2


class TestFileModificationMatrix:
    def test_rejects_no_rows(self):
        with pytest.raises(InvalidMatrix):
            FileModificationMatrix("s", (), ())

    def test_rejects_all_zero_column(self):
        with pytest.raises(InvalidMatrix):
            matrix([(0, 1)], n=2)

    def test_rejects_column_outside_index(self):
        with pytest.raises(InvalidMatrix):
            FileModificationMatrix("s", (vec("a", (2, 1)),), ("x",))

    def test_from_cells_sorts_paths(self):
        m = FileModificationMatrix.from_cells("s", [("a", {"z.py": 1, "a.py": 2}), ("b", {"m.py": 4, "zero.py": 0})])
        assert m.file_index == ("a.py", "m.py", "z.py")
        assert m.rows[0].entries == ((0, 2), (2, 1))
        assert m.rows[1].entries == ((1, 4),)

    def test_row_from_cells_extends_index(self):
        m = FileModificationMatrix.from_cells("s", [("a", {"a.py": 1})])
        row, index = m.row_from_cells("new", {"a.py": 2, "b.py": 3})
        assert index == ("a.py", "b.py")
        assert row.entries == ((0, 2), (1, 3))
        assert m.with_row(row, index).n == 2


# ---- Distances ----

class TestDistances:
    def test_l1_identity(self):
        a = vec("a", (0, 3))
        assert l1_distance(a, a) == 0

    def test_l1_single_cell(self):
        assert l1_distance(vec("a", (0, 1)), vec("b", (0, 2))) == 1

    def test_l1_disjoint_support(self):
        assert l1_distance(vec("a", (0, 1)), vec("b", (1, 1))) == 2

    def test_l1_interleaved(self):
        a = vec("a", (0, 2), (3, 1), (5, 4))
        b = vec("b", (1, 1), (3, 3), (6, 2))
        assert l1_distance(a, b) == 2 + 1 + 2 + 4 + 2

    def test_pair_distance_closed_forms(self):
        assert pair_distance(vec("a", (0, 1)), vec("a", (0, 1)), 3.0) == 0.0
        assert pair_distance(vec("a", (0, 1)), vec("b", (0, 2))) == pytest.approx(0.6321205588, abs=1e-10)
        assert pair_distance(vec("a", (0, 1)), vec("b", (1, 1))) == pytest.approx(0.8646647168, abs=1e-10)

    @pytest.mark.parametrize("gamma", [0, -1.0, float("nan"), float("inf"), "abc", None, True])
    def test_pair_distance_rejects_bad_gamma(self, gamma):
        with pytest.raises(InvalidGamma):
            pair_distance(vec("a", (0, 1)), vec("b", (0, 2)), gamma)

    def test_kernel_is_accurate_for_tiny_distances(self):
        assert float(laplacian_kernel(1e-17, 1.0)) == pytest.approx(1e-17, rel=1e-9)

    def test_custom_kernel_seam(self):
        def step(l1, gamma):
            return np.where(np.asarray(l1) > 0, 0.5, 0.0)

        m = matrix([(0, 1)], [(0, 2)])
        assert quadratic_entropy(m, 1.0, kernel=step).value == pytest.approx(0.25)


# ---- Quadratic entropy ----

class TestQuadraticEntropy:
    def test_single_fork_is_zero(self):
        result = quadratic_entropy(matrix([(0, 4), (1, 2)]))
        assert result.value == 0.0
        assert (result.m, result.n) == (1, 2)

    def test_two_rows(self):
        result = quadratic_entropy(matrix([(0, 1)], [(0, 2)]), 1.0)
        assert result.value == pytest.approx(0.3160602794, abs=1e-10)
        assert result.gamma == 1.0
        assert result.snapshot_ref == "test@2023-01"

    def test_three_rows_matches_closed_form(self):
        # 4 * (1 - e^-2) / 9 evaluates to 0.3842954297
        value = quadratic_entropy(matrix([(0, 1)], [(0, 1)], [(1, 1)]), 1.0).value
        assert value == pytest.approx(4 * E2 / 9, abs=1e-12)
        assert value == pytest.approx(0.3842954297, abs=1e-10)

    def test_identical_rows_are_zero(self):
        assert quadratic_entropy(matrix([(0, 5)], [(0, 5)], [(0, 5)])).value == 0.0

    def test_rejects_bad_gamma(self):
        with pytest.raises(InvalidGamma):
            quadratic_entropy(matrix([(0, 1)], [(0, 2)]), 0.0)


# ---- Incremental algebra ----

class TestIncremental:
    def test_mean_distance_identical_single_row(self):
        m = matrix([(0, 2)])
        assert mean_distance_to_population(m, vec("new", (0, 2))) == 0.0

    def test_mean_distance_disjoint_row(self):
        m = matrix([(0, 1)], [(0, 1)])
        assert mean_distance_to_population(m, vec("new", (1, 1))) == pytest.approx(0.8646647168, abs=1e-10)

    def test_mean_distance_between_rows(self):
        m = matrix([(0, 1)], [(0, 3)])
        assert mean_distance_to_population(m, vec("new", (0, 2))) == pytest.approx(0.6321205588, abs=1e-10)

    def test_after_add_from_zero_entropy(self):
        assert entropy_after_add(0.0, 2, 2 * E2) == pytest.approx(4 * E2 / 9, abs=1e-12)

    def test_after_add_duplicate_of_everything(self):
        assert entropy_after_add(0.5, 3, 0.0) == pytest.approx(9 / 16 * 0.5, abs=1e-15)

    def test_after_add_duplicate_row(self):
        assert entropy_after_add(0.3160602794, 2, 0.6321205588) == pytest.approx(0.2809424706, abs=1e-10)
        extended = matrix([(0, 1)], [(0, 2)], [(0, 1)])
        assert quadratic_entropy(extended).value == pytest.approx(0.2809424706, abs=1e-10)

    @pytest.mark.parametrize("m, total", [(0, 0.0), (-1, 0.0), (1.5, 0.0), (2, -0.1), (2, float("nan"))])
    def test_after_add_rejects(self, m, total):
        with pytest.raises(ValidationError):
            entropy_after_add(0.1, m, total)


class TestClassifyNewFork:
    def test_duplicate_row_is_redundant(self):
        m = matrix([(0, 1)], [(0, 2)], [(0, 5)])
        assessment = classify_new_fork(m, vec("new", (0, 2)))
        assert assessment.entropy_before == pytest.approx(0.5697817448, abs=1e-10)
        assert assessment.label is ForkLabel.REDUNDANT
        assert assessment.delta < 0
        assert assessment.delta == pytest.approx(assessment.entropy_after - assessment.entropy_before, abs=1e-12)

    def test_disjoint_row_on_zero_entropy_is_distinctive(self):
        m = matrix([(0, 1)], [(0, 1)])
        assessment = classify_new_fork(m, vec("new", (1, 1)))
        assert assessment.label is ForkLabel.DISTINCTIVE
        assert assessment.entropy_before == 0.0
        assert assessment.delta == pytest.approx(4 * E2 / 9, abs=1e-12)
        assert assessment.entropy_after == pytest.approx(4 * E2 / 9, abs=1e-12)
        assert assessment.to_dict()["label"] == "distinctive"

    def test_equal_mean_distance_is_neutral(self):
        # the new row repeats row 0: D = d/2 and QE = 2d/4 coincide exactly
        m = matrix([(0, 1)], [(0, 2)])
        assessment = classify_new_fork(m, vec("new", (0, 1)))
        assert assessment.label is ForkLabel.NEUTRAL
        assert assessment.delta < 0
        assert assessment.entropy_after == pytest.approx(0.2809424706, abs=1e-10)

    def test_boundary_mean_distance_gives_zero_delta(self):
        qe, m = 0.3160602794, 2
        boundary = (2 * m + 1) / (2 * m) * qe
        assert entropy_delta(qe, m, boundary) == pytest.approx(0.0, abs=1e-12)
        assert approx_entropy_delta(qe, m, boundary) > 0


# ---- Matrix files and row specs ----

class TestMatrixFiles:
    def test_read_matrix(self, tmp_path):
        path = write_matrix_file(
            tmp_path / "m.ndjson",
            [{"fork_id": "a", "cells": {"x.py": 1}}, {"fork_id": "b", "cells": {"x.py": 2}}],
            snapshot_ref="acme@2023-03",
        )
        m = read_matrix(path)
        assert (m.m, m.n, m.snapshot_ref) == (2, 1, "acme@2023-03")
        assert quadratic_entropy(m).value == pytest.approx(0.3160602794, abs=1e-10)

    def test_read_matrix_reports_line(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        path.write_text('{"fork_id": "a", "cells": {"x.py": 1}}\n{"fork_id": "b", "cells": [1]}\n', encoding="utf-8")
        with pytest.raises(MalformedRecord) as excinfo:
            read_matrix(path)
        assert excinfo.value.line == 2

    def test_read_matrix_rejects_all_zero_row(self, tmp_path):
        path = write_matrix_file(tmp_path / "z.ndjson", [{"fork_id": "a", "cells": {"x.py": 0}}])
        with pytest.raises(InvalidVector):
            read_matrix(path)

    def test_parse_row_spec(self):
        assert parse_row_spec("src/a.py=3, src/b.py=0,src/a.py=2") == {"src/a.py": 5, "src/b.py": 0}

    @pytest.mark.parametrize("spec", ["", "a.py", "=3", "a.py=x", "a.py=-1", "a.py=0"])
    def test_parse_row_spec_rejects(self, spec):
        with pytest.raises(InvalidRowSpec):
            parse_row_spec(spec)

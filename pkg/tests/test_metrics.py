from datetime import timedelta

import numpy as np
import pytest

from forkentropy.analysis.export import write_csv
from forkentropy.analysis.table import raw_table
from forkentropy.dataset.lint import count_external_pull_requests
from forkentropy.dataset.records import ActionKind
from forkentropy.metrics.controls import control_variables, hot_files, ratio_prs_touch_hot_files, touches_tests
from forkentropy.metrics.outcomes import acceptance_rate, external_productivity
from forkentropy.metrics.snapshot import METRIC_COLUMNS, compute_snapshot_metrics
from forkentropy.population.snapshots import Snapshot, build_snapshots

from builders import action, dataset, fork, pull, ts
from conftest import MINI_PROJECT

EXPECTED_METRICS = MINI_PROJECT / "expected" / "metrics.csv"


def month(ds, start="2023-03-01", end="2023-04-01"):
    return Snapshot(ds.project_id, ts(start), ts(end), ())


@pytest.fixture
def mini_rows(mini_dataset):
    return [compute_snapshot_metrics(mini_dataset, s) for s in build_snapshots(mini_dataset)]


# ---- Full rows ----

def test_mini_project_matches_expected_csv(mini_rows, tmp_path):
    path = write_csv(raw_table(mini_rows), tmp_path / "metrics.csv", METRIC_COLUMNS)
    assert path.read_bytes() == EXPECTED_METRICS.read_bytes()


def test_empty_population_row(mini_rows):
    january = mini_rows[0]
    assert january.month == "2023-01"
    assert january.num_forks == 0
    assert january.fork_entropy is None
    assert january.acceptance_rate is None
    assert not january.has_population


def test_single_fork_month_has_zero_entropy(mini_rows):
    february = mini_rows[1]
    assert february.fork_entropy == 0.0
    assert february.fork_entropy_pr_variant is None


def test_gamma_is_passed_through(mini_dataset):
    march = build_snapshots(mini_dataset)[2]
    wide = compute_snapshot_metrics(mini_dataset, march, gamma=0.5)
    narrow = compute_snapshot_metrics(mini_dataset, march, gamma=2.0)
    assert wide.fork_entropy < narrow.fork_entropy


# ---- Outcomes ----

class TestOutcomes:
    def test_shared_sha_counts_once(self):
        ds = dataset(
            forks=[fork("a"), fork("b")],
            pulls=[
                pull(1, "a", "2023-03-02", closed="2023-03-05", merged=True, shas=["x1", "y1"]),
                pull(2, "b", "2023-03-03", closed="2023-03-06", merged=True, shas=["y1", "z1"], author="other"),
            ],
        )
        assert external_productivity(month(ds), ds) == 3

    def test_privileged_authors_and_unmerged_pulls_do_not_count(self):
        ds = dataset(
            forks=[fork("a")],
            pulls=[
                pull(1, "a", "2023-03-02", closed="2023-03-05", merged=True, shas=["x1"], author="maint"),
                pull(2, "a", "2023-03-02", closed="2023-03-05", shas=["y1"]),
                pull(3, "a", "2023-03-02", closed="2023-03-07", merged=True, shas=["z1"]),
            ],
            actions=[action("maint", ActionKind.DIRECT_COMMIT, "2023-01-10")],
        )
        assert external_productivity(month(ds), ds) == 1
        assert acceptance_rate(month(ds), ds) == (1, 2, 0.5)

    def test_pull_closed_next_month_belongs_to_next_month(self):
        ds = dataset(forks=[fork("a")], pulls=[pull(1, "a", "2023-03-30", closed="2023-04-01", merged=True, shas=["x1"])])
        assert external_productivity(month(ds), ds) == 0
        assert external_productivity(month(ds, "2023-04-01", "2023-05-01"), ds) == 1

    def test_no_closed_pulls_gives_undefined_rate(self):
        ds = dataset(forks=[fork("a")], pulls=[pull(1, "a", "2023-03-02")])
        assert acceptance_rate(month(ds), ds) == (0, 0, None)

    def test_pulls_from_outside_the_network_are_ignored(self):
        ds = dataset(forks=[fork("a")], pulls=[pull(1, "src", "2023-03-02", closed="2023-03-03", merged=True, shas=["x1"])])
        assert acceptance_rate(month(ds), ds) == (0, 0, None)

    def test_pulls_between_forks_are_ignored(self):
        ds = dataset(
            forks=[fork("a"), fork("b")],
            pulls=[pull(1, "b", "2023-03-02", closed="2023-03-05", merged=True, shas=["x1"],
                        specs=[("x.py", 1, 0)], target="a")],
        )
        assert external_productivity(month(ds), ds) == 0
        assert acceptance_rate(month(ds), ds) == (0, 0, None)
        assert count_external_pull_requests(ds) == 0
        assert hot_files(ds, ts("2023-04-01")) == set()


# ---- Controls ----

class TestHotFiles:
    AT = ts("2023-06-01")

    def hot_dataset(self, *closings):
        pulls = [
            pull(i + 1, "a", "2023-01-02", closed=closed.strftime("%Y-%m-%dT%H:%M:%SZ"), merged=merged,
                 specs=[(path, 1, 0)])
            for i, (closed, path, merged) in enumerate(closings)
        ]
        return dataset(forks=[fork("a")], pulls=pulls)

    def test_trailing_window(self):
        ds = self.hot_dataset(
            (self.AT - timedelta(days=89), "hot.py", True),
            (self.AT - timedelta(days=91), "cold.py", True),
            (self.AT - timedelta(days=90), "edge.py", True),
            (self.AT, "now.py", True),
            (self.AT - timedelta(days=10), "rejected.py", False),
        )
        assert hot_files(ds, self.AT) == {"hot.py", "edge.py"}

    def test_window_length_is_configurable(self):
        ds = self.hot_dataset((self.AT - timedelta(days=89), "hot.py", True))
        assert hot_files(ds, self.AT, window_days=30) == set()

    def test_another_merge_in_the_window_only_adds_paths(self):
        rng = np.random.default_rng(5)
        paths = ["a.py", "b.py", "c.py", "docs/d.md", "tests/test_e.py"]
        for _ in range(25):
            closings = [
                (self.AT - timedelta(days=int(rng.integers(0, 120))), str(rng.choice(paths)), bool(rng.integers(0, 2)))
                for _ in range(int(rng.integers(0, 6)))
            ]
            extra = (self.AT - timedelta(days=int(rng.integers(1, 90))), str(rng.choice(paths + ["new.py"])), True)
            before = hot_files(self.hot_dataset(*closings), self.AT)
            after = hot_files(self.hot_dataset(*closings, extra), self.AT)
            assert before <= after
            assert extra[1] in after

    def test_ratio_with_interval_start_or_pull_creation(self):
        ds = dataset(
            forks=[fork("a")],
            pulls=[
                pull(1, "a", "2023-02-01", closed="2023-03-10", merged=True, specs=[("core.py", 1, 0)]),
                pull(2, "a", "2023-03-15", specs=[("core.py", 2, 0)], author="newcomer"),
            ],
        )
        candidates = [ds.pulls[1]]
        assert ratio_prs_touch_hot_files(candidates, ds, ts("2023-03-01")) == 0.0
        assert ratio_prs_touch_hot_files(candidates, ds, ts("2023-03-01"), per_pull_reference=True) == 1.0
        assert ratio_prs_touch_hot_files([], ds, ts("2023-03-01")) is None


def test_touches_tests_is_case_insensitive():
    assert touches_tests(pull(1, "a", "2023-03-01", specs=[("src/Tests/IoTest.java", 1, 0)]))
    assert not touches_tests(pull(2, "a", "2023-03-01", specs=[("src/io.py", 1, 0)]))


def test_mini_project_controls(mini_rows):
    april = mini_rows[3]
    assert (april.num_forks, april.num_files, april.num_stars) == (3, 4, 4)
    assert april.project_age_days == 111
    assert april.ratio_old_contributors == 0.5
    assert april.ratio_prs_with_tests == 0.5


def test_controls_of_empty_population(mini_dataset):
    january = build_snapshots(mini_dataset)[0]
    controls = control_variables(january, mini_dataset)
    assert controls["num_forks"] == 0
    assert controls["num_files"] == 0
    assert controls["project_age_days"] == 22
    assert controls["num_stars"] == 1
    assert controls["ratio_prs_with_tests"] is None

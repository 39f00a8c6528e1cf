import json

import pytest

from forkentropy.config import LintThresholds
from forkentropy.dataset.lint import lint_dataset
from forkentropy.dataset.loader import load_dataset, serialize_dataset
from forkentropy.dataset.network import fork_network
from forkentropy.errors import CycleDetected, DanglingReference, DatasetNotFound, DuplicateKey, MalformedRecord

from builders import commit, dataset, fork, issue, project, pull
from conftest import MINI_PROJECT


def rewrite_lines(path, transform):
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(transform(lines)) + "\n", encoding="utf-8")


# ---- Loading ----

class TestLoadDataset:
    def test_mini_project_counts(self, mini_dataset):
        assert mini_dataset.project_id == "acme/widget"
        assert mini_dataset.source_fork is not None
        assert mini_dataset.source_fork.repo_id == "r0"
        assert len(mini_dataset.forks) == 4
        assert len(mini_dataset.commits) == 23
        assert len(mini_dataset.pulls) == 7
        assert len(mini_dataset.issues) == 10

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetNotFound) as excinfo:
            load_dataset(tmp_path / "nope")
        assert excinfo.value.kind == "dataset_not_found"

    def test_missing_project_file(self, mini_dir):
        (mini_dir / "project.json").unlink()
        with pytest.raises(DatasetNotFound):
            load_dataset(mini_dir)

    def test_empty_pulls_file(self, mini_dir):
        (mini_dir / "pulls.ndjson").write_text("", encoding="utf-8")
        assert load_dataset(mini_dir).pulls == ()

    def test_missing_optional_file_reads_empty(self, mini_dir):
        (mini_dir / "stars.ndjson").unlink()
        assert load_dataset(mini_dir).stars == ()

    def test_truncated_line(self, mini_dir):
        rewrite_lines(mini_dir / "commits.ndjson", lambda lines: lines[:4] + [lines[4][:40]] + lines[5:])
        with pytest.raises(MalformedRecord) as excinfo:
            load_dataset(mini_dir)
        assert (excinfo.value.file, excinfo.value.line) == ("commits.ndjson", 5)

    def test_missing_required_key(self, mini_dir):
        def drop_author(lines):
            record = json.loads(lines[1])
            del record["author_id"]
            return [lines[0], json.dumps(record)] + lines[2:]

        rewrite_lines(mini_dir / "issues.ndjson", drop_author)
        with pytest.raises(MalformedRecord) as excinfo:
            load_dataset(mini_dir)
        assert "author_id" in excinfo.value.reason
        assert excinfo.value.line == 2

    def test_timestamp_without_offset(self, mini_dir):
        rewrite_lines(mini_dir / "stars.ndjson", lambda lines: lines + ['{"starred_at": "2023-07-01T00:00:00"}'])
        with pytest.raises(MalformedRecord):
            load_dataset(mini_dir)

    def test_unknown_keys_are_ignored(self, mini_dir):
        rewrite_lines(
            mini_dir / "stars.ndjson",
            lambda lines: lines + ['{"starred_at": "2023-07-01T00:00:00Z", "user_id": "u9", "via": "web"}'],
        )
        assert len(load_dataset(mini_dir).stars) == 6

    def test_dangling_commit_repo(self, mini_dir):
        record = {"sha": "e" * 40, "repo_id": "r9", "author_id": "u9", "committed_at": "2023-03-01T00:00:00Z",
                  "parent_count": 1, "files": []}
        rewrite_lines(mini_dir / "commits.ndjson", lambda lines: lines + [json.dumps(record)])
        with pytest.raises(DanglingReference) as excinfo:
            load_dataset(mini_dir)
        assert excinfo.value.ref_id == "r9"

    def test_duplicate_issue(self, mini_dir):
        rewrite_lines(mini_dir / "issues.ndjson", lambda lines: lines + [lines[0]])
        with pytest.raises(DuplicateKey) as excinfo:
            load_dataset(mini_dir)
        assert excinfo.value.record_kind == "issue"

    def test_merged_pull_requires_closed_at(self, mini_dir):
        def reopen(lines):
            record = json.loads(lines[0])
            record["closed_at"] = None
            return [json.dumps(record)] + lines[1:]

        rewrite_lines(mini_dir / "pulls.ndjson", reopen)
        with pytest.raises(MalformedRecord):
            load_dataset(mini_dir)

    def test_line_order_does_not_matter(self, mini_dir):
        for name in ("forks.ndjson", "commits.ndjson", "pulls.ndjson", "issues.ndjson", "stars.ndjson"):
            rewrite_lines(mini_dir / name, lambda lines: list(reversed(lines)))
        shuffled = load_dataset(mini_dir)
        original = load_dataset(MINI_PROJECT)
        assert shuffled.record_sets() == original.record_sets()
        assert shuffled.commits == original.commits
        assert [f.repo_id for f in fork_network(shuffled)] == [f.repo_id for f in fork_network(original)]

    def test_serialize_round_trip(self, mini_dataset, tmp_path):
        directory = serialize_dataset(mini_dataset, tmp_path / "copy")
        assert load_dataset(directory).record_sets() == mini_dataset.record_sets()


# ---- Fork network ----

def reachable_by_dfs(ds):
    children = {}
    for f in ds.forks:
        children.setdefault(f.parent_repo_id, []).append(f.repo_id)
    seen, stack = set(), [ds.source_repo_id]
    while stack:
        for child in children.get(stack.pop(), []):
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return seen


class TestForkNetwork:
    def test_no_forks(self):
        assert fork_network(dataset()) == ()

    def test_chain_is_transitive(self):
        ds = dataset(forks=[fork("B", created="2023-01-02"), fork("C", parent="B", created="2023-01-03")])
        assert [f.repo_id for f in fork_network(ds)] == ["B", "C"]

    def test_breadth_first_with_creation_order(self):
        ds = dataset(forks=[
            fork("late", created="2023-03-01"),
            fork("early", created="2023-01-10"),
            fork("grandchild", parent="early", created="2023-01-11"),
            fork("tie-b", created="2023-02-01"),
            fork("tie-a", created="2023-02-01"),
        ])
        assert [f.repo_id for f in fork_network(ds)] == ["early", "tie-a", "tie-b", "late", "grandchild"]

    def test_mini_project_network(self, mini_dataset):
        network = fork_network(mini_dataset)
        assert [f.repo_id for f in network] == ["r1", "r2", "r3", "r4"]
        assert sum(1 for f in network if f.parent_repo_id != mini_dataset.source_repo_id) == 1
        assert {f.repo_id for f in network} == reachable_by_dfs(mini_dataset)

    def test_cycle_detected(self):
        ds = dataset(forks=[fork("A"), fork("X", parent="Y"), fork("Y", parent="X")])
        with pytest.raises(CycleDetected) as excinfo:
            fork_network(ds)
        assert excinfo.value.repo_id in {"X", "Y"}


# ---- Lint ----

def busy_dataset(n=150, name="acme/tool", description=None):
    forks = [fork(f"f{i:03d}", created="2023-01-02") for i in range(n)]
    commits = [commit(f"c{i}", f"f{i:03d}", "2023-02-01", ("lib/core.c", 1, 0)) for i in range(n)]
    pulls = [pull(i + 1, f"f{i:03d}", "2023-02-02", author=f"user{i}") for i in range(n)]
    issues = [issue(str(i), f"Issue number {i}") for i in range(n)]
    return dataset(forks, commits, pulls, issues, proj=project(full_name=name, description=description))


class TestLint:
    def test_busy_project_passes(self):
        assert lint_dataset(busy_dataset()) == []

    def test_mini_project_falls_below_thresholds(self, mini_dataset):
        findings = {f.rule: f for f in lint_dataset(mini_dataset)}
        assert set(findings) == {"active_forks", "issues", "external_pull_requests"}
        assert findings["active_forks"].context == {"value": 4, "threshold": 100}
        assert findings["issues"].context["value"] == 10
        assert findings["external_pull_requests"].context["value"] == 7

    def test_thresholds_are_configurable(self, mini_dataset):
        assert lint_dataset(mini_dataset, LintThresholds(active_forks=4, issues=10, external_pull_requests=7)) == []

    def test_homework_in_name(self):
        findings = lint_dataset(busy_dataset(name="alice/homework-solutions"))
        assert [f.rule for f in findings] == ["name_keyword"]
        assert findings[0].context == {"keyword": "homework", "fields": ["name"]}

    def test_keyword_in_description(self):
        findings = lint_dataset(busy_dataset(description="An Awesome list of tools"))
        assert [(f.rule, f.context["keyword"]) for f in findings] == [("name_keyword", "awesome")]

    def test_no_source_code(self):
        ds = dataset(
            forks=[fork("a")],
            commits=[commit("x", "a", "2023-02-01", ("README.md", 3, 0), ("docs/guide.txt", 1, 1))],
        )
        rules = [f.rule for f in lint_dataset(ds, LintThresholds(1, 1, 1))]
        assert "no_source_code" in rules

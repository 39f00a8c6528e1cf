import pytest

from forkentropy.workers import WorkerPool


@pytest.mark.parametrize("jobs", [1, 4])
def test_results_keep_input_order(jobs):
    with WorkerPool(jobs) as pool:
        assert pool.map(lambda x: x * x, range(50)) == [x * x for x in range(50)]


def test_lowest_failing_index_is_raised():
    def work(x):
        if x in (7, 3, 11):
            raise ValueError(x)
        return x

    with WorkerPool(4) as pool:
        with pytest.raises(ValueError) as excinfo:
            pool.map(work, range(20))
    assert excinfo.value.args == (3,)


def test_non_positive_jobs_run_sequentially():
    pool = WorkerPool(0)
    assert pool.jobs == 1
    assert pool.map(str, []) == []

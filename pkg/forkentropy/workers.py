"""
Worker pool for embarrassingly parallel per-item work.

Tasks run on a ``QThreadPool``; results are collected by input position so the
output order never depends on the number of workers.
"""
import threading
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from PySide6.QtCore import QRunnable, QThreadPool

from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class _Task(QRunnable):
    """Runs one function call and stores its result or exception in the batch."""

    def __init__(self, batch: "_Batch", index: int, fn: Callable, item):
        super().__init__()
        self.setAutoDelete(False)
        self.batch = batch
        self.index = index
        self.fn = fn
        self.item = item

    def run(self):
        try:
            self.batch.results[self.index] = self.fn(self.item)
        except BaseException as e:  # noqa: B902 - re-raised on the caller thread
            logger.debug(f"Task {self.index} failed: {e}")
            self.batch.fail(self.index, e)
        finally:
            self.batch.done.release()


class _Batch:
    def __init__(self, size: int):
        self.results: List = [None] * size
        self.done = threading.Semaphore(0)
        self._lock = threading.Lock()
        self.error: Optional[BaseException] = None
        self.error_index = size

    def fail(self, index: int, error: BaseException) -> None:
        with self._lock:
            # lowest index wins, matching sequential order
            if index < self.error_index:
                self.error_index = index
                self.error = error


class WorkerPool:
    """
    Bounded pool that maps a function over items.

    With ``jobs <= 1`` items run sequentially on the calling thread.
    """

    def __init__(self, jobs: int = 1):
        self.jobs = max(1, int(jobs))
        self._pool: Optional[QThreadPool] = None
        if self.jobs > 1:
            self._pool = QThreadPool()
            self._pool.setMaxThreadCount(self.jobs)
        logger.debug(f"WorkerPool created with jobs={self.jobs}")

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply ``fn`` to every item and return results in input order.

        Raises:
            The exception of the lowest-index failing item, after all
            submitted tasks have finished
        """
        work: Sequence[T] = list(items)
        if self._pool is None or len(work) <= 1:
            return [fn(item) for item in work]

        batch = _Batch(len(work))
        tasks = [_Task(batch, i, fn, item) for i, item in enumerate(work)]
        for task in tasks:
            self._pool.start(task)
        for _ in tasks:
            batch.done.acquire()

        if batch.error is not None:
            raise batch.error
        return batch.results

    def close(self) -> None:
        if self._pool is not None:
            self._pool.waitForDone()
            self._pool = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

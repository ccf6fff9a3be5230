"""Asyncio worker pool running blocking evaluations on threads."""

import asyncio
import contextlib
import logging
from collections.abc import Callable, Iterable
from typing import Generic, TypeVar

import anyio
import anyio.to_thread

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool(Generic[T, R]):
    """Ordered concurrent map of a blocking function over items.

    A feeder task fills a bounded queue, worker tasks hand each item to a
    thread through a shared capacity limiter, and results are returned in
    input order regardless of completion order. A failing item does not stop
    the others; the error of the lowest failing index is raised once all
    workers have finished.
    """

    def __init__(
        self,
        func: Callable[[T], R],
        num_workers: int = 4,
        queue_size: int = 100,
    ) -> None:
        """Initialize the worker pool.

        Args:
        ----
            func: Blocking function applied to every item.
            num_workers: Number of concurrent workers and threads.
            queue_size: Size of the internal input queue.

        Raises:
        ------
            ValueError: If ``num_workers`` or ``queue_size`` is below 1.

        """
        if num_workers < 1:
            err = f"num_workers must be at least 1, got {num_workers}"
            raise ValueError(err)
        if queue_size < 1:
            err = f"queue_size must be at least 1, got {queue_size}"
            raise ValueError(err)
        self.func: Callable[[T], R] = func
        self.num_workers: int = num_workers
        self.queue_size: int = queue_size
        self.logger: logging.Logger = logging.getLogger(__name__)

    async def map(self, items: Iterable[T]) -> list[R]:
        """Apply the function to every item and return results in order."""
        input_queue: asyncio.Queue[tuple[int, T] | None] = asyncio.Queue(
            maxsize=self.queue_size
        )
        results: dict[int, R] = {}
        errors: dict[int, Exception] = {}
        limiter = anyio.CapacityLimiter(self.num_workers)

        async def feed() -> None:
            try:
                for index, item in enumerate(items):
                    await input_queue.put((index, item))
            finally:
                # Stop signals reach every worker even if feeding failed
                for _ in range(self.num_workers):
                    await input_queue.put(None)
            self.logger.debug("Source exhausted, sent stop signals")

        async def work(worker_id: str) -> None:
            self.logger.debug("%s started", worker_id)
            while True:
                entry = await input_queue.get()
                if entry is None:
                    break
                index, item = entry
                try:
                    results[index] = await anyio.to_thread.run_sync(
                        self.func, item, limiter=limiter
                    )
                except Exception as e:  # noqa: BLE001 reported after the run
                    self.logger.debug("%s failed on item %d", worker_id, index)
                    errors[index] = e
            self.logger.debug("%s finished", worker_id)

        feeder = asyncio.create_task(feed())
        workers = [
            asyncio.create_task(work(f"worker-{i}"))
            for i in range(self.num_workers)
        ]
        try:
            _ = await asyncio.gather(feeder, *workers)
        except BaseException:
            await self._cleanup([feeder, *workers])
            raise

        if errors:
            first = min(errors)
            self.logger.warning(
                "%d of %d item(s) failed; first failure at item %d",
                len(errors),
                len(errors) + len(results),
                first,
            )
            raise errors[first]
        return [results[index] for index in range(len(results))]

    async def _cleanup(self, tasks: list["asyncio.Task[None]"]) -> None:
        """Cancel outstanding tasks and wait for them to finish."""
        self.logger.debug("Cleaning up worker tasks")
        for task in tasks:
            if not task.done():
                _ = task.cancel()
        for task in tasks:
            with contextlib.suppress(asyncio.CancelledError, Exception):
                await task

    def run(self, items: Iterable[T]) -> list[R]:
        """Blocking entry point running :meth:`map` in a fresh event loop."""
        materialized = list(items)
        return anyio.run(self.map, materialized)

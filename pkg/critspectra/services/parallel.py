"""Order-preserving fan-out of independent work items over processes."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

from critspectra.config import settings

logger = logging.getLogger(__name__)

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


def run_parallel(
    func: Callable[[ItemT], ResultT],
    items: Iterable[ItemT],
    jobs: int | None = None,
) -> list[ResultT]:
    """Apply a module-level function to every item, in input order.

    With one job (or one item) everything runs in-process, which keeps
    results bitwise identical to the pooled path: every item carries its own
    seed, never a shared stream.
    """
    work = list(items)
    workers = min(settings.jobs if jobs is None else jobs, len(work))
    if workers <= 1:
        return [func(item) for item in work]

    logger.debug("Fanning out items=%d workers=%d", len(work), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, work))

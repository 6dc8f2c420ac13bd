"""
Parallel Task Runner
Dense Survival Forest Subgroup Profiler
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence

from tqdm import tqdm

from config.settings import settings
from src.utils.logger import get_logger

logger = get_logger(__name__)


class BatchRunner:
    """Runs independent tasks on a process pool and returns results in task order"""

    def __init__(self, max_workers: Optional[int] = None, show_progress: Optional[bool] = None):
        self.max_workers = settings.MAX_WORKERS if max_workers is None else max(1, int(max_workers))
        self.show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress

    def map(self, fn: Callable[..., Any], tasks: Sequence[tuple], desc: str = "Processing") -> List[Any]:
        """
        Apply fn(*task) to every task

        Args:
            fn: Picklable top-level function
            tasks: Argument tuples
            desc: Progress bar label

        Returns:
            Results, position i holding fn(*tasks[i]) regardless of completion order
        """
        results: List[Any] = [None] * len(tasks)
        if not tasks:
            return results

        if self.max_workers == 1 or len(tasks) == 1:
            for i, task in enumerate(tqdm(tasks, desc=desc, disable=not self.show_progress)):
                results[i] = fn(*task)
            return results

        logger.debug(f"{desc}: {len(tasks)} tasks on {self.max_workers} workers")
        with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_index = {executor.submit(fn, *task): i for i, task in enumerate(tasks)}

            for future in tqdm(as_completed(future_to_index), total=len(future_to_index), desc=desc,
                               disable=not self.show_progress):
                index = future_to_index[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    logger.error(f"{desc}: task {index} failed: {str(e)}")
                    for pending in future_to_index:
                        pending.cancel()
                    raise
        return results

"""
Coordinates per-code training across a thread or process pool
"""

from concurrent.futures import (
    Executor,
    ProcessPoolExecutor,
    ThreadPoolExecutor,
    as_completed,
)
from typing import Dict, List, Optional, Sequence

from ..utils.logger import RunLogger, create_training_logger
from .config import ExecutionConfig
from .sgd import CodeResult, CodeTask, fit_linear_sgd


class PerCodeTrainer:
    """Runs one SGD task per code and gathers the results in code order"""

    def __init__(
        self,
        execution: Optional[ExecutionConfig] = None,
        logger: Optional[RunLogger] = None,
    ):
        self.execution = execution or ExecutionConfig()
        self.logger = logger or create_training_logger()

    def _executor(self) -> Executor:
        if self.execution.use_process_pool:
            return ProcessPoolExecutor(max_workers=self.execution.max_workers)
        return ThreadPoolExecutor(max_workers=self.execution.max_workers)

    def _record(self, result: CodeResult, done: int, total: int) -> None:
        self.logger.log_item_processed(result.code, result.seconds)
        self.logger.debug(
            f"{result.code}: {len(result.coefficients)} nonzero, "
            f"train loss {result.train_loss:.6g}"
        )
        if done % self.execution.progress_every == 0 or done == total:
            self.logger.log_progress(done, total)

    def run(self, tasks: Sequence[CodeTask], label: str) -> List[CodeResult]:
        """
        Train every task.

        Args:
            tasks: One task per code
            label: Session label for the logs

        Returns:
            List[CodeResult]: Results ordered like the tasks
        """
        self.logger.start_session(label, total=len(tasks))
        results: Dict[int, CodeResult] = {}

        if self.execution.max_workers == 1 or len(tasks) <= 1:
            for task in tasks:
                try:
                    result = fit_linear_sgd(task)
                except Exception as e:
                    self.logger.log_item_failed(task.code, e)
                    raise
                results[task.code_index] = result
                self._record(result, len(results), len(tasks))
        else:
            with self._executor() as executor:
                futures = {
                    executor.submit(fit_linear_sgd, task): task for task in tasks
                }
                for future in as_completed(futures):
                    task = futures[future]
                    try:
                        result = future.result()
                    except Exception as e:
                        self.logger.log_item_failed(task.code, e)
                        for pending in futures:
                            pending.cancel()
                        raise
                    results[task.code_index] = result
                    self._record(result, len(results), len(tasks))

        self.logger.log_session_summary()
        return [results[task.code_index] for task in tasks]

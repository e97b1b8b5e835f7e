"""
Run-scoped logging with per-module log directories and session metrics
"""

import logging
import os
import time
from datetime import date
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from rich.console import Console
from rich.logging import RichHandler

LOG_DIR_ENV = "PROXYEXPLAIN_LOG_DIR"

MODULE_DIRS = (
    "data",
    "training",
    "evaluation",
    "explain",
    "plausibility",
    "general",
    "errors",
)


def get_log_base_dir() -> Path:
    """Base log directory, overridable through PROXYEXPLAIN_LOG_DIR"""
    configured = os.environ.get(LOG_DIR_ENV)
    if configured:
        return Path(os.path.expanduser(os.path.expandvars(configured))).resolve()
    return Path.home() / ".proxyexplain_logs"


class ModuleFilter(logging.Filter):
    """Stamp every record with the module it was logged under"""

    def __init__(self, module_name: str):
        super().__init__()
        self.module_name = module_name

    def filter(self, record: logging.LogRecord) -> bool:
        record.module_name = self.module_name
        return True


class RunLogger:
    """Logger for pipeline stages with item/session metrics"""

    def __init__(self, name: str = "proxyexplain", module_name: str = "general"):
        self.logger = logging.getLogger(name)
        self.module_name = module_name
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        if not self.logger.handlers:
            self._setup_handlers()

        self.metrics: Dict[str, Any] = {
            "items_processed": 0,
            "items_failed": 0,
            "total_seconds": 0.0,
            "start_time": None,
            "label": None,
            "errors": [],
        }

    def _setup_handlers(self) -> None:
        """Console handler on stderr plus module and error log files"""
        # stdout carries JSON reports, so the console handler writes to stderr
        console_handler = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            rich_tracebacks=False,
        )
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(logging.Formatter("%(message)s"))
        self.logger.addHandler(console_handler)

        module_filter = ModuleFilter(self.module_name)
        detailed_formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - [%(module_name)s] - %(message)s"
        )

        base_log_dir = get_log_base_dir()
        log_dir_name = (
            self.module_name if self.module_name in MODULE_DIRS else "general"
        )
        try:
            log_dir = base_log_dir / log_dir_name
            error_dir = base_log_dir / "errors"
            log_dir.mkdir(parents=True, exist_ok=True)
            error_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            self.logger.warning(
                f"Log directory {base_log_dir} unavailable ({e}); console only"
            )
            return

        stamp = date.today().isoformat()
        file_handler = logging.FileHandler(
            log_dir / f"{self.module_name}_{stamp}.log", encoding="utf-8"
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        file_handler.addFilter(module_filter)

        error_handler = logging.FileHandler(
            error_dir / f"{self.module_name}_errors.log", encoding="utf-8"
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(detailed_formatter)
        error_handler.addFilter(module_filter)

        self.logger.addHandler(file_handler)
        self.logger.addHandler(error_handler)

    def start_session(self, label: str, total: Optional[int] = None) -> None:
        """Reset metrics and announce a new unit of work"""
        self.metrics["start_time"] = time.time()
        self.metrics["items_processed"] = 0
        self.metrics["items_failed"] = 0
        self.metrics["total_seconds"] = 0.0
        self.metrics["label"] = label
        self.metrics["errors"] = []
        if total is None:
            self.logger.info(f"Starting {label}")
        else:
            self.logger.info(f"Starting {label} ({total} items)")

    def log_item_processed(self, name: str, duration: float) -> None:
        self.metrics["items_processed"] += 1
        self.metrics["total_seconds"] += duration
        self.logger.debug(f"Processed {name} in {duration:.3f}s")

    def log_item_failed(self, name: str, error: Exception) -> None:
        self.metrics["items_failed"] += 1
        self.metrics["errors"].append((name, str(error)))
        self.logger.error(f"Failed on {name}: {error}")

    def log_progress(self, processed: int, total: int) -> None:
        percentage = (processed / total) * 100 if total > 0 else 0
        self.logger.info(f"Progress: {processed}/{total} ({percentage:.1f}%)")

    def get_session_summary(self) -> Dict[str, Any]:
        """Summary of the current session"""
        elapsed = (
            time.time() - self.metrics["start_time"]
            if self.metrics["start_time"]
            else 0.0
        )
        processed = self.metrics["items_processed"]
        failed = self.metrics["items_failed"]
        total = processed + failed
        recent_errors: List[Tuple[str, str]] = self.metrics["errors"][-10:]

        return {
            "label": self.metrics["label"],
            "items_processed": processed,
            "items_failed": failed,
            "elapsed_time": elapsed,
            "items_per_second": processed / elapsed if elapsed > 0 else 0.0,
            "mean_item_seconds": (
                self.metrics["total_seconds"] / processed if processed else 0.0
            ),
            "error_rate": failed / total if total > 0 else 0.0,
            "recent_errors": recent_errors,
        }

    def log_session_summary(self) -> None:
        summary = self.get_session_summary()
        self.logger.info(
            f"{summary['label']}: {summary['items_processed']} done, "
            f"{summary['items_failed']} failed in {summary['elapsed_time']:.2f}s"
        )

    def info(self, message: str) -> None:
        self.logger.info(message)

    def debug(self, message: str) -> None:
        self.logger.debug(message)

    def warning(self, message: str) -> None:
        self.logger.warning(message)

    def error(self, message: str) -> None:
        self.logger.error(message)


def create_data_logger() -> RunLogger:
    """Logger for corpus, prediction and synthetic-data I/O"""
    return RunLogger("proxyexplain.data", "data")


def create_training_logger() -> RunLogger:
    """Logger for proxy and baseline training"""
    return RunLogger("proxyexplain.training", "training")


def create_evaluation_logger() -> RunLogger:
    return RunLogger("proxyexplain.evaluation", "evaluation")


def create_explain_logger() -> RunLogger:
    return RunLogger("proxyexplain.explain", "explain")


def create_plausibility_logger() -> RunLogger:
    return RunLogger("proxyexplain.plausibility", "plausibility")


def create_module_logger(
    module_name: str, logger_name: Optional[str] = None
) -> RunLogger:
    """Logger for any other module; files land in the general directory"""
    if logger_name is None:
        logger_name = f"proxyexplain.{module_name}"
    return RunLogger(logger_name, module_name)

import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator

logger = logging.getLogger(__name__)


@contextmanager
def timed_run(name: str, **context: Any) -> Iterator[Dict[str, Any]]:
    """Log start and finish of one run; the yielded dict receives the elapsed time"""
    timing: Dict[str, Any] = {"name": name}
    start_time = time.perf_counter()
    logger.info(f"RUN: {name} {context if context else ''}".rstrip())
    try:
        yield timing
    except Exception as e:
        timing["elapsed"] = time.perf_counter() - start_time
        logger.error(f"FAILED: {name} after {timing['elapsed']:.3f}s: {e}")
        raise
    timing["elapsed"] = time.perf_counter() - start_time
    logger.info(f"DONE: {name} - {timing['elapsed']:.3f}s")

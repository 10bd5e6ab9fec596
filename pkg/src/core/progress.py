"""
core/progress.py
Progress display and run timing for long solver runs
"""

import sys
import time
from contextlib import contextmanager
from typing import Callable, Iterator, Optional, TextIO

import psutil


class ProgressBar:
    """Progress bar written to stderr so reports on stdout stay clean"""

    def __init__(self, total: int, width: int = 40, message: str = "Progress",
                 stream: Optional[TextIO] = None, enabled: bool = True):
        """
        Initialize progress bar

        Args:
            total: Total number of items
            width: Width of the progress bar
            message: Message to display
            stream: Target stream (stderr by default)
            enabled: When False nothing is drawn
        """
        self.total = total
        self.width = width
        self.message = message
        self.stream = stream or sys.stderr
        self.enabled = enabled
        self.current = 0
        self.start_time = time.perf_counter()

    def update(self, increment: int = 1) -> None:
        self.current = min(self.current + increment, self.total)
        self._render()

    def _render(self) -> None:
        if not self.enabled or self.total == 0:
            return

        percentage = self.current / self.total
        filled_width = int(self.width * percentage)
        bar = "█" * filled_width + "░" * (self.width - filled_width)

        elapsed = time.perf_counter() - self.start_time
        if self.current > 0:
            eta = elapsed * (self.total - self.current) / self.current
            eta_str = f"ETA: {eta:.1f}s"
        else:
            eta_str = "ETA: --"

        self.stream.write(
            f"\r{self.message}: |{bar}| {percentage:.1%} "
            f"({self.current}/{self.total}) {eta_str}"
        )
        self.stream.flush()

    def finish(self) -> None:
        self.current = self.total
        self._render()
        if self.enabled and self.total:
            self.stream.write("\n")
            self.stream.flush()


class Stopwatch:
    """Wall time plus peak resident memory of the current process"""

    def __init__(self):
        self._process = psutil.Process()
        self.start_time = time.perf_counter()
        self.peak_rss_mb = self._rss_mb()

    def _rss_mb(self) -> float:
        return self._process.memory_info().rss / (1024 * 1024)

    def sample(self) -> float:
        """Record current memory; returns the peak so far in MiB"""
        self.peak_rss_mb = max(self.peak_rss_mb, self._rss_mb())
        return self.peak_rss_mb

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    def remaining(self, limit: Optional[float]) -> Optional[float]:
        """Seconds left of a budget, None for no limit"""
        if limit is None:
            return None
        return max(0.0, limit - self.elapsed)


@contextmanager
def timed(label: str, log: Optional[Callable[[str], None]] = None) -> Iterator[Stopwatch]:
    """Time a block and report it through `log` (a logger method)"""
    watch = Stopwatch()
    try:
        yield watch
    finally:
        watch.sample()
        if log is not None:
            log(f"{label} finished in {watch.elapsed:.3f}s (peak {watch.peak_rss_mb:.1f} MiB)")

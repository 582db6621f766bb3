"""Worker-count plumbing for the FFT backend.

scipy.fft accepts a ``workers`` argument; results are bitwise independent of
the worker count (threads only split independent transform lines), so this is
purely a throughput knob.  The CLI --threads flag sets it process-wide.
"""

from __future__ import annotations

_WORKERS = 1


def set_workers(n: int) -> None:
    global _WORKERS
    n = int(n)
    if n < 1:
        raise ValueError("worker count must be >= 1")
    _WORKERS = n


def get_workers() -> int:
    return _WORKERS

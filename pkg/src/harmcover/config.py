"""Process-wide knobs."""

import os

GEO_TOL = 1e-9  # geometric tolerance, frequency units


def max_threads():
    """Thread cap for internal parallel scans (HARMCOVER_THREADS)."""
    raw = os.environ.get("HARMCOVER_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n > 0:
        return n
    return os.cpu_count() or 1

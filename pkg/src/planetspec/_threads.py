"""Worker-count plumbing: PLANETSPEC_THREADS controls task parallelism.

All parallel maps merge results in task order, so outputs are identical
for any thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    raw = os.environ.get("PLANETSPEC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PLANETSPEC_THREADS={raw!r} is not an integer")
    return max(1, n)


def thread_map(fn, items):
    """map(fn, items) preserving order; threaded when PLANETSPEC_THREADS > 1."""
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))

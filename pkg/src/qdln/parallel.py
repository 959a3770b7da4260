"""Order-preserving thread fan-out for independent jobs."""

from concurrent.futures import ThreadPoolExecutor


def run_jobs(fn, items, threads=1):
    """Evaluate ``fn`` over ``items`` on a thread pool; results in input order.

    The compiled kernels release the GIL. Every job is independent, so the
    output does not depend on ``threads``.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))

"""Process-pool map with results returned in submission order.

Reductions in this package only ever add integers from shards, so the
outcome does not depend on the number of workers or on scheduling.
"""

from __future__ import annotations

import contextlib
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterator


@contextlib.contextmanager
def pool_map(workers: int = 1) -> Iterator[Callable]:
    """Yield a ``map``-like callable; plain ``map`` when ``workers <= 1``."""
    if workers <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=workers) as ex:
        yield lambda fn, items: ex.map(fn, list(items), chunksize=1)

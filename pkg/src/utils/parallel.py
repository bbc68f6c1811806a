from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar
from src.config import RunConfig

T = TypeVar('T')
R = TypeVar('R')


def parallel_map(func: Callable[[T], R], items: Iterable[T], num_threads: Optional[int] = None) -> List[R]:
    """Apply func to every item, preserving input order. Runs inline with one thread."""
    items = list(items)
    workers = num_threads if num_threads is not None else RunConfig.num_threads()
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))

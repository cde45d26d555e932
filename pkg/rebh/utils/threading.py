import warnings
from threading import Thread
from typing import Callable, List, Optional, Sequence, TypeVar

import psutil

__all__ = ("PropagatingThread", "default_num_workers", "run_chunked")

T = TypeVar("T")


class PropagatingThread(Thread):
    """Thread which hands its return value, or its exception, back to whoever joins it.

    Adapted from:
    https://stackoverflow.com/questions/2829329/catch-a-threads-exception-in-the-caller-thread-in-python
    """

    def run(self):
        self.exc = None
        self.ret = None
        try:
            self.ret = self._target(*self._args, **self._kwargs)
        except BaseException as e:
            self.exc = e

    def join(self, timeout=None):
        super(PropagatingThread, self).join(timeout)
        if self.exc:
            raise RuntimeError('Exception in thread %s' % (self.name)) from self.exc
        return self.ret


def default_num_workers(num_workers: Optional[int] = None) -> int:
    if num_workers is not None:
        if num_workers < 1:
            raise ValueError("num_workers must be positive, got %d" % (num_workers))
        return num_workers
    return psutil.cpu_count(logical=False) or 1


def run_chunked(fn: Callable[[Sequence[int]], List[T]], n_tasks: int,
                num_workers: Optional[int] = None) -> List[T]:
    """Run `fn` over contiguous chunks of ``range(n_tasks)`` on worker threads.

    `fn` receives a range of task indices and must return one result per index.
    Results are concatenated in task order, so the output does not depend on the number
    of workers nor on scheduling.
    """
    if num_workers is not None and num_workers > max(n_tasks, 1):
        warnings.warn("num_workers=%d is larger than the number of tasks (%d), using %d threads" %
                      (num_workers, n_tasks, max(n_tasks, 1)))
    num_workers = min(default_num_workers(num_workers), max(n_tasks, 1))
    if num_workers <= 1:
        return list(fn(range(n_tasks)))

    bounds = [n_tasks * i // num_workers for i in range(num_workers + 1)]
    threads = []
    for i in range(num_workers):
        t = PropagatingThread(target=fn, args=(range(bounds[i], bounds[i + 1]), ),
                              name="trials-%d" % (i))
        t.start()
        threads.append(t)

    out: List[T] = []
    for t in threads:
        out.extend(t.join())
    return out

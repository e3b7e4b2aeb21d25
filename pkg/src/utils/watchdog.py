"""Wall-clock limit for long fits. The pipeline runs in a forked child process,
because a thread stuck inside a LAPACK call cannot be interrupted, while a
process can be terminated."""

import functools
import multiprocessing
from queue import Empty

from src.errors import EnsembleError


class WatchdogTimeoutError(EnsembleError):
    """A watched call ran past its time limit."""

    category = "timeout"
    exit_code = 5


def _child(queue, func, args, kwargs):
    try:
        queue.put((True, func(*args, **kwargs)))
    except Exception as exc:
        queue.put((False, exc))


def timeout_watchdog(seconds=600):
    """Decorator: run `func` in a forked child and kill it after `seconds`.

    Return values and exceptions travel back through a queue, so both must be
    picklable (every EnsembleError is)."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            # fork: the child inherits func and its arguments without pickling them
            context = multiprocessing.get_context("fork")
            queue = context.Queue()
            child = context.Process(target=_child, args=(queue, func, args, kwargs), daemon=True)
            child.start()

            try:
                ok, outcome = queue.get(timeout=seconds)
            except Empty:
                child.terminate()
                child.join()
                raise WatchdogTimeoutError(
                    f"'{func.__name__}' exceeded its {seconds}s time limit and was terminated"
                ) from None
            child.join()
            if not ok:
                raise outcome
            return outcome
        return wrapper
    return decorator


def run_with_limit(seconds, func, *args, **kwargs):
    """Calls func under the watchdog, or directly when seconds is None."""
    if seconds is None:
        return func(*args, **kwargs)
    return timeout_watchdog(seconds)(func)(*args, **kwargs)

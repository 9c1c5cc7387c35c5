"""Run deeply recursive searches on a thread with a large stack."""

from __future__ import annotations

import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000

_local = threading.local()
_lock = threading.Lock()


def raise_limits() -> None:
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)


def start_big_thread(target, name: str) -> threading.Thread:
    """Start a daemon thread with a large stack and deep-call flag set."""

    def wrapped():
        _local.deep = True
        target()

    raise_limits()
    with _lock:
        old = threading.stack_size()
        threading.stack_size(STACK_BYTES)
        try:
            t = threading.Thread(target=wrapped, name=name, daemon=True)
            t.start()
        finally:
            threading.stack_size(old)
    return t


def run_deep(fn, *args, **kwargs):
    """Call ``fn`` on a large-stack thread and return its result.

    Runs inline when already on such a thread.
    """
    if getattr(_local, "deep", False):
        return fn(*args, **kwargs)
    box: dict = {}

    def body():
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller
            box["error"] = e

    start_big_thread(body, "parcycles-deep").join()
    if "error" in box:
        raise box["error"]
    return box["value"]

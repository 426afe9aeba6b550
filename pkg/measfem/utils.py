"""
measfem utilities
"""

import logging
import os
import time
from functools import wraps

import numpy as np

__all__ = ['configure_logging', 'timed', 'thread_count', 'chunks',
           'lookup_rows', 'THREADS_ENV']

THREADS_ENV = 'MEASFEM_THREADS'

logger = logging.getLogger(__name__)


def configure_logging(verbosity=0, quiet=False):
    """Configures the ``measfem`` logger hierarchy for command-line use.

    The library itself never installs handlers; only entry points call this.

    Parameters
    ----------
    verbosity : int
        0 for warnings only, 1 for INFO, 2 or more for DEBUG.

    quiet : bool
        If True, only errors are reported regardless of ``verbosity``.
    """
    if quiet:
        level = logging.ERROR
    elif verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    root = logging.getLogger('measfem')
    root.setLevel(level)
    if not any(getattr(h, '_measfem_cli', False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)-7s %(name)s: %(message)s', '%H:%M:%S'))
        handler._measfem_cli = True
        root.addHandler(handler)
    return root


def timed(func):
    """Decorator that logs the wall time of a call at DEBUG level"""

    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        logging.getLogger(func.__module__).debug(
            '%s took %.3fs', func.__name__, time.perf_counter() - start)
        return result

    return wrapper


def thread_count(default=1):
    """Number of worker threads, honouring the ``MEASFEM_THREADS`` variable.

    Raises
    ------
    ValueError
        If the environment variable is set but is not a positive integer.
    """
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == '':
        return int(default)
    try:
        n = int(value)
    except ValueError:
        raise ValueError('{0} must be a positive integer, got {1!r}'.format(THREADS_ENV, value))
    if n < 1:
        raise ValueError('{0} must be a positive integer, got {1!r}'.format(THREADS_ENV, value))
    return n


def chunks(n, size):
    """Yields ``slice`` objects covering ``range(n)`` in blocks of ``size``."""
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def lookup_rows(table, queries):
    """Finds the row index of each query in a lexicographically sorted table.

    Both arrays hold sorted integer tuples (one per row), e.g. edges given by
    their two vertex indices. Every query must be present in the table.

    Parameters
    ----------
    table : ndarray
        Array of shape ``(n, m)``, rows unique and sorted lexicographically
        (as returned by ``np.unique(..., axis=0)``).

    queries : ndarray
        Array of shape ``(q, m)``.

    Returns
    -------
    index : ndarray
        Integer array of shape ``(q,)``.
    """
    table = np.asarray(table, dtype=np.int64)
    queries = np.asarray(queries, dtype=np.int64).reshape(-1, table.shape[1])
    base = int(max(table.max(initial=0), queries.max(initial=0))) + 1
    weights = base ** np.arange(table.shape[1] - 1, -1, -1, dtype=np.int64)
    keys = table.dot(weights)
    qkeys = queries.dot(weights)
    index = np.searchsorted(keys, qkeys)
    assert np.all(index < keys.size) and np.all(keys[np.minimum(index, keys.size - 1)] == qkeys), \
        "query rows missing from table"
    return index

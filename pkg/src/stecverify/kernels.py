"""Backend selection for the hot loops, plus deterministic chunked reduction.

The compiled extension ``_kernels`` is used when it imports; otherwise the
numpy fallback in ``_purepy`` is used.  Set ``STECVERIFY_PURE_PYTHON=1`` to
force the fallback.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _purepy

if os.environ.get("STECVERIFY_PURE_PYTHON", "") not in ("", "0"):
    _backend = _purepy
    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend

        BACKEND = "cython"
    except ImportError:  # extension not built
        _backend = _purepy
        BACKEND = "python"

# Chunk size is part of the summation topology; changing it changes the bits.
CHUNK = 1 << 15


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython"/"python"), default active."""
    if name is None:
        return _backend
    if name == "python":
        return _purepy
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def pairwise_sum(values):
    """Sum rows of ``values`` (shape (n, ...)) with a fixed binary-tree topology."""
    parts = [np.asarray(v, dtype=float) for v in values]
    if not parts:
        raise ValueError("pairwise_sum of nothing")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def eigh3(blocks, backend=None):
    """Unsorted eigenpairs of symmetric 3x3 blocks, shape (n, 3, 3)."""
    blocks = np.ascontiguousarray(blocks, dtype=float)
    return get_backend(backend).jacobi_eigh3(blocks)


def regulated_sums(eps, weight, cutoffs, threads=1, backend=None):
    """``sum_j weight_j eps_j exp(-eps_j s)`` for each cutoff ``s``.

    Modes are split into fixed-size chunks whose partial sums are combined
    by ``pairwise_sum``; the result is bit-identical for any ``threads``.
    """
    kern = get_backend(backend)
    eps = np.ascontiguousarray(eps, dtype=float)
    weight = np.ascontiguousarray(weight, dtype=float)
    cutoffs = np.ascontiguousarray(cutoffs, dtype=float)
    if eps.size == 0:
        return np.zeros_like(cutoffs)
    bounds = [(i, min(i + CHUNK, eps.size)) for i in range(0, eps.size, CHUNK)]

    def work(b):
        lo, hi = b
        return kern.regulated_sums(eps[lo:hi], weight[lo:hi], cutoffs)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(work, bounds))
    else:
        partials = [work(b) for b in bounds]
    return pairwise_sum(partials)


def tree_sum(values):
    """Deterministic sum of a 1-D array: fixed chunks, then ``pairwise_sum``."""
    v = np.ascontiguousarray(values, dtype=float).ravel()
    if v.size == 0:
        return 0.0
    return float(pairwise_sum([np.sum(v[i:i + CHUNK]) for i in range(0, v.size, CHUNK)]))

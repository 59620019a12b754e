"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise, or when
``OPPERMANN_PURE=1`` is set, the numpy twin is used. ``load(name)`` returns a
specific backend so tests and benchmarks can compare them.
"""

import importlib
import os


def load(name):
    if name == "compiled":
        return importlib.import_module("oppermann._kernels")
    if name == "python":
        return importlib.import_module("oppermann._kernels_py")
    raise ValueError(f"unknown kernel backend {name!r}")


def available():
    names = ["python"]
    try:
        load("compiled")
    except ImportError:
        pass
    else:
        names.insert(0, "compiled")
    return names


def _select():
    if os.environ.get("OPPERMANN_PURE", "") not in ("", "0"):
        return load("python")
    try:
        return load("compiled")
    except ImportError:
        return load("python")


backend = _select()
BACKEND = backend.BACKEND
sieve_words = backend.sieve_words
next_zero = backend.next_zero
popcount = backend.popcount
bls_powers = backend.bls_powers

"""BM25 scoring kernels.

The hot loop of retrieval is accumulating per-term score contributions over
postings arrays.  A compiled Cython kernel is used when the extension built;
otherwise a vectorized pure-Python implementation takes over.  Selection
happens once, at import.  Set ``CROSSQA_PURE_PYTHON=1`` to force the fallback
(used by the benchmark and by tests that must run without a toolchain).
"""

import os

from . import fallback as _fallback

_impl = None
if os.environ.get("CROSSQA_PURE_PYTHON") != "1":
    try:
        from . import _bm25_cy as _impl
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _fallback

accumulate_scores = _impl.accumulate_scores
KERNEL_BACKEND = "python" if _impl is _fallback else "cython"


def available_kernels():
    """Names of kernels importable in this environment."""
    names = ["python"]
    try:
        from . import _bm25_cy  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


def get_kernel(name):
    """Fetch a kernel implementation by name ("python" or "cython")."""
    if name == "python":
        return _fallback.accumulate_scores
    if name == "cython":
        from . import _bm25_cy
        return _bm25_cy.accumulate_scores
    raise ValueError(f"unknown kernel {name!r}")

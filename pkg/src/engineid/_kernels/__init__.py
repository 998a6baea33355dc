"""Split-scan kernel backend selection.

The compiled Cython extension is used when present; otherwise the pure
NumPy implementation takes over.  Both produce bit-identical splits (see
``pure.py`` for why), so the choice only affects speed.
"""

from . import pure

try:
    from . import _ckernels as _compiled
except ImportError:  # extension not built; pure fallback
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"

_active = _compiled if _compiled is not None else pure

scan_split_gini = _active.scan_split_gini
scan_split_sse = _active.scan_split_sse


def get_backend() -> str:
    return BACKEND


def available_backends() -> dict:
    """Name -> module for every importable backend (used by tests/benchmarks)."""
    backends = {"pure": pure}
    if _compiled is not None:
        backends["compiled"] = _compiled
    return backends

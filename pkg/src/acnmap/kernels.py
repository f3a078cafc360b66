"""Backend selection for the evaluation kernels.

The compiled Cython extension is preferred when importable; otherwise the
numpy fallback is used. Set ACNMAP_PURE=1 to force the fallback (useful
for benchmarking and debugging). Both backends are bit-identical.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ACNMAP_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

exhaustive_eval = _impl.exhaustive_eval
corpus_eval = _impl.corpus_eval


def backend_name() -> str:
    return _impl.BACKEND

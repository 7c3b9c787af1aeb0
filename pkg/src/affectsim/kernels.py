"""Round-kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``AFFECTSIM_PURE`` is set to a non-empty value other
than ``0``, the numpy implementation is used. Both give identical output.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _want_pure() -> bool:
    return os.environ.get("AFFECTSIM_PURE", "") not in ("", "0")


if _compiled is not None and not _want_pure():
    apply_round = _compiled.apply_round
    BACKEND = "compiled"
else:
    apply_round = _kernels_py.apply_round
    BACKEND = "python"

python_apply_round = _kernels_py.apply_round
compiled_apply_round = None if _compiled is None else _compiled.apply_round

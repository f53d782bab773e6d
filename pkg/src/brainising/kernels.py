"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
fallback. Set ``BRAINISING_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("BRAINISING_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
run_chain = (_compiled or _pykernels).run_chain

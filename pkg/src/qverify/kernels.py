"""Kernel backend selection.

The compiled extension is preferred; ``QVERIFY_PURE_PYTHON=1`` forces the
pure-Python fallback (used by the benchmark and by the parity tests).
"""
import os

from . import _pykernels as pure

BACKEND = "python"
impl = pure

if os.environ.get("QVERIFY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None
    else:
        impl = compiled
        BACKEND = "cython"
else:
    compiled = None

OK = pure.OK
NO_CONVERGENCE = pure.NO_CONVERGENCE
POLE = pure.POLE
NON_FINITE = pure.NON_FINITE

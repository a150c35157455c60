"""Backend selection for the hot holonomy kernel.

The compiled extension is used when it was built; set ``QHDLAB_BACKEND=python``
to force the numpy fallback.
"""
import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels


def available_backends():
    return sorted(_BACKENDS)


def _default():
    forced = os.environ.get("QHDLAB_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(f"QHDLAB_BACKEND={forced!r} is not available")
        return forced
    return "compiled" if "compiled" in _BACKENDS else "python"


BACKEND = _default()


def get_backend(name=None):
    return _BACKENDS[name or BACKEND]


CHUNK_BYTES = 32 * 2**20


def rk4_holonomy(X, B, T, H, out, backend=None):
    """Holonomies for coefficient rows X (N, M) given mode profiles B (nsteps, 3, M, g).

    The linear map X -> stage coefficients runs through BLAS in chunks of
    samples; the serial RK4 product runs in the selected backend.
    """
    impl = get_backend(backend)
    N, M = X.shape
    nsteps, _, _, g = B.shape
    Bm = np.ascontiguousarray(B.transpose(2, 0, 1, 3).reshape(M, nsteps * 3 * g))
    chunk = max(1, CHUNK_BYTES // (8 * Bm.shape[1]))
    for start in range(0, N, chunk):
        stop = min(N, start + chunk)
        C = (X[start:stop] @ Bm).reshape(stop - start, nsteps, 3, g)
        impl.rk4_products(C, T, H, out[start:stop])
    return out

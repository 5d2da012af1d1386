"""Numeric kernel backend selection.

The compiled Cython backend is used when available; set DARWINBOUNDS_PURE=1
to force the pure numpy fallback (useful for benchmarking and debugging).
The compiled measurement kernel handles kept dimensions up to 16; larger
problems route to the pure implementation call by call.
"""

import os

from . import _pure

if os.environ.get("DARWINBOUNDS_PURE"):
    _impl = _pure
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
rank_two_entropy = _impl.rank_two_entropy
rank_two_entropy_batch = _impl.rank_two_entropy_batch

if BACKEND == "compiled":
    _LIMIT = _impl.MAX_KEPT_DIM

    def measured_mutual_info(rho4, basis):
        impl = _impl if rho4.shape[0] <= _LIMIT else _pure
        return impl.measured_mutual_info(rho4, basis)

    def measured_mutual_info_batch(rho4, bases):
        impl = _impl if rho4.shape[0] <= _LIMIT else _pure
        return impl.measured_mutual_info_batch(rho4, bases)

else:
    measured_mutual_info = _impl.measured_mutual_info
    measured_mutual_info_batch = _impl.measured_mutual_info_batch

__all__ = [
    "BACKEND",
    "measured_mutual_info",
    "measured_mutual_info_batch",
    "rank_two_entropy",
    "rank_two_entropy_batch",
]

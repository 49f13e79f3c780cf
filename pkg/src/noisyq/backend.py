"""Selection between the compiled and pure-python update kernels.

The compiled extension is preferred when it imported cleanly; otherwise the
numpy implementation is used.  Setting ``NOISYQ_BACKEND`` to ``compiled`` or
``python`` forces the choice (and fails loudly if the forced backend is
unavailable).
"""

from __future__ import annotations

import os
from types import ModuleType

from noisyq import _kernels_py

BACKEND_CHOICES = ("compiled", "python")


def get_backend(name: str) -> ModuleType:
    """Return the kernel module for ``name``, raising if it cannot load."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from noisyq import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}, expected one of {BACKEND_CHOICES}")


def _select() -> ModuleType:
    forced = os.environ.get("NOISYQ_BACKEND", "").strip()
    if forced:
        return get_backend(forced)
    try:
        return get_backend("compiled")
    except ImportError:
        return _kernels_py


_impl = _select()

backend_name: str = _impl.BACKEND_NAME
apply_1q_unitary = _impl.apply_1q_unitary
apply_1q_kraus = _impl.apply_1q_kraus
apply_cx = _impl.apply_cx

"""Rendering kernel backends.

The compiled extension is preferred when it imported cleanly; the
pure-Python fallback is always available. FRACTALMARCH_BACKEND
("cython"/"python") forces a choice, as does the explicit ``name``
argument. Both backends produce bit-identical framebuffers.
"""

from __future__ import annotations

import os

from . import _purepy

try:
    from . import _core
except ImportError:  # extension not built; the fallback covers everything
    _core = None

ENV_BACKEND = "FRACTALMARCH_BACKEND"


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _core is not None else ("python",)


def get_backend(name: str | None = None):
    """Backend module by name, or the best available when name is None."""
    if name is None:
        name = os.environ.get(ENV_BACKEND, "").strip().lower() or "auto"
    name = name.lower()
    if name == "auto":
        return _core if _core is not None else _purepy
    if name == "cython":
        if _core is None:
            raise RuntimeError(
                "compiled kernel is not available; reinstall with a C compiler "
                "or set FRACTALMARCH_BACKEND=python"
            )
        return _core
    if name == "python":
        return _purepy
    raise ValueError(f"unknown backend {name!r} (expected 'cython' or 'python')")


def default_backend_name() -> str:
    return get_backend().NAME

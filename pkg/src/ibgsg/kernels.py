"""Integrator backend selection.

The compiled extension is preferred when importable; the pure-Python twin is
the fallback.  ``IBGSG_KERNEL=pure`` (or ``compiled``) forces a backend, which
the benchmark and the twin tests use.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build environment
    _compiled = None

_BACKENDS = {"pure": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def get_backend(name: str = "auto"):
    """Return a kernel module by name; ``auto`` prefers the compiled one."""
    if name == "auto":
        return _BACKENDS.get("compiled", _kernels_py)
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable kernel backend {name!r}; "
            f"have {sorted(_BACKENDS)}"
        ) from None


def available_backends():
    return sorted(_BACKENDS)


active = get_backend(os.environ.get("IBGSG_KERNEL", "auto"))

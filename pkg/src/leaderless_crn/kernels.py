"""Kernel selection: compiled extensions when built, pure Python otherwise.

Set ``LEADERLESS_CRN_KERNEL=python`` to force the fallback.
"""

import os

from . import _ssa_py, _explore_py

try:
    from . import _ssa as _ssa_c
except ImportError:  # extension not built
    _ssa_c = None

try:
    from . import _explore as _explore_c
except ImportError:
    _explore_c = None

__all__ = ["ssa_kernel", "explore_kernel", "compiled_available", "default_kernel"]


def compiled_available() -> bool:
    return _ssa_c is not None and _explore_c is not None


def default_kernel() -> str:
    forced = os.environ.get("LEADERLESS_CRN_KERNEL", "").strip().lower()
    if forced in ("python", "compiled"):
        return forced
    return "compiled" if compiled_available() else "python"


def _resolve(name):
    name = (name or default_kernel()).lower()
    if name not in ("python", "compiled"):
        raise ValueError(f"unknown kernel {name!r}")
    return name


def ssa_kernel(name=None):
    name = _resolve(name)
    if name == "compiled":
        if _ssa_c is None:
            raise ImportError("compiled SSA kernel is not built")
        return _ssa_c.run_ssa
    return _ssa_py.run_ssa


def explore_kernel(name=None):
    name = _resolve(name)
    if name == "compiled":
        if _explore_c is None:
            raise ImportError("compiled exploration kernel is not built")
        return _explore_c.explore
    return _explore_py.explore

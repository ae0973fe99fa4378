"""Backend selection for the counting kernels.

The compiled extension is preferred; the numpy fallback keeps the package
fully functional (slower) when the extension is unavailable.  Both expose
`count_unit_n2` / `count_unit_n3` with identical semantics, and the test
suite checks they agree count-for-count.
"""

from __future__ import annotations

from . import _kernel_py

try:
    from . import _kernel  # compiled extension

    DEFAULT_BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    _kernel = None
    DEFAULT_BACKEND = "python"

_BACKENDS = {"compiled": _kernel, "python": _kernel_py}


def get_backend(name: str | None = None):
    """Resolve a backend module by name ('auto', 'compiled', 'python')."""
    if name in (None, "auto"):
        name = DEFAULT_BACKEND
    mod = _BACKENDS.get(name)
    if mod is None:
        raise ValueError(f"backend {name!r} is not available")
    return name, mod

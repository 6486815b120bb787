"""Band-limited Krotov optimal control for finite quantum systems.

Thin Python layer over the C++ core. The extension module lives inside the
package when installed via pip, or on PYTHONPATH when running from a plain
CMake build tree.
"""

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as _core  # noqa: F401
except ImportError:  # build-tree layout: _core.so sits next to the package dir
    from _core import *  # noqa: F401,F403
    import _core as _core  # noqa: F401

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "0.1.0"

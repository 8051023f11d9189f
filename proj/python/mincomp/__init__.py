"""Matrix completion toolkit bindings.

Everything lives in the compiled ``_core`` module; this package re-exports
it. When running from a build tree (package not installed), set
``MINCOMP_CORE_DIR`` to the directory containing the compiled module.
"""

try:
    from . import _core  # noqa: F401
except ImportError:
    import importlib.util as _ilu
    import os as _os
    import sys as _sys

    _dir = _os.environ.get("MINCOMP_CORE_DIR")
    if not _dir:
        raise
    _candidates = [
        _name
        for _name in _os.listdir(_dir)
        if _name.startswith("_core") and _name.endswith((".so", ".pyd"))
    ]
    if not _candidates:
        raise
    _spec = _ilu.spec_from_file_location(
        __name__ + "._core", _os.path.join(_dir, _candidates[0])
    )
    _core = _ilu.module_from_spec(_spec)
    _sys.modules[_spec.name] = _core
    _spec.loader.exec_module(_core)

from ._core import *  # noqa: F401,F403,E402

__version__ = "0.1.0"

"""Kernel backend selection.

The hot loops live in ``_core_c.py``, written in Cython pure-Python mode. When
the compiled extension is available it shadows the source file on import;
otherwise the same file is loaded through the interpreter. Set
``OCCLUSIM_KERNEL`` to ``compiled`` or ``interpreted`` to force a backend
(default ``auto``: compiled if built, interpreted otherwise).
"""

import importlib.util
import os
from pathlib import Path

__all__ = ["backend_name", "render_all", "ir_scan", "step_world",
           "load_interpreted", "load_compiled"]


def load_interpreted():
    """Load the kernel source through the interpreter, bypassing the extension."""
    path = Path(__file__).with_name("_core_c.py")
    spec = importlib.util.spec_from_file_location("occlusim._kernels._core_py", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def load_compiled():
    """Load the compiled extension; raises ImportError when not built."""
    from . import _core_c as mod
    if not getattr(mod, "COMPILED", False):
        raise ImportError("occlusim._kernels._core_c extension is not built")
    return mod


_choice = os.environ.get("OCCLUSIM_KERNEL", "auto")
if _choice == "interpreted":
    _mod = load_interpreted()
elif _choice == "compiled":
    _mod = load_compiled()
elif _choice == "auto":
    try:
        _mod = load_compiled()
    except ImportError:
        _mod = load_interpreted()
else:
    raise RuntimeError(f"OCCLUSIM_KERNEL must be auto, compiled or interpreted, "
                       f"got {_choice!r}")

backend_name = "compiled" if _mod.COMPILED else "interpreted"
render_all = _mod.render_all
ir_scan = _mod.ir_scan
step_world = _mod.step_world

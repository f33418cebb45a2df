"""Kernel backend selection: compiled extension if built, numpy otherwise.

Set ``BVM_UQ_KERNELS=python`` to force the numpy fallback (used by the
benchmark to compare both lanes).
"""

import os

if os.environ.get("BVM_UQ_KERNELS", "").lower() == "python":
    from . import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl

        COMPILED = False

apply_flux = _impl.apply_flux
cg_flux = _impl.cg_flux

__all__ = ["apply_flux", "cg_flux", "COMPILED"]

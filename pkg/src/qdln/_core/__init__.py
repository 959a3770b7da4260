"""Hot kernels: compiled Cython extension with a pure-numpy fallback.

The compiled backend is used when importable. Set ``QDLN_PURE_PYTHON=1``
to force the fallback (used by the benchmark and the equivalence tests).
"""

import os

from . import pure

BACKEND = "python"
if not os.environ.get("QDLN_PURE_PYTHON"):
    try:
        from . import _coinc, _yee
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"

if BACKEND == "cython":
    update_h_te = _yee.update_h_te
    update_e_te = _yee.update_e_te
    update_h_tm = _yee.update_h_tm
    update_e_tm = _yee.update_e_tm
    coincidence_counts = _coinc.coincidence_counts
else:
    update_h_te = pure.update_h_te
    update_e_te = pure.update_e_te
    update_h_tm = pure.update_h_tm
    update_e_tm = pure.update_e_tm
    coincidence_counts = pure.coincidence_counts


def get_backend(name=None):
    """Return a namespace of kernels for ``"cython"`` or ``"python"``.

    ``None`` selects the active import-time backend.
    """
    import types

    name = name or BACKEND
    if name == "python":
        mod = pure
    elif name == "cython":
        from . import _coinc, _yee  # raises ImportError if not built
        mod = types.SimpleNamespace(
            update_h_te=_yee.update_h_te, update_e_te=_yee.update_e_te,
            update_h_tm=_yee.update_h_tm, update_e_tm=_yee.update_e_tm,
            coincidence_counts=_coinc.coincidence_counts,
        )
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod

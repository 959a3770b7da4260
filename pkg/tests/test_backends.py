import os
import subprocess
import sys

import numpy as np
import pytest

from qdln import _core
from qdln._core import get_backend, pure

needs_ext = pytest.mark.skipif(_core.BACKEND != "cython", reason="compiled kernels not built")


@needs_ext
@pytest.mark.parametrize("seed", range(10))
def test_coincidence_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    a = np.sort(rng.uniform(0, 1e-4, 5000))
    b = np.sort(rng.uniform(0, 1e-4, 5000))
    ref = pure.coincidence_counts(a, b, 128e-12, 156)
    assert np.array_equal(get_backend("cython").coincidence_counts(a, b, 128e-12, 156), ref)


def test_fallback_pipeline_matches_active_backend():
    from qdln.photonstats import g2_pipeline

    here = g2_pipeline(0.8, events=2e5, seed=3).histogram.counts
    env = dict(os.environ, QDLN_PURE_PYTHON="1")
    code = ("import sys; from qdln.photonstats import g2_pipeline; "
            "sys.stdout.write(g2_pipeline(0.8, events=2e5, seed=3).histogram.counts.tobytes().hex())")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert bytes.fromhex(r.stdout) == here.tobytes()


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("fortran")


def test_pure_fallback_selected_by_environment():
    env = dict(os.environ, QDLN_PURE_PYTHON="1")
    code = "from qdln import _core; print(_core.BACKEND)"
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert r.stdout.strip() == "python"

import os
import subprocess
import sys

from implicit_al import _jit


def run_flagged(code, flag):
    env = dict(os.environ, IMPLICIT_AL_DISABLE_NUMBA=flag)
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout


def test_flag_selects_numpy_path():
    code = (
        "from implicit_al import _jit, kernels;"
        "from implicit_al.bench import run_grid;"
        "r = run_grid('implicit', 3);"
        "print(_jit.HAVE_NUMBA, kernels.project_vc_many is kernels.project_vc_numpy,"
        " [x.classified for x in r].count('global'))"
    )
    assert run_flagged(code, "1").split() == ["False", "True", "9"]
    assert run_flagged(code, "0").split()[0] == str(_jit.HAVE_NUMBA)


def test_identity_decorator_when_disabled():
    code = (
        "from implicit_al._jit import njit;"
        "f = lambda x: x;"
        "print(njit(f) is f, njit(cache=True)(f) is f)"
    )
    assert run_flagged(code, "1").split() == ["True", "True"]

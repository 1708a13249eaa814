"""Smoke test for the Python extension.

Build first:
    cargo build --release -p stark-window-py --features extension-module
then run:
    python3 python/smoke_test.py
"""

import importlib
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libstark_window_py.so"
        if lib.exists():
            break
    else:
        sys.exit("extension not built; see the module docstring")
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "stark_window_py.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("stark_window_py")


def main():
    sw = load()

    p = sw.WaveguideParams(F=0.0, d=math.pi, a=1.0)
    assert [round(l.eigenvalue, 12) for l in sw.levels(p, "dirichlet", 3)] == [1.0, 4.0, 9.0]
    ground = sw.levels(p, "mixed", 1)[0]
    assert abs(ground.eigenvalue - 0.25) < 1e-12
    assert abs(ground.value(math.pi)) < 1e-12

    lower, upper = sw.window(p)
    assert (lower, upper) == (0.25, 1.0)
    a1 = sw.sufficient_radius(p, 1)
    assert abs(a1 - 2.404825557695773 / math.sqrt(0.75)) < 1e-10

    rows = sw.figure_curves(sw.WaveguideParams(0.01, 1.0), 0.5, 10.0, 50)
    assert len(rows) == 50 and len(rows[0][1]) == 3

    cert = sw.certify(sw.WaveguideParams(1.0, 1.0, 1.0))
    assert cert["q_value"] < 0 and cert["valid"]

    q = sw.WaveguideParams(1.0, 1.0, 1.0)
    res = sw.solve2d(q, "truncated", 1, 16, 16)
    lo, hi = sw.window(q)
    assert res["bound_state"][0]
    assert lo - res["error_estimate"][0] <= res["values"][0] < hi

    try:
        sw.WaveguideParams(F=-1.0, d=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative field accepted")

    print("smoke test passed:", p, "a*_1 =", a1, "Q =", cert["q_value"])


if __name__ == "__main__":
    main()

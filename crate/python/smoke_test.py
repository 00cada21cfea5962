"""Smoke test for the Python bindings.

Build first:  pip install --no-build-isolation -e crates/rarefaction-py
Run:          python python/smoke_test.py
"""

import json
import math
import tempfile
from pathlib import Path

import rarefaction_py as r


def main():
    fan = r.solve_riemann((1.0, -0.2, 0.0), (1.0, 0.2, 0.0))
    assert fan["region"] == "IV", fan
    assert abs(fan["middle"]["rho"] - 0.81) < 1e-10

    # invariants: c = rho for gamma = 2, k0 = 1/2
    wbar, w, psi2 = r.invariants(1.0, 0.5, 0.25)
    assert math.isclose(wbar, 1.25) and math.isclose(w, 0.75) and psi2 == -0.25

    prof = r.sample_fan((1.0, -0.5, 0.0), (1.0, 0.5, 0.0), [-2.0, 0.0, 2.0])
    assert prof[0] == (1.0, -0.5, 0.0) and prof[2] == (1.0, 0.5, 0.0)

    try:
        r.invariants(1.0, 0.0, gamma=4.0)
    except ValueError:
        pass
    else:
        raise AssertionError("gamma outside (1, 3) accepted")

    cfg = "[grid]\nnx1 = 64\nnx2 = 8\nt_end = 0.2\n[output]\ntimes = [0.1]\n[data]\nn_theta = 16\norder = 2\n"
    with tempfile.TemporaryDirectory() as d:
        s = r.simulate2d(cfg, d)
        assert s["failure"] is None and s["max_plane_asymmetry"] < 1e-12
        assert (Path(d) / "summary.json").exists()
        rep = r.build_data(cfg, d)
        assert max(e["measured"] for e in rep["entries"]) < 1e-12
        fr = r.trace_fronts(cfg, d)
        assert fr["all_reached"]
        ent = r.verify_entropy(cfg, d)
        assert ent["integral_alpha"][0] == 0.0
        json.loads((Path(d) / "entropy_report.json").read_text())

    assert "[gas]" in r.default_config()
    print("python smoke test: ok")


if __name__ == "__main__":
    main()

"""The pure-NumPy fallback (CBFTELEOP_NO_NUMBA=1) must agree with the JIT path."""

import json
import os
import subprocess
import sys

import numpy as np

from cbfteleop import load_world, world_to_barriers
from cbfteleop import kernels

_SCRIPT = r"""
import json
import numpy as np
from cbfteleop import load_world, world_to_barriers
from cbfteleop import kernels
from cbfteleop.accel import USING_NUMBA

world = load_world("default")
bs = world_to_barriers(world)
rng = np.random.default_rng(77)
out = {"using_numba": USING_NUMBA, "results": []}
for _ in range(50):
    q = rng.uniform([0.3, 0.3], [11.7, 8.7])
    v = rng.normal(0, 1.5, 2)
    u_ref = rng.normal(0, 8, 2)
    u, margins, a0, a1, nact, relaxed, slack = kernels.filter_tick(
        bs.params, q[0], q[1], v[0], v[1], u_ref[0], u_ref[1], 2.0, 1e4
    )
    out["results"].append([float(u[0]), float(u[1]), float(min(margins)), int(relaxed)])
print(json.dumps(out))
"""


def _run(no_numba: bool) -> dict:
    env = dict(os.environ)
    env["CBFTELEOP_NO_NUMBA"] = "1" if no_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-c", _SCRIPT], env=env, capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_fallback_matches_jit():
    jit = _run(no_numba=False)
    plain = _run(no_numba=True)
    assert jit["using_numba"] is True
    assert plain["using_numba"] is False
    a = np.array(jit["results"])
    b = np.array(plain["results"])
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)

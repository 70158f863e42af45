"""The numba kernels and their plain-Python fallback give identical results."""

import json
import os
import subprocess
import sys

import numpy as np

from latred import _kernels as K

SCRIPT = r"""
import json
from latred.census import small_trees
from latred.cohomology import assemble_graded_module, euler_capped_eu
from latred.lattice import lattice_data
from latred.laufer import suggest_bad_set
from latred.reduction import build_weight_table
from latred.series import reduced_series, eu_from_series
from latred.oracle import full_lattice_cohomology
from latred import _kernels
out = {"numba": _kernels.USE_NUMBA, "rows": []}
for g in small_trees(4)[::9]:
    bad = suggest_bad_set(g)
    for c in lattice_data(g).classes()[:2]:
        t = build_weight_table(g, c, bad)
        mods = assemble_graded_module(t)
        full = full_lattice_cohomology(g, c)
        row = [g.key(), list(t.corner), t.weights.tolist(), euler_capped_eu(mods),
               [m.signature()[1:] for m in full]]
        if bad.nu:
            row.append(eu_from_series(reduced_series(g, c, bad, t.corner), t))
        out["rows"].append(row)
print(json.dumps(out, default=str))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("LATRED_DISABLE_NUMBA", None)
    if disable:
        env["LATRED_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True,
                         env=env, check=True)
    return json.loads(out.stdout)


def test_fallback_matches_numba():
    fast, slow = _run(False), _run(True)
    assert fast["numba"] and not slow["numba"]
    assert len(fast["rows"]) > 20
    assert fast["rows"] == slow["rows"]


def test_monotone_reach_small():
    # w-bar on a 2x2 grid: w(0,0)=0, w(0,1)=1, w(1,0)=-1, w(1,1)=0
    w = np.array([0, 1, -1, 0], np.int64)
    shape = np.array([2, 2], np.int64)
    steps = K.reduced_steps(w, shape)
    assert steps.tolist() == [2, 0, 2, 0]
    assert K.monotone_reach(steps, shape, np.array([0, 0]), np.array([0, 1]))
    assert K.monotone_reach(steps, shape, np.array([1, 0]), np.array([1, 1]))
    assert not K.monotone_reach(steps, shape, np.array([0, 0]), np.array([1, 1]))
    good = K.backward_good(steps, shape, np.array([1, 1]))
    assert good.tolist() == [False, False, True, True]

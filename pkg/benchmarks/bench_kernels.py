"""Compare the numba kernels against the plain-Python fallback.

Each backend runs in its own interpreter because the switch
(LATRED_DISABLE_NUMBA) is read at import time.  Usage::

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
import numpy as np
from latred import _kernels as K
from latred.cohomology import assemble_graded_module
from latred.graph import fix3
from latred.lattice import lattice_data
from latred.laufer import XCycleCache, verify_bad_set
from latred.oracle import full_lattice_cohomology
from latred.census import small_trees
from latred.series import projected_series, _PROJ

repeat = int(sys.argv[1])
g = fix3()
c = lattice_data(g).canonical()
b = verify_bad_set(g, (1, 6))


def xcycles():
    cache = XCycleCache(g, c, b)
    cache.ensure((60, 60))
    return cache


def cohomology():
    cache = XCycleCache(g, c, b)
    w = cache.weights((40, 40))
    from latred.oracle import modules_from_weights
    return modules_from_weights(w)


def steps():
    cache = XCycleCache(g, c, b)
    cache.ensure((120, 120))
    st = K.reduced_steps(cache.w, cache.shape)
    return K.backward_good(st, cache.shape, np.array([119, 119]))


def oracle():
    h = small_trees(5)[-40:]
    for gg in h:
        for cc in lattice_data(gg).classes()[:2]:
            full_lattice_cohomology(gg, cc)


def series():
    _PROJ.clear()
    return projected_series(g, (1, 6), (40, 40))


out = {"numba": K.USE_NUMBA}
for name, fn in [("xcycle_table", xcycles), ("steps+backward_good", steps),
                 ("persistence", cohomology), ("oracle_sweep", oracle),
                 ("zeta_convolve", series)]:
    fn()  # warm-up (includes JIT compilation when numba is on)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("LATRED_DISABLE_NUMBA", None)
    if disable:
        env["LATRED_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'kernel':<22}{'numba [s]':>12}{'fallback [s]':>14}{'speed-up':>10}")
    for k in fast:
        if k == "numba":
            continue
        print(f"{k:<22}{fast[k]:>12.4f}{slow[k]:>14.4f}{slow[k] / fast[k]:>10.1f}")


if __name__ == "__main__":
    main()

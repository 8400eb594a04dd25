"""Numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--atoms 16] [--repeat 5]

Kernel timings call both implementations in one process; the end-to-end
timings run the same workload in subprocesses with and without
``BAODE_DISABLE_NUMBA=1``.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from baode import _kernels as K

WORKLOAD = """
import time
t = time.perf_counter()
from baode.amalgam import AmalgamationInstance, superamalgamate, verify_supap
from baode.dilation import cs_dilation, verify_well_definedness
from baode.generators import enumerate_instances
for f, h in enumerate_instances(1, 2):
    inst = AmalgamationInstance(f, h)
    verify_supap(inst, superamalgamate(inst))
verify_well_definedness(cs_dilation(2, 4, 2))
print(time.perf_counter() - t)
"""


def kernel_rows(n, repeat):
    rng = np.random.default_rng(0)
    images = rng.integers(0, 1 << n, size=n).astype(np.int64)
    gmap = rng.integers(0, n, size=n).astype(np.int64)
    xs = np.arange(1 << n, dtype=np.int64)
    cases = [
        ("apply_additive", lambda impl: impl(images, xs)),
        ("apply_preimage", lambda impl: impl(gmap, xs)),
        ("additive_table", lambda impl: impl(images)),
        ("popcount", lambda impl: impl(xs)),
    ]
    rows = []
    for name, call in cases:
        np_fn = getattr(K, f"{name}_numpy")
        nb_fn = getattr(K, f"{name}_numba", None)
        t_np = min(timeit.repeat(lambda: call(np_fn), number=1, repeat=repeat))
        t_nb = None
        if nb_fn is not None:
            call(nb_fn)  # compile
            assert np.array_equal(call(nb_fn), call(np_fn))
            t_nb = min(timeit.repeat(lambda: call(nb_fn), number=1, repeat=repeat))
        rows.append((name, t_np, t_nb))
    return rows


def end_to_end(disable):
    env = dict(os.environ)
    if disable:
        env["BAODE_DISABLE_NUMBA"] = "1"
    else:
        env.pop("BAODE_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--atoms", type=int, default=16, help="atoms of the random operator (2^atoms elements)")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-end-to-end", action="store_true")
    args = p.parse_args(argv)
    print(f"kernels on {1 << args.atoms} elements (best of {args.repeat})")
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, t_np, t_nb in kernel_rows(args.atoms, args.repeat):
        if t_nb is None:
            print(f"{name:<16}{t_np * 1e3:>12.3f}{'n/a':>12}{'':>10}")
        else:
            print(f"{name:<16}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")
    if not args.skip_end_to_end:
        # run numba twice so the first, which may fill the compile cache, is discarded
        end_to_end(False)
        t_nb = end_to_end(False)
        t_np = end_to_end(True)
        print("end to end (amalgams of all 1-dim instances up to 2 atoms, Cs_2(2) in Cs_4(2) sweep)")
        print(f"  numpy {t_np:.2f}s  numba {t_nb:.2f}s")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the compiled convolution kernels against the numpy fallback.

Usage:
    python bench/bench_kernels.py [--full]

The default sizes mirror what the harness actually pushes through the
verifier (small clips); --full adds the full-resolution 224x224x30 input.
Build the extension with `pip install -e . --no-build-isolation`; when it
is missing only the numpy column runs.
"""

import argparse
import time

import numpy as np

from edgeguard.verifier import kernels


def conv_case(c_in, c_out, t, h, w, k=3, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((c_in, t, h, w))
    wgt = rng.standard_normal((c_out, c_in, k, k, k))
    b = rng.standard_normal(c_out)
    return x, wgt, b


def time_fn(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--full", action="store_true",
                        help="include the full-resolution 224x224x30 case")
    args = parser.parse_args()

    cases = [
        ("edge clip  1->16  30x64x48", conv_case(1, 16, 30, 64, 48)),
        ("edge clip 16->32  30x64x48", conv_case(16, 32, 30, 64, 48)),
        ("small     1->16  30x32x32", conv_case(1, 16, 30, 32, 32)),
    ]
    if args.full:
        cases.append(("full-res  1->16 30x224x224", conv_case(1, 16, 30, 224, 224)))

    have_ext = False
    try:
        from edgeguard.verifier import _kernels as ext
        have_ext = True
    except ImportError:
        print("compiled extension not built; numpy fallback only\n")

    print("%-28s %12s %12s %8s" % ("case", "numpy", "compiled", "ratio"))
    for name, (x, w, b) in cases:
        t_numpy, out_numpy = time_fn(kernels.conv3d_numpy, x, w, b, 1)
        line = "%-28s %10.1f ms" % (name, t_numpy * 1e3)
        if have_ext:
            xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (1, 1)))
            t_ext, out_ext = time_fn(ext.conv3d_padded, xp, w, b)
            err = float(np.max(np.abs(out_ext - out_numpy)))
            assert err < 1e-9, "backends disagree by %g" % err
            line += " %10.1f ms %7.2fx" % (t_ext * 1e3, t_numpy / t_ext)
        print(line)

    # dense / pooling are negligible next to the convolutions but the
    # comparison keeps both backends honest
    rng = np.random.default_rng(1)
    v = rng.standard_normal(512)
    wm = rng.standard_normal((256, 512))
    bb = rng.standard_normal(256)
    t_numpy, _ = time_fn(kernels.dense_numpy, v, wm, bb, repeat=10)
    line = "%-28s %10.3f ms" % ("dense 512->256", t_numpy * 1e3)
    if have_ext:
        from edgeguard.verifier import _kernels as ext
        t_ext, _ = time_fn(ext.dense, v, wm, bb, repeat=10)
        line += " %10.3f ms %7.2fx" % (t_ext * 1e3, t_numpy / t_ext)
    print(line)


if __name__ == "__main__":
    main()

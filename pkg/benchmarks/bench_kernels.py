"""Compiled vs pure-numpy footprint quadrature.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Times ``projected_lengths`` for a default 8 x 4 array (one layout per call,
as in the optimiser loop) and for a batch of 256 tentacles, and checks the
two backends agree.
"""

import argparse
import timeit

import numpy as np

from softarray import _quadrature_py
from softarray.geometry import ArrayConstants

try:
    from softarray import _quadrature as _compiled
except ImportError:
    _compiled = None


def _cases():
    consts = ArrayConstants()
    rng = np.random.default_rng(0)
    amps = rng.uniform(0, consts.amplitude_bound, 8)
    freqs = np.minimum(rng.uniform(0, consts.spatial_freq_bound, 8), 1 / amps)
    big_a = rng.uniform(0, consts.amplitude_bound, 256)
    big_v = np.minimum(rng.uniform(0, consts.spatial_freq_bound, 256), 1 / big_a)
    return consts, {"layout (8 x 4)": (amps, freqs), "batch (256 x 4)": (big_a, big_v)}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=200)
    args = p.parse_args(argv)

    consts, cases = _cases()
    backends = {"python": _quadrature_py.projected_lengths}
    if _compiled is not None:
        backends["cython"] = _compiled.projected_lengths
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'case':<18}{'backend':<10}{'per call':>14}")
    for name, (a, v) in cases.items():
        ref = None
        times = {}
        for label, fn in backends.items():
            out = fn(a, v, consts.arc_positions, consts.phase, 1e-10)
            if ref is None:
                ref = out
            else:
                np.testing.assert_allclose(out, ref, rtol=1e-12)
            t = min(timeit.repeat(lambda: fn(a, v, consts.arc_positions, consts.phase, 1e-10),
                                  number=args.repeat, repeat=3)) / args.repeat
            times[label] = t
            print(f"{name:<18}{label:<10}{t * 1e6:>11.1f} us")
        if len(times) == 2:
            print(f"{'':<18}speed-up  {times['python'] / times['cython']:>11.1f} x")


if __name__ == "__main__":
    main()

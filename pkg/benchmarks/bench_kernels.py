"""Compare the compiled F_p row reduction with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 60 120 240] [--repeat 3]

Also times one end-to-end homology computation under each backend (the
fallback is selected in a subprocess through FIMOD_PURE_PYTHON=1).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from fimod import _kernels_py
from fimod import kernels

END_TO_END = r"""
import time
from fimod import io, homology, kernels
pf = io.parse_presentation_text('''field Fp:3
window 8
gen a 2
gen b 1
rel r : 2->3:(1,2) a - 2->3:(2,3) a + 1->3:(3) b
''')
t = time.perf_counter()
v = io.materialize(pf)
homology.homology(v, 3)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def best_of(fn, A, p, repeat):
    times = []
    for _ in range(repeat):
        work = A.copy()
        t = time.perf_counter()
        fn(work, p)
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[60, 120, 240])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not kernels.compiled_available():
        print("compiled extension not built; only the fallback can be timed")
    from fimod import _kernels  # noqa: F401  (raises if missing, after the notice)

    rng = np.random.default_rng(args.seed)
    print(f"{'size':>6} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for n in args.sizes:
        A = np.ascontiguousarray(rng.integers(0, args.p, size=(n, n + n // 2)), dtype=np.int64)
        a = _kernels.rref_modp(A.copy(), args.p)
        b = _kernels_py.rref_modp(A.copy(), args.p)
        assert list(a) == list(b), "backends disagree on pivots"
        tc = best_of(_kernels.rref_modp, A, args.p, args.repeat)
        tp = best_of(_kernels_py.rref_modp, A, args.p, args.repeat)
        print(f"{n:>6} {tc:>10.4f} {tp:>10.4f} {tp / tc:>8.1f}")

    print("\nend to end (materialize + homology up to H_3 over F_3):")
    for pure in ("0", "1"):
        env = dict(os.environ, FIMOD_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env,
                             capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:>8}: {float(secs):.3f} s")


if __name__ == "__main__":
    main()

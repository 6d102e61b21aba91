"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from msdp import kernels
from msdp.adapters import ECOLI_FRAGMENTS, DfaInstance, adc_problem, default_adc_instance, dfa_problem


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def sw_matrix(impl, frags):
    return [[impl.smith_waterman(a, b, 1.0, -1.0, -1.0) for b in frags] for a in frags]


def cases():
    adc = adc_problem(default_adc_instance())
    dfa = dfa_problem(DfaInstance(ECOLI_FRAGMENTS))
    ones = np.ones((adc.N, adc.M), dtype=bool)
    rng = np.random.default_rng(0)
    long_reads = ["".join(rng.choice(list("ACGT"), 120)) for _ in range(12)]
    return [
        ("es_vector ADC 4^12", lambda k: k.es_vector(adc.unary, adc.pairw, ones, adc.csf.cost, adc.csf.capacity, True)),
        ("es_permutation DFA 10!", lambda k: k.es_permutation(dfa.unary, dfa.pairw, np.ones((10, 10), dtype=bool), 10)),
        ("smith_waterman 12x12 reads of 120", lambda k: sw_matrix(k, long_reads)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'kernel':<36}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for name, fn in cases():
        tc, out_c = best_time(lambda: fn(kernels.compiled), args.repeat)
        tp, out_p = best_time(lambda: fn(kernels.fallback), args.repeat)
        assert out_c == out_p, f"{name}: backends disagree"
        print(f"{name:<36}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()

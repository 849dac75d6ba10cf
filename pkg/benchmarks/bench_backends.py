"""numba vs numpy backends: sieve to a limit, then kernel and power sums over
all primes.  Each backend runs in its own process (TGROUPS_NO_NUMBA=1 picks
numpy) and must produce identical results.

    python3 benchmarks/bench_backends.py [--limit N] [--repeat R]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from tgroups import _accel
from tgroups.primes import PrimeRange
limit, repeat = int(sys.argv[1]), int(sys.argv[2])
# warm-up also triggers jit compilation
PrimeRange(10 ** 5, cache_path=None).count_primes(10 ** 5)
_accel.kernel_sum(PrimeRange(10 ** 4).primes_between(2, 10 ** 4), 1.0, 6.28)
best = {}
for _ in range(repeat):
    t = time.perf_counter(); s = PrimeRange(limit, cache_path=None); pi = s.pi_int(limit)
    best["sieve"] = min(best.get("sieve", 1e9), time.perf_counter() - t)
    p = s.primes_between(2, limit)
    t = time.perf_counter(); ks = _accel.kernel_sum(p, 1.0, 6.283185307179586)
    best["kernel_sum"] = min(best.get("kernel_sum", 1e9), time.perf_counter() - t)
    t = time.perf_counter(); ps = _accel.power_sum(p, 0.5)
    best["power_sum"] = min(best.get("power_sum", 1e9), time.perf_counter() - t)
print(json.dumps({"backend": _accel.BACKEND, "pi": pi, "kernel_sum": ks.hex(), "power_sum": ps.hex(),
                  "seconds": best}))
"""


def run(no_numba: bool, limit: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("TGROUPS_NO_NUMBA", None)
    if no_numba:
        env["TGROUPS_NO_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", CHILD, str(limit), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=10 ** 8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    nb, np_ = run(False, args.limit, args.repeat), run(True, args.limit, args.repeat)
    same = all(nb[k] == np_[k] for k in ("pi", "kernel_sum", "power_sum"))
    print(f"limit={args.limit} pi={nb['pi']} identical_results={same}")
    for task in ("sieve", "kernel_sum", "power_sum"):
        a, b = nb["seconds"][task], np_["seconds"][task]
        print(f"{task:11s} {nb['backend']}={a:.3f}s {np_['backend']}={b:.3f}s speedup={b / a:.1f}x")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled kernels with the numpy fallback, per kernel and end to end.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import statistics
import time

import numpy as np

from factorhd import kernels
from factorhd.bench import ExperimentConfig, run_experiment


def _best_of(fn, repeat: int, number: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        times.append((time.perf_counter() - t0) / number)
    return min(times)


def kernel_cases(rng: np.random.Generator):
    d = 1500
    rows = rng.choice(np.array([-1, 1], dtype=np.int8), size=(256, d))
    query = rng.integers(-3, 4, d).astype(np.int32)
    combo_rows = rng.choice(np.array([-1, 1], dtype=np.int8), size=(12, d))
    counts = np.array([4, 4, 4], dtype=np.int64)
    u = rng.choice(np.array([-1, 1], dtype=np.int8), size=d)
    return {
        "score_rows 256x1500": lambda k: k.score_rows(rows, query),
        "combo_scores 4x4x4 D=1500": lambda k: k.combo_scores(query, combo_rows, counts),
        "resonator_project 256x1500": lambda k: k.resonator_project(rows, u),
    }


END_TO_END = {
    "rep1 F=3 D=750 M=100": ExperimentConfig(dim=750, num_classes=3, branching=(100,), trials=256),
    "rep3 N=3 F=4 D=2000 M=10": ExperimentConfig(dim=2000, num_classes=4, branching=(10,), num_objects=3, trials=128),
    "resonator F=3 D=1500 M=40": ExperimentConfig(model="resonator", dim=1500, num_classes=3, branching=(40,), trials=32),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", help="also write results here")
    args = parser.parse_args(argv)

    names = kernels.available_backends()
    if "cython" not in names:
        print("compiled extension unavailable; timing the numpy fallback only")
    results = {"kernels": {}, "end_to_end": {}}
    rng = np.random.default_rng(0)

    print(f"{'kernel':32s}" + "".join(f"{n:>14s}" for n in names) + "   speedup")
    for label, case in kernel_cases(rng).items():
        row = {n: _best_of(lambda: case(kernels.get_backend(n)), args.repeat, 50) for n in names}
        results["kernels"][label] = row
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{label:32s}" + "".join(f"{row[n] * 1e6:12.1f}us" for n in names) + f"   {speed:6.1f}x")

    print(f"\n{'end to end (mean per trial)':32s}" + "".join(f"{n:>14s}" for n in names) + "   speedup")
    before = kernels.BACKEND
    try:
        for label, cfg in END_TO_END.items():
            row = {}
            for n in names:
                kernels.set_backend(n)
                runs = [run_experiment(cfg).mean_wall_time for _ in range(max(1, args.repeat // 2))]
                row[n] = statistics.median(runs)
            results["end_to_end"][label] = row
            speed = row["python"] / row["cython"] if "cython" in row else float("nan")
            print(f"{label:32s}" + "".join(f"{row[n] * 1e3:12.3f}ms" for n in names) + f"   {speed:6.1f}x")
    finally:
        kernels.set_backend(before)

    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Compare the pure-Python interpreter kernel against the Cython-compiled one.

Build the compiled kernel first:

    python setup.py build_ext --inplace

Then:

    python benchmarks/bench_interpreter.py [--repeat N]

Both backends are loaded side by side; workloads are real game payloads
(the shipped levels' hidden suites plus a tight counting loop).
"""

from __future__ import annotations

import argparse
import importlib
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from shipgame.levels import load_level_pack  # noqa: E402
from shipgame.runtime import Budget  # noqa: E402
from shipgame.syntax import parse_program  # noqa: E402

TIGHT_LOOP = """fn test_count() {
    int total = 0;
    int i = 0;
    while (i < 20000) {
        total = total + i % 7;
        i = i + 1;
    }
    assertEquals(59997, total);
}
"""


def load_backends():
    backends = {}
    pure = importlib.import_module("shipgame.runtime.interp")
    backends["pure"] = pure
    try:
        fast = importlib.import_module("shipgame.runtime._interp_speed")
        if str(getattr(fast, "__file__", "")).endswith((".so", ".pyd")):
            backends["compiled"] = fast
        else:
            print("note: _interp_speed exists but is not a compiled extension; skipping")
    except ImportError:
        print("note: compiled kernel not built (python setup.py build_ext --inplace); "
              "benchmarking the pure backend only")
    return backends


def workloads():
    pack = load_level_pack()
    jobs = []
    for spec in pack.levels:
        cut = parse_program(spec.cut_source, "cut", file_id="component.ship")
        test = parse_program(
            spec.hidden_tests, "test",
            externals={c.name: c for c in cut.classes},
        )
        entries = [f.name for f in test.test_functions()]
        jobs.append((f"level{spec.index}-hidden", cut, test, entries))
    loop_cut = parse_program("class Empty {\n    Empty() {\n    }\n}\n", "cut",
                             file_id="component.ship")
    loop_test = parse_program(TIGHT_LOOP, "test")
    jobs.append(("tight-loop", loop_cut, loop_test, ["test_count"]))
    return jobs


def run_backend(backend, jobs, repeat: int) -> dict[str, float]:
    budget = Budget(max_steps=1_000_000, max_wall_ms=60_000)
    timings: dict[str, float] = {}
    for name, cut, test, entries in jobs:
        samples = []
        for _ in range(repeat):
            start = time.perf_counter()
            for entry in entries:
                result = backend.execute(cut, test, entry, budget)
                assert result.verdict == "completed", (name, entry, result.error_message)
            samples.append(time.perf_counter() - start)
        timings[name] = statistics.median(samples)
    return timings


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = load_backends()
    jobs = workloads()
    results = {label: run_backend(mod, jobs, args.repeat) for label, mod in backends.items()}

    names = [job[0] for job in jobs]
    header = f"{'workload':18s}" + "".join(f"{label:>12s}" for label in results)
    if len(results) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name in names:
        row = f"{name:18s}"
        for label in results:
            row += f"{results[label][name] * 1000:>10.2f}ms"
        if len(results) == 2:
            pure_t = results["pure"][name]
            fast_t = results["compiled"][name]
            row += f"{pure_t / fast_t:>9.2f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())

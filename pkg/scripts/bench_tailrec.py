"""Measure tail-call execution: wall time and peak evaluator depth.

The accumulator loop below runs entirely through tail calls, so the peak
depth reported by the evaluator should stay flat while n grows by orders
of magnitude. The non-tail variant is included for contrast at small n.

Usage:
    python scripts/bench_tailrec.py
    python scripts/bench_tailrec.py --sizes 1000 100000 1000000
"""

import argparse
import time

from soda import Interpreter, analyze, parse

SOURCE = """\
class Bench

  @tailrec
  loop (n : Int) (acc : Int) : Int = if n == 0 then acc else loop (n - 1) (acc + n)

  deep (n : Int) : Int = if n == 0 then 0 else 1 + deep (n - 1)

end
"""


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument(
        "--sizes", type=int, nargs="+",
        default=[100, 10_000, 1_000_000],
        help="input sizes for the tail-recursive loop",
    )
    ap.add_argument(
        "--deep-sizes", type=int, nargs="+", default=[100, 2_000],
        help="input sizes for the non-tail variant",
    )
    args = ap.parse_args()

    res = parse(SOURCE, "bench.soda")
    assert res.ok
    analyzed = analyze(res.program)
    assert analyzed.ok
    interp = Interpreter(analyzed)

    print(f"{'variant':8} {'n':>10} {'result':>16} {'peak':>6} {'secs':>8}")
    for n in args.sizes:
        t0 = time.perf_counter()
        out = interp.run_entry("Bench", "loop", (n, 0))
        dt = time.perf_counter() - t0
        print(f"{'loop':8} {n:>10} {out.value:>16} "
              f"{interp.last_peak_depth:>6} {dt:>8.3f}")
    for n in args.deep_sizes:
        t0 = time.perf_counter()
        out = interp.run_entry("Bench", "deep", (n,))
        dt = time.perf_counter() - t0
        print(f"{'deep':8} {n:>10} {out.value:>16} "
              f"{interp.last_peak_depth:>6} {dt:>8.3f}")


if __name__ == "__main__":
    main()

"""Compare the compiled and the pure-Python reduction machine.

    python benchmarks/bench_machine.py [--repeat N]

Each workload is run to completion with both implementations; the table
shows the best wall time, the machine steps and the speed-up.
"""

import argparse
import os
import time

from minicurry.eval import search
from minicurry.eval import _machine as pure
from minicurry.session import Config, Session

try:
    from minicurry.eval import _cmachine as compiled
except ImportError:
    compiled = None

CORPUS = os.path.join(os.path.dirname(__file__), "..", "tests", "corpus")

WORKLOADS = [
    ("peano.mcy", "f1 Z =:= f1 Z", 100000),
    ("peano.mcy", "add x y =:= S (S (S (S (S Z)))) where x, y free", 100000),
    ("dup.mcy", "someDup [1,2,3,4,5,6,7,8,9,3]", 100000),
    ("laststrict.mcy", "lastS [a,b,c,(d :: Nat)] where a,b,c,d free", 100000),
    ("finite.mcy", "aValue :: [Color]", 30000),
]


def run(impl, session, goal, steps):
    core, free = session.compile_goal(goal)
    prog, _ = session.program()
    tree = search.SearchTree(prog, core, max_steps=steps, impl=impl)
    res = search.enumerate_tree(tree, free, search.BFS, None)
    return res


def best(impl, session, goal, steps, repeat):
    times = []
    res = None
    for _ in range(repeat):
        t = time.perf_counter()
        res = run(impl, session, goal, steps)
        times.append(time.perf_counter() - t)
    return min(times), res


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'workload':58} {'steps':>7} {'pure s':>8} {'compiled s':>10} {'speed-up':>8}")
    for file, goal, steps in WORKLOADS:
        s = Session(Config(max_answers=None))
        s.load_file(os.path.join(CORPUS, file))
        tp, rp = best(pure, s, goal, steps, args.repeat)
        if compiled is not None:
            tc, rc = best(compiled, s, goal, steps, args.repeat)
            assert [a.line() for a in rp.answers] == [a.line() for a in rc.answers]
            ratio = f"{tp / tc:7.2f}x"
            tcs = f"{tc:10.3f}"
        else:
            tcs, ratio = f"{'n/a':>10}", f"{'n/a':>8}"
        print(f"{goal[:58]:58} {rp.steps:7d} {tp:8.3f} {tcs} {ratio}")


if __name__ == "__main__":
    main()

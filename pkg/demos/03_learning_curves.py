"""Generate a small database of solved games and compare learners on it.

Run: python demos/03_learning_curves.py [count]
Writes demo_depth.svg in the current directory.
"""
import sys
import time

from onestreet.dataset import build_dataset, build_examples, split
from onestreet.learners import depth_sweep, evaluate, knn_fit
from onestreet.plots import line_chart
from onestreet.representations import Representation

count = int(sys.argv[1]) if len(sys.argv) > 1 else 300
start = time.time()
ds = build_dataset(count=count, master_seed=1)
print(f"{count} games solved in {time.time() - start:.1f}s, "
      f"worst NashConv {max(r.nash_conv for r in ds.records):.1e}")
train, test = split(ds.records, 0.8, seed=0)

# nearest neighbour: memorize solved games and copy the closest one
for rep in (Representation.R1, Representation.R3, Representation.R9):
    te = build_examples(test, rep, ds.master_seed)
    errs = [evaluate(knn_fit(build_examples(train[:n], rep, ds.master_seed)), te)
            for n in (len(train) // 8, len(train) // 2, len(train))]
    print(f"{rep.name} 1-NN test error with 1/8, 1/2, all of training:", " ".join(f"{e:.4f}" for e in errs))

# trees: error against depth for a few representations
series = {}
for rep in (Representation.R1, Representation.R3, Representation.R5, Representation.R9):
    rows = depth_sweep(build_examples(train, rep, ds.master_seed), build_examples(test, rep, ds.master_seed),
                       rep, depths=range(1, 11)).rows
    series[f"{rep.name} (test)"] = ([r["param"] for r in rows], [r["test_error"] for r in rows])
    series[f"{rep.name} (train)"] = ([r["param"] for r in rows], [r["train_error"] for r in rows])
    best = min(rows, key=lambda r: r["test_error"])
    print(f"{rep.name} tree: best test error {best['test_error']:.4f} at depth {best['param']} "
          f"({best['node_count']} nodes)")

with open("demo_depth.svg", "w") as fh:
    fh.write(line_chart(series, "Tree depth vs error", "depth", "error"))
print("wrote demo_depth.svg")

"""Read a shallow tree as betting rules and test two rules of thumb.

Run: python demos/04_rules_of_thumb.py [count]
"""
import sys

from onestreet.dataset import build_dataset, build_examples
from onestreet.learners import tree_fit
from onestreet.rules import compliance_report, extract_rules, render_rules

count = int(sys.argv[1]) if len(sys.argv) > 1 else 400
ds = build_dataset(count=count, master_seed=3)

# R9: cdf features plus the hand's own percentile, predicting one sampled bet
tree = tree_fit(build_examples(ds.records, "r9", ds.master_seed), max_depth=4)
rules = extract_rules(tree)
print(render_rules(rules, "r9"))
print()

# Compliance on fresh games. "conditional" reads the opponent's range given
# our own card; "unconditional" uses the opponent's marginal.
probes = build_dataset(count=100, master_seed=4).records
for who, model in (("equilibrium", None), ("depth-4 tree", tree)):
    for r in compliance_report(model, probes):
        shown = "no probes" if r.compliance is None else f"{r.compliance:.3f}"
        print(f"{who:>12}  {r.rule:<6} {r.basis:<13} {shown} ({r.probes} probes)")

"""Walk through the list-answer metric, pair by pair.

The metric matches predicted answer strings to ground-truth strings
one-to-one (Hungarian assignment on normalized Levenshtein similarity),
zeroes matched pairs below a threshold, and divides by the larger list
length so both padding and omission cost score.
"""

from docqakit import anlsl, hungarian_match, levenshtein, nls
import numpy as np


def show(gt, pred, **kwargs):
    note = f"  (threshold {kwargs['threshold']})" if "threshold" in kwargs else ""
    print(f"  gt={gt!r:<28} pred={pred!r:<28} -> {anlsl(gt, pred, **kwargs):.4f}{note}")


print("String similarity is 1 - edit_distance / max_length:")
for a, b in [("2016", "2016"), ("2016", "2020"), ("marion", "mariom"), ("", "x")]:
    print(f"  nls({a!r}, {b!r}) = {nls(a, b):.4f}  (distance {levenshtein(a, b)})")

print("\nExact lists score 1.0, missing or extra answers dilute:")
show(["2016", "2020"], ["2016", "2020"])
show(["2016", "2020"], ["2020"])
show(["2016", "2020"], ["2016", "2020", "1999"])

print("\nNear misses survive the default 0.5 threshold, garbage does not:")
show(["marion county"], ["mariom county"])
show(["marion county"], ["zzzzz"])

print("\nThe threshold is applied after matching; lowering it keeps raw scores:")
show(["george brennan"], ["george brenam"], threshold=0.9)
show(["george brennan"], ["george brenam"], threshold=0.0)

print("\nUnder the hood: the assignment maximizes total similarity.")
scores = np.array([[nls("2016", "2016"), nls("2016", "1999")],
                   [nls("2020", "2016"), nls("2020", "1999")]])
assignment = hungarian_match(scores)
print(f"  score matrix:\n{scores}")
print(f"  matched pairs {assignment.pairs} with total {assignment.total:.4f}")

print("\nEdge cases: two empty lists agree perfectly, one empty list cannot.")
show([], [])
show(["2016"], [])

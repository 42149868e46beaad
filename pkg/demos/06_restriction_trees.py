"""Restriction trees: split on the most influential variable until every
leaf is regular or essentially constant, with exact dyadic masses."""

from fractions import Fraction

import numpy as np

from ptffool import DegTwoPoly, build_tree, tree_report

# start with something intentionally lopsided: one dominant variable
# over a flat cloud of pairwise interactions
p = DegTwoPoly.from_terms(
    6, linear={0: 5.0},
    quad_terms={(i, j): 1.0 for i in range(1, 6) for j in range(i + 1, 6)})

t = build_tree(p, tau=0.3)
print(f"tree: depth {t.depth()}, {t.leaf_count()} leaves")
for leaf in t.leaves():
    path = " ".join(f"x{v + 1}={s:+d}" for v, s in leaf.path) or "(root)"
    cls = leaf.classification
    extra = f" sign {cls.sign:+d}, disagreement {cls.disagreement}" \
        if cls.kind == "close_to_constant" else ""
    print(f"  mass {str(leaf.mass):>5} [{cls.kind}]{extra}  <- {path}")

rep = tree_report(t, p)
print("\nmass by class:", {k: str(v) for k, v in rep.mass_by_class.items()})
assert sum(rep.mass_by_class.values()) == 1

# the deviation decomposition: how much probability mass sits in leaves
# we cannot vouch for, which bounds how far any fooling argument drifts
dev = rep.deviation
print("bad-leaf mass:", dev.bad_mass,
      " close-leaf disagreement mass:", dev.close_disagreement_mass)
print("fooling drift bound if regular leaves cost 0.05:",
      round(dev.bound(regular_eps=0.05), 6))

# a tau too ambitious for the budget truncates; masses still total 1
rng = np.random.default_rng(2)
B = rng.normal(size=(8, 8))
hard = DegTwoPoly(n=8, quad=0.5 * (B + B.T))
t2 = build_tree(hard, tau=0.02, max_depth=3)
total = sum((leaf.mass for leaf in t2.leaves()), Fraction(0))
print(f"\ncapped tree: truncated={t2.truncated}, "
      f"{t2.leaf_count()} leaves, mass total {total}")

"""Degree-2 polynomials on the hypercube: influences, regularity,
critical index, and the three-band spectral split."""

import numpy as np

from ptffool import (DegTwoPoly, critical_index, influences, regularity,
                     spectral_decompose)

# p(x) = 3 x1 + x2 x3 - 0.5 x4: one heavy variable, two light ones
p = DegTwoPoly.from_terms(4, linear={0: 3.0, 3: -0.5},
                          quad_terms={(1, 2): 1.0})
inf, total = influences(p)
print("influences:", np.round(inf, 3), " total:", total)

# tau-regular means no single variable owns more than a tau fraction
for tau in (0.9, 0.5, 0.1):
    print(f"  regular at tau={tau}?", regularity(p, tau).is_regular)

# the critical index counts how many of the heaviest variables must be
# peeled off before the rest looks regular
ci = critical_index(p, tau=0.3)
print("critical index at tau=0.3:", ci.index,
      "(never regularizes)" if ci.no_finite_index else "")

# a flat polynomial is regular immediately
flat = DegTwoPoly.from_terms(
    10, quad_terms={(i, j): 1.0 for i in range(10) for j in range(i + 1, 10)})
print("flat complete-graph poly, critical index at tau=0.2:",
      critical_index(flat, 0.2).index)

# spectral split: quadratic part divided into eigenvalue bands at delta.
# a1 and a2 are PSD with all nonzero eigenvalues >= delta, a3 holds the
# middle band, and a1 - a2 + a3 rebuilds the original matrix.
rng = np.random.default_rng(7)
A = rng.normal(size=(6, 6))
q = DegTwoPoly(n=6, quad=0.5 * (A + A.T))
dec = spectral_decompose(q, delta=1.0)
print("\nspectral split at delta=1.0")
print("  middle-band trace (Upsilon):", round(dec.upsilon, 6))
for name, ok in dec.invariant_report(q.quad).items():
    print(f"  {name}: {ok}")

"""Small k-wise independent sample spaces, verified exactly.

A k-wise independent space over {-1,1}^n looks uniform to any k
coordinates at once.  The point of the constructions here is that the
support is tiny compared to 2^n while every parity of at most k
variables still averages to exactly zero.
"""

from ptffool import build_kwise_bernoulli, verify_kwise_exact

# pairwise independence on 8 bits from a fraction of the full cube
sp = build_kwise_bernoulli(8, 2)
print(f"n=8 k=2 ({sp.method}): {sp.num_points} support points vs 2^8 = 256")

rep = verify_kwise_exact(sp)
print(f"  every parity |S| <= 2 balanced exactly: {rep.passed} "
      f"({rep.subsets_checked} parities checked, worst bias {rep.worst_bias})")

# the verifier counts, it does not sample; a bias of 0 means 0
sp16 = build_kwise_bernoulli(16, 4, method="bch_parity")
rep16 = verify_kwise_exact(sp16)
print(f"n=16 k=4 (bch_parity): {sp16.num_points} points, "
      f"passed={rep16.passed}")

# claiming one order more than the construction delivers must fail,
# and the report names a concrete offending parity
over = verify_kwise_exact(sp16, 5)
print(f"  claiming 5-wise: passed={over.passed}, "
      f"first broken parity {over.worst_subset} with bias {over.worst_bias}")

# the two constructions trade support size against build cost
for method in ("vandermonde_bit", "bch_parity"):
    s = build_kwise_bernoulli(12, 3, method=method)
    print(f"n=12 k=3 via {method:16s}: {s.num_points} points")

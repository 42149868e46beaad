"""The smoothing kernel: unit mass, derivative control, heavy-ish tails,
and what it does to a sharp indicator."""

from ptffool import Mollifier, check_unit_integral, deriv_l1_norm, tail_mass
from ptffool.mollify import HalfLine, Quadrant

# the kernel integrates to one at any scale (it is a rescaled copy)
for c in (1.0, 5.0):
    r = check_unit_integral(1, c=c)
    print(f"d=1 c={c}: integral {r.value:.8f} (|err| {r.abs_error:.1e})")
print("d=2:", f"{check_unit_integral(2).value:.8f}")

# derivatives cost at most a factor 2 per order in L1, which is what
# makes smoothed indicators have controlled Taylor error
print("\nL1 norms of derivatives (bound 2^order):")
for order in range(4):
    r = deriv_l1_norm(1, (order,))
    print(f"  d^{order}: {r.value:.5f} <= {2 ** order}")

# the tail carries real mass (polynomial decay, not Gaussian):
print("\ntail mass beyond radius z:")
for z in (1.0, 4.0, 16.0, 64.0):
    t = tail_mass(1, z)
    print(f"  z={z:5.1f}: {t.value:.2e}   (z^2 * mass = {t.scaled:.4f})")

# smoothing the half-line indicator: exactly 1/2 at the boundary, and
# the transition sharpens as c grows
m1 = Mollifier(1, 1.0)
m4 = Mollifier(1, 4.0)
print("\nsmoothed half-line indicator:")
print(f"{'x':>6} {'c=1':>9} {'c=4':>9}")
for x in (-2.0, -0.5, 0.0, 0.5, 2.0):
    print(f"{x:6.1f} {m1.mollify(HalfLine(0.0), [x]):9.5f} "
          f"{m4.mollify(HalfLine(0.0), [x]):9.5f}")

# in two dimensions the quadrant corner sits at exactly 1/4
m2 = Mollifier(2, 1.0)
print("\nquadrant corner value:",
      round(m2.mollify(Quadrant((0.0, 0.0)), [0.0, 0.0]), 6))

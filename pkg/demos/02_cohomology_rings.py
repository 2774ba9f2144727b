"""Mod-2 cohomology: dimensions, products, Steenrod and Bockstein ops."""
import numpy as np

from cohlat import GroupCohomology, bar_cohomology_invariants, builtin_group

# dimensions straight off the minimal resolution
for name in ("C2", "V4", "D4", "Q8", "sz8-sylow"):
    gc = GroupCohomology(builtin_group(name), 3)
    print(f"{name:10s} dim H^0..H^3 = {gc.dims}")

# same invariants from the raw bar complex, as a cross-check
g = builtin_group("D4")
gc = GroupCohomology(g, 3)
for deg in range(3):
    mine = gc.cohomology_invariants(deg, 2)
    bar = bar_cohomology_invariants(g, deg, 2)
    print(f"H^{deg}(D4, Z/4): resolution {mine}  bar {bar}")

# cup products tell D4 from Q8 even though the dims agree in low degrees
for name in ("D4", "Q8"):
    gc = GroupCohomology(builtin_group(name), 2)
    e = np.eye(gc.h_dim(1), dtype=np.int64)
    squares = [gc.cup(1, x, 1, x).tolist() for x in e]
    print(name, "squares of the degree-1 basis:", squares)

# Sq1 is the mod-2 Bockstein; on C4 the degree-1 class has a Bockstein of
# order 4 but trivial Sq1
gc = GroupCohomology(builtin_group("C4"), 3)
one = np.array([1], dtype=np.int64)
print("C4: Sq1 of the generator:", gc.sq1(1, one).tolist(),
      " Bockstein mod 4:", gc.bockstein(1, one, 2).tolist())

# on V4 the ring is polynomial and Sq1 acts as a derivation
gc = GroupCohomology(builtin_group("V4"), 3)
x, y = np.eye(2, dtype=np.int64)
xy = gc.cup(1, x, 1, y)
print("V4: Sq1(xy) =", gc.sq1(2, xy).tolist(),
      "  x^2 y + x y^2 =",
      ((gc.cup(2, gc.cup(1, x, 1, x), 1, y)
        + gc.cup(1, x, 2, gc.cup(1, y, 1, y))) % 2).tolist())

"""Tour of the built-in 2-groups and the order-64 headline group."""
import numpy as np

from cohlat import builtin_group, subgroup_classes
from cohlat.groups import BUILTIN_GROUPS, abelianization, commutator_subgroup

# every built-in group by name, with its order and abelianization
for name in BUILTIN_GROUPS:
    g = builtin_group(name)
    print(f"{name:12s} order {g.order:3d}  abelianization {abelianization(g)}")

# the order-64 group up close
g = builtin_group("sz8-sylow")
t = g.table
center = [x for x in range(g.order) if np.array_equal(t[x], t[:, x])]
derived = sorted(commutator_subgroup(g))
print("\ncenter size", len(center), " equals derived subgroup:",
      center == derived)
print("element orders:",
      {k: int((g.element_orders == k).sum()) for k in (1, 2, 4)})

# subgroup classes up to conjugacy, counted by order
classes = subgroup_classes(g)
census = {}
for s in classes:
    census[s.order] = census.get(s.order, 0) + 1
print("subgroup classes by order:", census, " total", len(classes))

# groups can also come from a raw multiplication table
from cohlat.groups import group_from_json

klein = group_from_json({"order": 4,
                         "table": [[0, 1, 2, 3], [1, 0, 3, 2],
                                   [2, 3, 0, 1], [3, 2, 1, 0]]})
print("\nfrom JSON:", klein.order, abelianization(klein),
      "hash", klein.hash_digest()[:16], "...")

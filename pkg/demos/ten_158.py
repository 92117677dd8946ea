"""The determinant-45 knot 10_158.

10_158 is not alternating, but after resolving one crossing region into
``k`` half-twists its Goeritz matrix can be bordered by a single row and
column. The discriminant group is Z_45. For order 4 a vanishing subgroup of
H^4 would have order 45^2 and would contain a subgroup isomorphic to Z_45
or to Z_3 + Z_15. The search finds none of the first kind and thousands of
the second, so the obstruction says nothing here.
"""
from knotorder import (
    FiniteAbelianGroup, GoeritzForm, IntMatrix, ProductGroup, SubgroupWitness, check_vanishing,
    d_table_from_goeritz, extend_twisted, obstruct_order, passing_subgroups,
)

base = IntMatrix([[-4, 1, 2], [1, -4, 2], [2, 2, -4]])
g = extend_twisted(base, 3)
print("bordered matrix:", g.tolist())

table = d_table_from_goeritz(GoeritzForm(g))
print("group", table.group, "d(0) =", table.identity_value)

for iso in (FiniteAbelianGroup((45,)), FiniteAbelianGroup((3, 15))):
    found, examined = passing_subgroups(table, 4, iso)
    print(f"type {iso}: {len(found)} vanishing subgroups ({examined} zero-sum generators examined)")

report = obstruct_order(table, 4, knot="10_158")
w = report.witness
print("verdict:", report.verdict)
print("witness generators:", w.generator_coords())

# Anyone holding only the generators can re-check the claim.
again = SubgroupWitness.from_generators(ProductGroup(table.group, 4), w.generator_coords())
print("rebuilt order", again.order, "type", again.iso_type, "vanishes:", check_vanishing(again, table))

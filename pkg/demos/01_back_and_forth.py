"""
Back-and-forth relations and Scott rank
=======================================

Partition refinement over tuples of two finite structures.
"""

from scottkit import bf_equiv, bf_table, cycle, linear_order, rho, scott_rank

# two linear orders of different length look alike for one round
L2, L3 = linear_order(2), linear_order(3)
print("(L2,()) ~_1 (L3,()):", bf_equiv(L2, (), L3, (), 1))
print("(L2,()) ~_2 (L3,()):", bf_equiv(L2, (), L3, (), 2))

# the whole hierarchy lives in one table; levels are numpy arrays of block ids
T = bf_table(L2, L3)
print("stabilizes at level", T.stable_at)
for alpha in range(T.stable_at + 1):
    print(alpha, [len(b) for b in T.partition(alpha)])

# rho of a tuple = first level at which its class stops moving
L5 = linear_order(5)
print("rho in L5:", {a: rho(L5, (a,)) for a in range(5)})

# Scott rank grows slowly with n
for n in range(1, 9):
    print(f"SR(L{n}) =", scott_rank(linear_order(n)).scott_rank)

# in a 5-cycle single points are all alike, pairs at distance 1 and 2 are not
print("SR(C5) =", scott_rank(cycle(5)).scott_rank)

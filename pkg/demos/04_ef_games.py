"""
Ehrenfeucht-Fraisse types of linear orders
==========================================
"""

import numpy as np

from scottkit import Eta, Fin, Omega, ef_equiv, ef_type, game_solver, parse_term

# finite orders: p and q agree for n rounds iff p = q or both are >= 2^n - 1
n = 3
grid = np.array([[ef_equiv(Fin(p), Fin(q), n) for q in range(10)] for p in range(10)], dtype=int)
print(grid)

# the exhaustive game gives the same table on small sizes
print(all(game_solver(p, q, n) == bool(grid[p, q]) for p in range(9) for q in range(9)))

# infinite orders go through type arithmetic
print("w vs eta, 2 rounds:", ef_equiv(Omega(), Eta(), 2))
print("eta+1+eta vs eta, 4 rounds:", ef_equiv(parse_term("eta+1+eta"), Eta(), 4))
print(ef_type(Fin(2), 2).dump())

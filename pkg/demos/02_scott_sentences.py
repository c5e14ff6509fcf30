"""
Formulas, Phi and canonical Scott sentences
===========================================
"""

import itertools

from scottkit import (Evaluator, FormulaPool, all_digraphs, brute_force_iso, css, cycle, evaluate,
                      from_sexpr, linear_order, phi_formula, qr, relabel, to_sexpr)

# formulas are hash-consed: the same shape is the same object
f = from_sexpr("(exists 0 (and (exists 1 (< 1 0)) (exists 1 (< 0 1))))")
print(to_sexpr(f), "qr =", qr(f))
print("L3:", evaluate(linear_order(3), f), " L2:", evaluate(linear_order(2), f))

# Phi^M_{a,alpha}(b) holds in N exactly when (M,a) ~_alpha (N,b)
L4 = linear_order(4)
phi = phi_formula(L4, (1,), 2)
print("qr(Phi) =", qr(phi))
print([evaluate(L4, phi, {0: b}) for b in range(4)])

# canonical Scott sentence of a 3-cycle, printed with shared subterms
pool = FormulaPool()
s = css(cycle(3), pool=pool)
print(to_sexpr(s)[:400], "...")
print("holds in a relabeling:", evaluate(relabel(cycle(3), (2, 0, 1)), s))
print("holds in L3:", evaluate(linear_order(3), css(linear_order(3), pool=pool)))

# css characterizes isomorphism: count disagreements on all 2-node digraphs
gs = list(all_digraphs(2))
sent = [css(M, pool=pool) for M in gs]
bad = sum(Evaluator(N).holds(sent[i]) != (brute_force_iso(M, N) is not None)
          for (i, M), N in itertools.product(enumerate(gs), gs))
print("disagreements:", bad)

# isomorphic structures share one sentence: 104 classes of 3-node digraphs
print("distinct CSS on 3 nodes:", len({css(M, pool=pool).id for M in all_digraphs(3)}))

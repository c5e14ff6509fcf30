"""
Kleene-Brouwer order and the classification pipeline
====================================================
"""

from scottkit import (FiniteTree, classify_pipeline, kb_as_structure, kb_order, random_tree,
                      scott_rank)

T = FiniteTree.closure([(0, 0), (1,)])
print(kb_order(T))  # extensions first, root last

U = random_tree(seed=1, size=7)
print(len(U), kb_order(U)[:5], "...")

# as a structure it is just a finite linear order (ranks are affordable up to ~9 points)
M = kb_as_structure(U)
print("SR =", scott_rank(M).scott_rank)

# tree -> KB order -> times w: every nonempty finite tree lands on w
print({str(classify_pipeline(random_tree(s, 1 + s))) for s in range(30)})
print(classify_pipeline(FiniteTree(frozenset())))

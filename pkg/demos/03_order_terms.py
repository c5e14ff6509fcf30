"""
Order terms and normal forms
============================

w is omega, eta the rationals, a*b means b copies of a.
"""

from scottkit import harrison, normalize, omega_power, parse_term, term_equal

for text in ["1+w", "(w+1)*3", "w*2+w^2", "eta+1+eta", "eta+2+eta", "(1+eta)*w",
             "(w^2*(1+eta)+w)*w"]:
    print(f"{text:22s} -> {normalize(text)}")

# the Harrison shape A*(1+eta) absorbs a small ordinal tail once multiplied by w
A = omega_power(3)
H = harrison(A)
lhs = parse_term("(w^3*(1+eta)+w^2*5+w+7)*w")
print(normalize(H), "|", normalize(lhs), "|", term_equal(lhs, H))

# distinct normal forms are refuted by a game when possible
print(term_equal(parse_term("w"), parse_term("w+1")))
print(term_equal(parse_term("w^2"), parse_term("w^3"), n_max=4))

"""
Roots with negative powers of w
===============================

z^2 - x^2 w^2 - x^3 w has roots +-x w sqrt(1 + x/w).  Expanding the square root
puts w in the denominator, which the q = 1 encoding x = w x' allows.
"""
import sympy as sp

from formal_split.instances import preset
from formal_split.splitting import atw_proxy, split
from formal_split.transforms import blowup_origin, rescale_q

f = preset("qpole").poly()
res = split(f, p_max=1, q_max=1)
print("status:", res.status, "p =", res.p, "q =", res.q)
b = next(r for r in res.roots if r.ab_terms()[0][1] == 1)
for ep, c in b.ab_terms()[:4]:
    print(f"  {c} * x^{ep.alpha[0]} * w^{ep.beta[0]}")

# the same coefficients from sympy: x w (1 + t)^(1/2) with t = x/w
t = sp.Symbol("t")
print("sqrt(1+t):", sp.series(sp.sqrt(1 + t), t, 0, 4).removeO())

# the lowest part at the origin is z^2, so this is not a normal-crossings point
print("proxy:", atw_proxy(f))

# rescaling by w once is the same as blowing up the origin once
g = rescale_q(f, 1)
print("rescaled:", g)
print("equals blow-up:", g == blowup_origin(f))
print("rescaled splits with q = 0:", split(g, p_max=1, q_max=0).status)

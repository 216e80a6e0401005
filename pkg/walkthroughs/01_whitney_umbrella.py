"""
Splitting z^2 - w x^2
=====================

The roots are +-w^(1/2) x, so the search has to pass to the cover w = v^2.
At w = 0 the two roots collide; away from it the surface is two smooth sheets.
"""
from gmpy2 import mpq

from formal_split.instances import preset
from formal_split.splitting import Point, is_nc, mu_p_action, split
from formal_split.transforms import blowup_chart

f = preset("whitney").poly()
print("f:", f)

# the search walks (q, p) in order and records why each attempt stopped
res = split(f, p_max=3, q_max=1)
for q, p, status in res.trials:
    print(f"  q={q} p={p}: {status}")
print("status:", res.status, "p =", res.p, "q =", res.q)
for b in res.roots:
    print("  root:", b)

# w^(1/2) -> -w^(1/2) swaps the two roots
print("mu_2 permutation:", mu_p_action(res.root_system))

# the linear parts of the roots vanish at w = 0, so the origin is not normal crossings
print("nc at origin:", is_nc(f)["nc"])
print("nc at w = 1:", is_nc(f, Point(mpq(1)))["nc"])

# x -> w x, z -> w z, divide by w^2: the polynomial comes back unchanged
print("blow-up returns f:", blowup_chart(f, 1) == f)

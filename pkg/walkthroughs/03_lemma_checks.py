"""
Lemma checks on random instances
================================

Instances built from roots whose lowest part is a product of k independent
linear forms should split with p = 1 and q = 0.  Instances where that fails
may need ramification or poles, but no check may report a failure there.
"""
from collections import Counter

from formal_split.instances import random_instance
from formal_split.verify import verify_homog, verify_p1, verify_q0, verify_sigma_identity

tally = Counter()
for seed in range(40):
    for kind in ("proxy_true", "proxy_false"):
        f = random_instance(seed, k=2 + seed % 2, kind=kind).poly()
        for check in (verify_homog, verify_p1, verify_q0):
            rep = check(f)
            tally[kind, rep.lemma, rep.hypothesis, rep.conclusion] += 1

for key, n in sorted(tally.items()):
    print(*key, n)

# the symmetric-function identity behind the no-poles argument
for k in range(2, 6):
    for h in range(1, k):
        rep = verify_sigma_identity(k, h)
        print(f"k={k} h={h} gamma={rep.details['gamma']} coefficient={rep.details['coefficient']} {rep.conclusion}")

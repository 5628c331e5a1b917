"""Look inside the small-support construction.

A sum of products of sparse factors compiles into a read-once ABP whose
width depends only on the top fan-in and the sparsity. A hash function then
splits the variables into buckets so that each bucket only sees a few
variables of any factor.
"""
import random

from mlpit import check_hash_conditions, find_good_hash, from_sparse_products, parse
from mlpit.roabp import roabp_eval

phi = parse("(x1*x2 + x3)*(x4 + 1) + (x2 + x4)*(3*x1*x3)", 4, kind="d4")
P = from_sparse_products(phi)
print(f"ROABP over order {[v + 1 for v in P.order]} with layer sizes {P.layer_sizes()}, width {P.width}")
rng = random.Random(1)
for _ in range(3):
    pt = tuple(rng.randrange(10) for _ in range(4))
    print(f"  at {pt}: formula {phi.eval(pt)}, ROABP {roabp_eval(P, pt)}")

n, k, m = 10, 3, 4
parts = [[(0, 1, 2), (3, 4), (5, 6, 7, 8, 9)], [(0, 5), (1, 6), (2, 7, 8), (3, 4, 9)]]
h = find_good_hash(parts, k, m, n)
print(f"\nfirst good hash: coefficients {h.coeffs} over GF({h.q}) into {m} buckets")
print("buckets:", [[v + 1 for v in T] for T in h.buckets(n)])
print("conditions hold:", bool(check_hash_conditions(h, parts, k, n)))

"""Any point set smaller than 2^n misses some nonzero multilinear polynomial.

Here we take a random half of a depth-3 hitting set and extract the vanishing
polynomial of least degree-lex leading monomial, then check that it
vanishes everywhere on the half but not on the full set.
"""
import random

from mlpit import HittingSet, depth3_hs, vanishing_multilinear, verify_certificate

n = 5
full = depth3_hs(n, 0.49)
half = HittingSet(n, random.Random(3).sample(full.points, len(full) // 2))
f = vanishing_multilinear(half)
print(f"|H| = {len(half)} points over n = {n}")
print("vanishing polynomial:", f.to_text())
print("certificate valid:", verify_certificate(f, half))
missed = [pt for pt in full.points if f.eval(pt) != 0]
print(f"nonzero on {len(missed)} of the {len(full)} points of the full set")

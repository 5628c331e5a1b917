"""Build a depth-3 hitting set and use it as a black-box identity test.

We generate a handful of random multilinear depth-3 formulas, hide them
behind an evaluation callback and ask the hitting set whether each one is
identically zero. The exhaustive Boolean-cube oracle gives the ground truth.
"""
from mlpit import build_corpus, depth3_hs, grid_pit, pit_blackbox

n, delta = 6, 0.25
H = depth3_hs(n, delta)
print(f"depth-3 hitting set over n={n}: {len(H)} points")
print("construction parameters:", H.params)

corpus = build_corpus("d3", {"n": n, "M_max": 3}, 8, seed=7)
for item in corpus:
    res = pit_blackbox(item.formula.eval, H)
    truth = grid_pit(item.formula.eval, n)
    verdict = "zero" if res.zero else f"nonzero at {res.witness}"
    print(f"  {item.tag:<8} size={item.formula.size():<3} -> {verdict:<32} oracle says {'zero' if truth.zero else 'nonzero'}")
    assert res.zero == truth.zero

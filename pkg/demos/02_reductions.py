"""Walk through the two support-reduction procedures on small inputs.

Taking partial derivatives (and, for depth-4, setting variables to zero)
shrinks every factor until none of them touches many live variables. The
traces show each step and the potential it drives down.
"""
from mlpit import parse, reduce_depth3, reduce_depth4

phi = parse("(x1 + x2 + x3)*(x4) + (x2 + x5)*(x3 + x4)")
print("depth-3 input:", phi.expand().to_text())
A, out, trace = reduce_depth3(phi, tau=2)
print("derived in:", sorted(f"x{v + 1}" for v in A))
print("result:   ", out.expand().to_text())
print(trace.to_text())
print()

psi = parse("(x1*x2 + x3)*(x4 + x5) + (2*x1*x2*x3) + (-1)", 5, kind="d4")
print("depth-4 input:", psi.expand().to_text())
A, B, out, trace = reduce_depth4(psi, 2)
print("derived in:", sorted(f"x{v + 1}" for v in A), " zeroed:", sorted(f"x{v + 1}" for v in B))
print("result:   ", out.expand().to_text())
print(trace.to_text())

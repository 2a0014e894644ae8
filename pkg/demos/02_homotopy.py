"""The fiberwise complex on T*R^2 and its contracting homotopy.

A 1-cochain D is a field sum D^i d/dq_i with coefficients in (q, p).
delta differentiates in the fiber directions, and h integrates along
rays in the fibers.  Closed cochains of positive degree are exact.
"""

from fpois import ce_delta, ce_homotopy, parse_poly, psi
from fpois.ce import CECochain, d_ver
from fpois.cotangent import CotangentChart

C = CotangentChart(2)
P = lambda s: parse_poly(s, C.total)

D = CECochain(C, 1, {(0,): P("p2")})
print("D           =", D)
print("delta D     =", ce_delta(D))
print("Psi(D)      =", psi(D))
print("d_ver Psi D =", d_ver(psi(D), C))

E = CECochain(C, 1, {(0,): P("q2*p1 + 1"), (1,): P("q2*p2 + q1^2")})
print("\nE           =", E)
print("delta E = 0 :", not ce_delta(E))
b = ce_homotopy(E)
print("b = h(E)    =", b)
print("delta b = E :", ce_delta(b) == E)

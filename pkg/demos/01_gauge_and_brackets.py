"""Gauge transformations of a constant structure on the plane.

For pi = lambda d1^d2 and B = c dq1^dq2 the Neumann series for
pi^# (1 + B^flat pi^#)^(-1) is geometric, so tau_B(pi) is
lambda / (1 - c lambda) times d1^d2, truncated.
"""

from fpois import Q, bivector_series, form_series, gauge, jacobi_residual
from fpois.randgen import so3

N = 4
names = ("q1", "q2")
pi = bivector_series(names, N, {1: {(0, 1): 1}})
c = Q(1, 2)
B = form_series(names, N, {0: {(0, 1): c}})

print("pi          =", pi.text())
print("tau_B(pi)   =", gauge(pi, B).pi.text())
print("tau_-B(pi)  =", gauge(pi, -B).pi.text())
print("round trip  :", gauge(gauge(pi, B), -B).pi == pi)

# the linear so(3) structure stays Poisson under any closed B
s = so3(("q1", "q2", "q3"), 3)
B3 = form_series(s.names, 3, {0: {(0, 1): 1, (1, 2): Q(-2, 3)}})
g = gauge(s, B3)
print("\nso(3) gauged:", g.pi.text())
print("[pi, pi] = 0:", jacobi_residual(g).is_zero())

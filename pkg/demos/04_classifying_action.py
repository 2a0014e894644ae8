"""Solving for a dual pair over omega_can + rho^* B, then certifying it.

The solver builds a Poisson morphism from (R^3, pi) into the twisted
cotangent bundle and a commuting partner; the partner's structure is
the image of pi under the B-field action.  The bimodule certificate
then checks that pi and tau_{-B}(pi) are linked.
"""

import time

from fpois import Q, classifying_action, form_series, gauge, morita_witness
from fpois.cotangent import CotangentChart
from fpois.randgen import so3

N = 4
C = CotangentChart(3)
pi = so3(C.base, N)
B = form_series(C.base, N, {0: {(0, 1): 1}, 1: {(1, 2): Q(1, 3)}})

t = time.perf_counter()
res = classifying_action(B, pi, N, C)
print(f"classify ({time.perf_counter() - t:.2f}s)")
print("pi^B          =", res.pi_B.pi.text())
print("equals tau_B? :", res.pi_B == gauge(pi, B))
for name, group in res.residuals.items():
    print(f"  {name:13s} residuals zero: {not any(group.values())}")

t = time.perf_counter()
w = morita_witness(pi, B, C)
print(f"\nmorita witness ({time.perf_counter() - t:.2f}s)")
print("tau_-B(pi)    =", w.pi_tilde.pi.text())
for check in w.report.checks:
    print(f"  [{'PASS' if check.passed else 'FAIL'}] {check.name}")

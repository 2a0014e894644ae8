"""The canonical self-equivalence bimodule of a formal Poisson structure.

Z is the flat lift of pi^# applied to the tautological 1-form, and
omega averages the flow of Z over omega_can.  For a constant pi the
series stops after one step.
"""

from fpois import bivector_series
from fpois.cotangent import CotangentChart
from fpois.courant import self_equivalence

N = 4
C = CotangentChart(2)
for label, comps in (("lambda d1^d2", {(0, 1): 1}), ("lambda q1 d1^d2", {(0, 1): C.base_var(0)})):
    pi = bivector_series(C.base, N, {1: comps})
    se = self_equivalence(pi, C)
    print(f"== {label}")
    print("Z     =", se.Z.text())
    print("omega =", se.omega.omega.text())
    for k in range(1, N + 1):
        if se.potentials[k]:
            print(f"theta_{k} =", se.potentials[k])
    for check in se.report.checks:
        print(f"  [{'PASS' if check.passed else 'FAIL'}] {check.name}")
    print()

"""Bifurcation points of the two lowest eigenmodes and the branches that leave them."""

import numpy as np

from conformal_flow import solver

print("Lowest mode, omega_m = (m-1)/(m(m+1)):")
for b in solver.bifurcation_points_lowest(8):
    print(f"  m={b.m:<2} omega={str(b.omega):<6}" + (f" double with m={b.partner}" if b.double else ""))

print("\nSecond mode double points:")
for b in solver.bifurcation_points_second(12):
    if b.double and b.m < b.partner:
        print(f"  m={b.m}, {b.partner}: omega = {b.omega}")

print("\nThe scan of L(omega) at e_0 finds the same points from the spectrum alone:")
for c in solver.linearization_scan((0.0, 0.2), "lowest", N=16)[-4:]:
    print(f"  omega={c.omega:.6f} multiplicity {c.multiplicity}")

ps = np.linspace(0.005, 0.05, 10)
print("\nOmega / eps^2 along the branches at the double point 1/6:")
for bid in ("i", "ii"):
    b = solver.continue_branch(solver.BranchSpec("lowest", 2, bid), ps)
    print(f"  branch {bid}: " + " ".join(f"{x:.4f}" for x in b.Omegas[::3] / ps[::3] ** 2))

b = solver.continue_branch(solver.BranchSpec("lowest", 2, "iii"), -ps)
print("\nBranch iii has mu locked to 2 |eps|^(3/2):")
print("  " + " ".join(f"{abs(s.mu) / abs(s.epsilon) ** 1.5:.3f}" for s in b.samples[::3]))

print("\nAt omega = 1/15 the fitted coefficients come out negative:")
for bid, name in (("ii", "eps"), ("i", "mu")):
    b = solver.continue_branch(solver.BranchSpec("second", 4, bid), ps)
    print(f"  branch {bid}: Omega / {name}^2 -> {np.polyfit(ps, b.Omegas / ps**2, 2)[-1]:.5f}")
print("  compare -7/15 = -0.46667 and -7/255 = -0.02745")

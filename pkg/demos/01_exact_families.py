"""Walk through the closed-form stationary families and check that they solve the truncated system."""

import numpy as np

from conformal_flow import families as fam
from conformal_flow.core import hamiltonian

print("Every exact family, residual of the stationary equations at N = 64:\n")
print(f"{'family':<12}{'p':>6}{'residual':>12}{'lambda':>10}{'omega':>10}")
for row in fam.verify_families(64):
    print(f"{row['family']:<12}{row['p']:>6}{row['residual']:>12.1e}{row['lam']:>10.4f}{row['omega']:>10.4f}")

gs = fam.ground_state(0.5, c=0.75, N=64)
print(f"\nThe ground state saturates H <= Q^2: H - Q^2 = {hamiltonian(gs.A) - gs.Q**2:.1e}")

print("\nPair states obey two linear identities over their whole existence interval:")
for p in (0.05, 0.15, 0.25):
    s = fam.pair_state(p, 1.0, +1, N=128)
    print(f"  p={p:.2f}  Q - 6/7 (lam + omega) = {s.Q - 6 / 7 * (s.lam + s.omega):+.1e}   E - 6 omega = {s.E - 6 * s.omega:+.1e}")

print("\nLarge p needs a larger truncation; the constructor flags an unresolved tail:")
for N in (32, 256):
    s = fam.ground_state(0.9, N=N)
    print(f"  p=0.9 N={N:<4} residual {fam.residual_norm(s):.1e}  tail warning: {s.tail_warning}")

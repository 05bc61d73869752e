"""Smallest eigenvalues of L+ and L- along the pair branches and the omega_6 branch.

Writes spectra_pair.csv and spectra_omega6.csv in the working directory.
"""

import csv

import numpy as np

from conformal_flow import families, solver, spectral

rows = []
for sign in (+1, -1):
    for p in np.linspace(0.01, 0.26, 26):
        r = spectral.spectral_report(families.pair_state_normalized(p, sign, 64), zero_tol_rel=1e-11, strict=False)
        rows.append({"branch": "pair+" if sign > 0 else "pair-", "p": p, "eig_plus_min1": r.eig_plus_min1,
                     "eig_minus_min1": r.eig_minus_min1, "n_plus": r.n_plus, "n_minus": r.n_minus})
with open("spectra_pair.csv", "w", newline="") as fh:
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
print("pair branches: (n+, n-) seen =", sorted({(r["n_plus"], r["n_minus"]) for r in rows}))

eps = np.linspace(0.005, 0.06, 23)
branch = solver.continue_branch(solver.BranchSpec("second", 6), eps)
second = []
with open("spectra_omega6.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["eps", "eig_plus_min1", "eig_plus_min2", "n_plus"])
    for e, s in zip(eps, branch):
        r = spectral.spectral_report(s.state, strict=False, zero_tol_rel=1e-12)
        second.append(r.eig_plus_min2)
        w.writerow([e, r.eig_plus_min1, r.eig_plus_min2, r.n_plus])
k = int(np.argmax(np.array(second) < 0))
print(f"omega_6 branch: second L+ eigenvalue turns negative between eps={eps[k - 1]:.4f} and {eps[k]:.4f}")

s = branch[4]
rep = spectral.spectral_report(s.state, solver.branch_function(s, "lambda-omega"), normalization="lambda-omega",
                               h=spectral.d_step(s.Omega))
print(f"at eps={eps[4]:.3f}: D =\n{np.round(rep.D, 3)}\n  class {rep.classification}, n_c={rep.n_constrained}")

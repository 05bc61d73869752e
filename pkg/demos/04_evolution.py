"""Time integration: conservation, fourth-order drift and orbit distance under small noise."""

import numpy as np

from conformal_flow import core, evolution, families

a = core.random_state(32, np.random.default_rng(0)).alpha
tr = evolution.integrate(a, 100.0, 1e-3)
print("random Q=1 data, T=100, dt=1e-3: drifts (H, Q, E, |Z|) =",
      ", ".join(f"{x:.1e}" for x in evolution.conservation_drift(tr).as_tuple()))

prev = None
for dt in (0.05, 0.025, 0.0125):
    d = evolution.conservation_drift(evolution.integrate(a, 10.0, dt)).max()
    print(f"  dt={dt:<7} largest drift {d:.2e}" + (f"  ratio {prev / d:.1f}" if prev else ""))
    prev = d

for name, ref in (("ground p=0.3", families.ground_state(0.3, N=32)),
                  ("pair+ p=0.15", families.pair_state(0.15, 1.0, +1, N=32))):
    rep = evolution.stability_probe(ref, 1e-3, 100.0, seed=1)
    print(f"{name}: max orbit distance {rep.max_gauge_distance:.2e} from noise 1e-3, growth rate {rep.growth_rate:+.1e}")

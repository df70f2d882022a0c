"""Mean, variance and passing probability for a particle launched over the barrier.

The position stays Gaussian, so the probability of being past the saddle at
time t is chi = erfc(-<x> / sqrt(2 var)) / 2.
"""
import numpy as np

from glekin import BarrierSpec, InitialState, kinetics_curves, late_window_mean, make_noise_model

barrier = BarrierSpec(1.0)
state = InitialState(x0=0.0, v0=2.0)
grid = np.linspace(0.0, 30.0, 3001)

for kind in ("HN", "HVN", "HAN"):
    c = kinetics_curves(make_noise_model(kind), barrier, state, grid)
    print(f"{kind}:")
    for t in (1, 2, 5, 10, 30):
        i = np.searchsorted(grid, t)
        print(f"  t={t:2d}  <x>={c.mean[i]:12.4f}  var={c.var[i]:14.4f}  chi={c.chi[i]:.6f}")
    print(f"  mean chi over [15, 30]: {late_window_mean(grid, c.chi):.4f}")

# With v0 = 0 the density is centred on the saddle and chi is exactly 1/2.
c = kinetics_curves(make_noise_model("HAN"), barrier, InitialState(0.0, 0.0), grid)
print("\nv0 = 0: chi is 1/2 everywhere:", bool(np.all(c.chi == 0.5)))

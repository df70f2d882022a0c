"""White-noise (Ohmic) friction: the Kramers limit.

With memoryless friction gamma the unstable root solves s^2 + gamma s - omega_b^2 = 0
and the long-time transmission coefficient is lambda / omega_b. For
gamma = omega_b = 1 this is the golden-ratio conjugate (sqrt(5) - 1) / 2.
"""
import numpy as np

from glekin import BarrierSpec, kinetics_curves, make_noise_model

barrier = BarrierSpec(1.0)
t = np.array([0.5, 1.0, 2.0, 5.0, 10.0, 20.0])
for gamma in (0.1, 1.0, 5.0, 20.0):
    model = make_noise_model("Ohmic", gamma_ohmic=gamma)
    c = kinetics_curves(model, barrier, grid=t)
    lam = (-gamma + np.sqrt(gamma**2 + 4.0)) / 2.0
    print(f"gamma={gamma:5.1f}  kappa(t) = " + " ".join(f"{k:.5f}" for k in c.kappa)
          + f"   lambda/omega_b = {lam:.5f}")

# strong friction: kappa -> omega_b / gamma, reached only after t >> 1 / lambda ~ gamma
k = kinetics_curves(make_noise_model("Ohmic", gamma_ohmic=50.0), barrier, grid=[20.0, 500.0]).kappa
print(f"\ngamma = 50: kappa * gamma = {k[0] * 50:.4f} at t = 20, {k[1] * 50:.4f} at t = 500")

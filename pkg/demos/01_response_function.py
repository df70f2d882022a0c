"""Response function of a particle on an inverted barrier with structured noise.

The friction kernel of each noise is a ratio of polynomials in the Laplace
variable, so the response function H(t) is a finite sum of exponentials over
the roots of a small polynomial.
"""
import numpy as np

from glekin import BarrierSpec, decompose, make_noise_model

barrier = BarrierSpec(omega_b=1.0)

# Harmonic noise (HN), its velocity (HVN) and acceleration (HAN) versions,
# all with Gamma = 1, Omega^2 = 2, eta = 1.
for kind in ("HN", "HVN", "HAN"):
    d = decompose(make_noise_model(kind), barrier)
    print(f"{kind}: poles {np.round(d.poles, 4)}")
    print(f"     residues {np.round(d.residues, 4)}")
    # H(0) = 0 and H'(0) = 1 fix the first two moments of the residues
    print(f"     sum r = {np.sum(d.residues):.1e}, sum r s = {np.sum(d.residues * d.poles):.12f}")
    print(f"     one unstable mode: {d.single_unstable_mode}, lambda = {d.dominant_pole.real:.6f}")

# H(t) on a coarse grid; the unstable mode takes over after a few time units
t = np.arange(0, 11, 2.0)
print("\n t   " + "  ".join(f"{k:>10s}" for k in ("HN", "HVN", "HAN")))
curves = [decompose(make_noise_model(k), barrier).response(t) for k in ("HN", "HVN", "HAN")]
for row in zip(t, *curves):
    print(f"{row[0]:4.0f} " + "  ".join(f"{v:10.4f}" for v in row[1:]))

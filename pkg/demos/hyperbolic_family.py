"""
A one-parameter family of symplectic planes in R^4 that degenerates.

W(t) is the image of span{e1, f1} under a hyperbolic symplectic rotation
mixing the two coordinate planes.  Every W(t) has type (0, 1, 1), its energy
is 2 tanh^2(2t), and as t grows the plane approaches a Lagrangian, whose
energy is 2.  The gradient flow started anywhere on the family returns to
the complex plane span{e1, f1}.
"""

import math

from sympgrass import classify, energy, flow_run, isotropic_kernel, kahler_spectrum
from sympgrass.oracles import worked_example_family

print(f"{'t':>5} {'type':>10} {'f':>12} {'2 tanh^2(2t)':>14} {'angle':>8}")
for t in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0):
    W = worked_example_family(t)
    (theta,) = kahler_spectrum(W).angles or (0.0,)
    print(f"{t:5.2f} {str(classify(W)):>10} {energy(W):12.9f} {2 * math.tanh(2 * t) ** 2:14.9f} {theta:8.5f}")

# numerically the plane at t = 20 is already Lagrangian
print("isotropic kernel dimension at t = 20:", isotropic_kernel(worked_example_family(20.0)).k)

traj = flow_run(worked_example_family(1.0))
print(f"\nflow from t = 1: {traj.steps} steps, {traj.rejected} rejected, converged={traj.converged}")
for s in traj.samples[:: max(1, len(traj.samples) // 6)]:
    print(f"  step {s.step:3d}  f = {s.f:.3e}  |grad| = {s.grad_norm:.3e}  type {s.signature}")
print(f"limit energy {traj.f_limit:.2e}, type {classify(traj.limit)}")

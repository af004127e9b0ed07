"""A function whose torus version loses first-order Sobolev regularity.

f(xi) = ln(ln(8 / sqrt(1 - xi3^2))) is square-integrable with square-integrable
surface gradient, but composing with the coordinate transform strips the sine
factor off the measure: the torus gradient energy diverges at the poles like
1 / (eps ln^2(1/eps)). The probe integrates both energies on [eps, pi - eps].
"""

from dfsphere.analysis import sobolev_probe
from dfsphere.testfns import eval_counterexample
import numpy as np

print(f"value on the equator: {eval_counterexample(np.array([1.0, 0.0, 0.0])):.6f} "
      f"(= ln ln 8), at the poles: {eval_counterexample(np.array([0.0, 0.0, 1.0])):.1f}")

probe = sobolev_probe([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])

print(f"\n{'eps':>8} {'sphere energy':>14} {'torus energy':>13}")
for eps, es, et in zip(probe.epsilons, probe.sphere_energy, probe.torus_energy):
    print(f"{eps:>8.0e} {es:>14.6f} {et:>13.1f}")

incr = probe.sphere_increments
print("\nsphere energy increments (Cauchy, shrinking):",
      ", ".join(f"{v:.4f}" for v in incr))
print("torus energy growth per decade of eps:",
      ", ".join(f"{probe.torus_ratio(i):.2f}x" for i in range(1, len(probe.epsilons))))
print(f"\ntorus/sphere energy at eps = 1e-6: "
      f"{probe.torus_energy[-1] / probe.sphere_energy[-1]:.0f}x")

"""Mean-field energy law against an exact occupation-basis diagonalization.

For a contact interaction the functional route predicts E/N = U * N/V from
the weak-coupling ground eigenvalue.  An independent fixed-N diagonalization
in the occupation basis gives the exact E/N.  The table below scans the
coupling over two decades and reports both, the condensate expectation, and
the deviation — which saturates toward (M-1)/N at weak coupling because the
oracle keeps its full kinetic-exchange structure on a finite mode set.
"""

import numpy as np

from phasegas import TAU, ModeLattice, comparison_table, mean_field_comparison

lat = ModeLattice(d=1, box_len=TAU, m_per_dim=3)
n_particles = 3
couplings = np.geomspace(1.0, 0.01, 9)

rows = mean_field_comparison(lat, n_particles, couplings, n_max=2)
print(comparison_table(rows))
print()
print("functional_epp matches prediction_epp to rounding; rel_dev saturates")
print(f"toward (M-1)/N = {(lat.num_modes - 1) / n_particles:.4f} as the coupling shrinks,")
print("so the mean-field law is recovered in absolute — not relative — terms.")
abs_devs = [row["abs_dev"] for row in rows]
print("abs_dev over the scan:", " -> ".join(f"{d:.2e}" for d in abs_devs))

"""
Toric code with a greedy matcher
================================

Count stabilizers on a torus, watch single errors create pairs of charges,
and estimate logical failure rates.
"""

from qecw import toric as tc

for L in (2, 3, 4):
    s = tc.stabilizer_structure(tc.build_lattice(L))
    print(f"L={L}: {s.independent_count} independent checks, {s.logical_qubits} logical qubits")

lat = tc.build_lattice(4)
err = tc.PauliPattern.empty(lat.n_qubits)
err.x[lat.h(1, 2)] = 1
stars, _ = tc.syndrome(lat, err)
print("one X error lights up stars at", [tuple(map(int, lat.coords(i))) for i in stars])

# A loop around the torus leaves no syndrome but flips a logical qubit.
loop = tc.horizontal_x_loop(lat)
print("loop is a stabilizer:", tc.logical_error_check(lat, loop)[0])

# Monte Carlo with the greedy decoder, fixed seed for reproducibility. The
# greedy matcher is not minimum weight, so a larger lattice does not always
# help at these error rates.
for L in (3, 5):
    for p in (0.02, 0.05, 0.08):
        r = tc.toric_monte_carlo(L, p, 5000, seed=7)
        print(f"L={L} p={p}: logical X rate {r.logical_x_rate:.4f}, Z rate {r.logical_z_rate:.4f}")

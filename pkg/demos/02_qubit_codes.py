"""
Three-qubit repetition code and the Knill-Laflamme test
=======================================================

Encode, corrupt, measure the stabilizers, correct. Then ask the
Knill-Laflamme engine which error models a code can handle.
"""

import numpy as np

from qecw import core
from qecw import qubit_codes as qc
from qecw import bosonic as bo

rng = np.random.default_rng(5)
alpha, beta = core.normalize(np.array([0.6, 0.8j]))
psi = qc.encode_repetition3(alpha, beta)

# A bit flip on the middle qubit is found by the stabilizers and undone.
damaged = qc.embed(core.X, 1, 3) @ psi
s1, s2, _ = qc.syndrome_repetition3(damaged, rng)
print("syndrome (Z1Z2, Z2Z3):", (s1, s2))
fixed = qc.correct_repetition3(damaged, "measured", rng)
print(f"measured recovery, one trajectory: fidelity {core.state_fidelity(fixed, psi):.12f}")
rho = qc.correct_repetition3(damaged, "measurement_free")
print(f"Toffoli network, ancillae traced out: fidelity {core.fidelity(rho, psi):.12f}")

# A small coherent rotation on every qubit is digitized by the measurement:
# most runs see no error, a fraction sin^2 see exactly one flip.
theta = 0.3
outcomes = [qc.coherent_error_trial(theta, rng)[0] for _ in range(5000)]
clean = np.mean([o == (1, 1) for o in outcomes])
print(f"clean syndrome fraction {clean:.4f}, expected {np.cos(theta) ** 2:.4f}")

# Knill-Laflamme verdicts for a few code / noise pairs.
reports = {
    "repetition3 + bit flips": qc.kl_check(qc.repetition3_code(), qc.repetition_bitflip_errors(0.02)),
    "repetition3 + amplitude damping": qc.kl_check(
        qc.repetition3_code(), lambda g: qc.amplitude_damping_register(g, 3), 0.05),
    "four-qubit code + amplitude damping": qc.kl_check(qc.leung4_code(), qc.leung4_errors, 0.02),
    "kitten + photon loss": qc.kl_check(bo.kitten_code().code_space(), bo.kitten_damping_errors(), 0.02),
}
for name, rep in reports.items():
    ratio = "" if rep.scaling_ratio is None else f" (violation scales by {rep.scaling_ratio:.2f} when p doubles)"
    print(f"{name}: {rep.verdict}{ratio}")

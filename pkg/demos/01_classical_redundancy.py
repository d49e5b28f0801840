"""
Redundancy against bit flips
============================

Repetition codes, the Hamming code and a triple-redundant memory whose
majority voter is itself noisy.
"""

import numpy as np

from qecw import classical as cl

# A (2m+1)-bit repetition code helps only below eps = 1/2, and larger codes
# sharpen the transition around that point.
eps = np.array([0.01, 0.1, 0.3, 0.5, 0.7])
for m in (1, 2, 10):
    print(f"m={m:2d}", np.round(cl.repetition_logical_error(m, eps), 6))

# Hamming [7,4,3]: the syndrome of a single flip spells out its position.
code = cl.hamming_code()
word = code.codewords[11].copy()
word[4] ^= 1
data, position = cl.hamming_decode(word)
print("flipped bit 5 -> decoder reports", position, "data", data)

# Three copies of a memory bit plus a voter that errs with probability eps_M.
# Waiting too long lets two copies flip; refreshing too often lets the voter
# dominate. The best refresh interval gives an effective rate near 12 eps_M.
for eps_M in (1e-3, 1e-2):
    t_opt, eps_opt, ratio, gain = cl.tmr_memory_optimize(eps_M)
    print(f"eps_M={eps_M:g}: best eps={eps_opt:.4g}, kappa_eff/kappa={ratio:.4g}")

# With a voter reliability of 0.925 the protected memory beats a bare bit
# only inside a window of wait times.
lo, hi = cl.memory_crossings(0.925)
print(f"protected memory wins for {lo:.4f} < kappa t0 < {hi:.4f}")

# Exact bundle failure of a NAND stage against a Monte Carlo estimate.
R, _ = cl.tmr_reliability("nand", cl.NoiseParams(eps=0.02, eps_M=0.02))
rate, se = cl.simulate_nand_bundle(0.02, 0.02, trials=200_000, seed=1)
print(f"NAND bundle failure: exact {1 - R:.5f}, sampled {rate:.5f} +/- {se:.5f}")

# Concatenation: each level squares the error until a floor lam takes over.
flow = cl.recursion_flow(cl.RecursionParams(c_n=3, lam=1e-6, eps0=0.01, levels=8))
for level, e in enumerate(flow.eps):
    print(f"level {level}: {e:.3e}")

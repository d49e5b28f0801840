"""Classical coding and fault-tolerance analytics.

Closed-form evaluators for parity checks, repetition codes, the [7,4,3]
Hamming code, triple-modular-redundancy (TMR) memory and NAND reliability and
recursive concatenation, plus Monte Carlo simulators used as oracles for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, log2, sqrt

import numpy as np

from . import gf2

MC_BLOCK = 1 << 16


def block_rngs(seed: int, trials: int, block: int = MC_BLOCK):
    """Yield ``(rng, n)`` per fixed-size block of trials.

    Block ``b`` always draws from ``default_rng([seed, b])`` so results do not
    depend on how blocks are scheduled across workers.
    """
    for b, start in enumerate(range(0, trials, block)):
        yield np.random.default_rng([seed, b]), min(block, trials - start)


@dataclass(frozen=True)
class NoiseParams:
    eps: float = 0.0
    eps_M: float = 0.0
    kappa: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        for name in ("eps", "eps_M"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        if self.kappa < 0 or self.t0 < 0:
            raise ValueError("kappa and t0 must be non-negative")

    @classmethod
    def memory(cls, eps_M: float, kappa_t0: float) -> "NoiseParams":
        """Memory noise with per-bit flip probability set by the wait time."""
        return cls(eps=memory_flip_probability(kappa_t0), eps_M=eps_M, kappa=1.0, t0=kappa_t0)


@dataclass(frozen=True)
class RecursionParams:
    c_n: float = 3.0
    lam: float = 0.0
    eps0: float = 0.01
    levels: int = 3
    n: int = 3

    def __post_init__(self):
        if self.c_n <= 0:
            raise ValueError("c_n must be positive")
        if not 0 <= self.lam < 1:
            raise ValueError("lambda must lie in [0, 1)")
        if self.levels < 0:
            raise ValueError("levels must be >= 0")


# ------------------------------------------------------------ parity / repetition


def parity_detect_probs(m: int, eps: float):
    """Probabilities of 0, 1 and 2 flips in an m-bit block plus its parity bit."""
    if m < 1:
        raise ValueError("block size must be >= 1")
    n = m + 1
    p0 = (1 - eps) ** n
    p1 = n * eps * (1 - eps) ** m
    p2 = comb(n, 2) * eps**2 * (1 - eps) ** (m - 1)
    return p0, p1, p2


def repetition_logical_error(m: int, eps):
    """Majority-vote failure probability of the (2m+1)-bit repetition code."""
    if m < 1:
        raise ValueError("m must be >= 1")
    eps = np.asarray(eps, dtype=float)
    n = 2 * m + 1
    total = sum(comb(n, k) * eps**k * (1 - eps) ** (n - k) for k in range(m + 1, n + 1))
    return float(total) if total.ndim == 0 else total


def repetition_transition_width(m: int, eps: float = 0.5) -> float:
    """Gaussian width sigma/N of the error-fraction distribution at ``eps``.

    At eps = 1/2 this is the width of the logical-error step, ~1/sqrt(2m+1).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return sqrt(eps * (1 - eps) / (2 * m + 1))


def redundancy_bound_ok(M: int, R: int) -> bool:
    """Whether R check bits can label all M+R+1 single-error states."""
    if M < 0 or R < 0:
        raise ValueError("bit counts must be non-negative")
    return 2**R >= M + R + 1


def binary_entropy(eps: float) -> float:
    if eps in (0.0, 1.0):
        return 0.0
    return -(eps * log2(eps) + (1 - eps) * log2(1 - eps))


def shannon_redundancy(N: int, eps: float):
    """Entropy S (bits) of the error pattern, exact rate 1 - S/N, and the small-eps rate.

    Returns ``(S, r_exact, r_small_eps)``. These are asymptotic rates; a
    finite block needs a subextensive safety margin on the redundancy on top
    of them, which is not modelled here.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be a probability")
    S = N * binary_entropy(eps)
    r_approx = 1.0 - eps * log2(2 / eps) if eps > 0 else 1.0
    return S, 1.0 - S / N, r_approx


# ---------------------------------------------------------------------- Hamming


@dataclass(frozen=True)
class BinaryCode:
    n: int
    k: int
    d: int
    H: np.ndarray
    codewords: np.ndarray

    def check(self) -> bool:
        if len(self.codewords) != 2**self.k:
            return False
        if np.any(gf2.matvec(self.H, self.codewords.T)):
            return False
        words = self.codewords.astype(int)
        dist = (words[:, None, :] ^ words[None, :, :]).sum(-1)
        off = dist[~np.eye(len(words), dtype=bool)]
        return bool(off.min() >= self.d)


# column k (1-based) is the binary representation of k, row j is bit P_{j+1}
HAMMING_H = np.array(
    [
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)
HAMMING_DATA_POSITIONS = (3, 5, 6, 7)
HAMMING_PARITY_POSITIONS = (1, 2, 4)


def hamming_encode(data) -> np.ndarray:
    """Encode 4 data bits into a 7-bit codeword.

    Data go to positions 3, 5, 6, 7; positions 1, 2, 4 hold the parity checks
    P1, P2, P3 chosen so that H @ word = 0 (mod 2).
    """
    data = np.asarray(data, dtype=np.uint8)
    if data.shape != (4,) or np.any(data > 1):
        raise ValueError("need exactly 4 bits")
    word = np.zeros(7, dtype=np.uint8)
    for pos, bit in zip(HAMMING_DATA_POSITIONS, data):
        word[pos - 1] = bit
    for row, pos in zip(HAMMING_H, HAMMING_PARITY_POSITIONS):
        word[pos - 1] = int(row @ word) % 2
    return word


def hamming_syndrome(word) -> tuple[int, int, int]:
    """(P3, P2, P1) for a received 7-bit word."""
    p = gf2.matvec(HAMMING_H, np.asarray(word, dtype=np.uint8))
    return int(p[2]), int(p[1]), int(p[0])


def hamming_decode(word):
    """Correct at most one flip and return ``(data, corrected_position)``.

    Position 0 means no correction. Two flips decode to a wrong codeword.
    """
    word = np.array(word, dtype=np.uint8)
    if word.shape != (7,):
        raise ValueError("need exactly 7 bits")
    p3, p2, p1 = hamming_syndrome(word)
    pos = p1 + 2 * p2 + 4 * p3
    if pos:
        word[pos - 1] ^= 1
    data = np.array([word[p - 1] for p in HAMMING_DATA_POSITIONS], dtype=np.uint8)
    return data, pos


def hamming_code() -> BinaryCode:
    datas = [np.array([(v >> (3 - j)) & 1 for j in range(4)], dtype=np.uint8) for v in range(16)]
    words = np.array([hamming_encode(d) for d in datas])
    return BinaryCode(n=7, k=4, d=3, H=HAMMING_H.copy(), codewords=words)


# ----------------------------------------------------------- TMR reliability


def memory_flip_probability(kappa_t0):
    """Flip probability of a bit after waiting t0 at flip rate kappa."""
    return 0.5 * (1.0 - np.exp(-2.0 * np.asarray(kappa_t0, dtype=float)))


def _bundle_reliability(r_m0):
    return r_m0**3 + 3 * r_m0**2 * (1 - r_m0)


def tmr_reliability(kind: str, np_: NoiseParams):
    """Probability that a 3-bit bundle stays within the correctable space.

    Returns ``(R, R_quadratic)`` where the second value is the second-order
    expansion in the failure probabilities.
    """
    r_m = 1.0 - np_.eps_M
    if kind == "memory":
        # an explicit wait time takes precedence over a directly given eps
        kt0 = np_.kappa * np_.t0
        eps = float(memory_flip_probability(kt0)) if kt0 > 0 else np_.eps
        r_m0 = r_m * (1.0 - eps)
        approx = 1.0 - 3.0 * (eps + np_.eps_M) ** 2
    elif kind == "nand":
        eps = np_.eps
        r_m0 = r_m**2 * (1.0 - eps)
        approx = 1.0 - 3.0 * (2.0 * np_.eps_M + eps) ** 2
    else:
        raise ValueError("kind must be 'memory' or 'nand'")
    return float(_bundle_reliability(r_m0)), float(approx)


def tmr_memory_curve(r_m: float, kappa_t0) -> np.ndarray:
    """Memory reliability for one correction cycle versus kappa*t0."""
    r0 = 1.0 - memory_flip_probability(kappa_t0)
    return _bundle_reliability(r_m * r0)


def single_bit_reliability(kappa_t0) -> np.ndarray:
    return 1.0 - memory_flip_probability(kappa_t0)


def memory_crossings(r_m: float, lo: float = 1e-6, hi: float = 5.0, points: int = 20001):
    """kappa*t0 values where the encoded and bare memory reliabilities cross."""
    from scipy.optimize import brentq

    grid = np.linspace(lo, hi, points)
    diff = tmr_memory_curve(r_m, grid) - single_bit_reliability(grid)
    roots = []
    for i in np.flatnonzero(np.sign(diff[:-1]) != np.sign(diff[1:])):
        f = lambda x: float(tmr_memory_curve(r_m, x) - single_bit_reliability(x))
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14))
    return roots


def kappa_eff_ratio(eps, eps_M: float):
    """Small-eps effective logical flip rate in units of the bare rate."""
    eps = np.asarray(eps, dtype=float)
    return 3.0 * (eps + 2.0 * eps_M + eps_M**2 / eps)


def tmr_memory_optimize(eps_M: float, kappa: float = 1.0):
    """Optimal wait between corrections for the TMR memory.

    Returns ``(t0_opt, eps_opt, kappa_eff_ratio, gain)``. The optimum of
    3(eps + 2 eps_M + eps_M^2/eps) sits at eps = eps_M. For eps_M = 0 the
    optimum degenerates to t0 -> 0 with unbounded gain.
    """
    if eps_M < 0 or eps_M >= 0.5:
        raise ValueError("eps_M must lie in [0, 0.5)")
    if eps_M == 0:
        return 0.0, 0.0, 0.0, float("inf")
    eps_opt = eps_M
    t0 = -np.log(1.0 - 2.0 * eps_opt) / (2.0 * kappa)
    ratio = float(kappa_eff_ratio(eps_opt, eps_M))
    return float(t0), eps_opt, ratio, 1.0 / ratio


def nand_gain(eps: float, eps_M: float) -> float:
    denom = 3.0 * (2.0 * eps_M + eps) ** 2
    if denom <= 0:
        raise ValueError("gain undefined when eps = eps_M = 0")
    return eps / denom


# ----------------------------------------------------------------- recursion


@dataclass
class RecursionResult:
    eps: list
    hardware: list
    gain: list
    threshold: float
    crossover_level: int | None


def recursion_flow(rp: RecursionParams) -> RecursionResult:
    """Iterate eps_{j+1} = lambda*eps_j + c_n*eps_j^2 over ``rp.levels`` levels.

    ``crossover_level`` is the first level where the linear term dominates
    (eps_j < lambda/c_n), after which decay is only single-exponential.
    """
    eps = [float(rp.eps0)]
    for _ in range(rp.levels):
        e = eps[-1]
        eps.append(rp.lam * e + rp.c_n * e * e)
    hardware = [rp.n**j for j in range(rp.levels + 1)]
    g = 1.0 / (rp.c_n * rp.eps0)
    with np.errstate(over="ignore"):
        gain = [float(np.power(g, 2.0**j - 1)) for j in range(rp.levels + 1)]
    crossover = None
    if rp.lam > 0:
        for j, e in enumerate(eps):
            if e < rp.lam / rp.c_n:
                crossover = j
                break
    return RecursionResult(eps, hardware, gain, 1.0 / rp.c_n, crossover)


# --------------------------------------------------------------- Monte Carlo


@dataclass
class MemorySimResult:
    reliability: np.ndarray  # fraction still correctable after each cycle
    logical_error: np.ndarray  # fraction whose majority decodes wrongly
    trials: int

    def stderr(self, cycle: int = 0) -> float:
        r = self.reliability[cycle]
        return float(np.sqrt(max(r * (1 - r), 1e-300) / self.trials))


def simulate_tmr_memory(np_: NoiseParams, cycles: int = 1, trials: int = 100_000, seed: int = 0,
                        accounting: str = "component") -> MemorySimResult:
    """Monte Carlo of the corrected 3-bit memory.

    Each cycle: three perfect majority votes, each output flipped with eps_M,
    then each bit flipped with eps while idling. With ``accounting="component"``
    a bit counts as bad if any component on its path failed (two failures do
    not cancel), which is the reliability notion of the closed form. With
    ``accounting="value"`` actual bit values are tracked.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if accounting not in ("component", "value"):
        raise ValueError("accounting must be 'component' or 'value'")
    ok_counts = np.zeros(cycles)
    logical_counts = np.zeros(cycles)
    for rng, n in block_rngs(seed, trials):
        wrong = np.zeros((n, 3), dtype=bool)  # relative to the stored logical value
        failed = np.zeros(n, dtype=bool)
        for c in range(cycles):
            majority = wrong.sum(1) >= 2
            voted = np.repeat(majority[:, None], 3, axis=1)
            vote_fail = rng.random((n, 3)) < np_.eps_M
            mem_flip = rng.random((n, 3)) < np_.eps
            if accounting == "component":
                wrong = voted | vote_fail | mem_flip
            else:
                wrong = voted ^ vote_fail ^ mem_flip
            bad = wrong.sum(1) >= 2
            failed |= bad
            ok_counts[c] += np.sum(~failed)
            logical_counts[c] += np.sum(bad)
    return MemorySimResult(ok_counts / trials, logical_counts / trials, trials)


def simulate_nand_bundle(eps: float, eps_M: float, trials: int = 100_000, seed: int = 0):
    """Monte Carlo failure rate of the fault-tolerant logical NAND.

    Each of the three output lines depends on two input majority voters and
    one physical NAND; a failed NAND outputs the complement of the right
    answer, and a line is bad if any part on its path failed. The bundle
    fails when two or more lines are bad. Returns ``(rate, stderr)``.
    """
    fails = 0
    for rng, n in block_rngs(seed, trials):
        a = rng.integers(0, 2, n, dtype=np.uint8)
        b = rng.integers(0, 2, n, dtype=np.uint8)
        truth = 1 - (a & b)
        bad_lines = np.zeros(n, dtype=np.int64)
        for _ in range(3):
            voter_a = rng.random(n) < eps_M
            voter_b = rng.random(n) < eps_M
            gate = rng.random(n) < eps
            out = np.where(voter_a | voter_b | gate, 1 - truth, truth)
            bad_lines += out != truth
        fails += int(np.sum(bad_lines >= 2))
    rate = fails / trials
    return rate, float(np.sqrt(max(rate * (1 - rate), 1e-300) / trials))

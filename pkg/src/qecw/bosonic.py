"""Truncated-Fock oscillator tools and binomial codes.

Covers the exact damped-oscillator Kraus family, a Lindblad integrator used
as its independent oracle, the displaced-frame identity for a driven damped
oscillator, binomial codes (the kitten code is N = S = 1) with their
recovery, the two-mode code and a break-even comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb, factorial
from typing import Callable

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .core import (
    DimensionError,
    KrausChannel,
    apply_channel,
    dag,
    dm,
    fidelity,
    ket,
    trace_distance,
    unitary_rotation_from_basis_pairs,
)
from .qubit_codes import CodeSpace, cardinal_states, worst_cardinal_infidelity  # noqa: F401

LEAKAGE_TOL = 1e-8


class LeakageError(ValueError):
    """A state has too much weight near the Fock-space cutoff."""


class FockSpace:
    """Oscillator truncated to |0>..|dim-1>."""

    def __init__(self, dim: int):
        if dim < 2:
            raise DimensionError("Fock dimension must be at least 2")
        self.dim = int(dim)

    def __repr__(self):
        return f"FockSpace({self.dim})"

    @cached_property
    def a(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), 1).astype(complex)

    @cached_property
    def adag(self) -> np.ndarray:
        return dag(self.a)

    @cached_property
    def n(self) -> np.ndarray:
        return np.diag(np.arange(self.dim)).astype(complex)

    @cached_property
    def parity(self) -> np.ndarray:
        return np.diag((-1.0) ** np.arange(self.dim)).astype(complex)

    @cached_property
    def x(self) -> np.ndarray:
        return (self.a + self.adag) / np.sqrt(2)

    @cached_property
    def p(self) -> np.ndarray:
        return 1j * (self.adag - self.a) / np.sqrt(2)

    def fock(self, k: int) -> np.ndarray:
        return ket(k, self.dim)

    def coherent(self, alpha: complex) -> np.ndarray:
        k = np.arange(self.dim)
        logs = k * np.log(abs(alpha) + 1e-300) - 0.5 * gammaln(k + 1) - abs(alpha) ** 2 / 2
        phase = np.exp(1j * np.angle(alpha) * k)
        psi = np.exp(logs) * phase
        if alpha == 0:
            psi = self.fock(0)
        return psi.astype(complex)

    def leakage(self, state) -> float:
        """Population of the top Fock level."""
        state = np.asarray(state)
        if state.ndim == 1:
            return float(abs(state[-1]) ** 2)
        return float(abs(state[-1, -1]))

    def check_leakage(self, state, tol: float = LEAKAGE_TOL):
        lk = self.leakage(state)
        if lk >= tol:
            raise LeakageError(f"top-level population {lk:.2e} exceeds {tol:.0e}; raise the Fock dimension")
        return lk

    def displacement(self, alpha: complex) -> np.ndarray:
        return displacement_block(self.dim, alpha)


def displacement_block(dim: int, alpha: complex) -> np.ndarray:
    """Leading dim x dim block of the untruncated displacement D(alpha).

    Matrix elements use <m|D(alpha)|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2)
    L_n^(m-n)(|alpha|^2) for m >= n (and the mirrored form for m < n),
    evaluated in log space. Unlike the exponential of a truncated generator
    this block carries no edge error, only omits the rows and columns above
    the cutoff.
    """
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    return displacement_blocks(dim, np.array([alpha]))[0]


def displacement_blocks(dim: int, alphas) -> np.ndarray:
    """Stack of ``displacement_block`` for many amplitudes, shape (len, dim, dim)."""
    alphas = np.asarray(alphas, dtype=complex).ravel()[:, None, None]
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    hi, lo = np.maximum(m, n), np.minimum(m, n)
    k = hi - lo
    mod = np.abs(alphas)
    x = mod**2
    lag = eval_genlaguerre(lo, k, x)
    logmag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + k * np.log(np.maximum(mod, 1e-300)) - x / 2
    unit = np.exp(1j * np.angle(alphas))
    phase = np.where(m >= n, unit**k, (-np.conj(unit)) ** k)
    return np.exp(logmag) * lag * phase


def hermite_functions(nmax: int, x: np.ndarray) -> np.ndarray:
    """Oscillator eigenfunctions phi_0..phi_{nmax-1} on a grid (rows = n)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((nmax, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if nmax > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


# ---------------------------------------------------------------- damping


@dataclass(frozen=True)
class DampingParams:
    kappa: float
    t: float
    ellmax: int = 4

    def __post_init__(self):
        if self.kappa * self.t < 0:
            raise ValueError("kappa*t must be non-negative")
        if self.ellmax < 0:
            raise ValueError("ellmax must be >= 0")

    @property
    def kt(self) -> float:
        return self.kappa * self.t


def damped_kraus(fs: FockSpace, dp: DampingParams) -> KrausChannel:
    """K_l = sqrt((1-e^{-kt})^l / l!) e^{-kt n/2} a^l for l = 0..ellmax.

    Completeness is exact on Fock states n <= ellmax; above that the missing
    higher-loss terms leave a defect reported in ``channel.defect``.
    """
    if dp.ellmax >= fs.dim:
        raise DimensionError("ellmax must be below the Fock dimension")
    kt = dp.kt
    decay = np.diag(np.exp(-kt * np.arange(fs.dim) / 2)).astype(complex)
    ops, labels = [], []
    a_pow = np.eye(fs.dim, dtype=complex)
    for ell in range(dp.ellmax + 1):
        weight = np.sqrt((-np.expm1(-kt)) ** ell / factorial(ell))
        ops.append(weight * decay @ a_pow)
        labels.append("no-jump" if ell == 0 else f"loss x{ell}")
        a_pow = fs.a @ a_pow
    return KrausChannel(ops, labels, tol=1.0, check=False)


def kraus_defect_on(ch: KrausChannel, nmax: int) -> float:
    """max |<m|sum K^dag K - I|n>| restricted to Fock states m, n <= nmax."""
    total = sum(dag(k) @ k for k in ch.ops)
    block = total[: nmax + 1, : nmax + 1]
    return float(np.max(np.abs(block - np.eye(nmax + 1))))


def dissipator(a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """D[a]rho = a rho a^dag - (a^dag a rho + rho a^dag a)/2."""
    ad = dag(a)
    ada = ad @ a
    return a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada)


def rk4(rhs: Callable, y0, t_final: float, steps: int, t0: float = 0.0):
    """Classical fixed-step fourth-order Runge-Kutta; returns the final value."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    h = (t_final - t0) / steps
    y, t = y0, t0
    for _ in range(steps):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return y


def lindblad_evolve(fs: FockSpace, rho0, kappa: float, t: float, steps: int = 200,
                    hamiltonian: np.ndarray | None = None) -> np.ndarray:
    """Integrate d rho/dt = -i[H, rho] + kappa D[a]rho with RK4."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        rho0 = dm(rho0)
    fs.check_leakage(rho0)
    a = fs.a

    def rhs(_, rho):
        out = kappa * dissipator(a, rho)
        if hamiltonian is not None:
            out = out - 1j * (hamiltonian @ rho - rho @ hamiltonian)
        return out

    rho = rk4(rhs, rho0, t, steps)
    rho = (rho + dag(rho)) / 2
    fs.check_leakage(rho)
    return rho


def _as_drive(drive) -> Callable[[float], complex]:
    if callable(drive):
        return drive
    times, values = (np.asarray(v) for v in drive)
    values = values.astype(complex)
    return lambda t: np.interp(t, times, values.real) + 1j * np.interp(t, times, values.imag)


def frame_amplitude(drive, kappa: float, t: float, steps: int = 400) -> complex:
    """Solve d alpha/dt = -i eps(t) - (kappa/2) alpha from alpha(0) = 0."""
    eps = _as_drive(drive)
    return complex(rk4(lambda s, al: -1j * eps(s) - 0.5 * kappa * al, 0j, t, steps))


@dataclass
class DrivenFrameResult:
    max_deviation: float
    alpha: complex
    times: np.ndarray
    deviations: np.ndarray


def driven_frame_check(fs: FockSpace, drive, kappa: float, t: float, steps: int = 400,
                       samples: int = 5, rho0=None) -> DrivenFrameResult:
    """Compare the driven damped evolution with the displaced undriven one.

    ``drive`` is a callable eps(t) or a ``(times, values)`` table (linearly
    interpolated; the table should resolve the pulse well below its shortest
    time scale). Both pictures are integrated on the same RK4 grid and the
    trace distance between rho(t) and D(alpha) rho_tilde D(alpha)^dag is
    recorded at ``samples`` checkpoints.
    """
    eps = _as_drive(drive)
    if rho0 is None:
        rho0 = dm(fs.fock(0))
    rho0 = np.asarray(rho0, dtype=complex)
    fs.check_leakage(rho0)
    a, ad = fs.a, fs.adag

    d2 = fs.dim**2

    def unpack(y):
        return y[:d2].reshape(fs.dim, fs.dim), y[d2:2 * d2].reshape(fs.dim, fs.dim), y[-1]

    def rhs(s, y):
        rho, rho_t, al = unpack(y)
        e = eps(s)
        h = e * ad + np.conj(e) * a
        return np.concatenate([
            (-1j * (h @ rho - rho @ h) + kappa * dissipator(a, rho)).ravel(),
            (kappa * dissipator(a, rho_t)).ravel(),
            [-1j * e - 0.5 * kappa * al],
        ])

    checkpoints = np.linspace(0, t, samples + 1)[1:]
    per = max(1, steps // samples)
    y = np.concatenate([rho0.ravel(), rho0.ravel(), [0j]])
    devs = []
    t_prev = 0.0
    for tc in checkpoints:
        y = rk4(rhs, y, tc, per, t0=t_prev)
        t_prev = tc
        rho, rho_t, al = unpack(y)
        d = displacement_block(fs.dim, al)
        recon = d @ rho_t @ dag(d)
        fs.check_leakage(rho, tol=1e-6)
        devs.append(trace_distance(rho, recon))
    return DrivenFrameResult(float(max(devs)), complex(y[-1]), checkpoints, np.array(devs))


# -------------------------------------------------------------- binomial codes


@dataclass(frozen=True)
class BinomialCode:
    N: int
    S: int
    dim: int
    codewords: tuple
    L: int
    G: int
    D: int

    @property
    def spacing(self) -> int:
        return self.S + 1

    def fock_space(self) -> FockSpace:
        return FockSpace(self.dim)

    def code_space(self) -> CodeSpace:
        stabs = (FockSpace(self.dim).parity,) if self.S == 1 else ()
        return CodeSpace(self.codewords, stabs, name=f"binomial(N={self.N},S={self.S})")

    def support(self, mu: int) -> list[int]:
        return [int(k) for k in np.flatnonzero(np.abs(self.codewords[mu]) > 1e-14)]

    def mean_photons(self) -> tuple[float, float]:
        n = np.arange(self.dim)
        return tuple(float(np.sum(n * abs(w) ** 2)) for w in self.codewords)


def binomial_code(N: int, S: int, dim: int | None = None) -> BinomialCode:
    """Codewords 2^{-N/2} sum_p sqrt(C(N+1, p)) |p(S+1)>, even p -> |0_L>, odd p -> |1_L>.

    ``L``, ``G`` and ``D`` are the nominal loss, gain and dephasing counts of a
    loss-only design: L = S, G = 0, D = floor(N/2).
    """
    if N < 1 or S < 1:
        raise ValueError("N and S must be >= 1")
    top = (N + 1) * (S + 1)
    if dim is None:
        dim = 4 * top
    if dim < (N + 2) * (S + 1):
        raise DimensionError(f"need dim >= {(N + 2) * (S + 1)}")
    words = [np.zeros(dim, dtype=complex), np.zeros(dim, dtype=complex)]
    for p in range(N + 2):
        words[p % 2][p * (S + 1)] = np.sqrt(comb(N + 1, p) / 2**N)
    fs = FockSpace(dim)
    for w in words:
        if abs(np.linalg.norm(w) - 1) > 1e-12:
            raise RuntimeError("binomial codeword is not normalized")
        fs.check_leakage(w)
    code = BinomialCode(N, S, dim, tuple(words), L=S, G=0, D=N // 2)
    n0, n1 = code.mean_photons()
    if abs(n0 - n1) > 1e-12:
        raise RuntimeError("binomial codewords have unequal photon numbers")
    return code


def kitten_code(dim: int = 16) -> BinomialCode:
    """|0_L> = (|0>+|4>)/sqrt2, |1_L> = |2>."""
    return binomial_code(1, 1, dim)


def kitten_error_words(dim: int = 16) -> dict:
    s = 1 / np.sqrt(2)
    fs = FockSpace(dim)
    return {
        "E0": fs.fock(3),
        "E1": fs.fock(1),
        "E2": s * (fs.fock(0) - fs.fock(4)),
    }


def kitten_recovery(kappa_t: float, dim: int = 16, exact_angle: bool = False):
    """(jump_unitary, no_jump_unitary) for the kitten code.

    The jump unitary maps |3> -> |0_L> and |1> -> |1_L>. The no-jump unitary
    maps cos(theta/2)|0_L> + sin(theta/2)|E2> back to |0_L> and fixes |1_L>,
    with sin(theta/2) = kappa t (or tan(theta/2) = tanh(kappa t), the exact
    no-jump angle, when ``exact_angle`` is set).
    """
    if not 0 <= kappa_t < 0.5:
        raise ValueError("kappa_t must lie in [0, 0.5)")
    code = kitten_code(dim)
    words = kitten_error_words(dim)
    zero, one = code.codewords
    jump = unitary_rotation_from_basis_pairs([(words["E0"], zero), (words["E1"], one)])
    half = np.arctan(np.tanh(kappa_t)) if exact_angle else np.arcsin(kappa_t)
    c, s = np.cos(half), np.sin(half)
    e2 = words["E2"]
    no_jump = unitary_rotation_from_basis_pairs(
        [(c * zero + s * e2, zero), (-s * zero + c * e2, e2), (one, one)]
    )
    return jump, no_jump


def kitten_round_channel(kappa_t: float, dim: int = 16, ellmax: int = 4,
                         exact_angle: bool = False) -> KrausChannel:
    """Damping for kappa*t, parity measurement, then the conditional unitary."""
    fs = FockSpace(dim)
    damp = damped_kraus(fs, DampingParams(1.0, kappa_t, ellmax))
    jump, no_jump = kitten_recovery(kappa_t, dim, exact_angle)
    even = (np.eye(dim) + fs.parity) / 2
    odd = (np.eye(dim) - fs.parity) / 2
    ops, labels = [], []
    for k, lab in zip(damp.ops, damp.labels):
        ops.append(no_jump @ even @ k)
        labels.append(f"even|{lab}")
        ops.append(jump @ odd @ k)
        labels.append(f"odd|{lab}")
    return KrausChannel(ops, labels, tol=1.0, check=False)


def kitten_damping_errors(dim: int = 16, ellmax: int = 1) -> Callable[[float], KrausChannel]:
    """Parametrized error set {K_0(kt), ..., K_ellmax(kt)} for ``kl_check``."""
    fs = FockSpace(dim)
    return lambda kt: damped_kraus(fs, DampingParams(1.0, kt, ellmax))


# ----------------------------------------------------------------- two-mode


def two_mode_code(dim_each: int = 6) -> CodeSpace:
    """(|0,4> + |4,0>)/sqrt2 and |2,2> on two oscillators."""
    if dim_each < 5:
        raise DimensionError("dim_each must be >= 5")
    fs = FockSpace(dim_each)
    w0 = (np.kron(fs.fock(0), fs.fock(4)) + np.kron(fs.fock(4), fs.fock(0))) / np.sqrt(2)
    w1 = np.kron(fs.fock(2), fs.fock(2))
    return CodeSpace((w0, w1), name="two-mode")


def two_mode_total_photons(dim_each: int = 6) -> tuple[float, float]:
    fs = FockSpace(dim_each)
    n_tot = np.kron(fs.n, np.eye(dim_each)) + np.kron(np.eye(dim_each), fs.n)
    code = two_mode_code(dim_each)
    return tuple(float(np.vdot(w, n_tot @ w).real) for w in code.codewords)


def _nojump_infidelity(kappa1, kappa2, t, dim_each):
    n = np.arange(dim_each)
    k0 = np.kron(np.exp(-kappa1 * t * n / 2), np.exp(-kappa2 * t * n / 2))
    worst = 0.0
    for w in two_mode_code(dim_each).codewords:
        out = k0 * w
        out = out / np.linalg.norm(out)
        worst = max(worst, 1.0 - abs(np.vdot(w, out)) ** 2)
    return worst


@dataclass
class TwoModeResult:
    deviation: float
    deviation_half: float | None
    exponent: float | None


def two_mode_nojump_invariance(kappa1: float, kappa2: float, t: float,
                               dim_each: int = 6) -> TwoModeResult:
    """Infidelity of the normalized no-jump evolved codewords, worst codeword.

    The scaling exponent in (kappa1 - kappa2) is fitted from a second run with
    the rate difference halved about kappa1.
    """
    dev = _nojump_infidelity(kappa1, kappa2, t, dim_each)
    if kappa1 == kappa2:
        return TwoModeResult(dev, None, None)
    half = _nojump_infidelity(kappa1, kappa1 + (kappa2 - kappa1) / 2, t, dim_each)
    exponent = float(np.log2(dev / half)) if half > 0 and dev > 0 else None
    return TwoModeResult(dev, half, exponent)


# -------------------------------------------------------------- break-even


def zero_one_code(dim: int = 16) -> CodeSpace:
    fs = FockSpace(dim)
    return CodeSpace((fs.fock(0), fs.fock(1)), name="fock01")


def mean_cardinal_photons(code: CodeSpace) -> float:
    n = np.arange(code.host_dim)
    return float(np.mean([np.sum(n * abs(psi) ** 2) for psi in cardinal_states(code)]))


def photon_loss_ratio(dim: int = 16) -> float:
    """Initial photon-loss rate kappa<n> of the kitten code over the 0/1 encoding."""
    kitten = kitten_code(dim).code_space()
    return mean_cardinal_photons(kitten) / mean_cardinal_photons(zero_one_code(dim))


def _mean_cardinal_fidelity(rhos, states):
    return float(np.mean([fidelity(r, s) for r, s in zip(rhos, states)]))


@dataclass
class BreakEvenResult:
    times: np.ndarray
    corrected: np.ndarray
    trivial: np.ndarray
    corrected_rate: float
    trivial_rate: float
    gain: float


def _fit_rate(times, fids):
    """Decay rate from a least-squares line through (0, 0) of -ln F versus t."""
    y = -np.log(np.clip(fids, 1e-300, None))
    return float(np.dot(times, y) / np.dot(times, times))


def break_even_compare(kappa: float, cycle_time: float, n_cycles: int, dim: int = 16,
                       ellmax: int = 4, exact_angle: bool = False) -> BreakEvenResult:
    """Kitten code with ideal recovery each cycle versus the bare 0/1 encoding.

    Fidelities are averaged over the six cardinal logical states. Decay rates
    come from fits of -ln F against time; ``gain`` is trivial/corrected.
    """
    kt = kappa * cycle_time
    fs = FockSpace(dim)
    kitten = kitten_code(dim).code_space()
    triv = zero_one_code(dim)
    round_ch = kitten_round_channel(kt, dim, ellmax, exact_angle)
    damp = damped_kraus(fs, DampingParams(kappa, cycle_time, ellmax))
    k_states = cardinal_states(kitten)
    t_states = cardinal_states(triv)
    k_rhos = [dm(s) for s in k_states]
    t_rhos = [dm(s) for s in t_states]
    times = cycle_time * np.arange(n_cycles + 1)
    corrected, trivial = [1.0], [1.0]
    for _ in range(n_cycles):
        k_rhos = [apply_channel(round_ch, r, tol=np.inf) for r in k_rhos]
        t_rhos = [apply_channel(damp, r, tol=np.inf) for r in t_rhos]
        corrected.append(_mean_cardinal_fidelity(k_rhos, k_states))
        trivial.append(_mean_cardinal_fidelity(t_rhos, t_states))
    corrected, trivial = np.array(corrected), np.array(trivial)
    rc = _fit_rate(times[1:], corrected[1:])
    rt = _fit_rate(times[1:], trivial[1:])
    gain = rt / rc if rc > 0 else float("inf")
    return BreakEvenResult(times, corrected, trivial, rc, rt, gain)


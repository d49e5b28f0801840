"""Phase-space displacements and square-lattice GKP codes (hbar = 1).

Quadratures are x = (a + a^dag)/sqrt2 and p = i(a^dag - a)/sqrt2, so [x, p] = i
and the lattice constants sqrt(pi) and 2 sqrt(pi) are literal. A displacement
by V = (dx, dp) is T(V) = exp(i(dp x - dx p)) = D((dx + i dp)/sqrt2).

Conventions for syndromes, fixed by the round-trip tests:

================  =====================  ===============================
stabilizer        operator               shift it reads out
================  =====================  ===============================
S_p               exp(+i 2 sqrt(pi) x)   dx = +arg<S_p> / (2 sqrt(pi))
S_x               exp(-i 2 sqrt(pi) p)   dp = -arg<S_x> / (2 sqrt(pi))
================  =====================  ===============================
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln

from .bosonic import FockSpace, LeakageError, displacement_block, hermite_functions
from .core import dag

SQRT_PI = np.sqrt(np.pi)
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class PhaseVector:
    dx: float
    dp: float

    def __post_init__(self):
        if not (np.isfinite(self.dx) and np.isfinite(self.dp)):
            raise ValueError("phase-space vector must be finite")

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(self.dx + other.dx, self.dp + other.dp)

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(-self.dx, -self.dp)

    def __sub__(self, other: "PhaseVector") -> "PhaseVector":
        return self + (-other)

    def scale(self, c: float) -> "PhaseVector":
        return PhaseVector(c * self.dx, c * self.dp)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.dx, self.dp])

    @property
    def alpha(self) -> complex:
        """Complex amplitude of the equivalent D(alpha)."""
        return (self.dx + 1j * self.dp) / np.sqrt(2)


def symplectic(u: PhaseVector, v: PhaseVector) -> float:
    """u^T Omega v = u_x v_p - u_p v_x."""
    return float(u.array @ OMEGA @ v.array)


def composition_phase(u: PhaseVector, v: PhaseVector) -> complex:
    """Phase c in T(U) T(V) = c T(U + V), namely exp((i/2) V^T Omega U)."""
    return complex(np.exp(0.5j * symplectic(v, u)))


def commutation_phase(u: PhaseVector, v: PhaseVector) -> complex:
    """Phase c in T(U) T(V) = c T(V) T(U), namely exp(i V^T Omega U)."""
    return complex(np.exp(1j * symplectic(v, u)))


def coherent_top_population(alpha: complex, dim: int) -> float:
    """|<dim-1|alpha>|^2 for a coherent state, evaluated in log space."""
    k = dim - 1
    x = abs(alpha) ** 2
    if x == 0:
        return 0.0
    return float(np.exp(k * np.log(x) - x - gammaln(k + 1)))


def displacement(fs: FockSpace, v: PhaseVector, guard: float = 1e-8) -> np.ndarray:
    """Matrix exponential of i(dp x - dx p) built from the truncated quadratures.

    The guard rejects displacements whose displaced vacuum would reach the top
    Fock level with population above ``guard``.
    """
    lk = coherent_top_population(v.alpha, fs.dim)
    if lk > guard:
        raise LeakageError(f"displacement |alpha|={abs(v.alpha):.3g} too large for dim {fs.dim}")
    gen = 1j * (v.dp * fs.x - v.dx * fs.p)
    u = sla.expm(gen)
    if np.max(np.abs(dag(u) @ u - np.eye(fs.dim))) > 1e-8:
        raise LeakageError("truncated displacement is not unitary")
    return u


def displacement_exact(dim: int, v: PhaseVector) -> np.ndarray:
    """Leading block of the untruncated T(V) (see ``bosonic.displacement_block``)."""
    return displacement_block(dim, v.alpha)


# ---------------------------------------------------------------- Pauli frame


@dataclass(frozen=True)
class FrameElement:
    vector: PhaseVector
    phase: complex = 1.0


def gkp_pauli_frame() -> dict:
    """Stabilizers and logical Paulis of the square GKP code as translations.

    S_x = T(2 sqrt(pi), 0), S_p = T(0, 2 sqrt(pi)), X_L = T(sqrt(pi), 0),
    Z_L = T(0, sqrt(pi)). Y_L is defined as i X_L Z_L; its phase is the
    composition phase times i, which works out to 1.
    """
    sx = PhaseVector(2 * SQRT_PI, 0.0)
    sp = PhaseVector(0.0, 2 * SQRT_PI)
    xl = PhaseVector(SQRT_PI, 0.0)
    zl = PhaseVector(0.0, SQRT_PI)
    yl_phase = 1j * composition_phase(xl, zl)
    return {
        "S_x": FrameElement(sx),
        "S_p": FrameElement(sp),
        "X_L": FrameElement(xl),
        "Z_L": FrameElement(zl),
        "Y_L": FrameElement(xl + zl, yl_phase),
    }


@lru_cache(maxsize=32)
def _frame_matrix_cached(name: str, dim: int) -> np.ndarray:
    el = gkp_pauli_frame()[name]
    out = el.phase * displacement_exact(dim, el.vector)
    out.setflags(write=False)
    return out


def frame_matrix(name: str, dim: int) -> np.ndarray:
    """Exact-block matrix of a frame element (cached, read-only)."""
    return _frame_matrix_cached(name, int(dim))


# ---------------------------------------------------------- finite-energy states


@dataclass(frozen=True)
class GkpParams:
    lam: float = 0.025
    S_comb: int = 6
    r: float = np.inf
    fock_dim: int = 350

    def __post_init__(self):
        if self.lam < 0 or self.r < 0:
            raise ValueError("envelope and squeezing must be non-negative")
        if self.S_comb < 0:
            raise ValueError("S_comb must be >= 0")
        if self.fock_dim < 2:
            raise ValueError("fock_dim must be >= 2")


def _comb_wavefunction(gp: GkpParams, mu: int, x: np.ndarray) -> np.ndarray:
    """Sum of x-squeezed vacua centred on (2s + mu) sqrt(pi), s = -S..S."""
    width2 = np.exp(-2 * gp.r)
    psi = np.zeros_like(x)
    norm = np.pi ** -0.25 * np.exp(gp.r / 2)
    for s in range(-gp.S_comb, gp.S_comb + 1):
        centre = (2 * s + mu) * SQRT_PI
        psi += norm * np.exp(-((x - centre) ** 2) / (2 * width2))
    return psi


def _grid_for(gp: GkpParams):
    reach = (2 * gp.S_comb + 2) * SQRT_PI + 8 * np.exp(-gp.r)
    half = max(reach, np.sqrt(2 * gp.fock_dim) + 6)
    step = min(0.02, np.exp(-gp.r) / 12)
    return np.arange(-half, half + step / 2, step), step


def comb_fock_coefficients(gp: GkpParams, mu: int) -> np.ndarray:
    """Fock amplitudes <n|Psi_comb> for n < fock_dim.

    Finite ``r`` uses quadrature of the comb wavefunction against Hermite
    functions. ``r = inf`` is the ideal comb of position eigenstates, whose
    amplitudes sum_s phi_n(x_s) are exact (up to an overall constant).
    """
    if np.isinf(gp.r):
        centres = (2 * np.arange(-gp.S_comb, gp.S_comb + 1) + mu) * SQRT_PI
        return hermite_functions(gp.fock_dim, centres).sum(axis=1)
    x, step = _grid_for(gp)
    phi = hermite_functions(gp.fock_dim, x)
    return (phi @ _comb_wavefunction(gp, mu, x)) * step


def make_gkp_state(gp: GkpParams = GkpParams(), mu: int = 0, leakage_tol: float = 1e-6) -> np.ndarray:
    """Finite-energy GKP codeword e^{-lam n} sum_s T((2s+mu) sqrt(pi), 0) S(r)|0>, normalized."""
    if mu not in (0, 1):
        raise ValueError("mu must be 0 or 1")
    coeffs = comb_fock_coefficients(gp, mu)
    psi = np.exp(-gp.lam * np.arange(gp.fock_dim)) * coeffs
    norm = np.linalg.norm(psi)
    if norm < 1e-300 or not np.isfinite(norm):
        raise ValueError("state has zero norm")
    psi = (psi / norm).astype(complex)
    tail = float(np.sum(abs(psi[-max(1, gp.fock_dim // 20):]) ** 2))
    if tail > leakage_tol:
        raise LeakageError(f"GKP state leaks {tail:.2e} into the top Fock levels; raise fock_dim")
    return psi


def mean_photon_number(psi: np.ndarray) -> float:
    return float(np.sum(np.arange(psi.size) * abs(psi) ** 2))


def stabilizer_expectations(psi: np.ndarray) -> dict:
    dim = psi.size
    return {name: complex(np.vdot(psi, frame_matrix(name, dim) @ psi)) for name in ("S_x", "S_p")}


def finite_energy_stabilizer_check(gp: GkpParams = GkpParams(), mu: int = 0) -> dict:
    """||S^lam psi - psi|| for S^lam = e^{-lam n} S e^{+lam n}, both stabilizers.

    The ideal stabilizers act on the comb in the enlarged Fock space (so the
    similarity transform stays well conditioned); what remains is the comb
    edge, which shrinks as S_comb grows.
    """
    psi = make_gkp_state(gp, mu, leakage_tol=np.inf)
    dim = gp.fock_dim
    n = np.arange(dim)
    grow, shrink = np.exp(gp.lam * n), np.exp(-gp.lam * n)
    out = {}
    for name in ("S_x", "S_p"):
        s = frame_matrix(name, dim)
        s_lam = (shrink[:, None] * s) * grow[None, :]
        out[name] = float(np.linalg.norm(s_lam @ psi - psi))
    return out


# ------------------------------------------------------------------ syndromes


def syndrome_phase(state: np.ndarray, stab: str) -> complex:
    """<psi|S|psi> for ``stab`` in {"S_x", "S_p"}."""
    if stab not in ("S_x", "S_p"):
        raise ValueError("stab must be 'S_x' or 'S_p'")
    return complex(np.vdot(state, frame_matrix(stab, state.size) @ state))


@dataclass
class ShiftEstimate:
    dx: float
    dp: float
    sp: complex
    sx: complex
    reliable: bool


def estimate_shift(state: np.ndarray, min_modulus: float = 0.1) -> ShiftEstimate:
    """Shift modulo the lattice implied by the stabilizer phases."""
    sp = syndrome_phase(state, "S_p")
    sx = syndrome_phase(state, "S_x")
    dx = np.angle(sp) / (2 * SQRT_PI)
    dp = -np.angle(sx) / (2 * SQRT_PI)
    reliable = min(abs(sp), abs(sx)) >= min_modulus
    return ShiftEstimate(float(dx), float(dp), sp, sx, bool(reliable))


def shift_state(state: np.ndarray, v: PhaseVector) -> np.ndarray:
    out = displacement_exact(state.size, v) @ state
    return out / np.linalg.norm(out)


def correct_displacement(state: np.ndarray):
    """Apply T(-dx, 0) then T(0, -dp) from the syndrome estimate.

    Returns ``(corrected_state, estimate)``; ``estimate.reliable`` is False
    when a stabilizer expectation is too small to trust its phase.
    """
    est = estimate_shift(state)
    out = shift_state(state, PhaseVector(-est.dx, 0.0))
    out = shift_state(out, PhaseVector(0.0, -est.dp))
    return out, est


def overlap_probability(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)

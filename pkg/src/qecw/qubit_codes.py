"""Qubit codes: 3-qubit repetition code, Knill-Laflamme checks, recovery.

Conventions: qubit 1 is the most significant tensor factor and |1> is the
excited state, so amplitude damping lowers |1> to |0>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .core import (
    ATOL,
    I2,
    SIGMA_MINUS,
    X,
    Z,
    ChannelError,
    DimensionError,
    KrausChannel,
    amplitude_damping_channel,
    apply_channel,
    basis_state,
    dag,
    dm,
    embed,
    fidelity,
    is_projector,
    normalize,
    partial_trace,
    polar_isometry,
    schmidt_coefficients,
    tensor,
)


@dataclass(frozen=True)
class CodeSpace:
    """Two orthonormal codewords [|W_down>, |W_up>] in a host space."""

    codewords: tuple
    stabilizers: tuple = ()
    name: str = "code"
    tol: float = ATOL

    def __post_init__(self):
        words = tuple(np.asarray(w, dtype=complex).ravel() for w in self.codewords)
        if len(words) != 2:
            raise ValueError("a qubit code has exactly two codewords")
        if words[0].shape != words[1].shape:
            raise DimensionError("codewords live in different spaces")
        gram = np.array([[np.vdot(a, b) for b in words] for a in words])
        if np.max(np.abs(gram - np.eye(2))) > self.tol:
            raise ValueError("codewords are not orthonormal")
        stabs = tuple(np.asarray(s, dtype=complex) for s in self.stabilizers)
        for s in stabs:
            for w in words:
                if np.max(np.abs(s @ w - w)) > self.tol:
                    raise ValueError("codeword is not stabilized")
        object.__setattr__(self, "codewords", words)
        object.__setattr__(self, "stabilizers", stabs)

    @property
    def host_dim(self) -> int:
        return self.codewords[0].shape[0]

    @property
    def basis(self) -> np.ndarray:
        """Host x 2 matrix whose columns are the codewords."""
        return np.column_stack(self.codewords)

    @property
    def projector(self) -> np.ndarray:
        w = self.basis
        return w @ dag(w)

    def encode(self, alpha: complex, beta: complex) -> np.ndarray:
        return alpha * self.codewords[0] + beta * self.codewords[1]


def cardinal_states(code: CodeSpace) -> list[np.ndarray]:
    """The six logical Pauli eigenstates (+-Z, +-X, +-Y) embedded in the host."""
    s = 1 / np.sqrt(2)
    amps = [(1, 0), (0, 1), (s, s), (s, -s), (s, 1j * s), (s, -1j * s)]
    return [code.encode(a, b) for a, b in amps]


def worst_cardinal_infidelity(ch: KrausChannel, code: CodeSpace) -> float:
    worst = 0.0
    for psi in cardinal_states(code):
        out = apply_channel(ch, dm(psi), tol=np.inf)
        worst = max(worst, 1.0 - fidelity(out, psi))
    return worst


def code_process_fidelity(ch: KrausChannel, code: CodeSpace) -> float:
    """Entanglement fidelity of ``ch`` with the identity on the code space."""
    w = code.basis
    return float(sum(abs(np.trace(dag(w) @ k @ w)) ** 2 for k in ch.ops) / 4.0)


# --------------------------------------------------------- repetition code


S1 = tensor(Z, Z, I2)
S2 = tensor(I2, Z, Z)
XL = tensor(X, X, X)
ZL = tensor(Z, Z, Z)
YL = 1j * XL @ ZL

# syndrome (s1, s2) -> flipped qubit (1-based), None for no error
SYNDROME_TABLE = {(1, 1): None, (-1, 1): 1, (-1, -1): 2, (1, -1): 3}


def repetition3_code() -> CodeSpace:
    return CodeSpace(
        (basis_state("000"), basis_state("111")), (S1, S2), name="repetition3"
    )


def repetition3_logicals() -> dict:
    return {"X": XL, "Y": YL, "Z": ZL}


def controlled_x(n: int, controls: dict, target: int) -> np.ndarray:
    """Permutation matrix flipping ``target`` when every control qubit has its value.

    Qubits are 1-based with qubit 1 most significant. ``controls`` maps qubit
    to the required bit, so {1: 1} is an ordinary CNOT control.
    """
    dim = 2**n
    perm = np.arange(dim)
    for idx in range(dim):
        bits = [(idx >> (n - q)) & 1 for q in range(1, n + 1)]
        if all(bits[q - 1] == v for q, v in controls.items()):
            perm[idx] = idx ^ (1 << (n - target))
    u = np.zeros((dim, dim), dtype=complex)
    u[perm, np.arange(dim)] = 1.0
    return u


_ENCODER = controlled_x(3, {1: 1}, 3) @ controlled_x(3, {1: 1}, 2)


def encode_repetition3(alpha: complex, beta: complex, tol: float = ATOL) -> np.ndarray:
    """alpha|000> + beta|111> built by two CNOTs from (alpha|0>+beta|1>)|00>."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > tol:
        raise ValueError("amplitudes are not normalized")
    psi = tensor(np.array([alpha, beta], dtype=complex), basis_state("00"))
    return _ENCODER @ psi


def _projectors(s: np.ndarray):
    eye = np.eye(s.shape[0])
    return (eye + s) / 2, (eye - s) / 2


_STAB_PROJECTORS = {"S1": _projectors(S1), "S2": _projectors(S2)}
X2 = embed(X, 1, 3)


def _measure_stabilizer(s, state, rng):
    """Measure a +-1 observable on a ket or density matrix; returns (eigenvalue, post).

    ``s`` is either the observable or the name of a cached repetition-code stabilizer.
    """
    plus, minus = _STAB_PROJECTORS[s] if isinstance(s, str) else _projectors(s)
    if state.ndim == 1:
        p_plus = float(np.clip(np.vdot(state, plus @ state).real, 0, 1))
    else:
        p_plus = float(np.clip(np.trace(plus @ state).real, 0, 1))
    outcome = 1 if rng.random() < p_plus else -1
    proj = plus if outcome == 1 else minus
    prob = p_plus if outcome == 1 else 1 - p_plus
    if prob <= 0:
        raise RuntimeError("zero-probability measurement branch selected")
    if state.ndim == 1:
        return outcome, proj @ state / np.sqrt(prob)
    return outcome, proj @ state @ proj / prob


def syndrome_repetition3(state, rng: np.random.Generator, order: Sequence[str] = ("S1", "S2")):
    """Measure S1 = Z1Z2 and S2 = Z2Z3 on a ket or density matrix.

    Returns ``(s1, s2, post_state)``. The stabilizers commute, so ``order``
    only changes which random number decides which outcome.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != 8:
        raise DimensionError("the repetition code lives in dimension 8")
    result = {}
    for name in order:
        result[name], state = _measure_stabilizer(name, state, rng)
    return result["S1"], result["S2"], state


_TABLE_PAULIS = {
    key: np.eye(8, dtype=complex) if j is None else embed(X, j - 1, 3)
    for key, j in SYNDROME_TABLE.items()
}


def _table_pauli(s1: int, s2: int) -> np.ndarray:
    return _TABLE_PAULIS[(s1, s2)]


def measured_recovery_channel() -> KrausChannel:
    """Kraus set R0 = P1+ P2+, R1 = X1 P1- P2+, R2 = X2 P1- P2-, R3 = X3 P1+ P2-."""
    p1 = dict(zip((1, -1), _projectors(S1)))
    p2 = dict(zip((1, -1), _projectors(S2)))
    ops, labels = [], []
    for (s1, s2), j in SYNDROME_TABLE.items():
        ops.append(_table_pauli(s1, s2) @ p1[s1] @ p2[s2])
        labels.append("I" if j is None else f"X{j}")
    return KrausChannel(ops, labels)


def measurement_free_unitary() -> np.ndarray:
    """Five-qubit syndrome-copy and Toffoli correction network.

    Ancilla 4 collects Z1Z2 and ancilla 5 collects Z2Z3 through four CNOTs.
    Controlled flips then apply X1 on (1,0), X2 on (1,1) and X3 on (0,1);
    conditioning on a 0 is the NOT-Toffoli-NOT sandwich.
    """
    gates = [
        controlled_x(5, {1: 1}, 4),
        controlled_x(5, {2: 1}, 4),
        controlled_x(5, {2: 1}, 5),
        controlled_x(5, {3: 1}, 5),
        controlled_x(5, {4: 1, 5: 0}, 1),
        controlled_x(5, {4: 1, 5: 1}, 2),
        controlled_x(5, {4: 0, 5: 1}, 3),
    ]
    u = np.eye(32, dtype=complex)
    for g in gates:
        u = g @ u
    return u


def measurement_free_channel() -> KrausChannel:
    """Data-qubit channel of the network with ancillae in |00> and traced out afterwards."""
    u = measurement_free_unitary()
    ops, labels = [], []
    for a in range(4):
        # rows of u with ancilla bits = a, columns with ancillae = 00
        rows = np.arange(8) * 4 + a
        cols = np.arange(8) * 4
        ops.append(u[np.ix_(rows, cols)])
        labels.append(f"ancilla={a:02b}")
    return KrausChannel(ops, labels)


def correct_repetition3(state, mode: str = "measured", rng: np.random.Generator | None = None):
    """Correct at most one bit flip.

    In ``measured`` mode with a ket and an rng, one syndrome trajectory is
    sampled and a ket is returned. Otherwise the averaged recovery channel is
    applied and a density matrix is returned. ``measurement_free`` mode runs
    the Toffoli network on two fresh ancillae and traces them out.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != 8:
        raise DimensionError("the repetition code lives in dimension 8")
    if mode == "measured":
        if state.ndim == 1 and rng is not None:
            s1, s2, post = syndrome_repetition3(state, rng)
            return _table_pauli(s1, s2) @ post
        rho = state if state.ndim == 2 else dm(state)
        return apply_channel(measured_recovery_channel(), rho)
    if mode == "measurement_free":
        rho = state if state.ndim == 2 else dm(state)
        full = np.kron(rho, dm(basis_state("00")))
        u = measurement_free_unitary()
        out = u @ full @ dag(u)
        return partial_trace(out, [8, 4], keep=[0])
    raise ValueError("mode must be 'measured' or 'measurement_free'")


_DEFAULT_CODEWORD = encode_repetition3(np.cos(0.4), np.exp(0.7j) * np.sin(0.4))
_DEFAULT_CODEWORD.setflags(write=False)


def _default_codeword() -> np.ndarray:
    return _DEFAULT_CODEWORD


def coherent_error_trial(theta2: float, rng: np.random.Generator, psi0=None):
    """Apply exp(-i theta2 X2), measure the syndrome and correct.

    Returns ``((s1, s2), fidelity)`` with the fidelity to the original codeword.
    """
    if psi0 is None:
        psi0 = _default_codeword()
    psi = np.cos(theta2) * psi0 - 1j * np.sin(theta2) * (X2 @ psi0)
    s1, s2, post = syndrome_repetition3(psi, rng)
    post = _table_pauli(s1, s2) @ post
    return (s1, s2), float(abs(np.vdot(psi0, post)) ** 2)


@dataclass
class BathTrialResult:
    branch: tuple
    probabilities: dict
    schmidt_rank: dict
    schmidt_residual: dict
    post_state: np.ndarray


def bath_error_trial(eps: complex, rng: np.random.Generator | None = None, psi0=None,
                     tol: float = ATOL) -> BathTrialResult:
    """Error entangled with a one-qubit bath, then syndrome measurement.

    The joint state sqrt(1-|eps|^2)|Psi0>|B0> + eps X2|Psi0>|B2> is projected on
    each syndrome branch. Both branches factorize into system times bath;
    ``schmidt_residual`` is the second Schmidt coefficient of each branch.
    """
    if abs(eps) > 1 + tol:
        raise ValueError("|eps| must not exceed 1")
    if psi0 is None:
        psi0 = _default_codeword()
    x2 = X2
    amp0 = np.sqrt(max(0.0, 1 - abs(eps) ** 2))
    joint = amp0 * np.kron(psi0, [1, 0]) + eps * np.kron(x2 @ psi0, [0, 1])
    probs, ranks, residual, posts = {}, {}, {}, {}
    for s1, s2 in [(1, 1), (-1, -1), (-1, 1), (1, -1)]:
        p = np.kron(_projectors(S1)[0 if s1 == 1 else 1] @ _projectors(S2)[0 if s2 == 1 else 1], I2)
        branch = p @ joint
        prob = float(np.vdot(branch, branch).real)
        if prob <= tol:
            continue
        branch = branch / np.sqrt(prob)
        sv = schmidt_coefficients(branch, 8)
        probs[(s1, s2)] = prob
        ranks[(s1, s2)] = int(np.sum(sv > tol))
        residual[(s1, s2)] = float(sv[1]) if len(sv) > 1 else 0.0
        posts[(s1, s2)] = branch
    keys = list(probs)
    rng = rng or np.random.default_rng(0)
    chosen = keys[rng.choice(len(keys), p=np.array([probs[k] for k in keys]) / sum(probs.values()))]
    return BathTrialResult(chosen, probs, ranks, residual, posts[chosen])


def repetition_bitflip_errors(p: float) -> KrausChannel:
    """{sqrt(1-3p) I, sqrt(p) X_j}: at most one flip among three qubits."""
    if not 0 <= p <= 1 / 3:
        raise ValueError("need 0 <= p <= 1/3")
    ops = [np.sqrt(1 - 3 * p) * np.eye(8, dtype=complex)]
    ops += [np.sqrt(p) * embed(X, j, 3) for j in range(3)]
    return KrausChannel(ops, ["I", "X1", "X2", "X3"])


def amplitude_damping_register(p_minus: float, n: int) -> KrausChannel:
    """Independent amplitude damping on each of ``n`` qubits."""
    ch = amplitude_damping_channel(p_minus)
    out = ch
    for _ in range(n - 1):
        out = out.tensor(ch)
    return out


# ----------------------------------------------------- Knill-Laflamme engine


ErrorModel = Union[KrausChannel, Callable[[float], KrausChannel]]


@dataclass
class KLReport:
    alpha_down: np.ndarray
    alpha_up: np.ndarray
    max_cross_block: float
    max_word_dependence: float
    beta: np.ndarray
    F_basis: KrausChannel
    verdict: str
    order: int | None = None
    violation: float = 0.0
    violation_half: float | None = None
    scaling_ratio: float | None = None

    def to_dict(self) -> dict:
        def cplx(m):
            m = np.asarray(m)
            return {"re": m.real.tolist(), "im": m.imag.tolist()}

        return {
            "verdict": self.verdict,
            "order": self.order,
            "alpha_down": cplx(self.alpha_down),
            "alpha_up": cplx(self.alpha_up),
            "max_cross_block": self.max_cross_block,
            "max_word_dependence": self.max_word_dependence,
            "beta": [float(b) for b in self.beta],
            "violation": self.violation,
            "violation_half": self.violation_half,
            "scaling_ratio": self.scaling_ratio,
            "F_labels": list(self.F_basis.labels),
        }


def kl_matrices(code: CodeSpace, ops: Sequence[np.ndarray]):
    """alpha_down, alpha_up and the cross block <W_down|K_l^dag K_k|W_up>."""
    w0, w1 = code.codewords
    if ops[0].shape[1] != w0.shape[0]:
        raise DimensionError("error operators and code live in different spaces")
    a0 = np.column_stack([k @ w0 for k in ops])
    a1 = np.column_stack([k @ w1 for k in ops])
    return dag(a0) @ a0, dag(a1) @ a1, dag(a0) @ a1


def kl_violation(code: CodeSpace, ops: Sequence[np.ndarray]) -> float:
    down, up, cross = kl_matrices(code, ops)
    return float(max(np.max(np.abs(up - down)), np.max(np.abs(cross))))


def kl_check(code: CodeSpace, errs: ErrorModel, order_param: float | None = None,
             exact_tol: float = 1e-9, ratio_window: tuple = (3.0, 5.0)) -> KLReport:
    """Evaluate the Knill-Laflamme conditions for ``errs`` on ``code``.

    ``errs`` is either a fixed Kraus set or a function of a small parameter.
    In the latter case the violation is also evaluated at ``order_param/2``;
    a ratio near 4 means the violation is quadratic, so the conditions hold to
    first order and the verdict is ``approximate`` with ``order=2``.
    """
    if callable(errs):
        if order_param is None:
            raise ValueError("a parametrized error model needs order_param")
        channel = errs(order_param)
    else:
        channel = errs
    ops = list(channel.ops)
    down, up, cross = kl_matrices(code, ops)
    for m in (down, up):
        if np.max(np.abs(m - dag(m))) > ATOL:
            raise ChannelError("alpha matrix is not Hermitian")
    word_dep = float(np.max(np.abs(up - down)))
    cross_max = float(np.max(np.abs(cross)))
    violation = max(word_dep, cross_max)

    alpha = (down + up) / 2
    beta, vecs = np.linalg.eigh(alpha)
    idx = np.argsort(beta)[::-1]
    beta, vecs = beta[idx], vecs[:, idx]
    if beta.min() < -ATOL:
        raise ChannelError("alpha has a negative eigenvalue")
    f_ops = list(np.tensordot(vecs.T, np.array(ops), axes=(1, 0)))
    f_basis = KrausChannel(f_ops, [f"F{j}" for j in range(len(f_ops))], check=False)

    report = KLReport(down, up, cross_max, word_dep, np.clip(beta, 0, None), f_basis,
                      "fail", violation=violation)
    if violation < exact_tol:
        report.verdict = "exact"
        return report
    if callable(errs):
        half = kl_violation(code, list(errs(order_param / 2).ops))
        report.violation_half = half
        if half > 0:
            report.scaling_ratio = violation / half
            if ratio_window[0] <= report.scaling_ratio <= ratio_window[1]:
                report.verdict = "approximate"
                report.order = 2
    return report


@dataclass
class RecoveryChannel:
    channel: KrausChannel
    error_projectors: list
    report: KLReport
    n_completion: int = 0
    betas: list = field(default_factory=list)


def build_recovery(code: CodeSpace, errs: ErrorModel, order_param: float | None = None,
                   beta_tol: float = 1e-12, allow_approximate: bool = False) -> RecoveryChannel:
    """Recovery channel R_l ~ P_c F_l^dag / sqrt(beta_l) plus a completion.

    For each F-basis error, by decreasing beta, the images F_l|W_sigma> are
    orthogonalized against earlier error spaces and mapped back onto the
    codewords by the polar isometry. Under exact KL this is P_c F_l^dag /
    sqrt(beta_l); under approximate KL it keeps the map an exact isometry per
    error space. The unreached residual space is sent to |W_down> by rank-one
    maps, so sum R^dag R = I holds exactly.
    """
    report = kl_check(code, errs, order_param)
    if report.verdict == "fail" or (report.verdict == "approximate" and not allow_approximate):
        raise ChannelError(f"Knill-Laflamme verdict is {report.verdict}")
    w = code.basis
    dim = code.host_dim
    used = np.zeros((dim, 0), dtype=complex)
    ops, labels, projectors, betas = [], [], [], []
    for j, (f, beta) in enumerate(zip(report.F_basis.ops, report.beta)):
        if beta < beta_tol:
            continue
        a = f @ w
        a = a - used @ (dag(used) @ a)
        if np.linalg.svd(a, compute_uv=False).min() < np.sqrt(beta_tol):
            continue
        q = polar_isometry(a)
        ops.append(w @ dag(q))
        labels.append(f"R{j}")
        projectors.append(q @ dag(q))
        betas.append(float(beta))
        used = np.column_stack([used, q])
    residual = np.eye(dim) - used @ dag(used)
    vals, vecs = np.linalg.eigh((residual + dag(residual)) / 2)
    comp = vecs[:, vals > 0.5]
    for i in range(comp.shape[1]):
        ops.append(np.outer(code.codewords[0], comp[:, i].conj()))
        labels.append(f"sink{i}")
    channel = KrausChannel(ops, labels)
    return RecoveryChannel(channel, projectors, report, comp.shape[1], betas)


# ------------------------------------------------------------- Leung 4-qubit


def leung4_code() -> CodeSpace:
    s = 1 / np.sqrt(2)
    w0 = s * (basis_state("0000") + basis_state("1111"))
    w1 = s * (basis_state("0011") + basis_state("1100"))
    stabs = (tensor(Z, Z, I2, I2), tensor(I2, I2, Z, Z), tensor(X, X, X, X))
    return CodeSpace((w0, w1), stabs, name="leung4")


def leung4_errors(p_minus: float) -> KrausChannel:
    """No-jump word E0 and the four single-decay words E_-^(j)."""
    k0 = np.diag([1.0, np.sqrt(1 - p_minus)]).astype(complex)
    km = np.sqrt(p_minus) * SIGMA_MINUS
    ops = [tensor(k0, k0, k0, k0)]
    for j in range(4):
        factors = [km if i == j else k0 for i in range(4)]
        ops.append(tensor(*factors))
    return KrausChannel(ops, ["E0"] + [f"E-{j + 1}" for j in range(4)], check=False)


def leung4_first_order_recovery(p_minus: float) -> RecoveryChannel:
    """Recovery for the four-qubit code, correct to first order in ``p_minus``.

    The no-jump word only approximately preserves the code space. Its damaged
    codewords are mapped back by the polar isometry, which is the smallest
    rotation in each two-plane that restores them. Other phase conventions
    for that rotation agree to first order.
    """
    if not 0 <= p_minus < 0.5:
        raise ValueError("p_minus must lie in [0, 0.5)")
    if p_minus == 0:
        return build_recovery(leung4_code(), leung4_errors(0.0))
    return build_recovery(leung4_code(), leung4_errors, order_param=p_minus,
                          allow_approximate=True)


def check_projector_family(projectors: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """Whether the projectors are mutually orthogonal (P_m P_n = delta_mn P_m)."""
    for i, a in enumerate(projectors):
        if not is_projector(a, tol):
            return False
        for b in projectors[i + 1:]:
            if np.max(np.abs(a @ b)) > tol:
                return False
    return True


def random_codeword(code: CodeSpace, rng: np.random.Generator) -> np.ndarray:
    amps = normalize(rng.normal(size=2) + 1j * rng.normal(size=2))
    return code.encode(*amps)

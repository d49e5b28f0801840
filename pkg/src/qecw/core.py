"""Dense states, operators and Kraus channels.

States are 1-D complex numpy arrays, operators and density matrices are 2-D
complex arrays. Qubit 1 is the most significant tensor factor, so the basis
index of ``|b1 b2 ... bn>`` is the binary number ``b1 b2 ... bn``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

ATOL = 1e-10
FOCK_ATOL = 1e-6

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |0> = |g>, |1> = |e>; sigma^- = |g><e| lowers the excitation
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class DimensionError(ValueError):
    pass


class ChannelError(ValueError):
    pass


def _check_finite(arr):
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    return arr


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def basis_state(bits: str) -> np.ndarray:
    """Computational basis ket for a bit string such as ``"0110"``."""
    return ket(int(bits, 2), 2 ** len(bits))


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(op: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(op))


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor most significant.

    Works for kets (1-D) and operators (2-D); all factors must share a rank.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    ndims = {np.ndim(f) for f in factors}
    if len(ndims) != 1:
        raise DimensionError("cannot mix kets and operators in tensor")
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def embed(op: np.ndarray, site: int, n_sites: int, local_dim: int = 2) -> np.ndarray:
    """Place a single-site operator on ``site`` (0-based) of an n-site register."""
    eye = np.eye(local_dim, dtype=complex)
    return tensor(*[op if k == site else eye for k in range(n_sites)])


def pauli_string(label: str) -> np.ndarray:
    """Operator for a Pauli label like ``"XIZ"``."""
    table = {"I": I2, "X": X, "Y": Y, "Z": Z}
    return tensor(*[table[c] for c in label])


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_hermitian(op: np.ndarray, tol: float = ATOL) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.allclose(op, dag(op), atol=tol, rtol=0)


def is_unitary(op: np.ndarray, tol: float = ATOL) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return np.allclose(dag(op) @ op, np.eye(op.shape[0]), atol=tol, rtol=0)


def is_projector(op: np.ndarray, tol: float = ATOL) -> bool:
    op = np.asarray(op)
    return is_hermitian(op, tol) and np.allclose(op @ op, op, atol=tol, rtol=0)


def is_density_matrix(rho: np.ndarray, tol: float = ATOL) -> bool:
    rho = np.asarray(rho)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return np.linalg.eigvalsh((rho + dag(rho)) / 2).min() >= -tol


def _completeness_defect(ops: Sequence[np.ndarray]) -> float:
    dim = ops[0].shape[1]
    total = sum(dag(k) @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(dim))))


@dataclass(frozen=True)
class KrausChannel:
    """Ordered Kraus operators with labels.

    ``tol`` is the completeness tolerance checked at construction; truncated
    bosonic channels pass ``check=False`` and report their own defect.
    """

    ops: tuple
    labels: tuple = ()
    tol: float = 1e-9
    check: bool = True
    defect: float = field(init=False)

    def __post_init__(self):
        ops = tuple(_check_finite(np.asarray(k, dtype=complex)) for k in self.ops)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[1]
        for k in ops:
            if k.ndim != 2 or k.shape[1] != dim:
                raise DimensionError("Kraus operators must share an input dimension")
        labels = tuple(self.labels) or tuple(f"K{j}" for j in range(len(ops)))
        if len(labels) != len(ops):
            raise ValueError("one label per Kraus operator")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "defect", _completeness_defect(ops))
        if self.check and self.defect > self.tol:
            raise ChannelError(
                f"not trace preserving: max|sum K^dag K - I| = {self.defect:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def compose(self, first: "KrausChannel") -> "KrausChannel":
        """Channel that applies ``first`` and then ``self``."""
        ops = [b @ a for b in self.ops for a in first.ops]
        labels = [f"{lb}*{la}" for lb in self.labels for la in first.labels]
        return KrausChannel(ops, labels, tol=max(self.tol, first.tol), check=False)

    def mixed(self, u: np.ndarray) -> "KrausChannel":
        """Unitarily mixed Kraus set F_j = sum_k u_jk K_k."""
        u = np.asarray(u, dtype=complex)
        stack = np.array(self.ops)
        ops = np.tensordot(u, stack, axes=(1, 0))
        return KrausChannel(list(ops), tol=self.tol, check=self.check)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        ops = [np.kron(a, b) for a in self.ops for b in other.ops]
        labels = [f"{la}(x){lb}" for la in self.labels for lb in other.labels]
        return KrausChannel(ops, labels, tol=max(self.tol, other.tol), check=self.check and other.check)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)], ["identity"])


def unitary_channel(u: np.ndarray, label: str = "U") -> KrausChannel:
    return KrausChannel([u], [label])


def bit_flip_channel(p: float) -> KrausChannel:
    return KrausChannel([np.sqrt(1 - p) * I2, np.sqrt(p) * X], ["no-flip", "X"])


def pauli_channel(px: float, pz: float = 0.0) -> KrausChannel:
    return KrausChannel(
        [np.sqrt(1 - px - pz) * I2, np.sqrt(px) * X, np.sqrt(pz) * Z],
        ["I", "X", "Z"],
    )


def amplitude_damping_channel(p_minus: float) -> KrausChannel:
    """Qubit decay |e> -> |g> with probability ``p_minus``."""
    k_minus = np.sqrt(p_minus) * SIGMA_MINUS
    k_0 = np.array([[1, 0], [0, np.sqrt(1 - p_minus)]], dtype=complex)
    return KrausChannel([k_0, k_minus], ["no-jump", "decay"])


def apply_channel(ch: KrausChannel, rho: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Return sum_k K rho K^dag, re-symmetrized against roundoff."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise DimensionError(f"channel acts on dim {ch.dim}, state has shape {rho.shape}")
    bound = ch.tol if tol is None else tol
    if ch.defect > bound:
        raise ChannelError(f"channel completeness defect {ch.defect:.3e} exceeds {bound:.1e}")
    out = sum(k @ rho @ dag(k) for k in ch.ops)
    return (out + dag(out)) / 2


def apply_ops(ops: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Unchecked sum K rho K^dag (for trace-decreasing branches)."""
    out = sum(k @ rho @ dag(k) for k in ops)
    return (out + dag(out)) / 2


def measure_projector(P: np.ndarray, psi: np.ndarray, rng: np.random.Generator, tol: float = ATOL):
    """Two-outcome projective measurement {P, 1-P}.

    Returns ``(outcome, post_state, prob)`` where ``outcome`` is 1 for the P
    branch and ``prob`` is the exact Born probability of outcome 1.
    """
    P = np.asarray(P, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if not is_projector(P, tol):
        raise ValueError("measurement operator is not a projector")
    if P.shape[0] != psi.shape[0]:
        raise DimensionError("projector and state dimensions differ")
    proj = P @ psi
    prob = float(np.clip(np.vdot(psi, proj).real, 0.0, 1.0))
    outcome = int(rng.random() < prob)
    branch = proj if outcome else psi - proj
    branch_prob = prob if outcome else 1.0 - prob
    if branch_prob <= 0:
        raise RuntimeError("selected a zero-probability measurement branch")
    return outcome, branch / np.sqrt(branch_prob), prob


def project(P: np.ndarray, psi: np.ndarray):
    """Deterministic projection: normalized P|psi> and its probability."""
    proj = P @ psi
    prob = float(np.vdot(psi, proj).real)
    if prob <= 0:
        return None, 0.0
    return proj / np.sqrt(prob), prob


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """Fidelity <psi|rho|psi> to a pure target."""
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise DimensionError("state and target dimensions differ")
    return float(np.clip(np.vdot(psi, rho @ psi).real, 0.0, 1.0))


def state_fidelity(phi: np.ndarray, psi: np.ndarray) -> float:
    """|<phi|psi>|^2 for normalized kets (global phase insensitive)."""
    return float(abs(np.vdot(phi, psi)) ** 2)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = np.asarray(rho) - np.asarray(sigma)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + dag(diff)) / 2))))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    rho = np.asarray(rho).reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    for count, k in enumerate(traced):
        axis = k - count
        m = rho.ndim // 2
        rho = np.trace(rho, axis1=axis, axis2=axis + m)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return rho.reshape(d, d)


def schmidt_coefficients(psi: np.ndarray, dim_a: int) -> np.ndarray:
    mat = np.asarray(psi).reshape(dim_a, -1)
    return np.linalg.svd(mat, compute_uv=False)


def schmidt_rank(psi: np.ndarray, dim_a: int, tol: float = ATOL) -> int:
    s = schmidt_coefficients(psi, dim_a)
    return int(np.sum(s > tol))


def _complete_basis(vectors: np.ndarray, dim: int, tol: float) -> np.ndarray:
    """Extend orthonormal columns to a full basis by Gram-Schmidt over e_0, e_1, ..."""
    basis = [v for v in vectors.T]
    for j in range(dim):
        if len(basis) == dim:
            break
        v = ket(j, dim)
        for b in basis:
            v = v - np.vdot(b, v) * b
        for b in basis:  # second pass for stability
            v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
    return np.array(basis).T


def unitary_rotation_from_basis_pairs(pairs, tol: float = ATOL) -> np.ndarray:
    """Unitary U with U @ source_i = target_i for each (source, target) pair.

    The orthogonal complements of the sources and of the targets are completed
    by Gram-Schmidt over the canonical basis and paired in order, so the result
    is deterministic. Its action off the given subspace carries no meaning.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    src = np.array([np.asarray(s, dtype=complex) for s, _ in pairs]).T
    tgt = np.array([np.asarray(t, dtype=complex) for _, t in pairs]).T
    dim = src.shape[0]
    if tgt.shape[0] != dim:
        raise DimensionError("sources and targets live in different spaces")
    k = src.shape[1]
    for name, m in (("sources", src), ("targets", tgt)):
        if not np.allclose(dag(m) @ m, np.eye(k), atol=tol, rtol=0):
            raise ValueError(f"{name} are not orthonormal")
    full_src = _complete_basis(src, dim, tol)
    full_tgt = _complete_basis(tgt, dim, tol)
    return full_tgt @ dag(full_src)


def polar_isometry(cols: np.ndarray) -> np.ndarray:
    """Closest orthonormal columns to ``cols`` (symmetric orthonormalization)."""
    u, _, vh = np.linalg.svd(cols, full_matrices=False)
    return u @ vh


# ---------------------------------------------------------------- JSON format


def to_json(arr: np.ndarray) -> str:
    """Serialize a ket or operator as {"dim", "re", "im"}."""
    arr = np.asarray(arr, dtype=complex)
    return json.dumps({"dim": int(arr.shape[0]), "re": arr.real.tolist(), "im": arr.imag.tolist()})


def from_json(text: str | dict) -> np.ndarray:
    data = json.loads(text) if isinstance(text, str) else text
    arr = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data.get("im", 0.0), dtype=float)
    if arr.shape[0] != data["dim"]:
        raise DimensionError("declared dim does not match the array")
    if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
        raise DimensionError("operators must be square")
    return _check_finite(arr)


def ops_to_json(ops: Sequence[np.ndarray], labels: Sequence[str] | None = None) -> str:
    entries = [json.loads(to_json(k)) for k in ops]
    if labels is not None:
        for entry, label in zip(entries, labels):
            entry["label"] = label
    return json.dumps({"ops": entries})


def ops_from_json(text: str | dict):
    data = json.loads(text) if isinstance(text, str) else text
    entries = data["ops"] if isinstance(data, dict) else data
    ops = [from_json(e) for e in entries]
    labels = [e.get("label", f"K{j}") for j, e in enumerate(entries)]
    return ops, labels

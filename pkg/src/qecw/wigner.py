"""Wigner functions from displaced parity.

With hbar = 1 the appendix prefactors specialize as follows:

==========================  ==================
general hbar                hbar = 1
==========================  ==================
1/(2 pi hbar) (definition)  1/(2 pi)
1/(pi hbar) (parity form)   1/pi
lower bound -1/(pi hbar)    -1/pi
==========================  ==================

W(x, p) = (1/pi) Tr[D(-v) rho D(-v)^dag Pi] = (1/pi) Tr[rho D(2v) Pi] with
v = (x, p) and D(v) = exp(i(p x_op - x p_op)). Displacements use the exact
Fock block of D, so the only approximation is the state's own truncation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .bosonic import FockSpace, LeakageError, displacement_blocks, hermite_functions
from .core import dm

CHUNK = 1024


def _as_rho(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return dm(state) if state.ndim == 1 else state


def _guard(rho, tol):
    top = abs(rho[-1, -1])
    if top > tol:
        raise LeakageError(f"state populates the top Fock level ({top:.2e})")


def wigner_values(state, xs, ps, leakage_tol: float = 1e-8) -> np.ndarray:
    """W at paired points (xs[i], ps[i]); returns complex values (imaginary part is roundoff)."""
    rho = _as_rho(state)
    _guard(rho, leakage_tol)
    dim = rho.shape[0]
    parity = (-1.0) ** np.arange(dim)
    alphas = np.sqrt(2) * (np.ravel(xs) + 1j * np.ravel(ps))
    # Tr[rho D Pi] = sum_{m,n} rho_nm D_mn (-1)^n
    weights = rho.T * parity[None, :]
    out = np.empty(alphas.size, dtype=complex)
    for start in range(0, alphas.size, CHUNK):
        blocks = displacement_blocks(dim, alphas[start:start + CHUNK])
        out[start:start + CHUNK] = np.einsum("kmn,mn->k", blocks, weights)
    return out / np.pi


def wigner_point(state, x: float, p: float, leakage_tol: float = 1e-8) -> float:
    return float(wigner_values(state, [x], [p], leakage_tol)[0].real)


@dataclass
class WignerGrid:
    x_values: np.ndarray
    p_values: np.ndarray
    values: np.ndarray  # values[i, j] = W(x_i, p_j)
    imag_residue: float = 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["x", "p", "w"])
        for i, x in enumerate(self.x_values):
            for j, p in enumerate(self.p_values):
                writer.writerow([f"{x:.17g}", f"{p:.17g}", f"{self.values[i, j]:.17g}"])
        return buf.getvalue()

    def integral(self) -> float:
        inner = np.trapezoid(self.values, self.p_values, axis=1)
        return float(np.trapezoid(inner, self.x_values))


def wigner_grid(state, x_range=(-5.0, 5.0), p_range=(-5.0, 5.0), nx: int = 101, np_: int = 101,
                leakage_tol: float = 1e-8) -> WignerGrid:
    xs = np.linspace(*x_range, nx)
    ps = np.linspace(*p_range, np_)
    xx, pp = np.meshgrid(xs, ps, indexing="ij")
    vals = wigner_values(state, xx, pp, leakage_tol).reshape(nx, np_)
    return WignerGrid(xs, ps, vals.real.copy(), float(np.max(np.abs(vals.imag))))


@dataclass
class Marginals:
    x_values: np.ndarray
    rho_x: np.ndarray
    p_values: np.ndarray
    rho_p: np.ndarray
    covered: bool


def marginals(grid: WignerGrid, edge_tol: float = 1e-4) -> Marginals:
    """Trapezoid marginals over p and over x; ``covered`` is False if W is large on the border."""
    v = grid.values
    edge = max(np.abs(v[0]).max(), np.abs(v[-1]).max(), np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
    rho_x = np.trapezoid(v, grid.p_values, axis=1)
    rho_p = np.trapezoid(v, grid.x_values, axis=0)
    return Marginals(grid.x_values, rho_x, grid.p_values, rho_p, bool(edge <= edge_tol))


def position_density(state, x) -> np.ndarray:
    """<x|rho|x> from the Hermite-function expansion (independent of any Wigner code)."""
    rho = _as_rho(state)
    phi = hermite_functions(rho.shape[0], np.asarray(x, dtype=float))
    return np.einsum("mk,mn,nk->k", phi, rho, phi).real


def momentum_density(state, p) -> np.ndarray:
    """<p|rho|p>, using <p|n> = (-i)^n phi_n(p)."""
    rho = _as_rho(state)
    n = np.arange(rho.shape[0])
    phi = hermite_functions(rho.shape[0], np.asarray(p, dtype=float)) * ((-1j) ** n)[:, None]
    return np.einsum("mk,mn,nk->k", phi, rho, phi.conj()).real


def vacuum_wigner(x, p):
    return np.exp(-(np.asarray(x) ** 2 + np.asarray(p) ** 2)) / np.pi


def cat_state(fs: FockSpace, alpha: complex, sign: int = 1) -> np.ndarray:
    psi = fs.coherent(alpha) + sign * fs.coherent(-alpha)
    return psi / np.linalg.norm(psi)

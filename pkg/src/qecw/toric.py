"""Toric code as a GF(2) stabilizer model.

Qubits sit on the bonds of an Lx x Ly torus. Bond h(x, y) joins sites (x, y)
and (x+1, y); bond v(x, y) joins (x, y) and (x, y+1). Star A_s (Z-type) at
site (x, y) touches h(x, y), h(x-1, y), v(x, y), v(x, y-1). Plaquette B_p
(X-type) p(x, y) is the square with lower-left corner (x, y): h(x, y),
h(x, y+1), v(x, y), v(x+1, y). X errors light up stars (charges), Z errors
light up plaquettes (fluxes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .classical import block_rngs


@dataclass(frozen=True)
class ToricLattice:
    Lx: int
    Ly: int
    stars: np.ndarray  # (Lx*Ly, n) incidence over GF(2)
    plaquettes: np.ndarray  # (Lx*Ly, n)

    @property
    def n_qubits(self) -> int:
        return 2 * self.Lx * self.Ly

    def h(self, x: int, y: int) -> int:
        return (x % self.Lx) + self.Lx * (y % self.Ly)

    def v(self, x: int, y: int) -> int:
        return self.Lx * self.Ly + (x % self.Lx) + self.Lx * (y % self.Ly)

    def site(self, x: int, y: int) -> int:
        return (x % self.Lx) + self.Lx * (y % self.Ly)

    def coords(self, index: int) -> tuple[int, int]:
        return index % self.Lx, index // self.Lx


def build_lattice(Lx: int, Ly: int | None = None) -> ToricLattice:
    Ly = Lx if Ly is None else Ly
    if Lx < 2 or Ly < 2:
        raise ValueError("torus sides must be >= 2")
    n = 2 * Lx * Ly
    stars = np.zeros((Lx * Ly, n), dtype=np.uint8)
    plaqs = np.zeros((Lx * Ly, n), dtype=np.uint8)
    proto = ToricLattice(Lx, Ly, stars, plaqs)
    for y in range(Ly):
        for x in range(Lx):
            s = proto.site(x, y)
            for b in (proto.h(x, y), proto.h(x - 1, y), proto.v(x, y), proto.v(x, y - 1)):
                stars[s, b] ^= 1
            for b in (proto.h(x, y), proto.h(x, y + 1), proto.v(x, y), proto.v(x + 1, y)):
                plaqs[s, b] ^= 1
    # every bond in exactly two stars and two plaquettes
    if not (np.all(stars.sum(0) == 2) and np.all(plaqs.sum(0) == 2)):
        raise RuntimeError("lattice incidence check failed")
    if not (np.all(stars.sum(1) == 4) and np.all(plaqs.sum(1) == 4)):
        raise RuntimeError("every stabilizer must touch four bonds")
    return proto


@dataclass
class StabilizerStructure:
    commutation_ok: bool
    independent_count: int
    logical_qubits: int
    degeneracy: int


def stabilizer_structure(lat: ToricLattice) -> StabilizerStructure:
    """Commutation (X-part of plaquettes against Z-part of stars) and GF(2) rank."""
    overlaps = (lat.stars.astype(np.int64) @ lat.plaquettes.T.astype(np.int64)) % 2
    n = lat.n_qubits
    # symplectic rows [X | Z]
    rows = np.zeros((2 * lat.Lx * lat.Ly, 2 * n), dtype=np.uint8)
    rows[: lat.Lx * lat.Ly, n:] = lat.stars
    rows[lat.Lx * lat.Ly:, :n] = lat.plaquettes
    rank = gf2.rank(rows)
    k = n - rank
    return StabilizerStructure(bool(not overlaps.any()), rank, k, 2**k)


@dataclass
class PauliPattern:
    x: np.ndarray
    z: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "PauliPattern":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    def __xor__(self, other: "PauliPattern") -> "PauliPattern":
        return PauliPattern(self.x ^ other.x, self.z ^ other.z)


def syndrome(lat: ToricLattice, err: PauliPattern):
    """(star_defects, plaquette_defects) as sorted index arrays."""
    stars = gf2.matvec(lat.stars, err.x)
    plaqs = gf2.matvec(lat.plaquettes, err.z)
    return np.flatnonzero(stars), np.flatnonzero(plaqs)


def _torus_steps(a: int, b: int, L: int) -> int:
    """Signed shortest step count from a to b on a ring (ties go positive)."""
    d = (b - a) % L
    return d if d <= L - d else d - L


def torus_distance(lat: ToricLattice, i: int, j: int) -> int:
    (x1, y1), (x2, y2) = lat.coords(i), lat.coords(j)
    return abs(_torus_steps(x1, x2, lat.Lx)) + abs(_torus_steps(y1, y2, lat.Ly))


def _path_bonds(lat: ToricLattice, i: int, j: int, dual: bool) -> list[int]:
    """Bonds crossed walking from cell i to cell j, x first then y.

    On the primal lattice (stars) a step x -> x+1 uses h(x, y) and y -> y+1
    uses v(x, y). On the dual lattice (plaquettes) the step p(x, y) -> p(x+1, y)
    crosses v(x+1, y) and p(x, y) -> p(x, y+1) crosses h(x, y+1).
    """
    (x, y), (x2, y2) = lat.coords(i), lat.coords(j)
    bonds = []
    dx = _torus_steps(x, x2, lat.Lx)
    step = 1 if dx > 0 else -1
    for _ in range(abs(dx)):
        xs = x if step > 0 else x - 1
        bonds.append(lat.v(xs + 1, y) if dual else lat.h(xs, y))
        x += step
    dy = _torus_steps(y, y2, lat.Ly)
    step = 1 if dy > 0 else -1
    for _ in range(abs(dy)):
        ys = y if step > 0 else y - 1
        bonds.append(lat.h(x, ys + 1) if dual else lat.v(x, ys))
        y += step
    return bonds


def greedy_pairs(lat: ToricLattice, defects) -> list[tuple[int, int]]:
    defects = [int(d) for d in defects]
    if len(defects) % 2:
        raise ValueError("odd number of defects cannot come from a syndrome")
    cand = sorted(
        (torus_distance(lat, a, b), a, b)
        for k, a in enumerate(defects)
        for b in defects[k + 1:]
    )
    used, pairs = set(), []
    for _, a, b in cand:
        if a in used or b in used:
            continue
        used.update((a, b))
        pairs.append((a, b))
    return pairs


def greedy_decode(lat: ToricLattice, star_defects=(), plaquette_defects=()) -> PauliPattern:
    """Pair defects closest-first and join each pair by a shortest path.

    Star defects are cleared with X strings, plaquette defects with Z strings.
    """
    corr = PauliPattern.empty(lat.n_qubits)
    for a, b in greedy_pairs(lat, star_defects):
        for bond in _path_bonds(lat, a, b, dual=False):
            corr.x[bond] ^= 1
    for a, b in greedy_pairs(lat, plaquette_defects):
        for bond in _path_bonds(lat, a, b, dual=True):
            corr.z[bond] ^= 1
    return corr


def winding_vectors(lat: ToricLattice) -> dict:
    """GF(2) vectors whose inner product with a closed pattern gives its winding.

    X loops: horizontal ones cross the cut h(0, y), vertical ones v(x, 0).
    Z loops (on the dual lattice): horizontal ones cross v(0, y), vertical
    ones h(x, 0).
    """
    n = lat.n_qubits
    out = {k: np.zeros(n, dtype=np.uint8) for k in ("x_h", "x_v", "z_h", "z_v")}
    for y in range(lat.Ly):
        out["x_h"][lat.h(0, y)] = 1
        out["z_h"][lat.v(0, y)] = 1
    for x in range(lat.Lx):
        out["x_v"][lat.v(x, 0)] = 1
        out["z_v"][lat.h(x, 0)] = 1
    return out


@dataclass
class LogicalClass:
    x_winding: tuple
    z_winding: tuple

    @property
    def label(self) -> str:
        parts = [f"X{i + 1}" for i, w in enumerate(self.x_winding) if w]
        parts += [f"Z{i + 1}" for i, w in enumerate(self.z_winding) if w]
        return "".join(parts) or "I"


def logical_error_check(lat: ToricLattice, residual: PauliPattern):
    """(is_stabilizer, LogicalClass) for a pattern with empty syndrome."""
    s, p = syndrome(lat, residual)
    if len(s) or len(p):
        raise ValueError("residual pattern still has defects")
    w = winding_vectors(lat)
    xw = (int(w["x_h"] @ residual.x % 2), int(w["x_v"] @ residual.x % 2))
    zw = (int(w["z_h"] @ residual.z % 2), int(w["z_v"] @ residual.z % 2))
    cls = LogicalClass(xw, zw)
    return not any(xw + zw), cls


def horizontal_x_loop(lat: ToricLattice, y: int = 0) -> PauliPattern:
    pat = PauliPattern.empty(lat.n_qubits)
    for x in range(lat.Lx):
        pat.x[lat.h(x, y)] = 1
    return pat


def vertical_x_loop(lat: ToricLattice, x: int = 0) -> PauliPattern:
    pat = PauliPattern.empty(lat.n_qubits)
    for y in range(lat.Ly):
        pat.x[lat.v(x, y)] = 1
    return pat


# --------------------------------------------------------------- Monte Carlo


def _decode_failures(lat, errors, checks, winds, dual):
    fails = 0
    defects_all = (errors.astype(np.int64) @ checks.T.astype(np.int64)) % 2
    for err, defects in zip(errors, defects_all):
        idx = np.flatnonzero(defects)
        resid = err.copy()
        for a, b in greedy_pairs(lat, idx):
            for bond in _path_bonds(lat, a, b, dual=dual):
                resid[bond] ^= 1
        if (resid @ winds[0]) % 2 or (resid @ winds[1]) % 2:
            fails += 1
    return fails


@dataclass
class ToricMCResult:
    logical_x_rate: float
    logical_z_rate: float
    trials: int
    seed: int

    def stderr(self, rate: float) -> float:
        return float(np.sqrt(max(rate * (1 - rate), 1e-300) / self.trials))


def toric_monte_carlo(L: int, p: float, trials: int, seed: int = 0) -> ToricMCResult:
    """Logical failure rates under i.i.d. X and, separately, i.i.d. Z noise.

    Each block of trials draws from its own stream keyed on (seed, block), so
    results are identical however blocks are scheduled.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must be a probability")
    lat = build_lattice(L, L)
    w = winding_vectors(lat)
    n = lat.n_qubits
    fx = fz = 0
    for rng, m in block_rngs(seed, trials):
        ex = (rng.random((m, n)) < p).astype(np.uint8)
        ez = (rng.random((m, n)) < p).astype(np.uint8)
        fx += _decode_failures(lat, ex, lat.stars, (w["x_h"], w["x_v"]), dual=False)
        fz += _decode_failures(lat, ez, lat.plaquettes, (w["z_h"], w["z_v"]), dual=True)
    return ToricMCResult(fx / trials, fz / trials, trials, seed)


def anticommutes(a: PauliPattern, b: PauliPattern) -> bool:
    """Symplectic product of two Pauli patterns over GF(2)."""
    return bool((int(a.x @ b.z) + int(a.z @ b.x)) % 2)

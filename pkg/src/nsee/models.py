"""Lattice Hamiltonians (Toric code, transverse Ising, XXZ), snake ordering,
and the cut families used by the NsEE sum.

Conventions: a site-based lattice has lx rows and ly columns with linear
site index c*lx + r (column-major).  Hamiltonians are returned with qubit
indices already in MPS (snake) order, so the chain can be used directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .mps import Bipartition, CutSet
from .pauli import PauliString, PauliSum


@dataclass(frozen=True)
class LatticeSpec:
    lx: int                       # rows
    ly: int                       # columns
    boundary: str = "open"        # "open" | "periodic"
    qubit_layout: str = "site"    # "site" | "bond" (Toric code)

    def __post_init__(self):
        if self.lx < 1 or self.ly < 1:
            raise ValueError("lattice dimensions must be positive")
        if self.boundary not in ("open", "periodic"):
            raise ValueError("boundary must be open or periodic")
        if self.qubit_layout not in ("site", "bond"):
            raise ValueError("qubit_layout must be site or bond")

    @property
    def n_qubits(self) -> int:
        n = self.lx * self.ly
        return 2 * n if self.qubit_layout == "bond" else n

    def to_dict(self) -> dict:
        return {"lx": self.lx, "ly": self.ly, "boundary": self.boundary,
                "qubit_layout": self.qubit_layout}


def snake_order(spec: LatticeSpec):
    """Column-major serpentine: permutation p with p[k] = site index of MPS
    position k (sites numbered column-major)."""
    order = []
    for c in range(spec.ly):
        rows = range(spec.lx) if c % 2 == 0 else range(spec.lx - 1, -1, -1)
        for r in rows:
            order.append(c * spec.lx + r)
    return order


def _snake_position(spec: LatticeSpec):
    """Inverse map: pos[site] = MPS position."""
    pos = [0] * (spec.lx * spec.ly)
    for k, site in enumerate(snake_order(spec)):
        pos[site] = k
    return pos


def _site_neighbors(spec: LatticeSpec):
    """Nearest-neighbor (site, site) pairs of the open square lattice, in
    deterministic (column, row) order."""
    pairs = []
    for c in range(spec.ly):
        for r in range(spec.lx):
            s = c * spec.lx + r
            if r + 1 < spec.lx:
                pairs.append((s, c * spec.lx + r + 1))
            if c + 1 < spec.ly:
                pairs.append((s, (c + 1) * spec.lx + r))
    return pairs


def transverse_ising(spec: LatticeSpec, j: float = 1.0, h: float = 1.0,
                     hz: float = 0.0) -> PauliSum:
    """-J sum_<ij> Z_i Z_j - h sum_i X_i on the open square lattice.

    hz adds a longitudinal pinning field -hz sum_i Z_i; a tiny value selects
    the symmetry-broken ferromagnet over the even/odd cat combination, whose
    extra ln 2 per cut would otherwise dominate small-lattice entropy scans.
    """
    if spec.boundary != "open":
        raise ValueError("transverse Ising model uses open boundaries here")
    n = spec.n_qubits
    pos = _snake_position(spec)
    terms = []
    for a, b in _site_neighbors(spec):
        terms.append((-j, PauliString.from_ops(n, {pos[a]: "Z", pos[b]: "Z"})))
    for s in range(n):
        terms.append((-h, PauliString.from_ops(n, {pos[s]: "X"})))
    if hz != 0.0:
        for s in range(n):
            terms.append((-hz, PauliString.from_ops(n, {pos[s]: "Z"})))
    return PauliSum(n, terms)


def xxz(spec: LatticeSpec, j: float = 1.0, delta: float = 1.0,
        hstag: float = 0.0) -> PauliSum:
    """J sum_<ij> (Sx Sx + Sy Sy + Delta Sz Sz) with S = sigma/2, i.e. Pauli
    coefficients J/4 and J*Delta/4.

    hstag adds a staggered pinning field -hstag sum_i (-1)^i Z_i (sign by
    lattice sublattice); a tiny value selects one Neel component over their
    cat combination, whose extra ln 2 per cut would otherwise dominate
    small-lattice entropy scans on the Delta > 1 side.
    """
    if spec.boundary != "open":
        raise ValueError("XXZ model uses open boundaries here")
    n = spec.n_qubits
    pos = _snake_position(spec)
    terms = []
    for a, b in _site_neighbors(spec):
        for letter, coeff in (("X", j / 4), ("Y", j / 4), ("Z", j * delta / 4)):
            terms.append((coeff, PauliString.from_ops(
                n, {pos[a]: letter, pos[b]: letter})))
    if hstag != 0.0:
        for c in range(spec.ly):
            for r in range(spec.lx):
                sign = 1 if (r + c) % 2 == 0 else -1
                terms.append((-hstag * sign, PauliString.from_ops(
                    n, {pos[c * spec.lx + r]: "Z"})))
    return PauliSum(n, terms)


# -- Toric code -------------------------------------------------------------

def _toric_qubit_positions(spec: LatticeSpec):
    """Two qubits per vertex (right edge, down edge), laid out along the
    vertex snake with the pair kept adjacent."""
    vertex_pos = {}
    site_spec = LatticeSpec(spec.lx, spec.ly, "open", "site")
    for k, v in enumerate(snake_order(site_spec)):
        vertex_pos[v] = k

    def qubit(v: int, which: int) -> int:  # which: 0 = right edge, 1 = down edge
        return 2 * vertex_pos[v] + which

    return qubit


def toric_code(spec: LatticeSpec) -> PauliSum:
    """H = -sum_s A_s - sum_p B_p on the torus; A_s = prod X on the four
    edges at vertex s, B_p = prod Z around plaquette p."""
    if spec.boundary != "periodic":
        raise ValueError("Toric code requires periodic boundaries")
    if spec.qubit_layout != "bond":
        raise ValueError("Toric code uses the bond qubit layout")
    lx, ly = spec.lx, spec.ly
    n = spec.n_qubits
    qubit = _toric_qubit_positions(spec)

    def vid(r: int, c: int) -> int:
        return (c % ly) * lx + (r % lx)

    terms = []
    for c in range(ly):
        for r in range(lx):
            star = {
                qubit(vid(r, c), 0): "X",        # right edge of (r,c)
                qubit(vid(r, c), 1): "X",        # down edge of (r,c)
                qubit(vid(r, c - 1), 0): "X",    # right edge of left neighbor
                qubit(vid(r - 1, c), 1): "X",    # down edge of up neighbor
            }
            terms.append((-1.0, PauliString.from_ops(n, star)))
    for c in range(ly):
        for r in range(lx):
            # plaquette with (r,c) at its top-left corner
            plaq = {
                qubit(vid(r, c), 0): "Z",        # top edge
                qubit(vid(r + 1, c), 0): "Z",    # bottom edge
                qubit(vid(r, c), 1): "Z",        # left edge
                qubit(vid(r, c + 1), 1): "Z",    # right edge
            }
            terms.append((-1.0, PauliString.from_ops(n, plaq)))
    return PauliSum(n, terms)


# -- cut families -----------------------------------------------------------

def cut_set(spec: LatticeSpec) -> CutSet:
    """All vertical (between adjacent columns) and horizontal (between
    adjacent rows) bipartitions, expressed in MPS snake order.  A 1D chain
    gets all N-1 bond cuts."""
    n = spec.n_qubits
    per_vertex = 2 if spec.qubit_layout == "bond" else 1
    if spec.lx == 1 or spec.ly == 1:
        return CutSet(tuple(Bipartition.prefix(n, k)
                            for k in range(per_vertex, n, per_vertex)))
    cuts = []
    # vertical: columns <= c are a snake-order prefix
    for c in range(spec.ly - 1):
        cuts.append(Bipartition.prefix(n, per_vertex * spec.lx * (c + 1)))
    # horizontal: rows <= r
    site_spec = LatticeSpec(spec.lx, spec.ly, "open", "site")
    pos = _snake_position(site_spec)
    for r in range(spec.lx - 1):
        side = set()
        for c in range(spec.ly):
            for rr in range(r + 1):
                base = per_vertex * pos[c * spec.lx + rr]
                side.update(range(base, base + per_vertex))
        cuts.append(Bipartition(n, frozenset(side)))
    return CutSet(tuple(cuts))


def model_meta(name: str, spec: LatticeSpec, params: dict) -> dict:
    """Provenance record emitted alongside results."""
    return {"model": name, **spec.to_dict(), "params": params}

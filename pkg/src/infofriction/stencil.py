"""Stencil overlays, Stencil-partitions, best-origin search and concentric cut sets.

Conventions (lattice units throughout):

* The origin ``O`` is the center of one inner square; inner and outer squares are
  centred on ``O + (i*a, j*a)``.
* A node is covered when, on both axes, ``(p - O + s/2) mod a`` lies in ``[0, s)``:
  inner squares are closed on their lower-left edges and open on the upper-right.
* A node exactly on an outer-square boundary goes to the cell with the smaller
  (column, row) index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import Circuit, Rect, SubcircuitRegion

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Stencil:
    a: float
    eta: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"stencil side a must be positive, got {self.a}")
        if not 0 < self.eta < 0.5:
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")
        ox, oy = self.origin
        object.__setattr__(self, "origin", (ox % self.a, oy % self.a))

    @property
    def s(self) -> float:
        return (1 - 2 * self.eta) * self.a

    @property
    def annulus(self) -> float:
        return self.eta * self.a

    def cell_index(self, p) -> tuple[tuple[int, int], bool]:
        """Outer-square (column, row) holding ``p`` and whether a tie-break was needed."""
        idx = []
        tie = False
        for coord, o in zip(p, self.origin):
            t = (coord - o + self.a / 2) / self.a
            r = round(t)
            if abs(t - r) <= _BOUNDARY_TOL:
                idx.append(int(r) - 1)
                tie = True
            else:
                idx.append(math.floor(t))
        return (idx[0], idx[1]), tie

    def outer_rect(self, index: tuple[int, int]) -> Rect:
        cx = self.origin[0] + index[0] * self.a
        cy = self.origin[1] + index[1] * self.a
        h = self.a / 2
        return Rect(cx - h, cy - h, cx + h, cy + h)

    def inner_rect(self, index: tuple[int, int]) -> Rect:
        return self.outer_rect(index).shrink(self.annulus)

    def covers(self, p) -> bool:
        return all(0 <= (c - o + self.s / 2) % self.a < self.s for c, o in zip(p, self.origin))


@dataclass(frozen=True)
class StencilCell:
    index: tuple[int, int]
    region: SubcircuitRegion
    k_inside: int
    n_i: int


@dataclass(frozen=True)
class StencilPartition:
    stencil: Stencil
    cells: tuple[StencilCell, ...]
    bitnode_role: str = "output"
    channel_role: str = "input"

    @property
    def covered(self) -> int:
        return sum(c.k_inside for c in self.cells)

    @property
    def regions(self) -> list[SubcircuitRegion]:
        return [c.region for c in self.cells]


def partition(circuit: Circuit, stencil: Stencil, bitnode_role: str = "output",
              channel_role: str = "input") -> StencilPartition:
    """Split ``circuit`` into the outer-square cells of ``stencil``.

    ``k_inside`` counts ``bitnode_role`` nodes covered by the cell's inner square;
    ``n_i`` counts ``channel_role`` nodes anywhere in the cell. Only occupied cells
    are returned, ordered by (column, row).
    """
    members: dict[tuple[int, int], set[int]] = {}
    ties: dict[tuple[int, int], set[int]] = {}
    k_in: dict[tuple[int, int], int] = {}
    n_i: dict[tuple[int, int], int] = {}
    for node in circuit.nodes:
        idx, tie = stencil.cell_index(node.pos)
        members.setdefault(idx, set()).add(node.id)
        if tie:
            ties.setdefault(idx, set()).add(node.id)
        if node.role == bitnode_role and stencil.covers(node.pos):
            k_in[idx] = k_in.get(idx, 0) + 1
        if node.role == channel_role:
            n_i[idx] = n_i.get(idx, 0) + 1
    cells = []
    for idx in sorted(members):
        region = SubcircuitRegion(stencil.outer_rect(idx), frozenset(members[idx]),
                                  frozenset(ties.get(idx, ())))
        cells.append(StencilCell(idx, region, k_in.get(idx, 0), n_i.get(idx, 0)))
    return StencilPartition(stencil, tuple(cells), bitnode_role, channel_role)


def coverage(circuit: Circuit, stencil: Stencil, bitnode_role: str = "output") -> int:
    return sum(1 for n in circuit.nodes if n.role == bitnode_role and stencil.covers(n.pos))


def _axis_cover(coords: np.ndarray, origins: np.ndarray, a: float, s: float) -> np.ndarray:
    """Boolean matrix [origin, node]: node covered along this axis."""
    u = np.mod(coords[None, :] - origins[:, None] + s / 2, a)
    return u < s


def _gap_midpoints(breaks: np.ndarray, a: float) -> np.ndarray:
    b = np.unique(np.mod(breaks, a))
    nxt = np.append(b[1:], b[0] + a)
    return np.sort(np.mod((b + nxt) / 2, a))


def _coverage_table(xs, ys, cand_x, cand_y, a, s, block=2048) -> np.ndarray:
    cy = _axis_cover(ys, cand_y, a, s).astype(np.int64)
    out = np.empty((len(cand_x), len(cand_y)), dtype=np.int64)
    for start in range(0, len(cand_x), block):
        cx = _axis_cover(xs, cand_x[start:start + block], a, s).astype(np.int64)
        out[start:start + block] = cx @ cy.T
    return out


def best_origin(circuit: Circuit, a: float, eta: float,
                bitnode_role: str = "output") -> tuple[tuple[float, float], int]:
    """Stencil origin covering the most ``bitnode_role`` nodes, and that count.

    Coverage is piecewise constant in the origin, changing only where an inner-square
    edge passes a node, i.e. at ``p +- s/2 (mod a)`` on each axis. Evaluating the
    midpoint of every gap between consecutive breakpoints visits each constant piece,
    so the maximum found is the true maximum. Ties go to the smallest (x, y) origin.
    """
    if not a > 0:
        raise ValueError(f"stencil side a must be positive, got {a}")
    st = Stencil(a, eta)
    pts = np.array([n.pos for n in circuit.nodes if n.role == bitnode_role], dtype=float)
    if len(pts) == 0:
        raise ValueError(f"circuit has no {bitnode_role!r} nodes")
    s = st.s
    xs, ys = pts[:, 0], pts[:, 1]
    cand_x = _gap_midpoints(np.concatenate([xs + s / 2, xs - s / 2]), a)
    cand_y = _gap_midpoints(np.concatenate([ys + s / 2, ys - s / 2]), a)
    table = _coverage_table(xs, ys, cand_x, cand_y, a, s)
    i, j = np.unravel_index(int(np.argmax(table)), table.shape)
    return (float(cand_x[i]), float(cand_y[j])), int(table[i, j])


def mean_grid_coverage(circuit: Circuit, a: float, eta: float, bitnode_role: str = "output",
                       m: int = 64) -> float:
    """Mean coverage over the m x m cell-centred grid of origins in [0, a)^2."""
    pts = np.array([n.pos for n in circuit.nodes if n.role == bitnode_role], dtype=float)
    s = (1 - 2 * eta) * a
    grid = (np.arange(m) + 0.5) * a / m
    return float(_coverage_table(pts[:, 0], pts[:, 1], grid, grid, a, s).mean())


@dataclass(frozen=True)
class CutSet:
    """Concentric square cuts across one cell's annulus, spaced one lattice unit.

    ``offsets[j]`` is the inset of cut ``j`` from the outer square; the last offset is
    the inner square. ``(n_cut - 2) + alpha == eta * a`` holds exactly.
    """

    n_cut: int
    alpha: Fraction
    depth: Fraction
    offsets: tuple[Fraction, ...]
    squares: tuple[Rect, ...] = field(default=(), compare=False)
    spacing: int = 1


def build_cuts(stencil: Stencil, subcircuit_index: tuple[int, int] = (0, 0)) -> CutSet:
    depth = Fraction(stencil.eta) * Fraction(stencil.a)
    if depth < 1:
        raise ValueError("annulus thinner than lattice pitch")
    whole = math.floor(depth)
    alpha = depth - whole
    offsets = tuple(Fraction(j) for j in range(whole + 1)) + (depth,)
    outer = stencil.outer_rect(subcircuit_index)
    squares = tuple(outer.shrink(float(d)) for d in offsets)
    return CutSet(n_cut=whole + 2, alpha=alpha, depth=depth, offsets=offsets, squares=squares)

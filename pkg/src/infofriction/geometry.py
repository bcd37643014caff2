"""Substrate, lattice and circuit geometry.

Node positions are integer lattice coordinates (units of the pitch ``lambda``).
Lengths stay in lattice units inside this module; conversion to meters happens
once, in :func:`euclidean_distance` and the accounting layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

ROLES = ("input", "output", "helper")

Point = tuple[float, float]


class ParseError(ValueError):
    """Malformed circuit/trace/config text; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Substrate:
    side_length_l: int
    lam: float

    def __post_init__(self):
        if int(self.side_length_l) != self.side_length_l or self.side_length_l < 1:
            raise ValueError(f"substrate side must be a positive integer, got {self.side_length_l}")
        if not self.lam > 0:
            raise ValueError(f"lattice pitch must be positive, got {self.lam}")

    @property
    def side_meters(self) -> float:
        return self.side_length_l * self.lam


@dataclass(frozen=True)
class Node:
    id: int
    role: str
    pos: tuple[int, int]

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown node role {self.role!r}")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle ``[x0, x1] x [y0, y1]`` in lattice units."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def degenerate(self) -> bool:
        return not (self.x1 > self.x0 and self.y1 > self.y0)

    def contains(self, p: Point, closed: bool = True) -> bool:
        x, y = p
        if closed:
            return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1
        return self.x0 < x < self.x1 and self.y0 < y < self.y1

    def shrink(self, d: float) -> "Rect":
        return Rect(self.x0 + d, self.y0 + d, self.x1 - d, self.y1 - d)

    def interiors_overlap(self, other: "Rect") -> bool:
        return (min(self.x1, other.x1) > max(self.x0, other.x0)
                and min(self.y1, other.y1) > max(self.y0, other.y0))


@dataclass(frozen=True)
class SubcircuitRegion:
    region: Rect
    member_node_ids: frozenset[int]
    # ids of members that sat on the region boundary and were assigned by tie-break
    tie_broken_ids: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Circuit:
    substrate: Substrate
    nodes: tuple[Node, ...] = ()

    @cached_property
    def node_map(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    def position(self, node_id: int) -> tuple[int, int]:
        return self.node_map[node_id].pos

    def ids_with_role(self, role: str) -> list[int]:
        return [n.id for n in self.nodes if n.role == role]

    def count(self, role: str | None = None) -> int:
        if role is None:
            return len(self.nodes)
        return sum(1 for n in self.nodes if n.role == role)

    def with_positions(self, positions: dict[int, tuple[int, int]]) -> "Circuit":
        nodes = tuple(Node(n.id, n.role, tuple(positions.get(n.id, n.pos))) for n in self.nodes)
        return Circuit(self.substrate, nodes)


def euclidean_distance(p: Point, q: Point, lam: float = 1.0) -> float:
    """Distance between two lattice points, in meters for pitch ``lam``."""
    return lam * math.hypot(p[0] - q[0], p[1] - q[1])


def clip_segment_to_rect(a: Point, b: Point, rect: Rect) -> float:
    """Length (lattice units) of the part of segment [a, b] inside the closed ``rect``.

    Liang-Barsky parametric clipping. The segment meets a convex region in a single
    interval, so the result is that interval's length.
    """
    if rect.degenerate:
        raise ValueError("clip rectangle is degenerate")
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, ax - rect.x0), (dx, rect.x1 - ax),
                 (-dy, ay - rect.y0), (dy, rect.y1 - ay)):
        if p == 0:
            if q < 0:
                return 0.0
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return 0.0
            t0 = max(t0, r)
        else:
            if r < t0:
                return 0.0
            t1 = min(t1, r)
    if t1 <= t0:
        return 0.0
    return (t1 - t0) * math.hypot(dx, dy)


def validate_circuit(circuit: Circuit) -> list[str]:
    """All structural violations of ``circuit``; an empty list means ok."""
    problems = []
    side = circuit.substrate.side_length_l
    seen_ids: set[int] = set()
    seen_pos: dict[tuple[int, int], int] = {}
    for n in circuit.nodes:
        if n.id in seen_ids:
            problems.append(f"duplicate id: node {n.id}")
        seen_ids.add(n.id)
        x, y = n.pos
        if int(x) != x or int(y) != y:
            problems.append(f"off lattice: node {n.id} at {n.pos}")
        if not (0 <= x <= side and 0 <= y <= side):
            problems.append(f"outside substrate: node {n.id} at {n.pos}")
        key = (x, y)
        if key in seen_pos:
            problems.append(f"duplicate position: nodes {seen_pos[key]} and {n.id} at {n.pos}")
        else:
            seen_pos[key] = n.id
    return problems


def assign_to_regions(circuit: Circuit, rects: Sequence[Rect]) -> list[SubcircuitRegion]:
    """Assign each node to the first rectangle (in list order) whose closed area holds it.

    Nodes strictly inside a rectangle can belong to one only (interiors are disjoint).
    Nodes on shared boundaries go to the earliest-listed rectangle, recorded as tie-broken.
    Nodes covered by no rectangle are left unassigned.
    """
    members: list[set[int]] = [set() for _ in rects]
    ties: list[set[int]] = [set() for _ in rects]
    for n in circuit.nodes:
        hits = [i for i, r in enumerate(rects) if r.contains(n.pos)]
        if not hits:
            continue
        members[hits[0]].add(n.id)
        if not rects[hits[0]].contains(n.pos, closed=False):
            ties[hits[0]].add(n.id)
    return [SubcircuitRegion(r, frozenset(m), frozenset(t)) for r, m, t in zip(rects, members, ties)]


# -- circuit text format -------------------------------------------------------

def format_circuit(circuit: Circuit) -> str:
    lines = [f"substrate {circuit.substrate.side_length_l} {circuit.substrate.lam!r}"]
    for n in sorted(circuit.nodes, key=lambda n: n.id):
        lines.append(f"node {n.id} {n.role} {n.pos[0]} {n.pos[1]}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, path: str | None = None) -> Circuit:
    substrate = None
    nodes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "substrate":
                if substrate is not None:
                    raise ParseError("second substrate header", lineno, path)
                if len(parts) != 3:
                    raise ParseError("expected 'substrate <side:int> <lambda:float>'", lineno, path)
                substrate = Substrate(int(parts[1]), float(parts[2]))
            elif parts[0] == "node":
                if len(parts) != 5:
                    raise ParseError("expected 'node <id> <role> <x> <y>'", lineno, path)
                nodes.append(Node(int(parts[1]), parts[2], (int(parts[3]), int(parts[4]))))
            else:
                raise ParseError(f"unknown record {parts[0]!r}", lineno, path)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
    if substrate is None:
        raise ParseError("missing substrate header", None, path)
    return Circuit(substrate, tuple(nodes))


def read_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text(), path=str(path))


def write_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(format_circuit(circuit))


def bounding_rect(points: Iterable[Point]) -> Rect:
    xs, ys = zip(*points)
    return Rect(min(xs), min(ys), max(xs), max(ys))


def grid_positions(count: int, width: int, origin: tuple[int, int] = (0, 0)) -> list[tuple[int, int]]:
    """Row-major lattice positions for ``count`` nodes, ``width`` per row."""
    ox, oy = origin
    return [(ox + i % width, oy + i // width) for i in range(count)]


@dataclass
class CircuitBuilder:
    """Incremental construction of a circuit with auto-assigned ids."""

    roles: list[str] = field(default_factory=list)

    def add(self, role: str) -> int:
        self.roles.append(role)
        return len(self.roles) - 1

    def build(self, substrate: Substrate, positions: Sequence[tuple[int, int]]) -> Circuit:
        nodes = tuple(Node(i, r, tuple(p)) for i, (r, p) in enumerate(zip(self.roles, positions)))
        return Circuit(substrate, nodes)

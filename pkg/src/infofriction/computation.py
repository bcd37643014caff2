"""Message traces and bit-meters accounting.

A trace is the ordered list of messages one computation sends over circuit links.
Bits here are counts, not values; the ``codes`` module produces traces from actual
encoding and decoding runs.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import Circuit, ParseError, Rect, SubcircuitRegion, clip_segment_to_rect

EXACT_ENUMERATION_LIMIT = 2 ** 16


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class MessageRecord:
    step: int
    src: int
    dst: int
    bits: int

    def __post_init__(self):
        if self.step < 0:
            raise TraceError(f"negative step {self.step}")
        if self.bits < 1:
            raise TraceError(f"message must carry at least one bit, got {self.bits}")
        if self.src == self.dst:
            raise TraceError(f"self-message at node {self.src}")


@dataclass(frozen=True)
class MessageTrace:
    records: tuple[MessageRecord, ...] = ()
    input_id: str = ""

    def __post_init__(self):
        steps = [r.step for r in self.records]
        if any(b < a for a, b in zip(steps, steps[1:])):
            raise TraceError("trace steps must be nondecreasing")

    def __len__(self):
        return len(self.records)

    def appended(self, record: MessageRecord) -> "MessageTrace":
        return MessageTrace(self.records + (record,), self.input_id)

    def signature(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((r.src, r.dst, r.bits) for r in self.records)

    @property
    def total_bits(self) -> int:
        return sum(r.bits for r in self.records)


class TraceRecorder:
    """Collects messages in schedule order while a coder runs."""

    def __init__(self):
        self._records: list[MessageRecord] = []
        self.step = 0

    def send(self, src: int, dst: int, bits: int = 1) -> None:
        self._records.append(MessageRecord(self.step, src, dst, bits))

    def next_step(self) -> None:
        self.step += 1

    def trace(self, input_id: str = "") -> MessageTrace:
        return MessageTrace(tuple(self._records), input_id)


@dataclass(frozen=True)
class TraceEnsemble:
    traces: tuple[tuple[float, MessageTrace], ...]
    fixed_length: bool = False

    def __post_init__(self):
        total = math.fsum(w for w, _ in self.traces)
        if abs(total - 1.0) > 1e-9:
            raise TraceError(f"ensemble weights sum to {total!r}, not 1")
        if any(w < 0 for w, _ in self.traces):
            raise TraceError("negative ensemble weight")
        if self.fixed_length and self.traces:
            sig = self.traces[0][1].signature()
            if any(t.signature() != sig for _, t in self.traces[1:]):
                raise TraceError("fixed-length ensemble has traces with different message sizes")


def validate_trace(circuit: Circuit, trace: MessageTrace) -> list[str]:
    ids = circuit.node_map
    problems = []
    for i, r in enumerate(trace.records):
        for end in (r.src, r.dst):
            if end not in ids:
                problems.append(f"record {i}: dangling endpoint {end}")
    return problems


def _endpoints(circuit: Circuit, r: MessageRecord):
    try:
        return circuit.node_map[r.src].pos, circuit.node_map[r.dst].pos
    except KeyError as exc:
        raise TraceError(f"dangling endpoint: node {exc.args[0]} not in circuit") from None


def trace_arrays(circuit: Circuit, trace: MessageTrace) -> tuple[np.ndarray, np.ndarray]:
    """(bits, link length in lattice units) per record."""
    if not trace.records:
        return np.zeros(0), np.zeros(0)
    pts = np.array([_endpoints(circuit, r) for r in trace.records], dtype=float)
    bits = np.array([r.bits for r in trace.records], dtype=float)
    lengths = np.hypot(pts[:, 0, 0] - pts[:, 1, 0], pts[:, 0, 1] - pts[:, 1, 1])
    return bits, lengths


def bitmeters_of_trace(circuit: Circuit, trace: MessageTrace) -> float:
    """Sum over messages of bits times link length in meters."""
    bits, lengths = trace_arrays(circuit, trace)
    return float(np.dot(bits, lengths)) * circuit.substrate.lam


def bitmeters_in_region(circuit: Circuit, trace: MessageTrace, region: SubcircuitRegion) -> float:
    """Bit-meters a subcircuit is charged for.

    Links with both endpoints in the region count in full; links with one endpoint
    count only the stretch from that endpoint to the region boundary. Links passing
    over the region with no endpoint in it contribute nothing.
    """
    members = region.member_node_ids
    lam = circuit.substrate.lam
    total = 0.0
    for r in trace.records:
        a, b = _endpoints(circuit, r)
        ins, ind = r.src in members, r.dst in members
        if ins and ind:
            total += r.bits * math.hypot(a[0] - b[0], a[1] - b[1])
        elif ins or ind:
            total += r.bits * clip_segment_to_rect(a, b, region.region)
    return total * lam


def average_bitmeters(circuit: Circuit, ensemble: TraceEnsemble) -> float:
    return math.fsum(w * bitmeters_of_trace(circuit, t) for w, t in ensemble.traces)


@dataclass(frozen=True)
class InputAverage:
    mean: float
    stderr: float
    exact: bool
    count: int


def average_over_inputs(circuit: Circuit, trace_of: Callable[[np.ndarray], MessageTrace], k: int,
                        seed: int = 0, samples: int = 4096) -> InputAverage:
    """Average bit-meters of a flexible-length computation over uniform k-bit inputs.

    Exact enumeration up to 2**16 inputs; beyond that, ``samples`` seeded draws with
    the standard error of the sample mean.
    """
    if 2 ** k <= EXACT_ENUMERATION_LIMIT:
        vals = [bitmeters_of_trace(circuit, trace_of(np.array(bits, dtype=np.uint8)))
                for bits in itertools.product((0, 1), repeat=k)]
        return InputAverage(math.fsum(vals) / len(vals), 0.0, True, len(vals))
    rng = np.random.default_rng(seed)
    vals = np.array([bitmeters_of_trace(circuit, trace_of(rng.integers(0, 2, k, dtype=np.uint8)))
                     for _ in range(samples)])
    return InputAverage(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), False, samples)


def cut_crossing_bits(circuit: Circuit, trace: MessageTrace, rect: Rect) -> int:
    """Bits on messages with exactly one endpoint inside the closed ``rect``."""
    total = 0
    for r in trace.records:
        a, b = _endpoints(circuit, r)
        if rect.contains(a) != rect.contains(b):
            total += r.bits
    return total


# -- trace text format and accounting CSV ----------------------------------------

def format_trace(trace: MessageTrace) -> str:
    lines = []
    if trace.input_id:
        lines.append(f"# input_id: {trace.input_id}")
    lines += [f"msg {r.step} {r.src} {r.dst} {r.bits}" for r in trace.records]
    return "\n".join(lines) + "\n"


def parse_trace(text: str, path: str | None = None) -> MessageTrace:
    records = []
    input_id = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("# input_id:"):
            input_id = stripped.split(":", 1)[1].strip()
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "msg" or len(parts) != 5:
            raise ParseError("expected 'msg <step> <src> <dst> <bits>'", lineno, path)
        try:
            records.append(MessageRecord(*(int(p) for p in parts[1:])))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
    try:
        return MessageTrace(tuple(records), input_id)
    except TraceError as exc:
        raise ParseError(str(exc), None, path) from None


def read_trace(path: str | Path) -> MessageTrace:
    return parse_trace(Path(path).read_text(), path=str(path))


def write_trace(trace: MessageTrace, path: str | Path) -> None:
    Path(path).write_text(format_trace(trace))


ACCOUNTING_COLUMNS = ("trace_id", "total_bitmeters", "region_id", "region_bitmeters")


def accounting_rows(circuit: Circuit, traces: dict[str, MessageTrace],
                    regions: Sequence[SubcircuitRegion]) -> list[dict]:
    rows = []
    for tid, trace in traces.items():
        total = bitmeters_of_trace(circuit, trace)
        for rid, region in enumerate(regions):
            rows.append({"trace_id": tid, "total_bitmeters": total, "region_id": rid,
                         "region_bitmeters": bitmeters_in_region(circuit, trace, region)})
    return rows


def fmt_float(x) -> str:
    """Floats at 12 significant digits; everything else via str."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path: str | Path | None, columns: Sequence[str], rows: Iterable[dict], stream=None) -> None:
    """Write rows with a header and fixed column order; ``path=None`` writes to ``stream``."""
    def _emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt_float(row.get(c, "")) for c in columns])

    if path is None:
        _emit(stream)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        _emit(fh)

"""Regenerate configs/demo.circuit and configs/demo.trace.

A random 40x40 circuit with 150 output (bit) nodes, 60 input nodes and 30
helpers, plus a trace where each output gathers one bit from its three
nearest inputs. Seeded, so re-running gives identical files.
"""
import argparse
from pathlib import Path

import numpy as np

from infofriction.computation import TraceRecorder, write_trace
from infofriction.geometry import Circuit, Node, Substrate, write_circuit


def build(seed: int = 2024, side: int = 40, counts=(("output", 150), ("input", 60), ("helper", 30))):
    rng = np.random.default_rng(seed)
    total = sum(c for _, c in counts)
    cells = rng.choice((side + 1) ** 2, size=total, replace=False)
    roles = [r for r, c in counts for _ in range(c)]
    nodes = tuple(Node(i, r, (int(c % (side + 1)), int(c // (side + 1))))
                  for i, (r, c) in enumerate(zip(roles, cells)))
    circuit = Circuit(Substrate(side, 1e-6), nodes)
    inputs = [n for n in nodes if n.role == "input"]
    pin = np.array([n.pos for n in inputs], dtype=float)
    rec = TraceRecorder()
    for n in nodes:
        if n.role != "output":
            continue
        d = np.hypot(*(pin - np.array(n.pos)).T)
        for j in np.argsort(d, kind="stable")[:3]:
            rec.send(inputs[j].id, n.id, 1)
    return circuit, rec.trace("demo")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "configs"))
    args = ap.parse_args()
    circuit, trace = build()
    write_circuit(circuit, Path(args.out) / "demo.circuit")
    write_trace(trace, Path(args.out) / "demo.trace")
    print(f"wrote {args.out}/demo.circuit and demo.trace")

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from infofriction.computation import MessageRecord, MessageTrace
from infofriction.geometry import Circuit, Node, Substrate

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_circuit(rng: np.random.Generator, side: int, counts: dict[str, int], lam: float = 1.0) -> Circuit:
    total = sum(counts.values())
    cells = rng.choice((side + 1) ** 2, size=total, replace=False)
    roles = [r for r, c in counts.items() for _ in range(c)]
    nodes = tuple(Node(i, r, (int(c % (side + 1)), int(c // (side + 1))))
                  for i, (r, c) in enumerate(zip(roles, cells)))
    return Circuit(Substrate(side, lam), nodes)


def random_trace(rng: np.random.Generator, n_nodes: int, n_records: int, max_bits: int = 4) -> MessageTrace:
    recs = []
    for step in range(n_records):
        src, dst = rng.choice(n_nodes, size=2, replace=False)
        recs.append(MessageRecord(step, int(src), int(dst), int(rng.integers(1, max_bits + 1))))
    return MessageTrace(tuple(recs))


coords = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
points = st.tuples(coords, coords)


@st.composite
def rects(draw):
    x0, y0 = draw(coords), draw(coords)
    w = draw(st.floats(0.1, 20))
    h = draw(st.floats(0.1, 20))
    from infofriction.geometry import Rect
    return Rect(x0, y0, x0 + w, y0 + h)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

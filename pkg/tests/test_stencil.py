from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from infofriction.geometry import Circuit, Node, Substrate
from infofriction.stencil import (
    Stencil, best_origin, build_cuts, coverage, mean_grid_coverage, partition,
)

from conftest import random_circuit


def brute_best(circuit, a, eta, role="output"):
    """Exact rational oracle: coverage evaluated at every breakpoint.

    A node is covered for origins in (p - s/2, p + s/2] (mod a), so each constant
    piece takes its value at its right-hand breakpoint.
    """
    a = Fraction(a)
    s = Fraction((1 - 2 * eta) * a.__float__())
    pts = [n.pos for n in circuit.nodes if n.role == role]

    def axis(coords):
        cand = sorted({(Fraction(p) + d) % a for p in coords for d in (s / 2, -s / 2)})
        return np.array([[int((Fraction(p) - o + s / 2) % a < s) for p in coords] for o in cand],
                        dtype=np.int64)

    return int((axis([p[0] for p in pts]) @ axis([p[1] for p in pts]).T).max())


def narrowest_piece(circuit, a, eta, role="output"):
    """Exact width of the narrowest constant piece of coverage along either axis."""
    a = Fraction(a)
    s = Fraction((1 - 2 * eta) * a.__float__())
    pts = [n.pos for n in circuit.nodes if n.role == role]
    widths = []
    for ax in (0, 1):
        b = sorted({(Fraction(p[ax]) + d) % a for p in pts for d in (s / 2, -s / 2)})
        widths += [y - x for x, y in zip(b, b[1:] + [b[0] + a])]
    return min(widths)


def test_inner_side():
    st_ = Stencil(8, 0.25)
    assert st_.s == 4


def test_node_at_inner_centre_is_covered():
    c = Circuit(Substrate(10, 1.0), (Node(0, "output", (3, 3)),))
    part = partition(c, Stencil(4, 0.25, (3, 3)))
    assert [cell.k_inside for cell in part.cells] == [1]


def test_input_conservation():
    rng = np.random.default_rng(0)
    c = random_circuit(rng, 30, {"input": 100, "output": 20})
    for origin in [(0, 0), (1.3, 2.7), (4.99, 0.01)]:
        part = partition(c, Stencil(5.5, 0.2, origin))
        assert sum(cell.n_i for cell in part.cells) == 100
        members = [m for cell in part.cells for m in cell.region.member_node_ids]
        assert sorted(members) == sorted(n.id for n in c.nodes)


def test_single_node_coverage():
    c = Circuit(Substrate(10, 1.0), (Node(0, "output", (7, 2)),))
    origin, covered = best_origin(c, 6.0, 0.25)
    assert covered == 1 >= 0.25


def test_clustered_nodes_fully_covered():
    c = Circuit(Substrate(40, 1.0), tuple(Node(i, "output", (20 + i % 3, 20 + i // 3)) for i in range(9)))
    assert best_origin(c, 10.0, 0.25)[1] == 9


def test_two_hundred_nodes_quarter_eta():
    rng = np.random.default_rng(200)
    c = random_circuit(rng, 60, {"output": 200})
    origin, covered = best_origin(c, 7.3, 0.25)
    assert covered >= 50
    assert coverage(c, Stencil(7.3, 0.25, origin)) == covered
    assert covered == brute_best(c, 7.3, 0.25)


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.25, 0.4]), st.floats(2.0, 9.0))
def test_best_origin_matches_brute_force_and_floor(seed, eta, a):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 25))
    c = random_circuit(rng, 20, {"output": k, "input": 5})
    origin, covered = best_origin(c, a, eta)
    assert covered >= k * (1 - 2 * eta) ** 2
    assert covered == coverage(c, Stencil(a, eta, origin))
    # pieces narrower than float resolution of the origin cannot be located reliably
    assume(narrowest_piece(c, a, eta) > 1e-12 * a)
    assert covered == brute_best(c, a, eta)


@pytest.mark.parametrize("a", [np.nextafter(2.0, 3.0), np.nextafter(4.0, 3.0), np.nextafter(5.0, 6.0)])
def test_sub_ulp_pieces_still_consistent(a):
    rng = np.random.default_rng(3)
    c = random_circuit(rng, 20, {"output": 20, "input": 5})
    for eta in (0.1, 0.25, 0.4):
        origin, covered = best_origin(c, a, eta)
        assert covered == coverage(c, Stencil(a, eta, origin))
        assert covered >= 20 * (1 - 2 * eta) ** 2


def test_mean_grid_coverage_near_expectation():
    rng = np.random.default_rng(11)
    c = random_circuit(rng, 80, {"output": 400})
    for eta in (0.1, 0.25, 0.4):
        assert mean_grid_coverage(c, 6.37, eta) == pytest.approx(400 * (1 - 2 * eta) ** 2, rel=0.01)


def test_boundary_tie_goes_to_lower_index():
    st_ = Stencil(4, 0.25, (0, 0))      # outer squares centred on multiples of 4
    idx, tie = st_.cell_index((2, 1))   # x = 2 is the edge between columns 0 and 1
    assert tie and idx == (0, 0)


def test_inner_square_closed_lower_left():
    st_ = Stencil(4, 0.25, (0, 0))      # inner square of cell (0,0) is [-1, 1)^2
    assert st_.covers((-1, -1))
    assert not st_.covers((1, 0))


@pytest.mark.parametrize("a, eta, n_cut, alpha", [
    (12, 0.25, 5, 0), (10, 0.25, 4, Fraction(1, 2)), (4, 0.25, 3, 0),
])
def test_cut_examples(a, eta, n_cut, alpha):
    cs = build_cuts(Stencil(a, eta))
    assert cs.n_cut == n_cut and cs.alpha == alpha
    assert (cs.n_cut - 2) + cs.alpha == cs.depth == Fraction(eta) * Fraction(a)


def test_cuts_too_thin():
    with pytest.raises(ValueError, match="annulus thinner than lattice pitch"):
        build_cuts(Stencil(3, 0.25))


@given(st.floats(1.0, 50.0), st.floats(0.01, 0.49))
def test_cut_identity_exact(a, eta):
    if eta * a < 1:
        return
    cs = build_cuts(Stencil(a, eta))
    assert (cs.n_cut - 2) + cs.alpha == Fraction(eta) * Fraction(a)
    assert 0 <= cs.alpha < 1
    assert cs.offsets[0] == 0 and cs.offsets[-1] == cs.depth
    assert all(b - a_ == 1 for a_, b in zip(cs.offsets[:-2], cs.offsets[1:-1]))


def test_stencil_parameter_errors():
    with pytest.raises(ValueError):
        Stencil(0, 0.25)
    with pytest.raises(ValueError):
        Stencil(3, 0.5)
    c = Circuit(Substrate(5, 1.0), (Node(0, "output", (1, 1)),))
    with pytest.raises(ValueError):
        best_origin(c, -1.0, 0.25)

"""Placed encoders and decoders that produce real message traces.

Node numbering:

* encoder circuits: ``0..k-1`` info-bit inputs, ``k..k+n-1`` codeword outputs,
  then XOR helper nodes;
* decoder circuits: ``0..n-1`` channel-observation inputs, ``n..n+k-1`` decoded-bit
  outputs, then helpers (syndrome or check nodes).

Every coder runs two ways: ``encode``/``decode`` on one word, simulating each
message and returning its trace, and ``encode_batch``/``decode_batch`` on many
words with numpy, for Monte-Carlo runs. Tests check that the two agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .computation import MessageTrace, TraceRecorder, bitmeters_of_trace
from .geometry import Circuit, Node, Substrate

FAMILIES = ("repetition", "hamming74", "gallagerB_ldpc")


# -- GF(2) helpers ---------------------------------------------------------------

def gf2_rref(H: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    A = (np.array(H, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(A[r:, c])[0]
        if len(hit) == 0:
            continue
        p = r + hit[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


# -- XOR-tree encoder shared by all linear codes -------------------------------

@dataclass(frozen=True)
class _Send:
    step: int
    src: int
    dst: int


def _xor_tree_schedule(sources_per_output: list[list[int]], first_output: int,
                       first_helper: int) -> tuple[list[_Send], int]:
    """Binary XOR trees, one per output, built from helper nodes.

    Returns the send schedule and the number of helpers used. Level ``d`` of every
    tree fires at step ``d``.
    """
    sends: list[_Send] = []
    helper = first_helper
    for j, srcs in enumerate(sources_per_output):
        out = first_output + j
        level = list(srcs)
        step = 0
        while len(level) > 2:
            nxt = []
            for u, v in zip(level[0::2], level[1::2]):
                sends.append(_Send(step, u, helper))
                sends.append(_Send(step, v, helper))
                nxt.append(helper)
                helper += 1
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
            step += 1
        for u in level:
            sends.append(_Send(step, u, out))
    sends.sort(key=lambda s: s.step)  # stable: keeps per-step order deterministic
    return sends, helper - first_helper


class Coder:
    """Common machinery: generator-matrix encoding through XOR trees."""

    family: str
    k: int
    n: int

    @property
    def R(self) -> float:
        return self.k / self.n

    @property
    def generator(self) -> np.ndarray:  # (k, n) over GF(2)
        raise NotImplementedError

    @cached_property
    def _encoder_plan(self):
        G = self.generator
        sources = [list(np.nonzero(G[:, c])[0]) for c in range(self.n)]
        sends, helpers = _xor_tree_schedule(sources, self.k, self.k + self.n)
        return sends, helpers

    @property
    def encoder_roles(self) -> list[str]:
        _, helpers = self._encoder_plan
        return ["input"] * self.k + ["output"] * self.n + ["helper"] * helpers

    @property
    def decoder_roles(self) -> list[str]:
        raise NotImplementedError

    def encode_batch(self, info: np.ndarray) -> np.ndarray:
        info = np.asarray(info, dtype=np.uint8)
        return (info.astype(np.int64) @ self.generator.astype(np.int64) % 2).astype(np.uint8)

    def encode(self, info_bits) -> tuple[np.ndarray, MessageTrace]:
        """Run the XOR-tree encoding message by message."""
        info = np.asarray(info_bits, dtype=np.uint8).ravel()
        if len(info) != self.k:
            raise ValueError(f"expected {self.k} info bits, got {len(info)}")
        sends, helpers = self._encoder_plan
        value = np.zeros(self.k + self.n + helpers, dtype=np.uint8)
        value[:self.k] = info
        rec = TraceRecorder()
        for s in sends:
            while rec.step < s.step:
                rec.next_step()
            rec.send(s.src, s.dst, 1)
            value[s.dst] ^= value[s.src]
        codeword = value[self.k:self.k + self.n].copy()
        return codeword, rec.trace("".join(map(str, info)))

    def encoder_reference_trace(self) -> MessageTrace:
        return self.encode(np.zeros(self.k, dtype=np.uint8))[1]

    def decoder_reference_trace(self) -> MessageTrace:
        return self.decode(np.zeros(self.n, dtype=np.uint8))[1]

    # decoders -----------------------------------------------------------------
    def decode(self, received) -> tuple[np.ndarray, MessageTrace]:
        raise NotImplementedError

    def decode_batch(self, received: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decoded info bits (T, k) and decoding rounds used per word (T,)."""
        raise NotImplementedError

    def decoder_bitmeters_batch(self, circuit: Circuit, rounds) -> np.ndarray:
        """Per-trial decoder bit-meters; single-pass decoders report ``rounds == 1``."""
        bm = bitmeters_of_trace(circuit, self.decoder_reference_trace())
        return np.asarray(rounds, dtype=float) * bm

    def _check_received(self, received) -> np.ndarray:
        y = np.asarray(received, dtype=np.uint8).ravel()
        if len(y) != self.n:
            raise ValueError(f"expected {self.n} received bits, got {len(y)}")
        return y


# -- repetition ------------------------------------------------------------------

class RepetitionCoder(Coder):
    """Each of ``k`` info bits sent ``r`` times; majority decoding (ties decode to 0)."""

    family = "repetition"

    def __init__(self, k: int = 1, r: int = 3):
        if k < 1 or r < 1:
            raise ValueError("repetition code needs k >= 1 and r >= 1")
        self.k, self.r, self.n = k, r, k * r

    @cached_property
    def generator(self) -> np.ndarray:
        G = np.zeros((self.k, self.n), dtype=np.uint8)
        for i in range(self.k):
            G[i, i * self.r:(i + 1) * self.r] = 1
        return G

    @property
    def decoder_roles(self) -> list[str]:
        return ["input"] * self.n + ["output"] * self.k

    def decode(self, received):
        y = self._check_received(received)
        rec = TraceRecorder()
        votes = np.zeros(self.k, dtype=np.int64)
        for c in range(self.n):
            rec.send(c, self.n + c // self.r, 1)
            votes[c // self.r] += y[c]
        return (2 * votes > self.r).astype(np.uint8), rec.trace()

    def decode_batch(self, received):
        y = np.asarray(received, dtype=np.uint8).reshape(-1, self.k, self.r)
        return (2 * y.sum(axis=2, dtype=np.int64) > self.r).astype(np.uint8), np.ones(len(y), dtype=np.int64)


# -- Hamming(7,4) ----------------------------------------------------------------

_HAM_P = np.array([[1, 1, 0],
                   [1, 0, 1],
                   [0, 1, 1],
                   [1, 1, 1]], dtype=np.uint8)


class Hamming74Coder(Coder):
    """Systematic Hamming(7,4), repeated over ``blocks`` independent blocks.

    Decoder per block: three syndrome helpers each read the four positions of their
    parity check; every info-bit output reads its own observation plus the three
    syndrome bits and flips if the syndrome names its position.
    """

    family = "hamming74"
    G1 = np.hstack([np.eye(4, dtype=np.uint8), _HAM_P])
    H1 = np.hstack([_HAM_P.T, np.eye(3, dtype=np.uint8)])

    def __init__(self, blocks: int = 1):
        if blocks < 1:
            raise ValueError("need at least one block")
        self.blocks = blocks
        self.k, self.n = 4 * blocks, 7 * blocks

    @cached_property
    def generator(self) -> np.ndarray:
        return np.kron(np.eye(self.blocks, dtype=np.uint8), self.G1)

    @cached_property
    def parity_check(self) -> np.ndarray:
        return np.kron(np.eye(self.blocks, dtype=np.uint8), self.H1)

    @property
    def decoder_roles(self) -> list[str]:
        return ["input"] * self.n + ["output"] * self.k + ["helper"] * (3 * self.blocks)

    def _syndrome_node(self, block: int, j: int) -> int:
        return self.n + self.k + 3 * block + j

    def decode(self, received):
        y = self._check_received(received)
        rec = TraceRecorder()
        syn = np.zeros(3 * self.blocks, dtype=np.uint8)
        for b in range(self.blocks):
            for j in range(3):
                for c in np.nonzero(self.H1[j])[0]:
                    rec.send(7 * b + c, self._syndrome_node(b, j), 1)
                    syn[3 * b + j] ^= y[7 * b + c]
        rec.next_step()
        out = np.zeros(self.k, dtype=np.uint8)
        for b in range(self.blocks):
            s = syn[3 * b:3 * b + 3]
            for i in range(4):
                dst = self.n + 4 * b + i
                rec.send(7 * b + i, dst, 1)
                for j in range(3):
                    rec.send(self._syndrome_node(b, j), dst, 1)
                out[4 * b + i] = y[7 * b + i] ^ np.uint8(np.array_equal(s, self.H1[:, i]))
        return out, rec.trace()

    def decode_batch(self, received):
        y = np.asarray(received, dtype=np.uint8).reshape(-1, self.blocks, 7)
        syn = (y.astype(np.int64) @ self.H1.T.astype(np.int64)) % 2          # (T, blocks, 3)
        match = np.all(syn[:, :, None, :] == self.H1[:, :4].T[None, None], axis=3)  # (T, blocks, 4)
        out = y[:, :, :4] ^ match.astype(np.uint8)
        return out.reshape(len(y), self.k), np.ones(len(y), dtype=np.int64)


# -- Gallager-B LDPC ---------------------------------------------------------------

def regular_tanner_graph(n: int, dv: int, dc: int, seed: int, max_attempts: int = 2000) -> np.ndarray:
    """Random (dv, dc)-regular parity-check matrix with girth >= 6 and a connected graph.

    Variables are wired one at a time to distinct checks with spare sockets, never to a
    check that already shares a variable with another check of the same variable
    (which would close a 4-cycle). Dead ends restart with fresh randomness.
    """
    if (n * dv) % dc:
        raise ValueError("n * dv must be divisible by dc")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        cap = np.full(m, dc)
        var_checks: list[list[int]] = []
        check_vars: list[list[int]] = [[] for _ in range(m)]
        ok = True
        for v in range(n):
            chosen: list[int] = []
            blocked: set[int] = set()
            for _ in range(dv):
                cand = [c for c in range(m) if cap[c] > 0 and c not in chosen and c not in blocked]
                if not cand:
                    ok = False
                    break
                spare = np.array([cap[c] for c in cand], dtype=float)
                best = [c for c, s in zip(cand, spare) if s == spare.max()]
                c = int(rng.choice(best))
                chosen.append(c)
                for u in check_vars[c]:
                    blocked.update(var_checks[u])
            if not ok:
                break
            var_checks.append(chosen)
            for c in chosen:
                cap[c] -= 1
                check_vars[c].append(v)
        if not ok:
            continue
        H = np.zeros((m, n), dtype=np.uint8)
        for v, cs in enumerate(var_checks):
            H[cs, v] = 1
        if _tanner_connected(H) and tanner_girth_at_least_6(H):
            return H
    raise RuntimeError(f"no girth-6 ({dv},{dc}) graph on {n} variables after {max_attempts} attempts")


def tanner_girth_at_least_6(H: np.ndarray) -> bool:
    overlap = H.astype(np.int64).T @ H.astype(np.int64)
    np.fill_diagonal(overlap, 0)
    return bool(overlap.max(initial=0) <= 1)


def _tanner_connected(H: np.ndarray) -> bool:
    m, n = H.shape
    adj = sparse.bmat([[None, sparse.csr_matrix(H)], [sparse.csr_matrix(H.T), None]])
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp == 1


class GallagerBCoder(Coder):
    """Regular LDPC code, systematic encoding, Gallager-B hard-decision decoding.

    Variables are reordered so the first ``k`` are the information positions.
    Decoder schedule per round: every variable sends one bit to each neighbouring
    check, then every check answers each neighbour with one bit. Decoding stops after
    the first round whose incoming estimate satisfies all checks (so an error-free
    word uses one round), or after ``max_iter`` rounds. The stop decision itself is
    treated as a free global signal. Finally each info variable hands its bit to its
    output node.
    """

    family = "gallagerB_ldpc"

    def __init__(self, n: int = 16, dv: int = 3, dc: int = 4, seed: int = 0, max_iter: int = 20,
                 early_stop: bool = True):
        self.dv, self.dc, self.seed, self.max_iter = dv, dc, seed, max_iter
        self.early_stop = early_stop
        H0 = regular_tanner_graph(n, dv, dc, seed)
        R, pivots = gf2_rref(H0)
        free = [c for c in range(n) if c not in set(pivots)]
        order = free + list(pivots)
        self.H = H0[:, order]
        self.n, self.m = n, H0.shape[0]
        self.k = len(free)
        if self.k < 1:
            raise ValueError("parity-check matrix has full column rank; no information bits")
        A = np.zeros((self.k, len(pivots)), dtype=np.uint8)
        for i, _ in enumerate(pivots):
            for j, f in enumerate(free):
                A[j, i] = R[i, f]
        self._G = np.hstack([np.eye(self.k, dtype=np.uint8), A])
        # edges sorted by check; edge e joins variable ev[e] and check ec[e]
        ec, ev = np.nonzero(self.H)
        self.ec, self.ev = ec, ev
        # segment starts for summing edge values per check (edges already check-sorted)
        # and per variable (through a stable variable-sorting permutation)
        self._chk_starts = np.flatnonzero(np.r_[True, np.diff(ec) != 0])
        self._var_perm = np.argsort(ev, kind="stable")
        self._var_starts = np.flatnonzero(np.r_[True, np.diff(ev[self._var_perm]) != 0])

    @property
    def generator(self) -> np.ndarray:
        return self._G

    @property
    def decoder_roles(self) -> list[str]:
        return ["input"] * self.n + ["output"] * self.k + ["helper"] * self.m

    def check_node(self, c: int) -> int:
        return self.n + self.k + c

    def _check_sums(self, per_edge: np.ndarray) -> np.ndarray:
        return np.add.reduceat(per_edge.astype(np.int16), self._chk_starts, axis=1)

    def _var_sums(self, per_edge: np.ndarray) -> np.ndarray:
        return np.add.reduceat(per_edge[:, self._var_perm].astype(np.int16), self._var_starts, axis=1)

    def decode_batch(self, received):
        y = np.asarray(received, dtype=np.uint8).reshape(-1, self.n)
        T = len(y)
        y_e = y[:, self.ev]                      # channel value at each edge's variable
        m_vc = y_e.copy()
        xhat = y.copy()
        rounds = np.zeros(T, dtype=np.int64)
        active = np.ones(T, dtype=bool)
        thresh = self.dv - 1                     # all other checks must disagree (b = dv - 1)
        for t in range(1, self.max_iter + 1):
            idx = np.flatnonzero(active)
            rounds[idx] = t
            if self.early_stop:
                done = ~np.any(self._check_sums(xhat[idx][:, self.ev]) % 2, axis=1)
                active[idx[done]] = False
                idx = idx[~done]
            if len(idx) == 0:
                break
            mv = m_vc[idx]
            total = self._check_sums(mv) % 2
            m_cv = (total[:, self.ec] ^ mv).astype(np.uint8)
            disagree = (m_cv != y_e[idx]).astype(np.int16)
            per_var = self._var_sums(disagree)
            extrinsic = per_var[:, self.ev] - disagree
            m_vc[idx] = np.where(extrinsic >= thresh, 1 - y_e[idx], y_e[idx]).astype(np.uint8)
            flip = 2 * per_var > self.dv + 1     # majority of channel bit and all checks
            xhat[idx] = (y[idx] ^ flip).astype(np.uint8)
        return xhat[:, :self.k].copy(), rounds

    def decode(self, received):
        y = self._check_received(received)
        out, rounds = self.decode_batch(y[None, :])
        return out[0], self.decoder_trace(int(rounds[0]))

    def decoder_trace(self, rounds: int) -> MessageTrace:
        rec = TraceRecorder()
        for t in range(rounds):
            for v, c in zip(self.ev, self.ec):
                rec.send(int(v), self.check_node(int(c)), 1)
            rec.next_step()
            for v, c in zip(self.ev, self.ec):
                rec.send(self.check_node(int(c)), int(v), 1)
            rec.next_step()
        for i in range(self.k):
            rec.send(i, self.n + i, 1)
        return rec.trace()

    def round_cost(self, circuit: Circuit) -> tuple[float, float]:
        """(bit-meters of one round, bit-meters of the final hand-off) on ``circuit``."""
        pos = circuit.node_map
        lam = circuit.substrate.lam
        edge = sum(math.dist(pos[int(v)].pos, pos[self.check_node(int(c))].pos)
                   for v, c in zip(self.ev, self.ec))
        handoff = sum(math.dist(pos[i].pos, pos[self.n + i].pos) for i in range(self.k))
        return 2 * edge * lam, handoff * lam

    def decoder_bitmeters_batch(self, circuit: Circuit, rounds) -> np.ndarray:
        per_round, handoff = self.round_cost(circuit)
        return np.asarray(rounds, dtype=float) * per_round + handoff

    def decoder_reference_trace(self) -> MessageTrace:
        return self.decoder_trace(1)


def make_coder(family: str, k: int | None = None, n: int | None = None, seed: int = 0,
               **extra) -> Coder:
    """Build a coder from description-file style parameters."""
    if family == "repetition":
        k = k or 1
        n = n or 3 * k
        if n % k:
            raise ValueError("repetition code needs n to be a multiple of k")
        return RepetitionCoder(k, n // k)
    if family == "hamming74":
        k = k or 4
        if k % 4 or (n is not None and n != 7 * k // 4):
            raise ValueError("hamming74 needs k = 4b and n = 7b")
        return Hamming74Coder(k // 4)
    if family == "gallagerB_ldpc":
        coder = GallagerBCoder(n or 16, int(extra.get("dv", 3)), int(extra.get("dc", 4)), seed,
                               int(extra.get("max_iter", 20)))
        if k is not None and k != coder.k:
            raise ValueError(f"LDPC graph has k = {coder.k}, description says {k}")
        return coder
    raise ValueError(f"unknown code family {family!r}; choose from {FAMILIES}")


# -- placement ---------------------------------------------------------------------

STRATEGIES = ("row", "grid", "local_search")


def _spread(count: int, width: int, y0: int) -> list[tuple[int, int]]:
    """``count`` points along rows of ``width`` starting at row ``y0``, spread evenly."""
    pts = []
    rows = -(-count // width) if count else 0
    for r in range(rows):
        m = min(width, count - r * width)
        xs = [int(math.floor((i + 0.5) * width / m)) for i in range(m)]
        pts += [(x, y0 + r) for x in xs]
    return pts


def row_placement(roles: list[str]) -> list[tuple[int, int]]:
    """Inputs on row 0, outputs on the next row(s), helpers after, each spread to the input width."""
    n_in = roles.count("input")
    width = max(n_in, 1)
    pos: dict[str, list[tuple[int, int]]] = {}
    y = 0
    for role in ("input", "output", "helper"):
        c = roles.count(role)
        pos[role] = _spread(c, width, y)
        y += -(-c // width) if c else 0
    it = {r: iter(p) for r, p in pos.items()}
    return [next(it[r]) for r in roles]


def grid_placement(roles: list[str], width: int | None = None) -> list[tuple[int, int]]:
    w = width or max(1, math.ceil(math.sqrt(len(roles))))
    return [(i % w, i // w) for i in range(len(roles))]


def link_weights(trace: MessageTrace) -> dict[tuple[int, int], int]:
    """Undirected bit totals per node pair."""
    w: dict[tuple[int, int], int] = {}
    for r in trace.records:
        key = (min(r.src, r.dst), max(r.src, r.dst))
        w[key] = w.get(key, 0) + r.bits
    return w


@dataclass
class LocalSearchResult:
    positions: list[tuple[int, int]]
    objective: float
    history: list[float] = field(default_factory=list)
    accepted: int = 0


def local_search_placement(n_nodes: int, weights: dict[tuple[int, int], int], side: int,
                           seed: int = 0, budget: int = 20000,
                           init: list[tuple[int, int]] | None = None) -> LocalSearchResult:
    """Hill climbing over node-to-cell assignments on a (side+1)^2 lattice.

    A move picks a node and a cell; the node moves there, swapping with any occupant.
    Only strictly improving moves are kept, so the objective (weighted total link
    length, lattice units) never increases. ``history`` lists the objective after
    every accepted move.
    """
    cells = (side + 1) ** 2
    if n_nodes > cells:
        raise ValueError(f"substrate too small: {n_nodes} nodes, {cells} lattice points")
    rng = np.random.default_rng(seed)
    pos = list(init) if init is not None else grid_placement(["helper"] * n_nodes, side + 1)
    occupant = {p: i for i, p in enumerate(pos)}
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
    for (u, v), w in weights.items():
        nbrs[u].append((v, w))
        nbrs[v].append((u, w))

    def local(i: int, p, skip: int = -1, q=None) -> float:
        tot = 0.0
        for j, w in nbrs[i]:
            if j == skip:
                pj = q
            else:
                pj = pos[j]
            tot += w * math.dist(p, pj)
        return tot

    objective = sum(w * math.dist(pos[u], pos[v]) for (u, v), w in weights.items())
    history = [objective]
    accepted = 0
    for _ in range(budget):
        i = int(rng.integers(n_nodes))
        cell = (int(rng.integers(side + 1)), int(rng.integers(side + 1)))
        if cell == pos[i]:
            continue
        j = occupant.get(cell)
        if j is None:
            delta = local(i, cell) - local(i, pos[i])
        else:
            # i -> cell, j -> pos[i]; the i-j link length is unchanged by a swap
            before = local(i, pos[i]) + local(j, cell)
            after = local(i, cell, skip=j, q=pos[i]) + local(j, pos[i], skip=i, q=cell)
            delta = after - before
        if delta < -1e-12:
            old = pos[i]
            if j is not None:
                pos[j] = old
                occupant[old] = j
            else:
                del occupant[old]
            pos[i] = cell
            occupant[cell] = i
            objective += delta
            history.append(objective)
            accepted += 1
    objective = sum(w * math.dist(pos[u], pos[v]) for (u, v), w in weights.items())
    return LocalSearchResult(pos, objective, history, accepted)


def place_netlist(roles: list[str], reference: MessageTrace, strategy: str, lam: float = 1.0,
                  seed: int = 0, budget: int = 20000, slack: float = 1.5) -> Circuit:
    if strategy == "row":
        pts = row_placement(roles)
    elif strategy == "grid":
        pts = grid_placement(roles)
    elif strategy == "local_search":
        side = max(1, math.ceil(math.sqrt(len(roles) * slack)) - 1)
        init = grid_placement(roles, side + 1)
        pts = local_search_placement(len(roles), link_weights(reference), side, seed, budget, init).positions
    else:
        raise ValueError(f"unknown placement strategy {strategy!r}; choose from {STRATEGIES}")
    side = max(1, max(max(p) for p in pts)) if pts else 1
    return Circuit(Substrate(side, lam), tuple(Node(i, r, tuple(p)) for i, (r, p) in enumerate(zip(roles, pts))))


def place(coder: Coder, strategy: str, which: str = "decoder", lam: float = 1.0, seed: int = 0,
          budget: int = 20000) -> Circuit:
    """Lay out the encoder or decoder circuit of ``coder`` on a lattice."""
    if which == "decoder":
        return place_netlist(coder.decoder_roles, coder.decoder_reference_trace(), strategy, lam, seed, budget)
    if which == "encoder":
        return place_netlist(coder.encoder_roles, coder.encoder_reference_trace(), strategy, lam, seed, budget)
    raise ValueError("which must be 'encoder' or 'decoder'")


@dataclass(frozen=True)
class PlacedCoder:
    coder: Coder
    strategy: str
    encoder_circuit: Circuit
    decoder_circuit: Circuit

    @classmethod
    def build(cls, coder: Coder, strategy: str, lam: float = 1.0, seed: int = 0, budget: int = 20000):
        return cls(coder, strategy, place(coder, strategy, "encoder", lam, seed, budget),
                   place(coder, strategy, "decoder", lam, seed, budget))

    def encoder_bitmeters(self) -> float:
        return bitmeters_of_trace(self.encoder_circuit, self.coder.encoder_reference_trace())


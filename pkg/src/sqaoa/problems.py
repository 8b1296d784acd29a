"""Problem families, diagonal cost Hamiltonians and the exact reference solver.

Bitstrings follow one convention everywhere: bit ``q`` of a basis index is the
value of vertex ``q``. When a bitstring is given as text, character ``q`` is
vertex ``q``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .pauli import PauliSum, PauliTerm, ResourceError, symmetric_pair

KINDS = ("u3R", "w3R", "SK")
MAX_QUBITS = 24
W3R_TIE_TOL = 1e-9

# independent RNG streams derived from one instance seed
_TOPOLOGY_STREAM = 0
_WEIGHT_STREAM = 1
_SK_STREAM = 2


def _rng(seed: int, stream: int, attempt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([int(seed), stream, attempt]))


@dataclass(frozen=True)
class ProblemInstance:
    """Weighted graph plus problem kind.

    ``edges`` holds ``(i, j, w)`` triples with ``i < j`` in application order.
    """

    kind: str
    n: int
    edges: tuple[tuple[int, int, float], ...]
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}; expected one of {KINDS}")
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for i, j, _ in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)

    @property
    def is_maxcut(self) -> bool:
        return self.kind != "SK"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    @property
    def edge_scale(self) -> float:
        """Factor multiplying ``w_ij Z_i Z_j`` in the cost Hamiltonian."""
        return 0.5 if self.is_maxcut else 1.0

    @cached_property
    def edge_offsets(self) -> np.ndarray:
        """Identity coefficient carried by each edge term."""
        if self.is_maxcut:
            return -0.5 * self.weights
        return np.zeros(self.num_edges)

    @cached_property
    def edge_diags(self) -> np.ndarray:
        """``(|E|, 2^n)`` array; row ``e`` is the diagonal of edge term ``e``."""
        _check_size(self.n)
        idx = np.arange(1 << self.n)
        out = np.empty((self.num_edges, idx.size))
        for e, (i, j, w) in enumerate(self.edges):
            zz = 1.0 - 2.0 * (((idx >> i) ^ (idx >> j)) & 1)
            out[e] = self.edge_scale * w * zz + self.edge_offsets[e]
        return out

    @cached_property
    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        ii = np.array([i for i, _, _ in self.edges], dtype=np.int64)
        jj = np.array([j for _, j, _ in self.edges], dtype=np.int64)
        return ii, jj

    @cached_property
    def h_diag(self) -> np.ndarray:
        return build_h_diag(self)

    @cached_property
    def solution(self) -> "ExactSolution":
        return brute_force_solve(self)

    def neighbors(self, v: int) -> list[int]:
        return [j if i == v else i for i, j, _ in self.edges if v in (i, j)]


@dataclass(frozen=True)
class ExactSolution:
    e_opt: float
    ground: np.ndarray = field(repr=False)

    @property
    def degeneracy(self) -> int:
        return int(self.ground.size)


def _check_size(n: int):
    if n > MAX_QUBITS:
        raise ResourceError(f"n={n} exceeds the {MAX_QUBITS}-qubit limit")


def _pairing_attempt(n: int, degree: int, rng: np.random.Generator):
    stubs = np.repeat(np.arange(n), degree)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    edges = set()
    for a, b in pairs:
        if a == b:
            return None
        key = (int(min(a, b)), int(max(a, b)))
        if key in edges:
            return None
        edges.add(key)
    return sorted(edges)


def random_regular_edges(n: int, seed: int, degree: int = 3, max_attempts: int = 100_000):
    """Configuration-model sample of a simple ``degree``-regular graph.

    Each rejected pairing (self-loop or multi-edge) is redrawn from a fresh
    sub-stream so the result depends only on ``(n, seed)``.
    """
    if (n * degree) % 2 or n <= degree:
        raise ValueError(f"no simple {degree}-regular graph on {n} vertices")
    for attempt in range(max_attempts):
        edges = _pairing_attempt(n, degree, _rng(seed, _TOPOLOGY_STREAM, attempt))
        if edges is not None:
            return edges
    raise RuntimeError(f"configuration model failed after {max_attempts} attempts")


def _check_regular_n(n: int):
    if n < 4 or n % 2:
        raise ValueError(f"3-regular graphs need an even vertex count >= 4, got {n}")


def generate_u3r(n: int, seed: int) -> ProblemInstance:
    _check_regular_n(n)
    edges = random_regular_edges(n, seed)
    return ProblemInstance("u3R", n, tuple((i, j, 1.0) for i, j in edges), seed)


def generate_w3r(n: int, seed: int) -> ProblemInstance:
    """Same topology as ``generate_u3r(n, seed)`` with U[0, 1) weights from a separate stream."""
    _check_regular_n(n)
    edges = random_regular_edges(n, seed)
    w = _rng(seed, _WEIGHT_STREAM).uniform(0.0, 1.0, size=len(edges))
    return ProblemInstance("w3R", n, tuple((i, j, float(wk)) for (i, j), wk in zip(edges, w)), seed)


def generate_sk(n: int, seed: int) -> ProblemInstance:
    if n < 2:
        raise ValueError("SK model needs at least two spins")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    w = _rng(seed, _SK_STREAM).choice([-1.0, 1.0], size=len(pairs))
    return ProblemInstance("SK", n, tuple((i, j, float(wk)) for (i, j), wk in zip(pairs, w)), seed)


GENERATORS = {"u3R": generate_u3r, "w3R": generate_w3r, "SK": generate_sk}


def generate(kind: str, n: int, seed: int) -> ProblemInstance:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown problem kind {kind!r}") from None
    return gen(n, seed)


def _bits(inst: ProblemInstance, z) -> list[int]:
    if isinstance(z, (int, np.integer)):
        if not 0 <= z < (1 << inst.n):
            raise ValueError(f"basis index {z} out of range for n={inst.n}")
        return [(int(z) >> q) & 1 for q in range(inst.n)]
    if isinstance(z, str):
        z = [int(ch) for ch in z]
    bits = [int(b) for b in z]
    if len(bits) != inst.n:
        raise ValueError(f"bitstring length {len(bits)} != n={inst.n}")
    return bits


def classical_energy(inst: ProblemInstance, z) -> float:
    """Cost of one assignment: minus the cut weight (MaxCut) or ``sum w s_i s_j`` (SK)."""
    bits = _bits(inst, z)
    if inst.is_maxcut:
        return -float(sum(w for i, j, w in inst.edges if bits[i] != bits[j]))
    s = [1 - 2 * b for b in bits]
    return float(sum(w * s[i] * s[j] for i, j, w in inst.edges))


def build_h_diag(inst: ProblemInstance) -> np.ndarray:
    """Cost of every basis state, indexed by basis integer."""
    _check_size(inst.n)
    idx = np.arange(1 << inst.n)
    h = np.zeros(idx.size)
    for i, j, w in inst.edges:
        differ = ((idx >> i) ^ (idx >> j)) & 1
        if inst.is_maxcut:
            h -= w * differ
        else:
            h += w * (1.0 - 2.0 * differ)
    return h


def brute_force_solve(inst: ProblemInstance) -> ExactSolution:
    h = inst.h_diag
    e_opt = float(h.min())
    if inst.kind == "w3R":
        ground = np.flatnonzero(h <= e_opt + W3R_TIE_TOL)
    else:
        ground = np.flatnonzero(h == e_opt)
    return ExactSolution(e_opt, ground)


def cost_hamiltonian(inst: ProblemInstance) -> PauliSum:
    """Symbolic cost Hamiltonian, including the MaxCut identity offset."""
    n = inst.n
    terms = []
    for i, j, w in inst.edges:
        axes = ["I"] * n
        axes[i] = axes[j] = "Z"
        terms.append(PauliTerm(inst.edge_scale * w, "".join(axes)))
        if inst.is_maxcut:
            terms.append(PauliTerm(-0.5 * w, "I" * n))
    if not terms:
        return PauliSum.zero(n)
    return PauliSum.from_terms(terms, n)


def weighted_pair_sum(inst: ProblemInstance, pq: str, scale: float = 1.0) -> PauliSum:
    """``scale * sum_ij w_ij (P_i Q_j + Q_i P_j) / 2`` over the instance edges."""
    out = PauliSum.zero(inst.n)
    for i, j, w in inst.edges:
        out = out + symmetric_pair(inst.n, i, j, pq, scale * w)
    return out


def write_instance(inst: ProblemInstance, path) -> None:
    seed = "-" if inst.seed is None else inst.seed
    lines = [f"{inst.kind} {inst.n} {seed}"]
    lines += [f"{i} {j} {w!r}" for i, j, w in inst.edges]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_instance(path) -> ProblemInstance:
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise ValueError(f"{path}: header must be 'kind n seed'")
    kind, n, seed = rows[0]
    edges = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"{path}:{k}: edge line must be 'i j w'")
        edges.append((int(row[0]), int(row[1]), float(row[2])))
    return ProblemInstance(kind, int(n), tuple(edges), None if seed == "-" else int(seed))


def instance_filename(inst: ProblemInstance) -> str:
    return f"{inst.kind}_n{inst.n}_s{inst.seed}.txt"


def write_cohort(kind: str, n: int, count: int, seed_base: int, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for k in range(count):
        inst = generate(kind, n, seed_base + k)
        path = os.path.join(out_dir, instance_filename(inst))
        write_instance(inst, path)
        paths.append(path)
    return paths


def degrees(inst: ProblemInstance) -> np.ndarray:
    deg = np.zeros(inst.n, dtype=int)
    for i, j, _ in inst.edges:
        deg[i] += 1
        deg[j] += 1
    return deg


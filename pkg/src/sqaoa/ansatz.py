"""Circuit families, parameter layout and CNOT-level compilation.

Parameter layout
----------------
``qaoa``
    ``(gamma_1 .. gamma_p, beta_1 .. beta_p)``
``zz`` (per-edge ZZ angles released, no extra interaction)
    per layer ``k``: ``(gamma_k^e for e in edges, beta_k)``
``sqaoa``
    per layer ``k``: ``(gamma_k^e for e in edges, beta_k, alpha_k^m for m in mixers)``

Layers are concatenated in order ``k = 1 .. p``. Edge blocks are applied in the
instance's edge-list order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import statevector as sv
from .problems import ProblemInstance

FAMILIES = ("qaoa", "zz", "sqaoa")
_FAMILY_ALIASES = {
    "qaoa": "qaoa",
    "zz": "zz",
    "zz-free": "zz",
    "zz-technique": "zz",
    "sqaoa": "sqaoa",
    "s-qaoa": "sqaoa",
}
COMPILABLE = ("YY", "XX")


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit family descriptor.

    ``mixers`` lists the extra two-body interactions (``"YZ"``, ``"YY"``,
    ``"XX"``, ``"XZ"``, ``"XY"``) and defaults to ``("YY",)`` for S-QAOA.
    ``gathered`` fuses ZZ and the extra interactions into one exponential
    per edge, followed by the mixer. Otherwise a layer applies all ZZ phases,
    then the mixer, then one exponential per edge for each listed interaction
    in order.
    """

    family: str = "sqaoa"
    p: int = 1
    mixers: tuple[str, ...] | None = None
    gathered: bool = True

    def __post_init__(self):
        fam = _FAMILY_ALIASES.get(str(self.family).lower())
        if fam is None:
            raise ValueError(f"unknown ansatz family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if int(self.p) < 1:
            raise ValueError("layer count p must be >= 1")
        object.__setattr__(self, "p", int(self.p))
        mixers = self.mixers
        if mixers is None:
            mixers = ("YY",) if fam == "sqaoa" else ()
        elif isinstance(mixers, str):
            mixers = tuple(m for m in mixers.split("_") if m)
        mixers = tuple(str(m).upper() for m in mixers)
        for m in mixers:
            if m not in sv.M_TYPES:
                raise ValueError(f"unknown two-body interaction {m!r}; expected one of {sv.M_TYPES}")
        if len(set(mixers)) != len(mixers):
            raise ValueError(f"duplicate interaction in {mixers}")
        if (fam == "sqaoa") != bool(mixers):
            raise ValueError("extra interactions are required for sqaoa and forbidden otherwise")
        object.__setattr__(self, "mixers", mixers)
        object.__setattr__(self, "gathered", bool(self.gathered))

    @property
    def label(self) -> str:
        if self.family == "qaoa":
            return "QAOA"
        if self.family == "zz":
            return "ZZ"
        name = "_".join(self.mixers)
        return name if self.gathered else f"{name} not gather"

    def with_depth(self, p: int) -> "AnsatzSpec":
        return AnsatzSpec(self.family, p, self.mixers, self.gathered)

    def to_dict(self) -> dict:
        return {"family": self.family, "p": self.p, "mixers": list(self.mixers), "gathered": self.gathered}


def layer_size(spec: AnsatzSpec, inst: ProblemInstance) -> int:
    if spec.family == "qaoa":
        return 2
    return inst.num_edges + 1 + len(spec.mixers)


def param_count(spec: AnsatzSpec, inst: ProblemInstance) -> int:
    return spec.p * layer_size(spec, inst)


class Layer(NamedTuple):
    gammas: np.ndarray  # per-edge angles (tied for qaoa)
    beta: float
    alphas: np.ndarray


def unpack(spec: AnsatzSpec, inst: ProblemInstance, params) -> list[Layer]:
    params = np.asarray(params, dtype=float)
    if params.ndim != 1 or params.size != param_count(spec, inst):
        raise ValueError(
            f"expected {param_count(spec, inst)} parameters for {spec.label} p={spec.p}, got {params.size}"
        )
    E = inst.num_edges
    if spec.family == "qaoa":
        g, b = params[: spec.p], params[spec.p:]
        return [Layer(np.full(E, g[k]), float(b[k]), np.zeros(0)) for k in range(spec.p)]
    L = layer_size(spec, inst)
    out = []
    for k in range(spec.p):
        chunk = params[k * L:(k + 1) * L]
        out.append(Layer(chunk[:E], float(chunk[E]), chunk[E + 1:]))
    return out


def embed_qaoa(spec: AnsatzSpec, inst: ProblemInstance, qaoa_params) -> np.ndarray:
    """Lift a depth-p QAOA vector into ``spec``'s layout: tied edge angles, zero alphas."""
    qaoa_params = np.asarray(qaoa_params, dtype=float)
    if qaoa_params.size != 2 * spec.p:
        raise ValueError(f"expected a depth-{spec.p} QAOA vector, got {qaoa_params.size} values")
    if spec.family == "qaoa":
        return qaoa_params.copy()
    g, b = qaoa_params[: spec.p], qaoa_params[spec.p:]
    E, m = inst.num_edges, len(spec.mixers)
    layers = [np.concatenate([np.full(E, g[k]), [b[k]], np.zeros(m)]) for k in range(spec.p)]
    return np.concatenate(layers)


def _edge_blocks(inst: ProblemInstance, gammas: np.ndarray, alphas, mixers) -> np.ndarray:
    thetas = gammas * inst.edge_scale * inst.weights
    us = sv.two_body_unitaries(thetas, alphas, mixers)
    # identity part of each edge term (MaxCut offset) as a phase
    return us * np.exp(-1j * gammas * inst.edge_offsets)[:, None, None]


def apply_layer(spec: AnsatzSpec, inst: ProblemInstance, layer: Layer, psi: np.ndarray) -> np.ndarray:
    ii, jj = inst.pairs
    if spec.family == "qaoa":
        sv.apply_diagonal_phase(psi, inst.h_diag, layer.gammas[0] if layer.gammas.size else 0.0)
    elif spec.family == "zz" or not spec.gathered:
        sv.apply_phase_angles(psi, layer.gammas @ inst.edge_diags)
    elif len(spec.mixers) == 1 and spec.mixers[0] in COMPILABLE:
        thetas = layer.gammas * inst.edge_scale * inst.weights
        sv.apply_zz_pair_layer(psi, ii, jj, thetas, layer.alphas[0] * thetas, layer.gammas * inst.edge_offsets,
                               spec.mixers[0])
    else:
        sv.apply_blocks(psi, _edge_blocks(inst, layer.gammas, layer.alphas, spec.mixers), ii, jj)
    sv.apply_mixer(psi, layer.beta)
    if spec.family == "sqaoa" and not spec.gathered:
        # separate form: extra interactions act after the mixer
        thetas = layer.gammas * inst.edge_scale * inst.weights
        zeros = np.zeros_like(thetas)
        for m, a in zip(spec.mixers, layer.alphas):
            if m in COMPILABLE:
                sv.apply_zz_pair_layer(psi, ii, jj, zeros, a * thetas, zeros, m)
            else:
                sv.apply_blocks(psi, sv.pair_exps(a * thetas, m), ii, jj)
    return psi


def apply_ansatz(spec: AnsatzSpec, inst: ProblemInstance, params, state: np.ndarray | None = None) -> np.ndarray:
    """Run the full circuit; starts from ``|+>^n`` unless ``state`` is given (updated in place)."""
    layers = unpack(spec, inst, params)
    psi = sv.plus_state(inst.n) if state is None else state
    if psi.size != 1 << inst.n:
        raise ValueError(f"state has {psi.size} amplitudes, instance needs {1 << inst.n}")
    for layer in layers:
        apply_layer(spec, inst, layer, psi)
    return psi


def energy(spec: AnsatzSpec, inst: ProblemInstance, params) -> float:
    return sv.expectation_diagonal(apply_ansatz(spec, inst, params), inst.h_diag)


class Gate(NamedTuple):
    name: str  # CNOT, RX, RY, RZ
    qubits: tuple[int, ...]  # local indices: 0 -> qubit i, 1 -> qubit j
    angle: float = 0.0


def compile_edge_block(theta: float, alpha: float = 0.0, m_type: str | None = None) -> list[Gate]:
    """Two-CNOT circuit for ``exp(-i theta (Z Z + alpha M))`` up to global phase.

    Rotations follow ``R_P(t) = exp(-i t P / 2)``. Supported ``m_type``:
    ``None``/``"none"``, ``"XX"``, ``"YY"``.
    """
    core = [Gate("CNOT", (0, 1)), Gate("RZ", (1,), 2.0 * theta)]
    if m_type in (None, "none"):
        return core + [Gate("CNOT", (0, 1))]
    if m_type not in COMPILABLE:
        raise ValueError(f"no two-CNOT compilation for {m_type!r}; supported: none, {COMPILABLE}")
    # CNOT maps ZZ -> Z_1 and XX -> X_0
    core = core + [Gate("RX", (0,), 2.0 * alpha * theta), Gate("CNOT", (0, 1))]
    if m_type == "XX":
        return core
    # RZ(pi/2) on both qubits maps XX -> YY
    pre = [Gate("RZ", (0,), -np.pi / 2), Gate("RZ", (1,), -np.pi / 2)]
    post = [Gate("RZ", (0,), np.pi / 2), Gate("RZ", (1,), np.pi / 2)]
    return pre + core + post


def _gate_matrix(g: Gate) -> np.ndarray:
    if g.name == "CNOT":
        c, t = g.qubits
        u = np.zeros((4, 4), dtype=complex)
        for b in range(4):
            out = b ^ (1 << t) if (b >> c) & 1 else b
            u[out, b] = 1.0
        return u
    axis = {"RX": "X", "RY": "Y", "RZ": "Z"}[g.name]
    (q,) = g.qubits
    p = sv._PAULI[axis]
    one = np.cos(g.angle / 2) * np.eye(2) - 1j * np.sin(g.angle / 2) * p
    return np.kron(np.eye(2), one) if q == 0 else np.kron(one, np.eye(2))


def gate_list_unitary(gates: list[Gate]) -> np.ndarray:
    """Compose a local gate list into its 4x4 unitary (first gate acts first)."""
    u = np.eye(4, dtype=complex)
    for g in gates:
        u = _gate_matrix(g) @ u
    return u


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi max |a - e^{i phi} b|``, evaluated at the overlap-aligned phase."""
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def cnot_count(spec: AnsatzSpec, inst: ProblemInstance) -> int:
    E, p = inst.num_edges, spec.p
    if spec.family in ("qaoa", "zz"):
        return 2 * E * p
    bad = [m for m in spec.mixers if m not in COMPILABLE]
    if bad:
        raise ValueError(f"no two-CNOT compilation for {bad}")
    if spec.gathered:
        if len(spec.mixers) != 1:
            raise ValueError("gathered compilation supports a single extra interaction")
        return 2 * E * p
    return 2 * E * p * (1 + len(spec.mixers))

"""Dense statevector kernels.

States are plain C-contiguous complex128 numpy arrays of length ``2^n``;
qubit 0 is the least significant bit of the basis index. Gate functions update
the array in place and also return it for chaining.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels
from .pauli import ResourceError

MAX_QUBITS = 24
M_TYPES = ("YZ", "YY", "XX", "XZ", "XY")
# 4x4 entries linking local states of different bit parity
_ODD_PARITY = tuple(np.array(ix) for ix in zip(*[(r, c) for r in range(4) for c in range(4) if (r ^ c) in (1, 2)]))

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_ZZ_DIAG = np.array([1.0, -1.0, -1.0, 1.0])


def n_qubits(psi: np.ndarray) -> int:
    n = int(psi.size).bit_length() - 1
    if psi.ndim != 1 or (1 << n) != psi.size or n < 1:
        raise ValueError(f"state length {psi.size} is not a power of two >= 2")
    return n


def _checked(psi: np.ndarray) -> np.ndarray:
    if psi.dtype != np.complex128 or not psi.flags.c_contiguous:
        raise TypeError("state must be a C-contiguous complex128 array")
    n_qubits(psi)
    return psi


def plus_state(n: int) -> np.ndarray:
    """Uniform superposition ``|+>^n``."""
    if not 1 <= n <= MAX_QUBITS:
        raise ResourceError(f"qubit count must lie in [1, {MAX_QUBITS}], got {n}")
    dim = 1 << n
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def basis_state(n: int, z: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[z] = 1.0
    return psi


def apply_mixer(psi: np.ndarray, beta: float) -> np.ndarray:
    """Apply ``exp(+i beta X_q)`` on every qubit."""
    _checked(psi)
    _kernels.mixer_all(psi.view(np.float64), np.cos(beta), np.sin(beta))
    return psi


def apply_phase_angles(psi: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """``psi[z] *= exp(-i angles[z])``."""
    _checked(psi)
    if angles.shape != psi.shape:
        raise ValueError(f"angle vector length {angles.size} != state length {psi.size}")
    _kernels.phase_from_angles(psi, np.ascontiguousarray(angles, dtype=np.float64))
    return psi


def apply_diagonal_phase(psi: np.ndarray, h_diag: np.ndarray, gamma: float) -> np.ndarray:
    """``psi[z] *= exp(-i gamma h_diag[z])``."""
    if h_diag.shape != psi.shape:
        raise ValueError(f"diagonal length {h_diag.size} != state length {psi.size}")
    return apply_phase_angles(psi, gamma * h_diag)


def apply_two_qubit(psi: np.ndarray, u: np.ndarray, i: int, j: int) -> np.ndarray:
    """Apply a 4x4 unitary whose local basis index is ``b_i + 2 b_j``."""
    n = n_qubits(_checked(psi))
    if i == j:
        raise ValueError("two-qubit gate needs distinct qubits")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"qubits ({i}, {j}) out of range for n={n}")
    _kernels.apply_4x4(psi, np.ascontiguousarray(u, dtype=np.complex128), i, j)
    return psi


def apply_blocks(psi: np.ndarray, us: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    """Apply a stack of 4x4 unitaries ``us[e]`` on pairs ``(ii[e], jj[e])`` in order."""
    _checked(psi)
    us = np.ascontiguousarray(us, dtype=np.complex128)
    parity = not np.any(us[:, _ODD_PARITY[0], _ODD_PARITY[1]])
    _kernels.apply_blocks(psi, us, ii, jj, parity)
    return psi


def apply_zz_pair_layer(psi: np.ndarray, ii: np.ndarray, jj: np.ndarray, thetas, phis, offsets,
                        m_type: str) -> np.ndarray:
    """Per edge ``e`` in order, ``exp(-i (thetas[e] Z Z + phis[e] M + offsets[e]))`` with M = YY or XX."""
    _checked(psi)
    if m_type not in ("YY", "XX"):
        raise ValueError(f"fused pair layer supports YY and XX, got {m_type!r}")
    f = lambda a: np.ascontiguousarray(a, dtype=np.float64)
    _kernels.zz_pair_layer(psi, ii, jj, f(thetas), f(phis), f(offsets), -1.0 if m_type == "YY" else 1.0)
    return psi


def local_pauli(p: str, q: str) -> np.ndarray:
    """4x4 matrix of ``P_i Q_j`` with qubit i as the low local bit."""
    return np.kron(_PAULI[q], _PAULI[p])


@lru_cache(maxsize=None)
def pair_generator(m_type: str) -> np.ndarray:
    """4x4 matrix of ``(P_i Q_j + Q_i P_j) / 2``."""
    if m_type not in M_TYPES:
        raise ValueError(f"unknown two-body type {m_type!r}; expected one of {M_TYPES}")
    p, q = m_type
    out = 0.5 * (local_pauli(p, q) + local_pauli(q, p))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
@lru_cache(maxsize=None)
def _eig(m_type: str):
    return np.linalg.eigh(pair_generator(m_type))


def _normalize_types(m_type, alpha):
    if m_type is None or m_type == "none":
        return (), ()
    if isinstance(m_type, str):
        return (m_type,), (alpha,)
    types = tuple(m_type)
    alphas = tuple(np.atleast_1d(alpha)) if types else ()
    if len(types) != len(alphas):
        raise ValueError("need one coefficient per two-body type")
    for t in types:
        pair_generator(t)
    return types, alphas


def pair_exps(phis: np.ndarray, m_type: str) -> np.ndarray:
    """Stack of ``exp(-i phi M)`` for each ``phi`` in ``phis``; shape ``(len, 4, 4)``."""
    phis = np.asarray(phis, dtype=float)
    gen = pair_generator(m_type)
    if m_type in ("YY", "XX"):
        # M^2 = I
        return np.cos(phis)[:, None, None] * np.eye(4) - 1j * np.sin(phis)[:, None, None] * gen
    vals, vecs = _eig(m_type)
    return np.einsum("ab,eb,cb->eac", vecs, np.exp(-1j * phis[:, None] * vals), vecs.conj())


def pair_exp(phi: float, m_type: str) -> np.ndarray:
    """``exp(-i phi M)`` for a single two-body type."""
    return pair_exps(np.array([phi]), m_type)[0]


def two_body_unitaries(thetas: np.ndarray, alpha, m_type) -> np.ndarray:
    """Stack of ``exp(-i theta (Z Z + sum_m alpha_m M_m))`` for each ``theta``."""
    thetas = np.asarray(thetas, dtype=float)
    types, alphas = _normalize_types(m_type, alpha)
    zz = np.exp(-1j * thetas[:, None] * _ZZ_DIAG)
    if not types:
        return zz[:, :, None] * np.eye(4)
    if len(types) == 1 and types[0] in ("YY", "XX"):
        # ZZ commutes with YY and XX
        return zz[:, :, None] * pair_exps(thetas * alphas[0], types[0])
    gen = np.diag(_ZZ_DIAG).astype(complex)
    for t, a in zip(types, alphas):
        gen = gen + a * pair_generator(t)
    vals, vecs = np.linalg.eigh(gen)
    return np.einsum("ab,eb,cb->eac", vecs, np.exp(-1j * thetas[:, None] * vals), vecs.conj())


def two_body_unitary(theta: float, alpha, m_type) -> np.ndarray:
    """``exp(-i theta (Z Z + sum_m alpha_m M_m))`` as a 4x4 matrix.

    ``m_type`` is one type name, a sequence of names (with ``alpha`` matched
    elementwise), or ``None``/``"none"`` for the bare ZZ phase.
    """
    return two_body_unitaries(np.array([theta]), alpha, m_type)[0]


def apply_two_body_exp(psi: np.ndarray, i: int, j: int, theta: float, alpha, m_type) -> np.ndarray:
    """Apply ``exp(-i theta (Z_i Z_j + alpha M_ij))`` exactly on qubits ``(i, j)``."""
    if i == j:
        raise ValueError("two-body exponential needs distinct qubits")
    return apply_two_qubit(psi, two_body_unitary(theta, alpha, m_type), i, j)


def expectation_diagonal(psi: np.ndarray, h_diag: np.ndarray) -> float:
    """``<psi| diag(h_diag) |psi>``."""
    if h_diag.shape != psi.shape:
        raise ValueError(f"diagonal length {h_diag.size} != state length {psi.size}")
    return float(_kernels.expectation(_checked(psi), np.ascontiguousarray(h_diag, dtype=np.float64)))


def fidelity(psi: np.ndarray, ground) -> float:
    """Total probability on the ground-space basis states."""
    ground = np.asarray(ground, dtype=np.int64)
    if ground.size == 0:
        raise ValueError("ground space is empty")
    amp = psi[ground]
    return float(np.sum(amp.real ** 2 + amp.imag ** 2))


def probabilities(psi: np.ndarray) -> np.ndarray:
    return psi.real ** 2 + psi.imag ** 2


def norm(psi: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(psi, psi).real))

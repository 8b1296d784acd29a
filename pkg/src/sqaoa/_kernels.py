"""Compiled inner loops for the statevector kernels.

Callers must pass C-contiguous complex128 states (or their float64 views where
noted); the public wrappers in ``statevector`` take care of that.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def mixer_all(v, c, s):
    """exp(i beta X) = [[c, i s], [i s, c]] on every qubit; ``v`` is the float64 view."""
    dim = v.size // 2
    step = 1
    while step < dim:
        for base in range(0, dim, 2 * step):
            for k in range(base, base + step):
                k2 = k + step
                a0r = v[2 * k]
                a0i = v[2 * k + 1]
                a1r = v[2 * k2]
                a1i = v[2 * k2 + 1]
                v[2 * k] = c * a0r - s * a1i
                v[2 * k + 1] = c * a0i + s * a1r
                v[2 * k2] = c * a1r - s * a0i
                v[2 * k2 + 1] = c * a1i + s * a0r
        step <<= 1


@numba.njit(cache=True)
def _base_index(r, lo, hi):
    b = ((r >> lo) << (lo + 1)) | (r & ((1 << lo) - 1))
    return ((b >> hi) << (hi + 1)) | (b & ((1 << hi) - 1))


@numba.njit(cache=True)
def apply_4x4(psi, u, i, j):
    lo = min(i, j)
    hi = max(i, j)
    bi = 1 << i
    bj = 1 << j
    u00, u01, u02, u03 = u[0, 0], u[0, 1], u[0, 2], u[0, 3]
    u10, u11, u12, u13 = u[1, 0], u[1, 1], u[1, 2], u[1, 3]
    u20, u21, u22, u23 = u[2, 0], u[2, 1], u[2, 2], u[2, 3]
    u30, u31, u32, u33 = u[3, 0], u[3, 1], u[3, 2], u[3, 3]
    for r in range(psi.size >> 2):
        b = _base_index(r, lo, hi)
        k1 = b | bi
        k2 = b | bj
        k3 = k1 | bj
        a0 = psi[b]
        a1 = psi[k1]
        a2 = psi[k2]
        a3 = psi[k3]
        psi[b] = u00 * a0 + u01 * a1 + u02 * a2 + u03 * a3
        psi[k1] = u10 * a0 + u11 * a1 + u12 * a2 + u13 * a3
        psi[k2] = u20 * a0 + u21 * a1 + u22 * a2 + u23 * a3
        psi[k3] = u30 * a0 + u31 * a1 + u32 * a2 + u33 * a3


@numba.njit(cache=True)
def apply_parity_4x4(psi, u, i, j):
    """4x4 unitary that only couples 00 <-> 11 and 01 <-> 10 (YY, XX and ZZ blocks)."""
    lo = min(i, j)
    hi = max(i, j)
    bi = 1 << i
    bj = 1 << j
    u00, u03, u30, u33 = u[0, 0], u[0, 3], u[3, 0], u[3, 3]
    u11, u12, u21, u22 = u[1, 1], u[1, 2], u[2, 1], u[2, 2]
    for r in range(psi.size >> 2):
        b = _base_index(r, lo, hi)
        k1 = b | bi
        k2 = b | bj
        k3 = k1 | bj
        a0 = psi[b]
        a1 = psi[k1]
        a2 = psi[k2]
        a3 = psi[k3]
        psi[b] = u00 * a0 + u03 * a3
        psi[k3] = u30 * a0 + u33 * a3
        psi[k1] = u11 * a1 + u12 * a2
        psi[k2] = u21 * a1 + u22 * a2


@numba.njit(cache=True)
def apply_blocks(psi, us, ii, jj, parity):
    """Apply ``us[e]`` on qubits ``(ii[e], jj[e])`` for e = 0, 1, ... in order."""
    for e in range(us.shape[0]):
        if parity:
            apply_parity_4x4(psi, us[e], ii[e], jj[e])
        else:
            apply_4x4(psi, us[e], ii[e], jj[e])


@numba.njit(cache=True)
def phase_from_angles(psi, angles):
    for k in range(psi.size):
        a = angles[k]
        psi[k] *= complex(np.cos(a), -np.sin(a))


@numba.njit(cache=True)
def expectation(psi, h):
    acc = 0.0
    for k in range(psi.size):
        v = psi[k]
        acc += (v.real * v.real + v.imag * v.imag) * h[k]
    return acc


@numba.njit(cache=True)
def zz_pair_layer(psi, ii, jj, thetas, phis, offsets, m_even):
    """Per edge, in order: exp(-i (theta ZZ + phi M + offset)) for M = YY or XX.

    M swaps 00 <-> 11 with sign ``m_even`` (-1 for YY, +1 for XX) and
    01 <-> 10 with sign +1.
    """
    for e in range(thetas.size):
        i = ii[e]
        j = jj[e]
        lo = min(i, j)
        hi = max(i, j)
        bi = 1 << i
        bj = 1 << j
        c = np.cos(phis[e])
        s = np.sin(phis[e])
        pe = complex(np.cos(thetas[e] + offsets[e]), -np.sin(thetas[e] + offsets[e]))
        po = complex(np.cos(offsets[e] - thetas[e]), -np.sin(offsets[e] - thetas[e]))
        xe = complex(0.0, -m_even * s)
        xo = complex(0.0, -s)
        for r in range(psi.size >> 2):
            b = _base_index(r, lo, hi)
            k1 = b | bi
            k2 = b | bj
            k3 = k1 | bj
            a0 = psi[b]
            a1 = psi[k1]
            a2 = psi[k2]
            a3 = psi[k3]
            psi[b] = pe * (c * a0 + xe * a3)
            psi[k3] = pe * (c * a3 + xe * a0)
            psi[k1] = po * (c * a1 + xo * a2)
            psi[k2] = po * (c * a2 + xo * a1)

"""Symbolic algebra over n-qubit Pauli strings.

Strings are stored in the symplectic (x, z) bitmask form with bit ``q`` of each
mask describing qubit ``q``. A mask pair ``(x, z)`` denotes the Hermitian string
``i^{|x & z|} X^x Z^z`` so that ``(1, 1)`` is exactly ``Y``.

Human-readable axes strings are written with character ``q`` describing qubit
``q``; canonical ordering of terms is lexicographic on that string.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-12
MAX_DENSE_QUBITS = 12

_AXIS_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_AXIS = {v: k for k, v in _AXIS_BITS.items()}
_PHASES = (1, 1j, -1, -1j)


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class ResourceError(ValueError):
    """Requested object would exceed the configured size guard."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _encode(axes: str) -> tuple[int, int]:
    x = z = 0
    for q, a in enumerate(axes):
        try:
            bx, bz = _AXIS_BITS[a]
        except KeyError:
            raise ValueError(f"invalid Pauli axis {a!r} in {axes!r}") from None
        x |= bx << q
        z |= bz << q
    return x, z


def _decode(x: int, z: int, n: int) -> str:
    return "".join(_BITS_AXIS[((x >> q) & 1, (z >> q) & 1)] for q in range(n))


def _mul_keys(k1: tuple[int, int], k2: tuple[int, int]) -> tuple[complex, tuple[int, int]]:
    x1, z1 = k1
    x2, z2 = k2
    x3, z3 = x1 ^ x2, z1 ^ z2
    e = _popcount(x1 & z1) + _popcount(x2 & z2) + 2 * _popcount(z1 & x2) - _popcount(x3 & z3)
    return _PHASES[e % 4], (x3, z3)


def _anticommute(k1: tuple[int, int], k2: tuple[int, int]) -> bool:
    return (_popcount(k1[0] & k2[1]) + _popcount(k1[1] & k2[0])) % 2 == 1


@dataclass(frozen=True)
class PauliTerm:
    """A single weighted Pauli string, e.g. ``PauliTerm(-1j, "YI")``."""

    coefficient: complex
    axes: str

    def __post_init__(self):
        _encode(self.axes)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def n(self) -> int:
        return len(self.axes)

    def __str__(self):
        return f"({self.coefficient:g})*{self.axes}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact product ``a * b`` including the accumulated phase."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")
    phase, (x, z) = _mul_keys(_encode(a.axes), _encode(b.axes))
    return PauliTerm(phase * a.coefficient * b.coefficient, _decode(x, z, a.n))


class PauliSum:
    """Canonicalized linear combination of Pauli strings on ``n`` qubits.

    Instances are immutable. Duplicate strings are merged on construction and
    coefficients below ``PRUNE_TOL`` in magnitude are dropped.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n: int, terms: Mapping[tuple[int, int], complex] | None = None):
        if n < 1:
            raise ValueError("PauliSum needs at least one qubit")
        self._n = int(n)
        self._terms = {
            k: complex(c) for k, c in (terms or {}).items() if abs(c) >= PRUNE_TOL
        }

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm | tuple[complex, str]], n: int | None = None) -> "PauliSum":
        acc: dict[tuple[int, int], complex] = {}
        for t in terms:
            if not isinstance(t, PauliTerm):
                t = PauliTerm(*t)
            if n is None:
                n = t.n
            elif t.n != n:
                raise DimensionError(f"term {t.axes!r} does not act on {n} qubits")
            k = _encode(t.axes)
            acc[k] = acc.get(k, 0) + t.coefficient
        if n is None:
            raise ValueError("cannot infer qubit count from an empty term list")
        return cls(n, acc)

    @classmethod
    def single(cls, n: int, ops: Mapping[int, str], coefficient: complex = 1.0) -> "PauliSum":
        """Build ``coefficient * prod_q ops[q]`` from a sparse ``{qubit: axis}`` map."""
        axes = ["I"] * n
        for q, a in ops.items():
            if not 0 <= q < n:
                raise DimensionError(f"qubit {q} out of range for n={n}")
            axes[q] = a
        return cls.from_terms([PauliTerm(coefficient, "".join(axes))])

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n)

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        out = [PauliTerm(c, _decode(x, z, self._n)) for (x, z), c in self._terms.items()]
        return tuple(sorted(out, key=lambda t: t.axes))

    def to_dict(self) -> dict[str, complex]:
        return {t.axes: t.coefficient for t in self.terms}

    def coefficient(self, axes: str) -> complex:
        return self._terms.get(_encode(axes), 0j)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms)

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other: "PauliSum"):
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other._n != self._n:
            raise DimensionError(f"qubit counts differ: {self._n} vs {other._n}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return PauliSum(self._n, acc)

    def __neg__(self):
        return PauliSum(self._n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            self._check(other)
            acc: dict[tuple[int, int], complex] = {}
            for k1, c1 in self._terms.items():
                for k2, c2 in other._terms.items():
                    ph, k = _mul_keys(k1, k2)
                    acc[k] = acc.get(k, 0) + ph * c1 * c2
            return PauliSum(self._n, acc)
        if np.isscalar(other):
            return PauliSum(self._n, {k: c * other for k, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        self._check(other)
        keys = self._terms.keys() | other._terms.keys()
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= atol for k in keys)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= atol for c in self._terms.values())

    def __repr__(self):
        if not self._terms:
            return f"PauliSum(n={self._n}, 0)"
        body = " + ".join(str(t) for t in self.terms)
        return f"PauliSum(n={self._n}, {body})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``[a, b] = ab - ba``; only anticommuting string pairs contribute."""
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")
    acc: dict[tuple[int, int], complex] = {}
    for k1, c1 in a._terms.items():
        for k2, c2 in b._terms.items():
            if _anticommute(k1, k2):
                ph, k = _mul_keys(k1, k2)
                acc[k] = acc.get(k, 0) + 2 * ph * c1 * c2
    return PauliSum(a.n, acc)


def nested_commutator(h: PauliSum, seed: PauliSum, order: int) -> PauliSum:
    """Apply ``[h, .]`` to ``seed`` ``2*order - 1`` times.

    This is the operator content of the ``order``-th term of the nested
    commutator expansion of the gauge potential, without its free coefficient.
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    out = seed
    for _ in range(2 * order - 1):
        out = commutator(h, out)
    return out


def bch_second_order(generators) -> PauliSum:
    """Second-order BCH exponent for ``prod_k exp(-i a_k A_k)``.

    ``generators`` lists ``(a_k, A_k)`` in the written left-to-right order of
    the product. Returns ``sum a_k A_k - i/2 * sum_{k<l} a_k a_l [A_k, A_l]``.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    if len(gens) > 3:
        raise ValueError("expansion is provided for two or three generators")
    n = gens[0][1].n
    out = PauliSum.zero(n)
    for a, op in gens:
        out = out + a * op
    for k in range(len(gens)):
        for l in range(k + 1, len(gens)):
            (a, A), (b, B) = gens[k], gens[l]
            out = out + (-0.5j * a * b) * commutator(A, B)
    return out


def to_dense_matrix(s: PauliSum) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``s`` (qubit 0 is the least significant bit)."""
    n = s.n
    if n > MAX_DENSE_QUBITS:
        raise ResourceError(f"dense expansion limited to n <= {MAX_DENSE_QUBITS}, got {n}")
    dim = 1 << n
    cols = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for (x, z), c in s._terms.items():
        signs = 1 - 2 * (np.bitwise_count(cols & z).astype(np.int64) & 1)
        mat[cols ^ x, cols] += c * _PHASES[_popcount(x & z) % 4] * signs
    return mat


def transverse_field(n: int, coefficient: float = -1.0) -> PauliSum:
    """``coefficient * sum_i X_i``; the default is the standard driver ``-sum X_i``."""
    return PauliSum.from_terms(
        [PauliTerm(coefficient, "I" * q + "X" + "I" * (n - q - 1)) for q in range(n)]
    )


def two_body(n: int, i: int, j: int, p: str, q: str, coefficient: complex = 1.0) -> PauliSum:
    """``coefficient * P_i Q_j`` as a PauliSum."""
    if i == j:
        raise ValueError("two-body term needs distinct qubits")
    return PauliSum.single(n, {i: p, j: q}, coefficient)


def symmetric_pair(n: int, i: int, j: int, pq: str, coefficient: complex = 1.0) -> PauliSum:
    """``coefficient * (P_i Q_j + Q_i P_j) / 2`` for a two-letter type such as ``"YZ"``."""
    p, q = pq
    return 0.5 * coefficient * (two_body(n, i, j, p, q) + two_body(n, i, j, q, p))

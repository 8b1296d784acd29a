import numpy as np
import pytest
from scipy.linalg import expm

from sqaoa.pauli import PauliSum, PauliTerm

KRON = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_string(axes: str) -> np.ndarray:
    """Oracle: explicit Kronecker product with qubit 0 as the least significant factor."""
    out = np.eye(1, dtype=complex)
    for a in axes:
        out = np.kron(KRON[a], out)
    return out


def kron_sum(s: PauliSum) -> np.ndarray:
    dim = 1 << s.n
    out = np.zeros((dim, dim), dtype=complex)
    for t in s.terms:
        out += t.coefficient * kron_string(t.axes)
    return out


def random_sum(rng, n, k, real=False) -> PauliSum:
    terms = []
    for _ in range(k):
        axes = "".join(rng.choice(list("IXYZ"), size=n))
        c = rng.normal() if real else rng.normal() + 1j * rng.normal()
        terms.append(PauliTerm(c, axes))
    return PauliSum.from_terms(terms, n)


def random_state(rng, n):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def dense_exp(h: np.ndarray, t: float) -> np.ndarray:
    return expm(-1j * t * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE: dict[int, str] = {}


def record_verdict(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])

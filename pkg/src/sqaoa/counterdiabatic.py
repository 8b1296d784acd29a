"""Counterdiabatic operator content of QAOA and YY-augmented layers.

Builds the commutator expansions that relate the QAOA layer (and the layer
with an added ``sum w Y Y`` generator) to first- and second-order
counterdiabatic terms, and checks their closed forms term by term.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .pauli import PauliSum, bch_second_order, commutator, transverse_field
from .problems import ProblemInstance, cost_hamiltonian, weighted_pair_sum

FAMILIES = ("YZ", "XYZ", "YZZZ")


def driver(inst: ProblemInstance) -> PauliSum:
    return transverse_field(inst.n, -1.0)


def yy_sum(inst: ProblemInstance) -> PauliSum:
    """``sum_ij w_ij Y_i Y_j``."""
    return weighted_pair_sum(inst, "YY")


def first_order_cd(inst: ProblemInstance) -> PauliSum:
    """``i [H_B, H_C]``."""
    return 1j * commutator(driver(inst), cost_hamiltonian(inst))


def first_order_cd_closed_form(inst: ProblemInstance) -> PauliSum:
    """``-2 sum_ij c w_ij (Z_i Y_j + Y_i Z_j)`` with ``c`` the edge scale (1/2 for MaxCut)."""
    return weighted_pair_sum(inst, "YZ", -4.0 * inst.edge_scale)


def yy_driver_term(inst: ProblemInstance, alpha: float = 1.0, beta: float = 1.0) -> PauliSum:
    """``-i (alpha beta / 2) [H_Y, H_B]``."""
    return (-0.5j * alpha * beta) * commutator(yy_sum(inst), driver(inst))


def yy_driver_closed_form(inst: ProblemInstance, alpha: float = 1.0, beta: float = 1.0) -> PauliSum:
    """``alpha beta sum_ij w_ij (Y_i Z_j + Z_i Y_j)``."""
    return weighted_pair_sum(inst, "YZ", 2.0 * alpha * beta)


def yy_cost_term(inst: ProblemInstance, alpha: float = 1.0, gamma: float = 1.0) -> PauliSum:
    """``-i (alpha gamma / 2) [H_Y, H_C]``."""
    return (-0.5j * alpha * gamma) * commutator(yy_sum(inst), cost_hamiltonian(inst))


def yy_cost_closed_form(inst: ProblemInstance, alpha: float = 1.0, gamma: float = 1.0) -> PauliSum:
    """``alpha gamma c sum_i sum_{j != k in N(i)} w_ij w_ik X_i Y_j Z_k``.

    Summing over ordered neighbour pairs gives both ``X_i Y_j Z_k`` and
    ``X_i Z_j Y_k`` for each unordered pair.
    """
    n = inst.n
    wmap = {}
    for i, j, w in inst.edges:
        wmap[(i, j)] = wmap[(j, i)] = w
    terms = []
    for i in range(n):
        nbrs = inst.neighbors(i)
        for j in nbrs:
            for k in nbrs:
                if j == k:
                    continue
                axes = ["I"] * n
                axes[i], axes[j], axes[k] = "X", "Y", "Z"
                terms.append((alpha * gamma * inst.edge_scale * wmap[(i, j)] * wmap[(i, k)], "".join(axes)))
    return PauliSum.from_terms(terms, n) if terms else PauliSum.zero(n)


def second_order_cd(inst: ProblemInstance, beta: float, gamma: float) -> PauliSum:
    """``i [H, [H, [H_B, H_C]]]`` with ``H = beta H_B + gamma H_C``."""
    hb, hc = driver(inst), cost_hamiltonian(inst)
    h = beta * hb + gamma * hc
    return 1j * commutator(h, commutator(h, commutator(hb, hc)))


def _edge_weights(inst):
    wmap = {}
    for i, j, w in inst.edges:
        wmap[(i, j)] = wmap[(j, i)] = w
    return wmap


def classify(axes: str) -> str | None:
    """Term family of a Pauli string by its letter content, or ``None``."""
    letters = sorted(a for a in axes if a != "I")
    key = "".join(letters)
    return {"YZ": "YZ", "XYZ": "XYZ", "YZZZ": "YZZZ"}.get(key)


def weight_product(inst: ProblemInstance, axes: str) -> float | None:
    """Product of edge weights linking the centre qubit (the X or Y) to the Z/Y legs.

    Returns ``None`` if a leg is not an edge of the instance.
    """
    wmap = _edge_weights(inst)
    fam = classify(axes)
    pos = {q: a for q, a in enumerate(axes) if a != "I"}
    if fam == "YZ":
        (a, b) = pos
        return wmap.get((a, b))
    centre_letter = "X" if fam == "XYZ" else "Y"
    centre = [q for q, a in pos.items() if a == centre_letter][0]
    prod = 1.0
    for q in pos:
        if q == centre:
            continue
        w = wmap.get((centre, q))
        if w is None:
            return None
        prod *= w
    return prod


def family_coefficients(inst: ProblemInstance, beta: float, gamma: float) -> dict[str, dict[str, complex]]:
    out: dict[str, dict[str, complex]] = {f: {} for f in FAMILIES}
    out["other"] = {}
    for t in second_order_cd(inst, beta, gamma):
        fam = classify(t.axes) or "other"
        out[fam][t.axes] = t.coefficient
    return out


@dataclass
class SecondOrderReport:
    families: set[str]
    sign_ok: bool
    quadratic_form: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    c1: float | None = None
    c2: float | None = None


def second_order_structure(inst: ProblemInstance) -> SecondOrderReport:
    """Decompose ``i [H,[H,[H_B,H_C]]]`` into term families and check signs.

    Every coefficient ``k(beta, gamma)`` is a quadratic form
    ``a beta^2 + b beta gamma + c gamma^2``; it is recovered from three
    evaluations. The expected structure is ``YZ: (-c1, 0, -c2)``,
    ``XYZ: (0, -c3, 0)``, ``YZZZ: (0, 0, -c4)`` times the weight product, with
    positive ``c``'s.
    """
    f10 = family_coefficients(inst, 1.0, 0.0)
    f01 = family_coefficients(inst, 0.0, 1.0)
    f11 = family_coefficients(inst, 1.0, 1.0)
    present = {f for f in FAMILIES + ("other",) if f10[f] or f01[f] or f11[f]}
    sign_ok = "other" not in present
    forms: dict[str, tuple[float, float, float]] = {}
    yz_c1, yz_c2 = set(), set()
    for fam in FAMILIES:
        keys = f10[fam].keys() | f01[fam].keys() | f11[fam].keys()
        for axes in keys:
            a = f10[fam].get(axes, 0j)
            c = f01[fam].get(axes, 0j)
            b = f11[fam].get(axes, 0j) - a - c
            if max(abs(a.imag), abs(b.imag), abs(c.imag)) > 1e-9:
                sign_ok = False
            wp = weight_product(inst, axes)
            if wp is None or wp == 0:
                sign_ok = False
                continue
            a, b, c = a.real / wp, b.real / wp, c.real / wp
            forms[axes] = (a, b, c)
            if fam == "YZ":
                sign_ok &= a < 0 and c < 0 and abs(b) < 1e-9
                yz_c1.add(round(-a, 9))
                yz_c2.add(round(-c, 9))
            elif fam == "XYZ":
                sign_ok &= abs(a) < 1e-9 and b < 0 and abs(c) < 1e-9
            else:
                sign_ok &= abs(a) < 1e-9 and abs(b) < 1e-9 and c < 0
    rep = SecondOrderReport(present, bool(sign_ok), forms)
    if len(yz_c1) == 1 and len(yz_c2) == 1:
        rep.c1, rep.c2 = yz_c1.pop(), yz_c2.pop()
    return rep


def verify_cd(inst: ProblemInstance) -> dict[str, bool]:
    """Run every structural identity on one instance; maps check name to outcome."""
    checks = {
        "first_order": first_order_cd(inst).allclose(first_order_cd_closed_form(inst)),
        "yy_driver": yy_driver_term(inst).allclose(yy_driver_closed_form(inst)),
        "yy_cost": yy_cost_term(inst).allclose(yy_cost_closed_form(inst)),
    }
    hb, hc, hy = driver(inst), cost_hamiltonian(inst), yy_sum(inst)
    heff = bch_second_order([(1.0, hy), (1.0, hb), (1.0, hc)])
    split = (
        hy + hb + hc
        + (-0.5j) * commutator(hb, hc)
        + yy_driver_term(inst)
        + yy_cost_term(inst)
    )
    checks["bch_split"] = heff.allclose(split)
    rep = second_order_structure(inst)
    checks["second_order_families"] = rep.families <= set(FAMILIES)
    checks["second_order_signs"] = rep.sign_ok
    return checks

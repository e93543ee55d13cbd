"""Scalable per-class evaluation of the protocol.

Every qubit sees the same control parameters, so a measurement record
matters only through k, its number of 0 outcomes, and each of the N+1
record classes evolves in closed form: the branch operator is a sum of two
diagonal tensor products (descendants of the two input populations) plus a
pair of corner coherences.  All aggregates then cost O(N) instead of
O(4^N), which is what makes thousand-qubit registers tractable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ghzprotect.params import (
    DEFAULT_MAX_QUBITS,
    Convention,
    DegeneracyError,
    Engine,
    MetricsRow,
    ProtocolParams,
    validate_params,
)

_DEGENERACY_TOL = 1e-14
# The vectorized grid rounds differently from the scalar path at the last
# bit, so its degeneracy masks stay ten times clear of the scalar cutoff.
_GRID_DEGENERACY_TOL = 10.0 * _DEGENERACY_TOL


@dataclass(frozen=True)
class DiagProduct:
    """A diagonal tensor-product operator: scalar * prod_i diag(d0_i, d1_i).

    Stores one (d0, d1) pair per qubit, so traces and single diagonal
    entries cost O(N) while the operator itself would be 2^N dimensional.
    """

    scalar: complex
    pairs: tuple[tuple[complex, complex], ...]

    def trace(self) -> complex:
        out = complex(self.scalar)
        for d0, d1 in self.pairs:
            out *= d0 + d1
        return out

    def first_entry(self) -> complex:
        """Diagonal entry at |0...0>: scalar * prod d0."""
        out = complex(self.scalar)
        for d0, _ in self.pairs:
            out *= d0
        return out

    def last_entry(self) -> complex:
        """Diagonal entry at |1...1>: scalar * prod d1."""
        out = complex(self.scalar)
        for _, d1 in self.pairs:
            out *= d1
        return out

    def diagonal(self) -> np.ndarray:
        """Expand the full 2^N diagonal (exponential; small N only).

        The first stored pair is the most significant bit, matching the
        dense engine's operator ordering.
        """
        vec = np.array([self.scalar], dtype=np.complex128)
        for d0, d1 in self.pairs:
            vec = np.kron(vec, np.array([d0, d1], dtype=np.complex128))
        return vec


@dataclass(frozen=True)
class BranchElements:
    """Closed-form elements of one record class.

    A and B are the populations at |0...0> and |1...1>; C and D are the
    coherences at (|1...1>, |0...0>) and its transpose position; P is the
    class trace (per-record weight, before multiplicity).  diag_alpha and
    diag_beta are the two diagonal tensor products descending from the
    input populations |alpha|^2 and |beta|^2; A, B and P are their entries
    and traces, kept separately for O(1) aggregate formulas.
    """

    k: int
    A: complex
    B: complex
    C: complex
    D: complex
    P: complex
    diag_alpha: DiagProduct
    diag_beta: DiagProduct


def _rotation_phases(convention: Convention, eta: float):
    """Per-qubit multipliers the conditional rotation applies.

    Returns (diag0, diag1, corner_lo) where diag0/diag1 are the (d0, d1)
    multipliers for outcome 0 / outcome 1 qubits and corner_lo the
    (outcome 0, outcome 1) multipliers of the lower (row > column)
    coherence.  Upper-coherence multipliers are the conjugates.
    """
    zp = cmath.exp(1j * eta)
    zm = cmath.exp(-1j * eta)
    if convention is Convention.PAPER:
        # T rho T: diagonal entries pick up t_i^2, coherences t_0 t_1 = 1.
        return (zp, zm), (zm, zp), (1.0 + 0.0j, 1.0 + 0.0j)
    # T rho T^dag: diagonals are untouched, coherences wind.
    return (1.0 + 0.0j, 1.0 + 0.0j), (1.0 + 0.0j, 1.0 + 0.0j), (zm, zp)


def _qubit_pairs(p: ProtocolParams, convention: Convention):
    """Per-qubit (d0, d1) diagonal pairs for both input populations.

    Returns (alpha_o0, alpha_o1, beta_o0, beta_o1): the diagonal images of
    |0><0| (alpha branch) and |1><1| (beta branch) for a qubit whose record
    bit is 0 or 1, including the conditional-rotation phases.
    """
    u = math.cos(p.theta / 2.0) ** 2
    v = math.sin(p.theta / 2.0) ** 2
    r = p.r
    rot0, rot1, _ = _rotation_phases(convention, p.eta)
    alpha_o0 = (u * rot0[0], 0.0 * rot0[1])
    alpha_o1 = (v * (1.0 - r) * rot1[0], v * r * rot1[1])
    beta_o0 = (v * r * rot0[0], v * (1.0 - r) * rot0[1])
    beta_o1 = (0.0 * rot1[0], u * rot1[1])
    return alpha_o0, alpha_o1, beta_o0, beta_o1


def _element_scalars(
    p: ProtocolParams, k: int, convention: Convention
) -> tuple[complex, complex, complex, complex, complex]:
    """(A, B, C, D, P) of class k via integer powers; O(1) in N."""
    n = p.n_qubits
    alpha, beta = p.alpha, p.beta
    c2, s2 = abs(alpha) ** 2, abs(beta) ** 2
    a0, a1, b0, b1 = _qubit_pairs(p, convention)

    pop_a0 = c2 * a0[0] ** k * a1[0] ** (n - k)
    pop_b0 = s2 * b0[0] ** k * b1[0] ** (n - k)
    pop_a1 = c2 * a0[1] ** k * a1[1] ** (n - k)
    pop_b1 = s2 * b0[1] ** k * b1[1] ** (n - k)
    trace_a = c2 * (a0[0] + a0[1]) ** k * (a1[0] + a1[1]) ** (n - k)
    trace_b = s2 * (b0[0] + b0[1]) ** k * (b1[0] + b1[1]) ** (n - k)

    # Corner coherence: every qubit contributes sin(theta)/2 * sqrt(1-r)
    # regardless of its record bit; only the rotation phase is conditional.
    _, _, corner_lo = _rotation_phases(convention, p.eta)
    w = (math.sin(p.theta) / 2.0) * math.sqrt(1.0 - p.r)
    lower = (
        np.conj(alpha) * beta * w**n * corner_lo[0] ** k * corner_lo[1] ** (n - k)
    )
    upper = (
        alpha
        * np.conj(beta)
        * w**n
        * np.conj(corner_lo[0]) ** k
        * np.conj(corner_lo[1]) ** (n - k)
    )
    return (
        pop_a0 + pop_b0,
        pop_a1 + pop_b1,
        complex(lower),
        complex(upper),
        trace_a + trace_b,
    )


def branch_elements(
    p: ProtocolParams,
    k: int,
    convention: Convention,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> BranchElements:
    """Closed-form branch operator of the record class with k zeros."""
    validate_params(p, max_qubits=max_qubits)
    n = p.n_qubits
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")

    a, b, c, d, prob = _element_scalars(p, k, convention)
    alpha, beta = p.alpha, p.beta
    a0, a1, b0, b1 = _qubit_pairs(p, convention)
    diag_alpha = DiagProduct(
        scalar=abs(alpha) ** 2, pairs=(a0,) * k + (a1,) * (n - k)
    )
    diag_beta = DiagProduct(
        scalar=abs(beta) ** 2, pairs=(b0,) * k + (b1,) * (n - k)
    )
    return BranchElements(
        k=k, A=a, B=b, C=c, D=d, P=prob,
        diag_alpha=diag_alpha, diag_beta=diag_beta,
    )


def branch_qfi(elements: BranchElements, n: int) -> complex:
    """Per-record Fisher information of one class.

    The normalized branch state holds corner coherence C/P between
    populations A/P and B/P, and the collective phase winds it at rate n,
    giving (1/P) * 4 |C|^2 n^2 / (A + B).  Classes with no surviving
    coherence carry no information and return 0 without touching the
    denominators.
    """
    if abs(elements.C) == 0.0:
        return 0.0 + 0.0j
    denom = elements.A + elements.B
    if abs(denom) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"class k={elements.k} has vanishing corner populations "
            f"|A+B|={abs(denom)}; its information is undefined"
        )
    if abs(elements.P) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"class k={elements.k} has vanishing weight |P|={abs(elements.P)}"
        )
    return (1.0 / elements.P) * 4.0 * abs(elements.C) ** 2 * n**2 / denom


def _realize(values: list[complex]) -> tuple[list[float], float]:
    """Real parts of aggregates plus the largest imaginary magnitude."""
    residual = max(abs(z.imag) for z in values)
    return [z.real for z in values], residual


def aggregate_complex(
    p: ProtocolParams,
    convention: Convention,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> tuple[complex, complex, complex]:
    """Unrealized (complex) aggregates: (probability, fidelity, qfi).

    Sums multiplicity-weighted class contributions in ascending k with
    compensated (exact float) summation.  Aggregates are complex under the
    two-sided-multiplication convention; :func:`aggregate_metrics` wraps
    this and realizes the real parts.
    """
    validate_params(p, max_qubits=max_qubits)
    n = p.n_qubits
    alpha, beta = p.alpha, p.beta
    c2, s2 = abs(alpha) ** 2, abs(beta) ** 2
    cross_upper = alpha * np.conj(beta)  # pairs with C (lower coherence)
    cross_lower = np.conj(alpha) * beta  # pairs with D (upper coherence)

    prob_terms: list[complex] = []
    fid_terms: list[complex] = []
    qfi_terms: list[complex] = []
    for k in range(n + 1):
        mult = float(math.comb(n, k))
        a, b, c, d, prob_k = _element_scalars(p, k, convention)
        prob_terms.append(mult * prob_k)
        fid_terms.append(
            mult * (c2 * a + s2 * b + cross_upper * c + cross_lower * d)
        )
        if abs(c) != 0.0:
            denom = a + b
            if abs(denom) >= _DEGENERACY_TOL:
                qfi_terms.append(mult * 4.0 * abs(c) ** 2 * n**2 / denom)
            elif abs(c) ** 2 > abs(denom):
                # Corner populations cancel while coherence survives: a
                # genuine pole of the two-sided-multiplication aggregate.
                raise DegeneracyError(
                    f"class k={k} has vanishing corner populations at "
                    f"theta={p.theta}, eta={p.eta}, r={p.r}"
                )
            # else: the whole class has underflowed; its contribution is
            # bounded by 4 n^2 |denom| and is dropped as negligible.

    def _csum(terms: list[complex]) -> complex:
        return complex(
            math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
        )

    p_total = _csum(prob_terms)
    if abs(p_total) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"total record weight |{p_total}| vanishes at theta={p.theta}, "
            f"eta={p.eta}, r={p.r}"
        )
    fid = _csum(fid_terms) / p_total
    qfi = _csum(qfi_terms) if qfi_terms else 0.0 + 0.0j
    return p_total, fid, qfi


def aggregate_metrics(
    p: ProtocolParams,
    convention: Convention,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> MetricsRow:
    """Record-averaged probability, fidelity, and Fisher information.

    Realizes the complex aggregates of :func:`aggregate_complex` via their
    real parts; the largest discarded imaginary magnitude is reported as
    ``imag_residual``.
    """
    p_total, fid, qfi = aggregate_complex(p, convention, max_qubits=max_qubits)
    (prob_re, fid_re, qfi_re), residual = _realize([p_total, fid, qfi])
    return MetricsRow(
        r=p.r,
        theta=p.theta,
        eta=p.eta,
        probability=prob_re,
        fidelity=fid_re,
        qfi=qfi_re,
        imag_residual=residual,
        convention=convention,
        engine=Engine.STRUCTURED,
    )


def state_export(elements: BranchElements, n: int) -> np.ndarray:
    """Expand a class's branch operator to a dense 2^n matrix.

    The diagonal comes from the two stored tensor products (record bits in
    canonical order: the k zero-outcomes first); the two corner coherences
    are C at (|1...1>, |0...0>) and D at the transposed position.  Only
    meant for small n, where it feeds comparison against the dense path.
    """
    if len(elements.diag_alpha.pairs) != n:
        raise ValueError(
            f"elements describe {len(elements.diag_alpha.pairs)} qubits, "
            f"asked to export {n}"
        )
    if n > 16:
        raise ValueError(f"refusing to expand a 2^{n}-dimensional matrix")
    diag = elements.diag_alpha.diagonal() + elements.diag_beta.diagonal()
    rho = np.diag(diag).astype(np.complex128)
    rho[-1, 0] += elements.C
    rho[0, -1] += elements.D
    return rho


def metrics_grid(
    n: int,
    gamma: float,
    phi0: float,
    r: float,
    theta: np.ndarray,
    eta: np.ndarray,
    convention: Convention,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized aggregates over broadcastable theta/eta arrays.

    Returns complex arrays (probability, fidelity, qfi) with the same
    algebra as :func:`aggregate_metrics`, evaluated elementwise; class
    contributions with no coherence are zero instead of 0/0.  Points the
    scalar path would reject as degenerate (vanished total weight, or a
    surviving coherence over unresolvable populations) come back as NaN
    instead of an exception, so sweeps can skip them.  The masks here use
    a tenfold wider cutoff than the scalar path: the two paths round
    differently at the last bit, so staying an order of magnitude clear
    of the scalar threshold guarantees every point this function keeps is
    evaluable by the scalar engine.  Used by the sweep and search layers,
    and cross-checked against the scalar path.
    """
    theta = np.asarray(theta, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    alpha = math.cos(gamma / 2.0)
    beta = math.sin(gamma / 2.0) * cmath.exp(1j * phi0)
    c2, s2 = abs(alpha) ** 2, abs(beta) ** 2
    u = np.cos(theta / 2.0) ** 2
    v = np.sin(theta / 2.0) ** 2
    zp = np.exp(1j * eta)
    zm = np.conj(zp)

    if convention is Convention.PAPER:
        rot0 = (zp, zm)
        rot1 = (zm, zp)
        corner_lo = (np.ones_like(zp), np.ones_like(zp))
    else:
        ones = np.ones_like(zp)
        rot0 = (ones, ones)
        rot1 = (ones, ones)
        corner_lo = (zm, zp)

    a0 = (u * rot0[0], 0.0 * rot0[1])
    a1 = (v * (1.0 - r) * rot1[0], v * r * rot1[1])
    b0 = (v * r * rot0[0], v * (1.0 - r) * rot0[1])
    b1 = (0.0 * rot1[0], u * rot1[1])

    w = (np.sin(theta) / 2.0) * math.sqrt(1.0 - r)
    shape = np.broadcast(u, zp).shape
    p_total = np.zeros(shape, dtype=np.complex128)
    fid_num = np.zeros(shape, dtype=np.complex128)
    qfi = np.zeros(shape, dtype=np.complex128)

    cross_upper = alpha * np.conj(beta)
    cross_lower = np.conj(alpha) * beta
    for k in range(n + 1):
        mult = float(math.comb(n, k))
        pop_a0 = c2 * a0[0] ** k * a1[0] ** (n - k)
        pop_b0 = s2 * b0[0] ** k * b1[0] ** (n - k)
        pop_a1 = c2 * a0[1] ** k * a1[1] ** (n - k)
        pop_b1 = s2 * b0[1] ** k * b1[1] ** (n - k)
        a = pop_a0 + pop_b0
        b = pop_a1 + pop_b1
        c = cross_lower * w**n * corner_lo[0] ** k * corner_lo[1] ** (n - k)
        d = cross_upper * w**n * np.conj(corner_lo[0]) ** k * np.conj(
            corner_lo[1]
        ) ** (n - k)
        prob_k = (
            c2 * (a0[0] + a0[1]) ** k * (a1[0] + a1[1]) ** (n - k)
            + s2 * (b0[0] + b0[1]) ** k * (b1[0] + b1[1]) ** (n - k)
        )
        p_total += mult * prob_k
        fid_num += mult * (c2 * a + s2 * b + cross_upper * c + cross_lower * d)
        c_sq = np.abs(c) ** 2
        denom = a + b
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = 4.0 * c_sq * n**2 / denom
        # Same class rule as the scalar path: divide when the populations
        # are resolvable, flag a genuine pole as undefined (NaN instead of
        # the scalar path's DegeneracyError), and otherwise drop the
        # negligible contribution.  The halved coherence comparison keeps
        # the NaN set a strict superset of the scalar raise set.
        qfi += mult * np.where(
            np.abs(denom) >= _GRID_DEGENERACY_TOL,
            contrib,
            np.where(c_sq > 0.5 * np.abs(denom), np.nan, 0.0),
        )

    degenerate = np.abs(p_total) < _GRID_DEGENERACY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        fid = np.where(degenerate, np.nan, fid_num / p_total)
    p_total = np.where(degenerate, np.nan, p_total)
    qfi = np.where(degenerate, np.nan, qfi)
    return p_total, fid, qfi

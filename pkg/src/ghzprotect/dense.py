"""Dense (full density-matrix) reference implementation of the protocol.

This is the trusted arbiter: every step is applied literally as matrix
algebra on the full 2^N-dimensional state, with no structural shortcuts.
It is exponentially expensive and capped at small registers; the scalable
per-class engine is validated against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from ghzprotect.operators import adc_kraus, flip_op, rotation_op, weak_meas_op
from ghzprotect.params import (
    Convention,
    DegeneracyError,
    Engine,
    MetricsRow,
    ProtocolParams,
    validate_params,
)

#: Qubit ceiling for full density-matrix evolution (4^N memory scaling).
DENSE_MAX_QUBITS = 6

_DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class DenseState:
    """A density matrix together with its register size."""

    n_qubits: int
    rho: np.ndarray

    def __post_init__(self) -> None:
        dim = 2**self.n_qubits
        if self.rho.shape != (dim, dim):
            raise ValueError(
                f"state for n_qubits={self.n_qubits} must be {dim}x{dim}, "
                f"got shape {self.rho.shape}"
            )

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.rho))


@dataclass(frozen=True)
class BranchRun:
    """Outcome of the protocol conditioned on one measurement record.

    ``state`` is the unnormalized branch operator: its trace equals
    ``probability``.  Under the two-sided-multiplication convention the
    trace (and hence the probability) is complex for eta != 0.
    """

    pattern: str
    probability: complex
    state: DenseState


def ghz_vector(n: int, gamma: float, phi0: float) -> np.ndarray:
    """Pure input vector alpha|0...0> + beta|1...1> as a dense array."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    alpha = math.cos(gamma / 2.0)
    beta = math.sin(gamma / 2.0) * complex(math.cos(phi0), math.sin(phi0))
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[0] = alpha
    psi[-1] = beta
    return psi


def ghz_state(n: int, gamma: float, phi0: float) -> DenseState:
    """Density matrix of the generalized GHZ input state.

    Only the four corner elements are nonzero:
    |alpha|^2, |beta|^2 on the diagonal and alpha beta* off-diagonal.
    """
    psi = ghz_vector(n, gamma, phi0)
    return DenseState(n_qubits=n, rho=np.outer(psi, psi.conj()))


def _lift(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-qubit operator at `site` into the N-qubit space."""
    left = np.eye(2**site, dtype=np.complex128)
    right = np.eye(2 ** (n - site - 1), dtype=np.complex128)
    return np.kron(np.kron(left, op), right)


def _pattern_bits(pattern: str, n: int) -> list[int]:
    if len(pattern) != n or any(ch not in "01" for ch in pattern):
        raise ValueError(
            f"pattern must be a length-{n} string of 0/1 bits, got {pattern!r}"
        )
    return [int(ch) for ch in pattern]


def run_protocol_branch(
    p: ProtocolParams, pattern: str, convention: Convention
) -> BranchRun:
    """Evolve the input through one full measurement-record branch.

    Per qubit, conditioned on its record bit o: weak measurement M_o,
    flip F_o, amplitude damping (full Kraus sum), flip F_o again, and the
    conditional rotation T_o.  The rotation is applied as T rho T^dag
    (PHYSICAL) or T rho T (PAPER).

    Returns the unnormalized branch state; its trace is the branch
    probability.
    """
    validate_params(p, max_qubits=DENSE_MAX_QUBITS)
    n = p.n_qubits
    bits = _pattern_bits(pattern, n)

    rho = ghz_state(n, p.gamma, p.phi0).rho
    e0, e1 = adc_kraus(p.r)
    for site, o in enumerate(bits):
        m = weak_meas_op(o, p.theta)
        f = flip_op(o)
        kraus = [_lift(f @ e @ f @ m, site, n) for e in (e0, e1)]
        rho = sum(k @ rho @ k.conj().T for k in kraus)

    rot = np.eye(1, dtype=np.complex128)
    for o in bits:
        rot = np.kron(rot, rotation_op(o, p.eta))
    if convention is Convention.PHYSICAL:
        rho = rot @ rho @ rot.conj().T
    else:
        rho = rot @ rho @ rot

    prob = complex(np.trace(rho))
    return BranchRun(pattern=pattern, probability=prob, state=DenseState(n, rho))


def run_all_branches(
    p: ProtocolParams, convention: Convention
) -> list[BranchRun]:
    """All 2^N record branches, ordered by the pattern's binary value."""
    validate_params(p, max_qubits=DENSE_MAX_QUBITS)
    n = p.n_qubits
    return [
        run_protocol_branch(p, format(idx, f"0{n}b"), convention)
        for idx in range(2**n)
    ]


def run_protocol_average(
    p: ProtocolParams, convention: Convention
) -> tuple[DenseState, complex]:
    """Record-averaged output state and the total success weight.

    Sums the unnormalized branch states over every record and renormalizes
    by the total trace.  Raises :class:`DegeneracyError` when the total
    weight vanishes (every branch killed, e.g. projective measurement onto
    decayed components), since no average state exists there.
    """
    branches = run_all_branches(p, convention)
    total = sum(b.probability for b in branches)
    if abs(total) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"total branch weight {total} vanishes at "
            f"theta={p.theta}, eta={p.eta}, r={p.r}; "
            f"the averaged state is undefined"
        )
    rho = sum(b.state.rho for b in branches) / total
    return DenseState(p.n_qubits, rho), total


def phase_imprint(rho: np.ndarray, delta: float) -> np.ndarray:
    """Apply the collective phase diag(1, e^{i delta})^{tensor N} to rho.

    This is the encoding family whose parameter the corner coherence
    estimates: the |1...1> component acquires phase N*delta, so the
    coherence winds at rate N.
    """
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    weights = np.array([bin(i).count("1") for i in range(dim)])
    d = np.exp(1j * delta * weights)
    return (d[:, None] * rho) * d.conj()[None, :]


def qfi_general(
    state_at: Callable[[float], np.ndarray], phi0: float, step: float = 1e-5
) -> float:
    """Quantum Fisher information by spectral decomposition.

    Makes no structural assumption about the family: differentiates
    numerically (central difference with the given step) and evaluates

        F = sum_{i,j} 2 |<i| drho |j>|^2 / (lambda_i + lambda_j)

    over eigenpairs of rho(phi0), skipping pairs whose combined weight
    falls below 1e-10.

    Args:
        state_at: maps a parameter value to a (Hermitian, normalized)
            density matrix.
        phi0: evaluation point.
        step: finite-difference step, validated to [1e-7, 1e-3].
    """
    if not 1e-7 <= step <= 1e-3:
        raise ValueError(f"step must lie in [1e-7, 1e-3], got {step}")
    rho = np.asarray(state_at(phi0), dtype=np.complex128)
    rho = (rho + rho.conj().T) / 2.0
    drho = (
        np.asarray(state_at(phi0 + step), dtype=np.complex128)
        - np.asarray(state_at(phi0 - step), dtype=np.complex128)
    ) / (2.0 * step)

    vals, vecs = np.linalg.eigh(rho)
    d_in_eig = vecs.conj().T @ drho @ vecs
    fisher = 0.0
    for i in range(len(vals)):
        for j in range(len(vals)):
            denom = vals[i] + vals[j]
            if denom > 1e-10:
                fisher += 2.0 * abs(d_in_eig[i, j]) ** 2 / denom
    return float(fisher)


def fidelity_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    """Overlap <psi|rho|psi> of a normalized pure target with a state.

    Returns the real part clipped to [0, 1]; intended for Hermitian,
    normalized states where the imaginary part is pure rounding noise.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(
            f"shape mismatch: vector of size {psi.size} against state "
            f"{rho.shape}"
        )
    val = float(np.real(psi.conj() @ rho @ psi))
    return min(max(val, 0.0), 1.0)


def _corner_elements(rho: np.ndarray) -> tuple[complex, complex, complex]:
    """(A, B, C): the two extreme populations and the corner coherence."""
    return complex(rho[0, 0]), complex(rho[-1, -1]), complex(rho[0, -1])


def aggregate_metrics_dense(
    p: ProtocolParams, convention: Convention
) -> MetricsRow:
    """Record-averaged probability/fidelity/QFI from full branch evolution.

    The QFI aggregate is the record-average of per-branch information,
    sum_b 4 |C_b|^2 N^2 / (A_b + B_b): each branch estimates the collective
    phase through its surviving corner coherence, and the branch weight
    cancels against the normalization of the branch state.
    """
    branches = run_all_branches(p, convention)
    n = p.n_qubits

    p_total = sum(b.probability for b in branches)
    if abs(p_total) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"total branch weight {p_total} vanishes at theta={p.theta}, "
            f"eta={p.eta}, r={p.r}"
        )

    psi = ghz_vector(n, p.gamma, p.phi0)
    fid_num = sum(complex(psi.conj() @ b.state.rho @ psi) for b in branches)
    fid = fid_num / p_total

    qfi = 0.0 + 0.0j
    for b in branches:
        a, bb, c = _corner_elements(b.state.rho)
        if abs(c) == 0.0:
            continue
        denom = a + bb
        if abs(denom) >= _DEGENERACY_TOL:
            qfi += 4.0 * abs(c) ** 2 * n**2 / denom
        elif abs(c) ** 2 > abs(denom):
            raise DegeneracyError(
                f"branch {b.pattern} has vanishing corner populations; "
                f"its information contribution is undefined"
            )
        # else: underflowed branch, bounded by 4 n^2 |denom|; dropped.

    residual = max(abs(p_total.imag), abs(fid.imag), abs(qfi.imag))
    return MetricsRow(
        r=p.r,
        theta=p.theta,
        eta=p.eta,
        probability=float(p_total.real),
        fidelity=float(fid.real),
        qfi=float(qfi.real),
        imag_residual=float(residual),
        convention=convention,
        engine=Engine.DENSE,
    )


def do_nothing_baseline(p: ProtocolParams) -> MetricsRow:
    """Metrics when the register is left exposed to damping with no protocol.

    The channel acts once per qubit and nothing is measured, so the outcome
    is deterministic (probability 1) and convention-independent.  Evaluated
    in closed form -- the corner elements of the damped GHZ state are

        A = |alpha|^2 + |beta|^2 r^N,  B = |beta|^2 (1-r)^N,
        C = alpha* beta (1-r)^{N/2}

    -- which is exact for any register size.
    """
    ProtocolParams(
        n_qubits=p.n_qubits,
        gamma=p.gamma,
        phi0=p.phi0,
        theta=p.theta,
        eta=p.eta,
        r=p.r,
        extended_theta=p.extended_theta,
    )
    n, r = p.n_qubits, p.r
    alpha, beta = p.alpha, p.beta
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2

    pop0 = a2 + b2 * r**n
    pop1 = b2 * (1.0 - r) ** n
    coh = np.conj(alpha) * beta * (1.0 - r) ** (n / 2.0)

    fid = (
        a2 * pop0
        + b2 * pop1
        + 2.0 * a2 * b2 * (1.0 - r) ** (n / 2.0)
    )
    if pop0 + pop1 < _DEGENERACY_TOL:
        raise DegeneracyError("damped state has no corner population")
    qfi = 4.0 * abs(coh) ** 2 * n**2 / (pop0 + pop1)

    return MetricsRow(
        r=r,
        theta=p.theta,
        eta=p.eta,
        probability=1.0,
        fidelity=float(fid),
        qfi=float(qfi),
        imag_residual=0.0,
        convention=Convention.PHYSICAL,
        engine=Engine.CLOSEDFORM_APPENDIX,
    )

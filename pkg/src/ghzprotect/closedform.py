"""Closed-form aggregate formulas, evaluated exactly as written.

Two evaluation modes exist on purpose.  ``VERBATIM`` computes the compact
printed expressions for the total probability, fidelity, and Fisher
information.  ``APPENDIX_AGGREGATED`` rebuilds the same aggregates from
the per-class matrix elements (the structured engine's algebra in the
two-sided-multiplication convention).  The two agree everywhere except for
a known inconsistency in the Fisher aggregate's k=0 and k=N denominators,
which is surfaced as a measurable gap rather than papered over.
"""

from __future__ import annotations

import cmath
import math

from ghzprotect.params import (
    Convention,
    DegeneracyError,
    Engine,
    FormulaVariant,
    MetricsRow,
    ProtocolParams,
    validate_params,
)
from ghzprotect.structured import aggregate_complex

_DEGENERACY_TOL = 1e-14

#: Real-part ceiling for the optimal-rotation identity check.
_ETA_OPT_TOL = 1e-12


def pow_int(z: complex, n: int) -> complex:
    """z**n for non-negative integer n by repeated squaring.

    Stays on the multiplicative path for any exponent (no log/exp branch),
    so thousand-fold powers keep full precision and z=0 is exact.
    """
    if n < 0:
        raise ValueError(f"exponent must be non-negative, got {n}")
    result = complex(1.0)
    base = complex(z)
    while n:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


def realize(z: complex, tol: float | None = None) -> tuple[float, float]:
    """Split a complex aggregate into (real part, |imaginary part|).

    The residual is returned, not enforced: the caller compares it against
    whatever tolerance its context demands (``tol`` is accepted so call
    sites can carry that tolerance alongside, but no check happens here).
    """
    return float(z.real), abs(float(z.imag))


def class_probability(p: ProtocolParams, k: int) -> complex:
    """Per-class weight of the record class with k zeros, closed form.

    One parametric expression covers all classes (the k=0 and k=N printed
    specializations follow by substitution):

        |alpha|^2 u^k v^{N-k} e^{ik eta} (r e^{i eta}+(1-r) e^{-i eta})^{N-k}
      + |beta|^2  v^k u^{N-k} e^{i(N-k) eta} (r e^{i eta}+(1-r) e^{-i eta})^k

    with u = cos^2(theta/2), v = sin^2(theta/2).
    """
    validate_params(p, max_qubits=1 << 20)
    n = p.n_qubits
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    u = math.cos(p.theta / 2.0) ** 2
    v = math.sin(p.theta / 2.0) ** 2
    zp = cmath.exp(1j * p.eta)
    zm = cmath.exp(-1j * p.eta)
    damp = p.r * zp + (1.0 - p.r) * zm
    c2 = abs(p.alpha) ** 2
    s2 = abs(p.beta) ** 2
    return c2 * u**k * v ** (n - k) * pow_int(zp, k) * pow_int(damp, n - k) + (
        s2 * v**k * u ** (n - k) * pow_int(zp, n - k) * pow_int(damp, k)
    )


def prob_total(
    p: ProtocolParams, variant: FormulaVariant = FormulaVariant.VERBATIM
) -> complex:
    """Record-summed total weight.

    VERBATIM evaluates the binomial-collapsed product form

        ((r e^{i eta} + (1-r) e^{-i eta}) sin^2(theta/2)
          + e^{i eta} cos^2(theta/2))^N;

    APPENDIX_AGGREGATED sums the per-class weights with multiplicities.
    """
    if variant is FormulaVariant.APPENDIX_AGGREGATED:
        total, _, _ = aggregate_complex(p, Convention.PAPER)
        return total
    validate_params(p, max_qubits=1 << 20)
    u = math.cos(p.theta / 2.0) ** 2
    v = math.sin(p.theta / 2.0) ** 2
    zp = cmath.exp(1j * p.eta)
    zm = cmath.exp(-1j * p.eta)
    base = (p.r * zp + (1.0 - p.r) * zm) * v + zp * u
    return pow_int(base, p.n_qubits)


def fid_total(
    p: ProtocolParams, variant: FormulaVariant = FormulaVariant.VERBATIM
) -> complex:
    """Record-averaged overlap with the input state.

    VERBATIM evaluates the printed three-term numerator

        (|alpha|^4+|beta|^4) (u e^{i eta} + v (1-r) e^{-i eta})^N
      + 2 |alpha beta|^2 r^N e^{iN eta} v^N
      + 2^{N+1} |alpha beta|^2 (1-r)^{N/2} sin^N(theta) / 2^N

    divided by the total weight; APPENDIX_AGGREGATED rebuilds the same
    ratio from per-class elements.  Raises on vanishing total weight.
    """
    if variant is FormulaVariant.APPENDIX_AGGREGATED:
        _, fid, _ = aggregate_complex(p, Convention.PAPER)
        return fid
    validate_params(p, max_qubits=1 << 20)
    n = p.n_qubits
    u = math.cos(p.theta / 2.0) ** 2
    v = math.sin(p.theta / 2.0) ** 2
    zp = cmath.exp(1j * p.eta)
    zm = cmath.exp(-1j * p.eta)
    c2 = abs(p.alpha) ** 2
    s2 = abs(p.beta) ** 2
    ab2 = c2 * s2

    numerator = (
        (c2**2 + s2**2) * pow_int(u * zp + v * (1.0 - p.r) * zm, n)
        + 2.0 * ab2 * p.r**n * pow_int(zp, n) * v**n
        + 2.0 ** (n + 1) * ab2 * (1.0 - p.r) ** (n / 2.0)
        * math.sin(p.theta) ** n / 2.0**n
    )
    total = prob_total(p, FormulaVariant.VERBATIM)
    if abs(total) < _DEGENERACY_TOL:
        raise DegeneracyError(
            f"total record weight |{total}| vanishes at theta={p.theta}, "
            f"eta={p.eta}, r={p.r}; fidelity is undefined"
        )
    return numerator / total


def qfi_total(
    p: ProtocolParams, variant: FormulaVariant = FormulaVariant.VERBATIM
) -> complex:
    """Record-averaged Fisher information about the collective phase.

    VERBATIM evaluates the printed three-part sum whose k=0 and k=N
    denominators read |alpha|^2 sin^{2N}(theta/2) (r(1-r))^N
    + |beta|^2 cos^{2N}(theta/2) e^{iN eta} (and the mirror); these differ
    from the per-class elements, producing a documented gap of
    N^2 2^{1-N} against APPENDIX_AGGREGATED at r=0, eta=0, theta=pi/2.
    """
    if variant is FormulaVariant.APPENDIX_AGGREGATED:
        _, _, qfi = aggregate_complex(p, Convention.PAPER)
        return qfi
    validate_params(p, max_qubits=1 << 20)
    n = p.n_qubits
    u = math.cos(p.theta / 2.0) ** 2
    v = math.sin(p.theta / 2.0) ** 2
    zpn = cmath.exp(1j * p.eta * n)
    c2 = abs(p.alpha) ** 2
    s2 = abs(p.beta) ** 2

    numerator = (
        4.0 * c2 * s2 * (1.0 - p.r) ** n
        * math.sin(p.theta) ** (2 * n) / 4.0**n * n**2
    )

    def term(denom: complex) -> complex:
        if numerator == 0.0:
            return 0.0 + 0.0j
        if abs(denom) < _DEGENERACY_TOL:
            raise DegeneracyError(
                f"vanishing information denominator at theta={p.theta}, "
                f"eta={p.eta}, r={p.r}"
            )
        return numerator / denom

    rr = (p.r * (1.0 - p.r)) ** n
    total = term(c2 * v**n * rr + s2 * u**n * zpn)
    total += term(c2 * u**n * zpn + s2 * v**n * rr)
    for k in range(1, n):
        mult = float(math.comb(n, k))
        zmu = cmath.exp(1j * p.eta * (2 * k - n))
        zmu_c = cmath.exp(-1j * p.eta * (2 * k - n))
        denom = (
            c2 * u**k * v ** (n - k) * (1.0 - p.r) ** (n - k) * zmu
            + s2 * v**k * u ** (n - k) * (1.0 - p.r) ** k * zmu_c
        )
        total += mult * term(denom)
    return total


def eta_opt_probability(r: float, theta: float) -> float:
    """Rotation angle that keeps the record-summed weight at 1.

    Evaluates the printed expression -i log((1 + sqrt(1-4ab)) / (2a)) with
    a = cos^2(theta/2) + r sin^2(theta/2) and b = (1-r) sin^2(theta/2).
    Because a + b = 1, the argument collapses to a positive real, so the
    principal real value is identically 0: no rotation ever helps the
    total weight.  The function verifies that collapse numerically and
    returns the (zero) real part.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in the unit interval, got {r}")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    a = math.cos(theta / 2.0) ** 2 + r * math.sin(theta / 2.0) ** 2
    b = (1.0 - r) * math.sin(theta / 2.0) ** 2
    if a == 0.0:
        # Only at (r=0, theta=pi): the log argument diverges along the
        # positive real axis, so the real part's limit is still 0.
        return 0.0
    # The discriminant 1 - 4ab equals (a - b)^2 exactly since a + b = 1;
    # taking its root as |a - b| avoids the sign flips that direct
    # evaluation suffers from rounding when a is close to b.
    w = -1j * cmath.log((1.0 + abs(a - b)) / (2.0 * a))
    if abs(w.real) >= _ETA_OPT_TOL:
        raise AssertionError(
            f"optimal-rotation identity violated: real part {w.real} at "
            f"r={r}, theta={theta}"
        )
    return w.real


def metrics_closedform(
    p: ProtocolParams, variant: FormulaVariant = FormulaVariant.VERBATIM
) -> MetricsRow:
    """Realized metrics row from the closed forms (paper convention).

    The printed aggregates carry the two-sided rotation phases, so rows
    are tagged with the paper convention; use the structured engine for
    physical-convention rows.
    """
    prob = prob_total(p, variant)
    fid = fid_total(p, variant)
    qfi = qfi_total(p, variant)
    residual = max(abs(prob.imag), abs(fid.imag), abs(qfi.imag))
    engine = (
        Engine.CLOSEDFORM_VERBATIM
        if variant is FormulaVariant.VERBATIM
        else Engine.CLOSEDFORM_APPENDIX
    )
    return MetricsRow(
        r=p.r,
        theta=p.theta,
        eta=p.eta,
        probability=prob.real,
        fidelity=fid.real,
        qfi=qfi.real,
        imag_residual=residual,
        convention=Convention.PAPER,
        engine=engine,
    )

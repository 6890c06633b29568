"""Trace invariants, phase-rotation check, Poisson brackets.

Three families of traces are computed from a Lax bundle:

    B_k  = tr(Ltilde^k)   complex, rotates as B_k(t) = exp(-i k omega t) B_k(0)
    I_k  = tr(N^k)        real, conserved along the flow
    I0_k = tr(L^k)        real, the omega-free invariants

Gradients of B_k and I_k with respect to (p, q) are assembled
analytically, which makes the Poisson-bracket involution check
independent of finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BadOrder, DimensionMismatch, LaxflowError, UnsupportedModel
from .lax import LaxSet, build_lax
from .model import ModelParams, PhaseState, hamiltonian

__all__ = [
    "InvariantRecord",
    "power_traces",
    "compute_B",
    "compute_I",
    "compute_I0",
    "record_invariants",
    "phase_evolution_check",
    "grad_B",
    "grad_I",
    "poisson_bracket",
    "involution_check",
    "InvolutionMatrices",
]


@dataclass(frozen=True)
class InvariantRecord:
    """Invariant snapshot at one sample time.

    Only B is stored; the conjugate family tr((Ltilde^+)^k) equals
    conj(B_k) identically.
    """

    t: float
    B: np.ndarray
    I: np.ndarray
    H: float
    I0: np.ndarray


def _check_order(kmax: int, n: int) -> int:
    if int(kmax) != kmax or kmax < 1:
        raise BadOrder(f"trace order must be a positive integer, got {kmax!r}")
    if kmax > 2 * n:
        raise BadOrder(f"trace order {kmax} exceeds the diagnostic bound 2n = {2 * n}")
    return int(kmax)


def power_traces(matrix: np.ndarray, kmax: int) -> np.ndarray:
    """Traces of matrix^k for k = 1..kmax, by iterated multiplication."""
    matrix = np.asarray(matrix)
    kmax = _check_order(kmax, matrix.shape[0])
    out = np.empty(kmax, dtype=complex)
    power = matrix
    for k in range(kmax):
        out[k] = np.trace(power)
        if k + 1 < kmax:
            power = power @ matrix
    return out


def _hermitian_power_traces(matrix: np.ndarray, kmax: int) -> np.ndarray:
    """Real traces of powers of a Hermitian matrix.

    Each intermediate power is re-Hermitized, which keeps the traces
    exactly real instead of accumulating imaginary round-off.
    """
    kmax = _check_order(kmax, matrix.shape[0])
    out = np.empty(kmax, dtype=float)
    power = matrix
    for k in range(kmax):
        tr = complex(np.trace(power))
        if abs(tr.imag) > 1e-12:
            raise LaxflowError(f"imaginary contamination {tr.imag:.3e} in a Hermitian trace")
        out[k] = tr.real
        if k + 1 < kmax:
            power = power @ matrix
            power = 0.5 * (power + power.conj().T)
    return out


def compute_B(laxset: LaxSet, kmax: int) -> np.ndarray:
    """B_k = tr(Ltilde^k) for k = 1..kmax (complex vector)."""
    return power_traces(laxset.Ltilde, kmax)


def compute_I(laxset: LaxSet, kmax: int) -> np.ndarray:
    """I_k = tr(N^k) for k = 1..kmax (real vector, conserved)."""
    return _hermitian_power_traces(laxset.N, kmax)


def compute_I0(laxset: LaxSet, kmax: int) -> np.ndarray:
    """I0_k = tr(L^k) for k = 1..kmax (real vector, omega-free invariants)."""
    return _hermitian_power_traces(laxset.L, kmax)


def record_invariants(params: ModelParams, state: PhaseState, kmax: int) -> InvariantRecord:
    """Evaluate H and, when kmax >= 1, the B/I/I0 families at a state."""
    h = hamiltonian(params, state)
    if kmax < 1:
        empty_c = np.empty(0, dtype=complex)
        empty_r = np.empty(0, dtype=float)
        return InvariantRecord(t=state.t, B=empty_c, I=empty_r, H=h, I0=empty_r)
    laxset = build_lax(params, state)
    return InvariantRecord(
        t=state.t,
        B=compute_B(laxset, kmax),
        I=compute_I(laxset, kmax),
        H=h,
        I0=compute_I0(laxset, kmax),
    )


def phase_evolution_check(traj, omega: float, kmax: int) -> float:
    """Deviation from the pure phase rotation of the B family.

    Returns max over recorded samples and orders k <= kmax of
    |B_k(t) exp(i k omega t) - B_k(0)| / max(1, |B_k(0)|).
    """
    records = traj.records
    if not records or records[0].B.size == 0:
        raise UnsupportedModel(
            "trajectory carries no B records; it was not produced for a "
            "Lax-supported model")
    if kmax < 1 or kmax > records[0].B.size:
        raise BadOrder(f"kmax {kmax} not in 1..{records[0].B.size}")
    b0 = records[0].B[:kmax]
    scale = np.maximum(1.0, np.abs(b0))
    ks = np.arange(1, kmax + 1)
    worst = 0.0
    for rec in records:
        rotated = rec.B[:kmax] * np.exp(1j * ks * omega * rec.t)
        worst = max(worst, float((np.abs(rotated - b0) / scale).max()))
    return worst


def _inverse_gap_squares(laxset: LaxSet) -> np.ndarray:
    """Matrix i g / (q_j - q_k)^2 with zero diagonal."""
    q = laxset.Q.diagonal()
    dq = q[:, None] - q[None, :]
    np.fill_diagonal(dq, np.inf)
    return 1j * laxset.g / (dq * dq)


def grad_B(params: ModelParams, state: PhaseState, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient (dB_k/dp, dB_k/dq) at a phase point.

    dB_k/dp_j = k (Ltilde^{k-1})_jj and dB_k/dq_j collects the gap terms
    of row/column j of Ltilde plus -i omega on the diagonal.
    """
    laxset = build_lax(params, state)
    k = _check_order(k, laxset.n)
    w = np.linalg.matrix_power(laxset.Ltilde, k - 1)
    dbdp = k * w.diagonal().astype(complex)
    ig2 = _inverse_gap_squares(laxset)
    dbdq = k * ((w - w.T) * ig2).sum(axis=1) - 1j * k * laxset.omega * w.diagonal()
    return dbdp, dbdq


def grad_I(params: ModelParams, state: PhaseState, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient (dI_k/dp, dI_k/dq), chained through N = L^2 + omega^2 Q^2."""
    laxset = build_lax(params, state)
    k = _check_order(k, laxset.n)
    w = np.linalg.matrix_power(laxset.N, k - 1)
    s = laxset.L @ w + w @ laxset.L
    didp = k * s.diagonal().real
    ig2 = _inverse_gap_squares(laxset)
    q = laxset.Q.diagonal()
    didq = (k * ((s - s.T) * ig2).sum(axis=1)).real \
        + 2.0 * k * laxset.omega ** 2 * q * w.diagonal().real
    return didp, didq


def poisson_bracket(grad_f: tuple[np.ndarray, np.ndarray],
                    grad_g: tuple[np.ndarray, np.ndarray]) -> complex:
    """Canonical bracket sum_k (dF/dp_k dG/dq_k - dF/dq_k dG/dp_k)."""
    fp, fq = (np.asarray(v) for v in grad_f)
    gp, gq = (np.asarray(v) for v in grad_g)
    if not (fp.shape == fq.shape == gp.shape == gq.shape):
        raise DimensionMismatch("gradient pairs must have equal lengths")
    return complex(np.sum(fp * gq - fq * gp))


class InvolutionMatrices(NamedTuple):
    B: np.ndarray
    I: np.ndarray


def involution_check(params: ModelParams, state: PhaseState, kmax: int) -> InvolutionMatrices:
    """Matrices |{B_k, B_l}| and |{I_k, I_l}| for k, l <= kmax.

    Both collections are in involution, so every entry is zero up to
    round-off of the analytic gradients.
    """
    grads_b = [grad_B(params, state, k) for k in range(1, kmax + 1)]
    grads_i = [grad_I(params, state, k) for k in range(1, kmax + 1)]
    bmat = np.empty((kmax, kmax))
    imat = np.empty((kmax, kmax))
    for a in range(kmax):
        for b in range(kmax):
            bmat[a, b] = abs(poisson_bracket(grads_b[a], grads_b[b]))
            imat[a, b] = abs(poisson_bracket(grads_i[a], grads_i[b]))
    return InvolutionMatrices(B=bmat, I=imat)

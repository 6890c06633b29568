"""Closed-form spectral solution of the trapped inverse-square model.

The positions at time t are the ascending eigenvalues of the Hermitian
matrix

    A(t) = Q0 cos(omega t) + L0 sin(omega t) / omega        (omega > 0)
    A(t) = Q0 + L0 t                                        (omega = 0)

built from the initial position matrix Q0 and Lax matrix L0, and the
momenta follow from first-order eigenvalue perturbation,
p_j(t) = v_j^+ A'(t) v_j.  The construction is validated empirically
against the symplectic integrator; the comparison is part of the
acceptance suite, and this module serves as the independent oracle for
the dynamics.

A(t) is periodic with period 2 pi / omega and satisfies
A(t + pi/omega) = -A(t), so the position set at half period is the
negated, reverse-sorted position set.  Ascending eigenvalue order defines
the particle labelling, which is legitimate because the repulsive
dynamics preserves ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import StepStats, Trajectory, integrate
from .errors import DegenerateSpectrum, DimensionMismatch, EigenFailure
from .invariants import record_invariants
from .lax import build_lax
from .model import ModelParams, PhaseState

__all__ = [
    "SpectralSolution",
    "spectral_solution",
    "position_matrix",
    "exact_positions",
    "exact_momenta",
    "exact_state",
    "exact_trajectory",
    "exact_numeric_discrepancy",
    "compare_exact_vs_numeric",
]

_GAP_FLOOR = 1e-10


@dataclass(frozen=True)
class SpectralSolution:
    """Initial Lax data (Q0, L0) from which the exact motion is rebuilt."""

    params: ModelParams
    Q0: np.ndarray
    L0: np.ndarray
    omega: float

    def __post_init__(self):
        q0 = np.asarray(self.Q0, dtype=complex)
        l0 = np.asarray(self.L0, dtype=complex)
        if q0.ndim != 2 or q0.shape[0] != q0.shape[1] or q0.shape != l0.shape:
            raise DimensionMismatch(
                f"Q0 and L0 must be equal square matrices, got {q0.shape} and {l0.shape}")
        for name, m in (("Q0", q0), ("L0", l0)):
            if np.abs(m - m.conj().T).max() > 1e-10:
                raise ValueError(f"{name} must be Hermitian")
        object.__setattr__(self, "Q0", q0)
        object.__setattr__(self, "L0", l0)
        object.__setattr__(self, "omega", float(self.omega))


def spectral_solution(params: ModelParams, state: PhaseState) -> SpectralSolution:
    """Build the spectral solution from an initial phase point."""
    laxset = build_lax(params, state)
    return SpectralSolution(params=params, Q0=laxset.Q.astype(complex),
                            L0=laxset.L, omega=params.omega)


def position_matrix(sol: SpectralSolution, t: float) -> np.ndarray:
    """The Hermitian matrix A(t) whose eigenvalues are the positions."""
    if sol.omega == 0.0:
        return sol.Q0 + t * sol.L0
    w = sol.omega
    return math.cos(w * t) * sol.Q0 + (math.sin(w * t) / w) * sol.L0


def _position_rate_matrix(sol: SpectralSolution, t: float) -> np.ndarray:
    if sol.omega == 0.0:
        return sol.L0
    w = sol.omega
    return -w * math.sin(w * t) * sol.Q0 + math.cos(w * t) * sol.L0


def exact_positions(sol: SpectralSolution, t: float) -> np.ndarray:
    """Sorted positions at time t (ascending eigenvalues of A(t))."""
    try:
        return np.linalg.eigvalsh(position_matrix(sol, t))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigensolver failed at t={t:.6g}: {exc}") from exc


def exact_momenta(sol: SpectralSolution, t: float) -> np.ndarray:
    """Momenta at time t, ordered like the ascending positions.

    Raises :class:`DegenerateSpectrum` when an eigenvalue gap of A(t) is
    below 1e-10 and the eigenvector projection is ill-conditioned.
    """
    try:
        vals, vecs = np.linalg.eigh(position_matrix(sol, t))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigensolver failed at t={t:.6g}: {exc}") from exc
    if vals.size > 1 and float(np.diff(vals).min()) < _GAP_FLOOR:
        raise DegenerateSpectrum(
            f"eigenvalue gap below {_GAP_FLOOR:g} at t={t:.6g}; momenta are "
            "ill-conditioned at this instant")
    rate = _position_rate_matrix(sol, t)
    return np.einsum("ij,ij->j", vecs.conj(), rate @ vecs).real


def exact_state(sol: SpectralSolution, t: float) -> PhaseState:
    """Phase state at time t with particles labelled by ascending position."""
    return PhaseState(q=exact_positions(sol, t), p=exact_momenta(sol, t), t=t)


def exact_trajectory(sol: SpectralSolution, times) -> Trajectory:
    """Trajectory sampled from the closed-form solution at given times."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(np.diff(times) < 0.0):
        raise ValueError("times must be ascending")
    params = sol.params
    samples = []
    for t in times:
        state = exact_state(sol, float(t))
        samples.append((state, record_invariants(params, state, params.n)))
    return Trajectory(params=params, samples=samples, dt=0.0, scheme=None,
                      step_stats=StepStats(), source="exact")


def exact_numeric_discrepancy(params: ModelParams, state0: PhaseState, t_end: float,
                              dt: float, scheme: str = "yoshida4",
                              record_every: int = 10):
    """Integrate numerically and compare sorted positions against the oracle.

    Returns (trajectory, sample times, per-sample discrepancies), where
    each discrepancy is the max-norm difference between the sorted
    numerical positions and the eigenvalues of A(t).
    """
    sol = spectral_solution(params, state0)
    traj = integrate(params, state0, t_end, dt, scheme=scheme,
                     record_every=record_every)
    times = traj.times
    disc = np.empty(times.size)
    for i, (state, _) in enumerate(traj.samples):
        disc[i] = float(np.abs(np.sort(state.q) - exact_positions(sol, state.t)).max())
    return traj, times, disc


def compare_exact_vs_numeric(params: ModelParams, state0: PhaseState, t_end: float,
                             dt: float, scheme: str = "yoshida4",
                             record_every: int = 10) -> float:
    """Max position discrepancy between the spectral and numeric solutions."""
    _, _, disc = exact_numeric_discrepancy(params, state0, t_end, dt,
                                           scheme=scheme, record_every=record_every)
    return float(disc.max())

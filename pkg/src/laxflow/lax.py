"""Lax matrices for the inverse-square model in a harmonic trap.

Supported case: epsilon = 0 with no one-body couplings.  With
g = +sqrt(g2) the matrices are

    L_jk      = p_j delta_jk + i g (1 - delta_jk) / (q_j - q_k)
    M_jk      = -i g (1 - delta_jk) / (q_j - q_k)^2
    M_jj      =  i g sum_{l != j} 1 / (q_j - q_l)^2
    Ltilde    = L - i omega Q        (diagonal entries b_k = p_k - i omega q_k)
    N         = L^2 + omega^2 Q^2 = (Ltilde^+ Ltilde + Ltilde Ltilde^+) / 2

where P and Q are the real diagonal matrices of momenta and positions and
X = (L - P) / i is real antisymmetric.  L is Hermitian, iM is Hermitian,
and N is Hermitian positive semi-definite for omega >= 0.

The sign convention is pinned operationally: it must satisfy the
commutator identity L = P + [M, Q] and the flow residual checks below.
Flipping the sign of g flips X but leaves every trace invariant.  The
decomposition iM = -D + Y into a diagonal and an off-diagonal part is a
documented split only; M is exposed whole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularConfiguration, UnsupportedModel
from .model import ModelParams, PhaseState, forces

__all__ = [
    "LaxSet",
    "build_lax",
    "commutator",
    "check_commutator_identity",
    "check_N_identity",
    "hermiticity_residuals",
    "lax_flow_residual",
    "flow_residual_N1_N2",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class LaxSet:
    """Bundle of Lax matrices evaluated at one phase point.

    P, Q, X are real arrays; L, M, Ltilde, N are complex.  The scalars g
    and omega record the couplings the matrices were built with.
    """

    P: np.ndarray
    Q: np.ndarray
    X: np.ndarray
    L: np.ndarray
    M: np.ndarray
    Ltilde: np.ndarray
    N: np.ndarray
    g: float
    omega: float

    @property
    def n(self) -> int:
        return self.L.shape[0]


def build_lax(params: ModelParams, state: PhaseState) -> LaxSet:
    """Construct the full Lax bundle at a phase point.

    Raises :class:`UnsupportedModel` unless ``params.lax_supported`` and
    :class:`SingularConfiguration` when g2 > 0 and a pair gap is below the
    separation floor.
    """
    if not params.lax_supported:
        raise UnsupportedModel()
    if state.n != params.n:
        raise DimensionMismatch(f"state has {state.n} particles, params expect {params.n}")
    q, p = state.q, state.p
    n = params.n
    g = float(np.sqrt(params.g2))
    omega = params.omega

    if g > 0.0 and n > 1:
        dq = q[:, None] - q[None, :]
        np.fill_diagonal(dq, np.inf)
        smallest = float(np.abs(dq).min())
        if smallest < params.separation_floor:
            raise SingularConfiguration(
                f"pair gap {smallest:.3e} is below the separation floor "
                f"{params.separation_floor:.3e}")
        inv = 1.0 / dq
    else:
        inv = np.zeros((n, n))

    X = g * inv
    P = np.diag(p)
    Q = np.diag(q)
    L = P + 1j * X

    inv2 = inv * inv
    M = -1j * g * inv2
    np.fill_diagonal(M, 1j * g * inv2.sum(axis=1))

    b = p - 1j * omega * q
    Ltilde = np.diag(b) + 1j * X

    N = L @ L + np.diag((omega * q) ** 2)
    return LaxSet(P=P, Q=Q, X=X, L=L, M=M, Ltilde=Ltilde, N=N, g=g, omega=omega)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix commutator a @ b - b @ a."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionMismatch(f"need equal square matrices, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def _max_abs(m: np.ndarray) -> float:
    return float(np.abs(m).max())


def check_commutator_identity(laxset: LaxSet) -> float:
    """Max-entry residual of L - P - [M, Q]; below 1e-12 for any valid input."""
    return _max_abs(laxset.L - laxset.P - commutator(laxset.M, laxset.Q.astype(complex)))


def check_N_identity(laxset: LaxSet) -> float:
    """Max-entry residual of (Ltilde^+ Ltilde + Ltilde Ltilde^+)/2 - (L^2 + omega^2 Q^2)."""
    lt = laxset.Ltilde
    lth = lt.conj().T
    sym = 0.5 * (lth @ lt + lt @ lth)
    return _max_abs(sym - laxset.N)


def hermiticity_residuals(laxset: LaxSet) -> tuple[float, float, float]:
    """Max-entry deviations of L, iM and N from their conjugate transposes."""
    im = 1j * laxset.M
    return (
        _max_abs(laxset.L - laxset.L.conj().T),
        _max_abs(im - im.conj().T),
        _max_abs(laxset.N - laxset.N.conj().T),
    )


def _rk4_step(params: ModelParams, state: PhaseState, h: float) -> PhaseState:
    """One classical Runge-Kutta step of the Hamiltonian flow.

    Used only as a micro-stepper for the finite-difference flow checks so
    that identity verification stays decoupled from the production
    symplectic schemes.
    """
    q, p = state.q, state.p
    k1q, k1p = p, forces(params, q)
    k2q, k2p = p + 0.5 * h * k1p, forces(params, q + 0.5 * h * k1q)
    k3q, k3p = p + 0.5 * h * k2p, forces(params, q + 0.5 * h * k2q)
    k4q, k4p = p + h * k3p, forces(params, q + h * k3q)
    qn = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    pn = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    return PhaseState(q=qn, p=pn, t=state.t + h)


def _flow_endpoints(params: ModelParams, state: PhaseState, h: float):
    if h <= 0.0:
        raise ValueError("finite-difference step h must be positive")
    plus = build_lax(params, _rk4_step(params, state, +h))
    minus = build_lax(params, _rk4_step(params, state, -h))
    return build_lax(params, state), plus, minus


def lax_flow_residual(params: ModelParams, state: PhaseState, h: float) -> tuple[float, float]:
    """Central-difference residuals of the Ltilde and N evolution equations.

    The time derivatives of Ltilde and N along the exact Hamiltonian flow
    are estimated with two Runge-Kutta micro-steps at +-h and compared
    against [Ltilde, M] - i omega Ltilde and [N, M] respectively.  Both
    residuals shrink as O(h^2).
    """
    center, plus, minus = _flow_endpoints(params, state, h)
    d_lt = (plus.Ltilde - minus.Ltilde) / (2.0 * h)
    target_lt = commutator(center.Ltilde, center.M) - 1j * center.omega * center.Ltilde
    d_n = (plus.N - minus.N) / (2.0 * h)
    target_n = commutator(center.N, center.M)
    return _max_abs(d_lt - target_lt), _max_abs(d_n - target_n)


def flow_residual_N1_N2(params: ModelParams, state: PhaseState, h: float) -> tuple[float, float]:
    """Central-difference residuals of the N1 = Ltilde^+ Ltilde and
    N2 = Ltilde Ltilde^+ evolution equations, both against [N_k, M]."""
    center, plus, minus = _flow_endpoints(params, state, h)

    def n1(ls: LaxSet) -> np.ndarray:
        return ls.Ltilde.conj().T @ ls.Ltilde

    def n2(ls: LaxSet) -> np.ndarray:
        return ls.Ltilde @ ls.Ltilde.conj().T

    res1 = _max_abs((n1(plus) - n1(minus)) / (2.0 * h) - commutator(n1(center), center.M))
    res2 = _max_abs((n2(plus) - n2(minus)) / (2.0 * h) - commutator(n2(center), center.M))
    return res1, res2


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize a square matrix as {"dim": n, "re": [[...]], "im": [[...]]}."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"need a square matrix, got shape {m.shape}")
    c = m.astype(complex)
    return {"dim": m.shape[0], "re": c.real.tolist(), "im": c.imag.tolist()}


def matrix_from_json(doc: dict) -> np.ndarray:
    n = int(doc["dim"])
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionMismatch(f"matrix document claims dim {n} but carries "
                                f"{re.shape} and {im.shape}")
    return re + 1j * im

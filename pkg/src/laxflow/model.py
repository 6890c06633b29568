"""Physical model: parameters, phase state, potential, forces.

The system is n particles on a line interacting through inverse-square
potentials and confined by a harmonic trap.  With couplings stored as
squared quantities the potential reads

    U(q) = g2 * sum_{k<l} [ 1/(q_k - q_l)^2 + epsilon/(q_k + q_l)^2 ]
         + g1sq * sum_k 1/q_k^2
         + g2sq_single * sum_k 1/(2 q_k)^2
         + (omega^2 / 2) * sum_k q_k^2

and the Hamiltonian is H = (1/2) sum_k p_k^2 + U(q).  Every function in
this module is pure and every type is an immutable value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, SingularConfiguration

__all__ = [
    "ModelParams",
    "PhaseState",
    "potential_energy",
    "hamiltonian",
    "forces",
    "hamilton_rhs",
    "min_separation",
    "project_center_of_mass",
    "random_state",
]


@dataclass(frozen=True)
class ModelParams:
    """Coupling constants, trap frequency and particle count.

    Attributes
    ----------
    n : number of particles, at least 1.
    g2 : squared pair coupling multiplying both 1/(q_k-q_l)^2 and, when
        ``epsilon`` is 1, the mirror term 1/(q_k+q_l)^2.
    g1sq : squared coupling of the one-body 1/q_k^2 term.
    g2sq_single : squared coupling of the one-body 1/(2 q_k)^2 term.
    epsilon : 0 or 1, switches the mirror pair term on.
    omega : trap frequency, nonnegative.
    separation_floor : denominators smaller than this raise
        :class:`SingularConfiguration` instead of producing huge values.
    """

    n: int
    g2: float = 0.0
    g1sq: float = 0.0
    g2sq_single: float = 0.0
    epsilon: int = 0
    omega: float = 0.0
    separation_floor: float = 1e-12

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.epsilon not in (0, 1):
            raise ValueError(f"epsilon must be 0 or 1, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", int(self.epsilon))
        for name in ("g2", "g1sq", "g2sq_single", "omega", "separation_floor"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        if (self.g1sq > 0.0 or self.g2sq_single > 0.0) and self.epsilon != 1:
            raise ValueError("epsilon must be 1 when g1sq or g2sq_single is positive")

    @property
    def lax_supported(self) -> bool:
        """True iff the Lax machinery applies: epsilon=0 and no one-body terms."""
        return self.epsilon == 0 and self.g1sq == 0.0 and self.g2sq_single == 0.0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "g2": self.g2,
            "g1sq": self.g1sq,
            "g2sq_single": self.g2sq_single,
            "epsilon": self.epsilon,
            "omega": self.omega,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ModelParams":
        known = {f: doc[f] for f in
                 ("n", "g2", "g1sq", "g2sq_single", "epsilon", "omega") if f in doc}
        if "separation_floor" in doc:
            known["separation_floor"] = doc["separation_floor"]
        return cls(**known)


@dataclass(frozen=True)
class PhaseState:
    """Positions q and momenta p at time t.  Immutable."""

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        p = np.array(self.p, dtype=float)
        if q.ndim != 1 or p.shape != q.shape:
            raise DimensionMismatch(
                f"q and p must be equal-length vectors, got {q.shape} and {p.shape}")
        t = float(self.t)
        if not (np.isfinite(q).all() and np.isfinite(p).all() and np.isfinite(t)):
            raise NonFinite("phase-state coordinates must be finite")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.q.size

    def to_json(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist(), "t": self.t}

    @classmethod
    def from_json(cls, doc: dict) -> "PhaseState":
        return cls(q=np.asarray(doc["q"], dtype=float),
                   p=np.asarray(doc["p"], dtype=float),
                   t=float(doc.get("t", 0.0)))


def _coerce_positions(params: ModelParams, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (params.n,):
        raise DimensionMismatch(f"expected {params.n} positions, got shape {q.shape}")
    return q


def _guard(params: ModelParams, smallest: float, what: str) -> None:
    if smallest < params.separation_floor:
        raise SingularConfiguration(
            f"{what} {smallest:.3e} is below the separation floor "
            f"{params.separation_floor:.3e}")


def _pair_matrix(q: np.ndarray, sign: int) -> np.ndarray:
    """q_j - q_k (sign=-1) or q_j + q_k (sign=+1) with +inf on the diagonal."""
    m = q[:, None] + sign * q[None, :] if sign > 0 else q[:, None] - q[None, :]
    np.fill_diagonal(m, np.inf)
    return m


def potential_energy(params: ModelParams, q) -> float:
    """Potential energy U(q) for the configured couplings.

    Raises :class:`SingularConfiguration` when any active denominator is
    below the separation floor.
    """
    q = _coerce_positions(params, q)
    u = 0.5 * params.omega ** 2 * float(np.dot(q, q))
    if params.g2 > 0.0 and params.n > 1:
        dq = _pair_matrix(q, -1)
        _guard(params, float(np.abs(dq).min()), "pair gap")
        u += 0.5 * params.g2 * float(np.sum(dq ** -2))
        if params.epsilon == 1:
            sq = _pair_matrix(q, +1)
            _guard(params, float(np.abs(sq).min()), "mirror pair gap")
            u += 0.5 * params.g2 * float(np.sum(sq ** -2))
    if params.g1sq > 0.0:
        _guard(params, float(np.abs(q).min()), "distance to the origin")
        u += params.g1sq * float(np.sum(q ** -2))
    if params.g2sq_single > 0.0:
        _guard(params, float(np.abs(2.0 * q).min()), "doubled coordinate")
        u += params.g2sq_single * float(np.sum((2.0 * q) ** -2))
    return u


def hamiltonian(params: ModelParams, state: PhaseState) -> float:
    """Total energy H = kinetic + potential."""
    if state.n != params.n:
        raise DimensionMismatch(f"state has {state.n} particles, params expect {params.n}")
    return 0.5 * float(np.dot(state.p, state.p)) + potential_energy(params, state.q)


def forces(params: ModelParams, q) -> np.ndarray:
    """Force vector -dU/dq, differentiated analytically term by term."""
    q = _coerce_positions(params, q)
    f = -(params.omega ** 2) * q
    if params.g2 > 0.0 and params.n > 1:
        dq = _pair_matrix(q, -1)
        _guard(params, float(np.abs(dq).min()), "pair gap")
        f = f + 2.0 * params.g2 * np.sum(dq ** -3, axis=1)
        if params.epsilon == 1:
            sq = _pair_matrix(q, +1)
            _guard(params, float(np.abs(sq).min()), "mirror pair gap")
            f = f + 2.0 * params.g2 * np.sum(sq ** -3, axis=1)
    if params.g1sq > 0.0:
        _guard(params, float(np.abs(q).min()), "distance to the origin")
        f = f + 2.0 * params.g1sq * q ** -3
    if params.g2sq_single > 0.0:
        _guard(params, float(np.abs(2.0 * q).min()), "doubled coordinate")
        f = f + 4.0 * params.g2sq_single * (2.0 * q) ** -3
    return f


def hamilton_rhs(params: ModelParams, state: PhaseState) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand side (dq/dt, dp/dt) = (p, -dU/dq) of the equations of motion."""
    if state.n != params.n:
        raise DimensionMismatch(f"state has {state.n} particles, params expect {params.n}")
    return state.p.copy(), forces(params, state.q)


def min_separation(params: ModelParams, q) -> float:
    """Smallest |denominator| among the potential terms that are active.

    Considers pair gaps when g2 > 0, mirror sums additionally when
    epsilon = 1, and |q_k| / |2 q_k| when the one-body couplings are on.
    Returns +inf when no singular term is active.
    """
    q = _coerce_positions(params, q)
    best = np.inf
    if params.g2 > 0.0 and params.n > 1:
        best = min(best, float(np.abs(_pair_matrix(q, -1)).min()))
        if params.epsilon == 1:
            best = min(best, float(np.abs(_pair_matrix(q, +1)).min()))
    if params.g1sq > 0.0:
        best = min(best, float(np.abs(q).min()))
    if params.g2sq_single > 0.0:
        best = min(best, float(np.abs(2.0 * q).min()))
    return best


def project_center_of_mass(state: PhaseState) -> PhaseState:
    """Shift an initial state so that sum(q) = sum(p) = 0.

    Intended for preparing initial conditions only; it is not applied
    anywhere automatically.
    """
    return PhaseState(q=state.q - state.q.mean(), p=state.p - state.p.mean(), t=state.t)


def random_state(params: ModelParams, seed: int, min_gap: float = 0.1,
                 momentum_scale: float = 1.0) -> PhaseState:
    """Seeded random non-singular placement with a guaranteed minimum gap.

    Positions are laid out in ascending order with consecutive gaps drawn
    from [min_gap, 2*min_gap).  For epsilon = 0 models the configuration is
    centred; otherwise it is placed on the positive half line so that the
    mirror and one-body denominators stay at least min_gap away from zero.
    The same seed always produces the same state.
    """
    if min_gap <= 0.0:
        raise ValueError("min_gap must be positive")
    rng = np.random.default_rng(seed)
    gaps = min_gap * (1.0 + rng.random(params.n - 1))
    q = np.concatenate(([0.0], np.cumsum(gaps)))
    needs_positive = params.epsilon == 1 or params.g1sq > 0.0 or params.g2sq_single > 0.0
    if needs_positive:
        q = q + min_gap * (1.0 + rng.random())
    else:
        q = q - q.mean()
    p = momentum_scale * rng.standard_normal(params.n)
    return PhaseState(q=q, p=p, t=0.0)

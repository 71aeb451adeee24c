"""Exact Schroedinger evolution under a constant Hamiltonian (hbar = 1).

Propagators are built spectrally: ``H = V diag(lam) V^dagger`` gives
``exp(-i H dt) = V diag(exp(-i lam dt)) V^dagger``.

Everything downstream that needs "the unitary from t0 to t" goes through
:func:`propagator_between`, which accepts either a Hermitian operator
(constant Hamiltonian) or any object exposing ``propagator(t0, t)``.  The
second form lets models such as the continuously watched cat supply
exact step unitaries without a global Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimMismatch, RoleError
from .hilbert import Operator, StateVector, as_vector


@dataclass(frozen=True, eq=False)
class Propagator:
    H: Operator
    duration: float
    U: Operator


def _as_hermitian(H) -> Operator:
    if isinstance(H, Operator):
        if H.role != "hermitian":
            # accept a general-tagged matrix that happens to be Hermitian
            try:
                return Operator(H.matrix, "hermitian")
            except RoleError:
                raise RoleError(f"Hamiltonian must be hermitian, got role {H.role!r}") from None
        return H
    return Operator(np.asarray(H, dtype=np.complex128), "hermitian")


class Hamiltonian:
    """Constant Hamiltonian with a cached eigendecomposition.

    Use this instead of a bare :class:`Operator` when many propagators are
    needed for the same ``H``.
    """

    def __init__(self, H):
        self.operator = _as_hermitian(H)

    @property
    def dim(self) -> int:
        return self.operator.dim

    @cached_property
    def _eig(self):
        return np.linalg.eigh(self.operator.matrix)

    def unitary(self, dt: float) -> np.ndarray:
        lam, vecs = self._eig
        return (vecs * np.exp(-1j * lam * dt)) @ vecs.conj().T

    def propagator(self, t0: float, t: float) -> Operator:
        return Operator(self.unitary(t - t0), "unitary")


def propagator(H, dt: float) -> Propagator:
    """``exp(-i H dt)`` via the eigendecomposition of ``H``.

    Raises:
        RoleError: ``H`` is not Hermitian.
    """
    ham = H if isinstance(H, Hamiltonian) else Hamiltonian(H)
    return Propagator(ham.operator, float(dt), Operator(ham.unitary(dt), "unitary"))


def propagator_between(dynamics, t0: float, t: float) -> np.ndarray:
    """Unitary matrix taking the universal state from ``t0`` to ``t``."""
    if hasattr(dynamics, "propagator") and not isinstance(dynamics, Operator):
        U = dynamics.propagator(t0, t)
        return U.matrix if isinstance(U, Operator) else np.asarray(U)
    return Hamiltonian(dynamics).unitary(t - t0)


def dynamics_dim(dynamics) -> int | None:
    if isinstance(dynamics, (Operator, Hamiltonian)):
        return dynamics.dim
    if hasattr(dynamics, "dim"):
        return dynamics.dim
    if hasattr(dynamics, "propagator"):
        return None
    return np.asarray(dynamics).shape[0]


def evolve(psi, H, t0: float, t: float) -> StateVector:
    """Return ``exp(-i H (t - t0)) psi``.

    ``t < t0`` is allowed (unitary evolution runs backwards just as well).
    ``H`` may also be any dynamics object understood by
    :func:`propagator_between`.
    """
    vec = as_vector(psi)
    U = propagator_between(H, t0, t)
    if U.shape[1] != vec.size:
        raise DimMismatch(f"Hamiltonian of dim {U.shape[1]} cannot evolve state of dim {vec.size}")
    return StateVector(U @ vec)


def energy(psi, H) -> float:
    """``<psi|H|psi>``."""
    op = _as_hermitian(H.operator if isinstance(H, Hamiltonian) else H)
    vec = as_vector(psi)
    if op.dim != vec.size:
        raise DimMismatch(f"Hamiltonian of dim {op.dim} vs state of dim {vec.size}")
    return float(np.vdot(vec, op.matrix @ vec).real)

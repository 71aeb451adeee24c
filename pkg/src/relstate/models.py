"""Toy models: the watched cat, an ideal measurement, and a Rabi qubit.

All models use the observer-first ordering of :mod:`relstate.hilbert`, so
their universal states decompose directly with the factorization returned
by ``model.factorization``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimMismatch, NotNormalized, RangeError
from .evolution import Hamiltonian
from .hilbert import TOL, Factorization, Operator, StateVector

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

ALIVE, DEAD = 0, 1


@dataclass(frozen=True, eq=False)
class CatModel:
    """Cat watched continuously from ``0`` to ``t_max``.

    Observer states: index 0 is "the cat is alive", index ``j >= 1`` is "I
    saw it die during bin ``j``", bins splitting ``[0, t_max]`` evenly.  The
    universal space is ``observer (x) cat`` with cat index 0 alive, 1 dead.

    At time ``t`` the state is ``e^{-gamma t}|alive-seen>|alive>`` plus, for
    each bin ``(e_{j-1}, e_j]`` already entered, amplitude
    ``sqrt(e^{-2 gamma e_{j-1}} - e^{-2 gamma min(t, e_j)})`` on
    ``|died-in-j>|dead>``: the exact integral of ``2 gamma e^{-2 gamma t'}``
    over the elapsed part of the bin.
    """

    gamma: float
    bins: int
    t_max: float
    grid: tuple = field(default=None)

    def __post_init__(self):
        if not self.gamma > 0:
            raise RangeError(f"gamma must be positive, got {self.gamma}")
        if int(self.bins) < 2:
            raise RangeError(f"need at least 2 bins, got {self.bins}")
        if not self.t_max > 0:
            raise RangeError(f"t_max must be positive, got {self.t_max}")
        grid = self.bin_edges if self.grid is None else tuple(float(t) for t in self.grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise RangeError("grid must be strictly increasing")
        if grid and (grid[0] < 0 or grid[-1] > self.t_max):
            raise RangeError(f"grid must lie in [0, {self.t_max}]")
        object.__setattr__(self, "bins", int(self.bins))
        object.__setattr__(self, "grid", grid)

    @property
    def bin_edges(self) -> tuple:
        return tuple(self.t_max * j / self.bins for j in range(self.bins + 1))

    @property
    def dim_observer(self) -> int:
        return self.bins + 1

    @property
    def dim(self) -> int:
        return 2 * self.dim_observer

    @cached_property
    def factorization(self) -> Factorization:
        return Factorization(self.dim_observer, 2)

    def _index(self, record: int, cat: int) -> int:
        return 2 * record + cat

    def _check_time(self, t: float) -> None:
        if not 0.0 <= t <= self.t_max:
            raise RangeError(f"t={t} outside [0, {self.t_max}]")

    def _dead_amplitudes(self, start: float, stop: float) -> np.ndarray:
        """Per-bin amplitudes for deaths occurring in ``(start, stop]``."""
        edges = np.array(self.bin_edges)
        lo = np.clip(edges[:-1], start, stop)
        hi = np.clip(edges[1:], start, stop)
        mass = np.exp(-2 * self.gamma * lo) - np.exp(-2 * self.gamma * hi)
        return np.sqrt(np.maximum(mass, 0.0))

    def state_at(self, t: float) -> StateVector:
        self._check_time(t)
        amps = np.zeros(self.dim, dtype=np.complex128)
        amps[self._index(0, ALIVE)] = np.exp(-self.gamma * t)
        amps[[self._index(j, DEAD) for j in range(1, self.bins + 1)]] = self._dead_amplitudes(0.0, t)
        return StateVector(amps)

    def alive_weight(self, t: float) -> float:
        return float(np.exp(-2 * self.gamma * t))

    def _on_edge(self, t: float) -> bool:
        edges = np.array(self.bin_edges)
        return bool(np.any(np.abs(edges - t) <= 1e-12 * max(1.0, self.t_max)))

    def propagator(self, t0: float, t: float) -> Operator:
        """Exact unitary taking ``state_at(t0)`` to ``state_at(t)``.

        ``t0`` must be a bin edge (for ``t < t0`` the roles swap): inside a
        bin the partial-bin amplitudes do not compose linearly.  The map is
        a plane rotation sending ``|alive-seen>|alive>`` to its evolved
        image and fixing every earlier death record.
        """
        self._check_time(t0)
        self._check_time(t)
        if t < t0:
            return self.propagator(t, t0).dagger
        if not self._on_edge(t0):
            raise RangeError(f"cat propagator must start on a bin edge, got t0={t0}")
        a = np.zeros(self.dim, dtype=np.complex128)
        a[self._index(0, ALIVE)] = 1.0
        image = np.zeros(self.dim, dtype=np.complex128)
        image[self._index(0, ALIVE)] = np.exp(-self.gamma * (t - t0))
        dead = self._dead_amplitudes(t0, t) * np.exp(self.gamma * t0)
        image[[self._index(j, DEAD) for j in range(1, self.bins + 1)]] = dead
        c = image[self._index(0, ALIVE)].real
        w = image - c * a
        s = np.linalg.norm(w)
        U = np.eye(self.dim, dtype=np.complex128)
        if s > 0:
            w = w / s
            # rotation in span{a, w}: a -> c a + s w, w -> -s a + c w
            U += (c - 1) * (np.outer(a, a) + np.outer(w, w)) + s * (np.outer(w, a) - np.outer(a, w))
        return Operator(U, "unitary")

    def initial_state(self) -> StateVector:
        return self.state_at(0.0)


def cat_state_at(m: CatModel, t: float) -> StateVector:
    return m.state_at(t)


def short_cat_state(gamma: float, t: float) -> StateVector:
    """Two-state observer version: ``e^{-gamma t}|smile>|alive> + sqrt(1 - e^{-2 gamma t})|frown>|dead>``.

    Observer index 0 is "sees a live cat", 1 is "sees a dead cat"; decompose
    with ``Factorization(2, 2)``.  This is the watched cat with a single
    record of the death and no time stamp.
    """
    if not gamma > 0 or t < 0:
        raise RangeError(f"need gamma > 0 and t >= 0, got gamma={gamma}, t={t}")
    amps = np.zeros(4, dtype=np.complex128)
    amps[2 * 0 + ALIVE] = np.exp(-gamma * t)
    amps[2 * 1 + DEAD] = np.sqrt(-np.expm1(-2 * gamma * t))
    return StateVector(amps)


@dataclass(frozen=True, eq=False)
class IdealMeasurementModel:
    """Observer reads out a system prepared in ``sum_k c_k |s_k>``.

    Observer index 0 is "ready"; index ``k`` (1-based) is "saw outcome k".
    System index ``k - 1`` holds ``|s_k>``.  The generator rotates each
    ``|ready>|s_k>`` into ``|saw k>|s_k>`` with a ``sigma_y``-type coupling,
    completing the transfer exactly at ``t = T``:

        psi(0) = |ready> (x) sum_k c_k |s_k>
        psi(T) = sum_k c_k |saw k>|s_k>

    Under the same constant Hamiltonian the state keeps rotating after
    ``T``, returning to ``psi(0)`` (up to sign) at ``2T``.
    """

    coefficients: tuple
    T: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise DimMismatch("coefficients must be a nonempty sequence")
        sq = float(np.vdot(c, c).real)
        if abs(sq - 1.0) > TOL:
            raise NotNormalized(f"sum |c_k|^2 = {sq!r}, expected 1")
        if not self.T > 0:
            raise RangeError(f"interaction time must be positive, got {self.T}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def outcomes(self) -> int:
        return self.coefficients.size

    @property
    def dim(self) -> int:
        return (self.outcomes + 1) * self.outcomes

    @cached_property
    def factorization(self) -> Factorization:
        return Factorization(self.outcomes + 1, self.outcomes)

    def _index(self, record: int, system: int) -> int:
        return record * self.outcomes + system

    @cached_property
    def hamiltonian(self) -> Hamiltonian:
        K = self.outcomes
        H = np.zeros((self.dim, self.dim), dtype=np.complex128)
        rate = np.pi / (2 * self.T)
        for k in range(1, K + 1):
            a = self._index(0, k - 1)
            b = self._index(k, k - 1)
            H[b, a] = rate * SIGMA_Y[1, 0]
            H[a, b] = rate * SIGMA_Y[0, 1]
        return Hamiltonian(Operator(H, "hermitian"))

    def initial_state(self) -> StateVector:
        amps = np.zeros(self.dim, dtype=np.complex128)
        for k in range(self.outcomes):
            amps[self._index(0, k)] = self.coefficients[k]
        return StateVector(amps)

    def final_state(self) -> StateVector:
        amps = np.zeros(self.dim, dtype=np.complex128)
        for k in range(self.outcomes):
            amps[self._index(k + 1, k)] = self.coefficients[k]
        return StateVector(amps)

    def state_at(self, t: float) -> StateVector:
        U = self.hamiltonian.unitary(t)
        return StateVector(U @ self.initial_state().amplitudes)


def ideal_measurement_state(m: IdealMeasurementModel, t: float) -> StateVector:
    return m.state_at(t)


def rabi_propagator_reference(omega: float, t: float) -> Operator:
    """Closed form ``cos(wt) I - i sin(wt) sigma_x`` of ``exp(-i w sigma_x t)``."""
    wt = omega * t
    return Operator(np.cos(wt) * np.eye(2) - 1j * np.sin(wt) * SIGMA_X, "unitary")


@dataclass(frozen=True, eq=False)
class RabiModel:
    """A single qubit observer driven by ``omega sigma_x``; trivial environment."""

    omega: float = 1.0

    dim = 2

    @cached_property
    def factorization(self) -> Factorization:
        return Factorization(2, 1)

    @cached_property
    def hamiltonian(self) -> Hamiltonian:
        return Hamiltonian(Operator(self.omega * SIGMA_X, "hermitian"))

    def initial_state(self) -> StateVector:
        return StateVector([1.0, 0.0])

    def state_at(self, t: float) -> StateVector:
        return StateVector(rabi_propagator_reference(self.omega, t).matrix @ self.initial_state().amplitudes)


def random_state(rng: np.random.Generator, dim: int) -> StateVector:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int) -> Operator:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Operator((z + z.conj().T) / 2, "hermitian")


def hamiltonian_for_unitary(U: np.ndarray, dt: float = 1.0) -> Operator:
    """A Hermitian ``H`` with ``exp(-i H dt) = U`` (principal branch)."""
    # complex Schur form of a normal matrix is diagonal, with unitary Z
    T, Z = scipy.linalg.schur(np.asarray(U, dtype=np.complex128), output="complex")
    H = (Z * (-np.angle(np.diag(T)) / dt)) @ Z.conj().T
    return Operator((H + H.conj().T) / 2, "hermitian")


@dataclass(frozen=True, eq=False)
class ConsistentModel:
    psi0: StateVector
    H: Operator
    factorization: Factorization
    N: int
    dt: float


def random_consistent_model(
    rng: np.random.Generator, dim_S: int, dim_E: int, N: int = 0, dt: float = 1.0
) -> ConsistentModel:
    """Random state and Hamiltonian meeting the parallel-component condition.

    Writes ``psi0 = a + b`` with ``a = (Pi_N (x) I) psi0`` and picks target
    images ``a' = sum_m |eta_m> chi_m`` and ``b' = sum_m lambda_m |eta_m> chi_m``
    with ``sum_m lambda_m |chi_m|^2 = 0`` (so ``a'`` and ``b'`` stay
    orthogonal).  A unitary with ``U a = a'``, ``U b = b'`` then makes every
    component of ``U psi0`` parallel to the matching component of
    ``U a``, for the step ``t0 -> t0 + dt``.
    """
    if dim_S < 2:
        raise DimMismatch("need at least two experiences")
    f = Factorization(dim_S, dim_E)
    d = f.dim
    psi = random_state(rng, d).amplitudes
    a = f.project(psi, N)
    b = psi - a
    na, nb = np.linalg.norm(a), np.linalg.norm(b)

    chi = rng.normal(size=(dim_S, dim_E)) + 1j * rng.normal(size=(dim_S, dim_E))
    chi *= na / np.linalg.norm(chi)
    w = np.einsum("ij,ij->i", chi.conj(), chi).real
    lam = rng.normal(size=dim_S) + 1j * rng.normal(size=dim_S)
    lam -= np.dot(lam, w) / w.sum()
    lam *= nb / np.sqrt(np.dot(np.abs(lam) ** 2, w))

    a_img = chi.reshape(-1)
    b_img = (lam[:, None] * chi).reshape(-1)

    src = _complete_basis(rng, [a / na, b / nb])
    dst = _complete_basis(rng, [a_img / na, b_img / nb])
    U = dst @ src.conj().T
    return ConsistentModel(StateVector(psi), hamiltonian_for_unitary(U, dt), f, N, dt)


def _complete_basis(rng: np.random.Generator, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Unitary whose leading columns are the given orthonormal vectors."""
    d = vectors[0].size
    k = len(vectors)
    fill = rng.normal(size=(d, d - k)) + 1j * rng.normal(size=(d, d - k))
    q, _ = np.linalg.qr(np.column_stack(list(vectors) + [fill]))
    # QR may flip phases of the leading columns; restore them exactly
    for i, v in enumerate(vectors):
        q[:, i] *= np.vdot(q[:, i], v) / abs(np.vdot(q[:, i], v))
    return q

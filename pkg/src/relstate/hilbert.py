"""Finite-dimensional complex Hilbert spaces.

States are immutable wrappers around complex128 numpy vectors, operators
carry a role tag (hermitian, unitary, projector, general) that is checked
at construction, and a :class:`Factorization` declares how the universal
space splits into an observer factor and the rest of the world.

Tensor products always put the observer (``S``) factor first, so the
amplitude of ``|i>|j>`` sits at flat index ``i * dim_E + j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimMismatch, IoFormat, NotNormalized, RoleError, ZeroVector

TOL = 1e-9
PRUNE_EPSILON = 1e-12

ROLES = ("hermitian", "unitary", "projector", "general")

ArrayLike = Union[Sequence[complex], np.ndarray]


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized state ``|psi>``.

    Unnormalized vectors (branch components) are handled as plain numpy
    arrays; anything wrapped in this class has unit norm within ``TOL``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise DimMismatch(f"state must be a nonempty 1-d sequence, got shape {amps.shape}")
        sq = float(np.vdot(amps, amps).real)
        if abs(sq - 1.0) > TOL:
            raise NotNormalized(f"squared norm {sq!r} differs from 1 by more than {TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.amplitudes
        return self.amplitudes.astype(dtype)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"StateVector(dim={self.dim}, amplitudes={np.array2string(self.amplitudes, precision=4)})"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StateVector":
        try:
            dim = data["dim"]
            amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise IoFormat(f"malformed state snapshot: {exc}") from exc
        if not isinstance(dim, int) or dim != amps.size:
            raise IoFormat(f"snapshot dim {dim!r} does not match {amps.size} amplitudes")
        try:
            return cls(amps)
        except NotNormalized as exc:
            raise IoFormat(str(exc)) from exc


def make_state(amplitudes: ArrayLike, normalize: bool = False) -> StateVector:
    """Build a :class:`StateVector`.

    Args:
        amplitudes: Nonempty sequence of complex amplitudes.
        normalize: Rescale by ``1/norm`` instead of insisting on unit norm.

    Raises:
        ZeroVector: ``normalize`` is set and the vector is zero.
        NotNormalized: ``normalize`` is off and the norm is not 1.
    """
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.ndim != 1 or amps.size == 0:
        raise DimMismatch(f"expected a nonempty 1-d sequence, got shape {amps.shape}")
    if normalize:
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ZeroVector("cannot normalize the zero vector")
        amps = amps / norm
    return StateVector(amps)


def basis_state(dim: int, index: int) -> StateVector:
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def as_vector(v) -> np.ndarray:
    """Return the raw complex array behind a state or array-like."""
    if isinstance(v, StateVector):
        return v.amplitudes
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise DimMismatch(f"expected a vector, got shape {arr.shape}")
    return arr


def tensor(a, b) -> StateVector | np.ndarray:
    """Kronecker product ``a (x) b`` with ``a`` as the leading factor.

    Two :class:`StateVector` inputs give a :class:`StateVector`; if either
    side is a raw array the result is a raw array.
    """
    out = np.kron(as_vector(a), as_vector(b))
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(out)
    return out


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix with a checked role."""

    matrix: np.ndarray
    role: str = "general"

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimMismatch(f"operator must be a nonempty square matrix, got shape {m.shape}")
        if self.role not in ROLES:
            raise RoleError(f"unknown role {self.role!r}; expected one of {ROLES}")
        _check_role(m, self.role)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.role)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix)
        return apply(self, other)


def _check_role(m: np.ndarray, role: str) -> None:
    if role == "general":
        return
    eye = np.eye(m.shape[0])
    if role == "hermitian":
        err = np.max(np.abs(m - m.conj().T))
    elif role == "unitary":
        err = np.max(np.abs(m.conj().T @ m - eye))
    else:
        err = max(np.max(np.abs(m @ m - m)), np.max(np.abs(m - m.conj().T)))
    if err > TOL:
        raise RoleError(f"matrix is not {role} (deviation {err:.3e} > {TOL})")


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim), "projector")


def projector_onto(vectors: Iterable) -> Operator:
    """Orthogonal projector onto the span of ``vectors``.

    The vectors need not be orthonormal; an orthonormal basis of their span
    is extracted with an SVD.
    """
    cols = np.column_stack([as_vector(v) for v in vectors])
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > TOL * max(1.0, s[0] if s.size else 0.0)))
    q = u[:, :rank]
    return Operator(q @ q.conj().T, "projector")


def apply(op, v) -> np.ndarray:
    """Matrix-vector product; always returns a raw (possibly unnormalized) array."""
    m = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=np.complex128)
    vec = as_vector(v)
    if m.shape[1] != vec.size:
        raise DimMismatch(f"operator of dim {m.shape[1]} applied to vector of dim {vec.size}")
    return m @ vec


def projector_expectation(proj: Operator, psi: StateVector) -> float:
    """Degree of truth ``<psi|P|psi>`` of the description with projector ``P``."""
    if not isinstance(proj, Operator) or proj.role != "projector":
        raise RoleError("projector_expectation needs an Operator with role 'projector'")
    if not isinstance(psi, StateVector):
        psi = StateVector(psi)
    if proj.dim != psi.dim:
        raise DimMismatch(f"projector dim {proj.dim} != state dim {psi.dim}")
    val = np.vdot(psi.amplitudes, proj.matrix @ psi.amplitudes)
    if abs(val.imag) > TOL:
        raise RoleError(f"expectation has imaginary part {val.imag:.3e}")
    return min(1.0, max(0.0, float(val.real)))


@dataclass(frozen=True, eq=False)
class Factorization:
    """Declared split ``H_U = H_S (x) H'`` plus an experience basis of ``H_S``.

    ``experience_basis`` holds the basis vectors ``eta_n`` as the *columns*
    of a ``dim_S x dim_S`` unitary matrix; it defaults to the computational
    basis.
    """

    dim_S: int
    dim_E: int
    experience_basis: np.ndarray = field(default=None)

    def __post_init__(self):
        if int(self.dim_S) < 1 or int(self.dim_E) < 1:
            raise DimMismatch(f"factor dimensions must be positive, got {self.dim_S}, {self.dim_E}")
        basis = self.experience_basis
        if basis is None:
            basis = np.eye(self.dim_S)
        else:
            basis = np.asarray(basis, dtype=np.complex128)
            if basis.ndim == 2 and basis.shape[0] == self.dim_S and basis.shape[1] == self.dim_S:
                pass
            else:
                # accept a sequence of basis vectors
                basis = np.column_stack([as_vector(v) for v in self.experience_basis])
            if basis.shape != (self.dim_S, self.dim_S):
                raise DimMismatch(
                    f"experience basis must have {self.dim_S} vectors of dim {self.dim_S}, "
                    f"got shape {basis.shape}"
                )
            gram = basis.conj().T @ basis
            err = np.max(np.abs(gram - np.eye(self.dim_S)))
            if err > TOL:
                raise NotNormalized(f"experience basis is not orthonormal (Gram deviation {err:.3e})")
        object.__setattr__(self, "dim_S", int(self.dim_S))
        object.__setattr__(self, "dim_E", int(self.dim_E))
        object.__setattr__(self, "experience_basis", _frozen(basis))

    @property
    def dim(self) -> int:
        return self.dim_S * self.dim_E

    def eta(self, n: int) -> StateVector:
        return StateVector(self.experience_basis[:, n])

    def check_index(self, n: int) -> int:
        if not 0 <= n < self.dim_S:
            raise IndexError(f"experience index {n} outside 0..{self.dim_S - 1}")
        return n

    def check_dim(self, v) -> np.ndarray:
        vec = as_vector(v)
        if vec.size != self.dim:
            raise DimMismatch(f"vector of dim {vec.size} does not fit factorization {self.dim_S}x{self.dim_E}")
        return vec

    def components(self, v) -> np.ndarray:
        """All relative components ``Phi_n = (<eta_n| (x) I) v`` as rows."""
        mat = self.check_dim(v).reshape(self.dim_S, self.dim_E)
        return self.experience_basis.conj().T @ mat

    def component(self, v, n: int) -> np.ndarray:
        self.check_index(n)
        mat = self.check_dim(v).reshape(self.dim_S, self.dim_E)
        return self.experience_basis[:, n].conj() @ mat

    def embed(self, n: int, phi) -> np.ndarray:
        """``|eta_n>|phi>`` as a flat vector."""
        self.check_index(n)
        return np.kron(self.experience_basis[:, n], as_vector(phi))

    def project(self, v, n: int) -> np.ndarray:
        """``(Pi_n (x) I) v``."""
        return self.embed(n, self.component(v, n))

    def projector(self, n: int) -> Operator:
        """``Pi_n (x) I`` as an operator on the universal space."""
        self.check_index(n)
        eta = self.experience_basis[:, n]
        return Operator(np.kron(np.outer(eta, eta.conj()), np.eye(self.dim_E)), "projector")


def save_snapshot(state: StateVector, path) -> None:
    """Write ``{"dim": d, "amplitudes": [[re, im], ...]}``.

    Floats go through ``repr``-exact JSON encoding, so load(save(x)) is
    bit-identical for finite doubles.
    """
    if not isinstance(state, StateVector):
        state = StateVector(state)
    if not np.all(np.isfinite(state.amplitudes)):
        raise IoFormat("cannot snapshot non-finite amplitudes")
    Path(path).write_text(json.dumps(state.to_dict()) + "\n")


def load_snapshot(path, expected_dim: int | None = None) -> StateVector:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IoFormat(f"cannot read snapshot {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise IoFormat(f"snapshot {path} is not a JSON object")
    state = StateVector.from_dict(data)
    if expected_dim is not None and state.dim != expected_dim:
        raise DimMismatch(f"snapshot has dim {state.dim}, expected {expected_dim}")
    return state


def norm(v) -> float:
    return math.sqrt(float(np.vdot(as_vector(v), as_vector(v)).real))

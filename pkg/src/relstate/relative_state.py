"""Branch decomposition of a universal state over an experience basis.

Given ``H_U = H_S (x) H'`` and an orthonormal basis ``eta_n`` of ``H_S``,
every state splits uniquely as ``sum_n |eta_n>|Phi_n>``.  The squared norm
of ``Phi_n`` is the branch's degree of reality; branches below
``PRUNE_EPSILON`` are flagged as not occurring.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBranch
from .hilbert import PRUNE_EPSILON, Factorization, StateVector


@dataclass(frozen=True)
class Branch:
    n: int
    component: np.ndarray
    weight: float

    @property
    def real_flag(self) -> bool:
        return self.weight >= PRUNE_EPSILON


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    time: float
    factorization: Factorization
    branches: tuple[Branch, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.branches])

    def reconstruct(self) -> np.ndarray:
        f = self.factorization
        return sum(f.embed(b.n, b.component) for b in self.branches)

    def rows(self) -> list[dict]:
        return [{"n": b.n, "weight": b.weight, "real_flag": b.real_flag} for b in self.branches]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "weight", "real_flag"])
        for row in self.rows():
            writer.writerow([row["n"], repr(row["weight"]), str(row["real_flag"]).lower()])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"time": self.time, "branches": self.rows()}, indent=2)


def decompose(psi: StateVector, f: Factorization, time: float = 0.0) -> BranchDecomposition:
    """Split ``psi`` into relative components ``Phi_n = (<eta_n| (x) I) psi``."""
    if not isinstance(psi, StateVector):
        psi = StateVector(psi)
    comps = f.components(psi)
    weights = np.einsum("ij,ij->i", comps.conj(), comps).real
    branches = tuple(
        Branch(n, comps[n].copy(), float(weights[n])) for n in range(f.dim_S)
    )
    for b in branches:
        b.component.flags.writeable = False
    return BranchDecomposition(float(time), f, branches)


def relative_state(d: BranchDecomposition, n: int) -> StateVector:
    """Normalized relative state of the rest of the world given experience ``n``.

    Raises:
        EmptyBranch: the branch's weight is at or below ``PRUNE_EPSILON``.
    """
    d.factorization.check_index(n)
    b = d.branches[n]
    if b.weight <= PRUNE_EPSILON:
        raise EmptyBranch(f"experience {n} does not occur at t={d.time} (weight {b.weight:.3e})")
    return StateVector(b.component / np.sqrt(b.weight))


def observer_count(psi: StateVector, f: Factorization) -> tuple[float, float]:
    """Expectation and variance of the observer-number operator.

    The operator assigns eigenvalue 1 to every ``|eta_n>|Phi>``, i.e. it is
    ``sum_n Pi_n (x) I``, built here explicitly rather than assumed to be
    the identity.
    """
    vec = f.check_dim(psi)
    A = sum(f.projector(n).matrix for n in range(f.dim_S))
    Av = A @ vec
    mean = float(np.vdot(vec, Av).real)
    second = float(np.vdot(Av, Av).real)
    return mean, max(0.0, second - mean**2)

"""Truth values of future-tense experience statements.

From the perspective of an observer who experiences ``eta_N`` at ``t0``,
the statement "my experience at ``t > t0`` will be ``eta_m``" gets the
truth value

    |<Psi(t)| (Pi_m (x) I) U(t, t0) (Pi_N (x) I) |Psi(t0)>|^2
    ---------------------------------------------------------------
    <Psi(t)|(Pi_m (x) I)|Psi(t)> <Psi(t0)|(Pi_N (x) I)|Psi(t0)>

with ``U(t, t0) = exp(-i H (t - t0))``.  Writing ``Phi_m`` for the
``m``-component of ``Psi(t)`` and ``chi_m`` for the ``m``-component of the
evolved perspective branch, the value is
``|<Phi_m|chi_m>|^2 / (|Phi_m|^2 |Phi_N(t0)|^2)``.  By Cauchy-Schwarz it is
at most ``|chi_m|^2 / |Phi_N(t0)|^2`` and these bounds sum to one, so a
truth table never sums above one; it sums to exactly one when every
``chi_m`` is parallel to ``Phi_m``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, DeadEnd, DimMismatch, EmptyPerspective, SingularBranch
from .evolution import propagator_between
from .hilbert import PRUNE_EPSILON, TOL, Factorization, StateVector

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Perspective:
    """Internal context: experience ``N`` at ``t0`` plus a memory record.

    ``record`` maps past times ``t <= t0`` to the experience index that was
    had then.  If omitted it is just ``{t0: N}``.
    """

    factorization: Factorization
    N: int
    t0: float
    record: Mapping[float, int] = field(default=None)

    def __post_init__(self):
        f = self.factorization
        f.check_index(self.N)
        rec = {float(self.t0): int(self.N)} if self.record is None else {
            float(t): int(n) for t, n in self.record.items()
        }
        if rec.get(float(self.t0)) != self.N:
            raise ValueError(f"record must map t0={self.t0} to N={self.N}, got {rec.get(float(self.t0))}")
        for t, n in rec.items():
            if t > self.t0:
                raise ValueError(f"record time {t} lies after t0={self.t0}")
            f.check_index(n)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "record", dict(sorted(rec.items())))


@dataclass(frozen=True)
class _TruthTerms:
    numerators: np.ndarray  # |<Phi_m|chi_m>|^2
    branch_weights: np.ndarray  # |Phi_m(t)|^2
    chi_weights: np.ndarray  # |chi_m|^2
    perspective_weight: float  # |Phi_N(t0)|^2


def _terms(psi0, dynamics, p: Perspective, t: float) -> _TruthTerms:
    f = p.factorization
    vec = f.check_dim(psi0)
    U = propagator_between(dynamics, p.t0, t)
    if U.shape != (f.dim, f.dim):
        raise DimMismatch(f"dynamics of dim {U.shape[0]} vs factorization of dim {f.dim}")
    branch_N = f.project(vec, p.N)
    w_N = float(np.vdot(branch_N, branch_N).real)
    if w_N <= PRUNE_EPSILON:
        raise EmptyPerspective(f"experience {p.N} has weight {w_N:.3e} at t0={p.t0}")
    phi = f.components(U @ vec)
    chi = f.components(U @ branch_N)
    overlaps = np.einsum("ij,ij->i", phi.conj(), chi)
    return _TruthTerms(
        numerators=np.abs(overlaps) ** 2,
        branch_weights=np.einsum("ij,ij->i", phi.conj(), phi).real,
        chi_weights=np.einsum("ij,ij->i", chi.conj(), chi).real,
        perspective_weight=w_N,
    )


def _values(terms: _TruthTerms) -> np.ndarray:
    w_N = terms.perspective_weight
    out = np.zeros_like(terms.numerators)
    for m, (num, w_m) in enumerate(zip(terms.numerators, terms.branch_weights)):
        if w_m <= PRUNE_EPSILON:
            # Cauchy-Schwarz: num <= w_m |chi_m|^2 <= w_m w_N, so 0/0 is the only consistent case
            if num > PRUNE_EPSILON * w_N * (1.0 + TOL):
                raise SingularBranch(f"branch {m} vanishes but numerator is {num:.3e}")
            continue
        q = num / (w_m * w_N)
        if q > 1.0 + TOL:
            raise ContractViolation(f"truth value {q!r} for m={m} exceeds 1 + {TOL}")
        out[m] = min(1.0, max(0.0, q))
    return out


def _check_future(p: Perspective, t: float) -> None:
    if not t > p.t0:
        raise ValueError(f"future time t={t} must exceed t0={p.t0}")


def future_truth_value(psi0, H, p: Perspective, m: int, t: float) -> float:
    """Truth value, held at ``p.t0`` by experience ``p.N``, that experience ``m`` occurs at ``t``.

    Args:
        psi0: Universal state at ``p.t0``.
        H: Hermitian Hamiltonian, or a dynamics object with ``propagator(t0, t)``.
        p: The perspective.
        m: Target experience index.
        t: Future time, strictly after ``p.t0``.

    Raises:
        EmptyPerspective: ``Phi_N(t0)`` vanishes.
        SingularBranch: ``Phi_m(t)`` vanishes but the numerator does not.
        ContractViolation: the quotient exceeds ``1 + 1e-9``.
    """
    _check_future(p, t)
    p.factorization.check_index(m)
    return float(_values(_terms(psi0, H, p, t))[m])


def future_truth_table(psi0, H, p: Perspective, t: float) -> list[tuple[int, float]]:
    """``[(m, truth value)]`` for every experience index ``m``."""
    _check_future(p, t)
    values = _values(_terms(psi0, H, p, t))
    total = float(values.sum())
    if total > 1.0 + TOL:
        raise ContractViolation(f"truth table sums to {total!r} > 1 + {TOL}")
    return [(m, float(v)) for m, v in enumerate(values)]


def consistency_defect(psi0, H, p: Perspective, t: float) -> float:
    """``1 - sum_m`` of the truth table; zero for weakly consistent dynamics."""
    table = future_truth_table(psi0, H, p, t)
    defect = 1.0 - sum(v for _, v in table)
    if defect < -TOL:
        raise ContractViolation(f"consistency defect {defect!r} is negative")
    return max(0.0, defect)


def chain_value(psi0, H, p: Perspective, events: Sequence[tuple[int, float]]) -> float:
    """Class-operator history weight for future ``events`` ``[(m_1, t_1), ...]``.

    ``|Pi_{m_k} U(t_k, t_{k-1}) ... Pi_{m_1} U(t_1, t0) Pi_N psi0|^2 / |Pi_N psi0|^2``.
    Event times must be strictly increasing and after ``p.t0``.
    """
    f = p.factorization
    vec = f.project(f.check_dim(psi0), p.N)
    w_N = float(np.vdot(vec, vec).real)
    if w_N <= PRUNE_EPSILON:
        raise EmptyPerspective(f"experience {p.N} has weight {w_N:.3e} at t0={p.t0}")
    t_prev = p.t0
    for m, t in events:
        if not t > t_prev:
            raise ValueError(f"event times must increase strictly after t0; got {t} after {t_prev}")
        vec = f.project(propagator_between(H, t_prev, t) @ vec, m)
        t_prev = t
    return min(1.0, max(0.0, float(np.vdot(vec, vec).real) / w_N))


def truth_table_csv(table: Sequence[tuple[int, float]], defect: float) -> str:
    """CSV ``m,truth_value`` rows followed by ``sum`` and ``consistency_defect`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "truth_value"])
    for m, v in table:
        writer.writerow([m, repr(v)])
    writer.writerow(["sum", repr(sum(v for _, v in table))])
    writer.writerow(["consistency_defect", repr(defect)])
    return buf.getvalue()


def truth_table_json(table: Sequence[tuple[int, float]], defect: float, t: float | None = None) -> str:
    doc = {
        "table": [{"m": m, "truth_value": v} for m, v in table],
        "sum": sum(v for _, v in table),
        "consistency_defect": defect,
    }
    if t is not None:
        doc = {"t": t, **doc}
    return json.dumps(doc, indent=2)


# --- sampled memory records -------------------------------------------------


@dataclass(frozen=True)
class SampledRecord:
    """One sampled history of experiences.

    ``table_sums[k]`` is the raw sum of the truth table used for step ``k``
    (1.0 for the initial Born draw); values below one mean the sampler had
    to renormalize over an inconsistent table.
    """

    seed: int
    record: dict
    table_sums: tuple

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "generator": "numpy PCG64",
                "record": {repr(t): n for t, n in self.record.items()},
                "table_sums": list(self.table_sums),
            },
            indent=2,
        )


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    if idx >= probs.size:
        # u rounded up to the total; take the last index that can occur
        idx = int(np.flatnonzero(probs)[-1])
    return idx


class RecordSampler:
    """Reusable sampler of memory records along a fixed time grid.

    The universal state at every grid time and the transition tables for
    each ``(previous index, step)`` pair are computed once and cached, so
    drawing many trajectories with different seeds is cheap.

    Randomness comes from ``numpy.random.Generator(PCG64(seed))``; one
    uniform double is consumed per step, so records are reproducible across
    platforms for a given seed.
    """

    def __init__(self, psi0, H, f: Factorization, times: Sequence[float]):
        times = [float(t) for t in times]
        if not times:
            raise ValueError("need at least one time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        self.H = H
        self.factorization = f
        self.times = times
        vec = f.check_dim(psi0)
        self._states = [StateVector(vec)]
        for a, b in zip(times, times[1:]):
            self._states.append(StateVector(propagator_between(H, a, b) @ self._states[-1].amplitudes))
        comps = f.components(vec)
        w0 = np.einsum("ij,ij->i", comps.conj(), comps).real
        w0 = np.where(w0 > PRUNE_EPSILON, w0, 0.0)
        if w0.sum() == 0.0:
            raise DeadEnd(f"no experience occurs at t={times[0]}")
        self._initial = w0
        self._tables: dict[tuple[int, int], tuple[np.ndarray, float]] = {}

    def transition(self, k: int, n: int) -> tuple[np.ndarray, float]:
        """Renormalized table for step ``times[k] -> times[k+1]`` from experience ``n``."""
        key = (k, n)
        if key not in self._tables:
            p = Perspective(self.factorization, n, self.times[k])
            table = np.array([v for _, v in future_truth_table(self._states[k], self.H, p, self.times[k + 1])])
            s = float(table.sum())
            if s <= 0.0:
                raise DeadEnd(f"all transitions from {n} at t={self.times[k]} have truth value 0")
            if s < 1.0 - TOL:
                log.info("step %d from %d: table sums to %.12g, renormalizing", k, n, s)
            self._tables[key] = (table / s, s)
        return self._tables[key]

    def sample(self, seed: int) -> SampledRecord:
        rng = np.random.Generator(np.random.PCG64(seed))
        n = _draw(rng, self._initial)
        record = {self.times[0]: n}
        sums = [float(self._initial.sum())]
        for k in range(len(self.times) - 1):
            probs, s = self.transition(k, n)
            n = _draw(rng, probs)
            record[self.times[k + 1]] = n
            sums.append(s)
        return SampledRecord(int(seed), record, tuple(sums))


def sample_record(psi0, H, f: Factorization, times: Sequence[float], seed: int) -> SampledRecord:
    """Sample one memory record ``{time: experience index}``.

    The first index is drawn with the branch weights at ``times[0]``; each
    later one with the future truth table from the perspective of the
    previously drawn index, restarted at the previous grid time.
    ``psi0`` is the universal state at ``times[0]``.
    """
    return RecordSampler(psi0, H, f, times).sample(seed)

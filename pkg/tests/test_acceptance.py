"""Acceptance gate.

Each criterion is one test that prints a single ``PASS``/``FAIL`` line with
its measured error and runtime, then asserts.  Run standalone with::

    pytest tests/test_acceptance.py -v -s
"""

import math
import time
from pathlib import Path

import numpy as np

from oracles import chain
from relstate.cli import main as cli_main
from relstate.evolution import Hamiltonian, propagator
from relstate.future_truth import Perspective, RecordSampler, future_truth_table
from relstate.hilbert import Factorization
from relstate.models import (
    SIGMA_X,
    CatModel,
    IdealMeasurementModel,
    rabi_propagator_reference,
    random_consistent_model,
    random_hermitian,
    random_state,
)
from relstate.relative_state import decompose, observer_count
from relstate.temporal_logic import And, E, Not, Or, disjoint_histories, evaluate, history_truth

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def report(capsys, number, name, ok, detail, elapsed, budget=None):
    timing = f"{elapsed:.2f}s" + (f" (limit {budget:g}s)" if budget else "")
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} [{name}]: {detail}; {timing}")


def test_criterion_1_cat_weight_law(capsys):
    start = time.perf_counter()
    cat = CatModel(gamma=0.5, bins=10, t_max=2.0)
    grid = [round(0.2 * k, 10) for k in range(11)]
    err = max(abs(decompose(cat.state_at(t), cat.factorization).weights[0] - math.exp(-2 * 0.5 * t)) for t in grid)
    elapsed = time.perf_counter() - start
    ok = err < 1e-9 and elapsed < 1.0
    report(capsys, 1, "cat weight law", ok, f"max |w_alive - e^-2gt| = {err:.2e}", elapsed, 1)
    assert ok


def test_criterion_2_one_observer(capsys, rng):
    start = time.perf_counter()
    sum_err = count_err = 0.0
    for _ in range(200):
        dS, dE = (int(d) for d in rng.integers(2, 9, size=2))
        psi = random_state(rng, dS * dE)
        f = Factorization(dS, dE)
        sum_err = max(sum_err, abs(decompose(psi, f).weights.sum() - 1))
        mean, var = observer_count(psi, f)
        count_err = max(count_err, abs(mean - 1), abs(var))
    elapsed = time.perf_counter() - start
    ok = sum_err < 1e-9 and count_err < 1e-9 and elapsed < 5.0
    report(capsys, 2, "one observer", ok, f"weight-sum err {sum_err:.2e}, count err {count_err:.2e}", elapsed, 5)
    assert ok


def test_criterion_3_born_recovery(capsys, rng):
    start = time.perf_counter()
    cases = [np.sqrt([0.25, 0.75]).astype(complex)]
    for _ in range(100):
        k = int(rng.integers(1, 6))
        c = rng.normal(size=k) + 1j * rng.normal(size=k)
        cases.append(c / np.linalg.norm(c))
    err = 0.0
    for c in cases:
        im = IdealMeasurementModel(tuple(c))
        p = Perspective(im.factorization, 0, 0.0)
        table = future_truth_table(im.initial_state(), im.hamiltonian, p, im.T)
        expected = np.concatenate([[0.0], np.abs(c) ** 2])  # the "ready" record is left empty
        err = max(err, float(np.max(np.abs(np.array([v for _, v in table]) - expected))))
    elapsed = time.perf_counter() - start
    ok = err < 1e-9 and elapsed < 5.0
    report(capsys, 3, "Born recovery", ok, f"{len(cases)} models, max err {err:.2e}", elapsed, 5)
    assert ok


def test_criterion_4_subadditivity_and_consistency(capsys, rng):
    start = time.perf_counter()
    f = Factorization(4, 2)
    worst_excess = -np.inf
    for _ in range(500):
        H = random_hermitian(rng, 8)
        psi = random_state(rng, 8)
        p = Perspective(f, int(rng.integers(4)), 0.0)
        total = sum(v for _, v in future_truth_table(psi, H, p, float(rng.uniform(0.1, 5.0))))
        worst_excess = max(worst_excess, total - 1)
    sum_err = oracle_err = 0.0
    for _ in range(100):
        cm = random_consistent_model(rng, 4, 2, N=int(rng.integers(4)), dt=float(rng.uniform(0.2, 2.0)))
        p = Perspective(cm.factorization, cm.N, 0.0)
        table = future_truth_table(cm.psi0, cm.H, p, cm.dt)
        sum_err = max(sum_err, abs(sum(v for _, v in table) - 1))
        for m, v in table:
            ref = chain(cm.psi0.amplitudes, cm.H.matrix, 4, 2, cm.N, 0.0, [(m, cm.dt)])
            oracle_err = max(oracle_err, abs(v - ref))
    elapsed = time.perf_counter() - start
    ok = worst_excess <= 1e-9 and sum_err < 1e-9 and oracle_err < 1e-9 and elapsed < 30.0
    report(
        capsys, 4, "sub-additivity and consistency", ok,
        f"max(sum-1) random {worst_excess:.2e}; consistent sum err {sum_err:.2e}, oracle err {oracle_err:.2e}",
        elapsed, 30,
    )
    assert ok


def test_criterion_5_evolution_fidelity(capsys):
    start = time.perf_counter()
    omega = 1.0
    H = omega * SIGMA_X
    rabi_err = max(
        float(np.max(np.abs(propagator(H, t).U.matrix - rabi_propagator_reference(omega, t).matrix)))
        for t in np.linspace(0.0, 4 * np.pi, 401)
    )
    rng = np.random.default_rng(5)
    step = Hamiltonian(random_hermitian(rng, 6)).unitary(0.01)
    psi = random_state(rng, 6).amplitudes
    drift = 0.0
    for _ in range(1000):
        psi = step @ psi
        drift = max(drift, abs(np.linalg.norm(psi) - 1))
    elapsed = time.perf_counter() - start
    ok = rabi_err < 1e-10 and drift < 1e-12 and elapsed < 5.0
    report(capsys, 5, "evolution fidelity", ok, f"Rabi err {rabi_err:.2e}, norm drift {drift:.2e}", elapsed, 5)
    assert ok


def test_criterion_6_sampled_cat_statistics(capsys):
    start = time.perf_counter()
    gamma, n_traj = 0.5, 10_000
    cat = CatModel(gamma=gamma, bins=10, t_max=2.0)
    sampler = RecordSampler(cat.initial_state(), cat, cat.factorization, cat.bin_edges)
    checks = (0.4, 1.0, 2.0)
    alive = dict.fromkeys(checks, 0)
    for seed in range(n_traj):
        rec = sampler.sample(seed).record
        for t in checks:
            alive[t] += rec[t] == 0
    worst = 0.0
    parts = []
    for t in checks:
        p = math.exp(-2 * gamma * t)
        z = abs(alive[t] / n_traj - p) / math.sqrt(p * (1 - p) / n_traj)
        worst = max(worst, z)
        parts.append(f"t={t}: {alive[t] / n_traj:.4f} vs {p:.4f} ({z:.2f} se)")
    elapsed = time.perf_counter() - start
    ok = worst < 3.0 and elapsed < 60.0
    report(capsys, 6, "sampled collapse statistics", ok, "; ".join(parts), elapsed, 60)
    assert ok


def _random_prop(rng, times, depth=0):
    if depth >= 3 or rng.random() < 0.35:
        return E(int(rng.integers(4)), float(rng.choice(times)))
    kind = rng.integers(3)
    if kind == 0:
        return Not(_random_prop(rng, times, depth + 1))
    op = And if kind == 1 else Or
    return op(_random_prop(rng, times, depth + 1), _random_prop(rng, times, depth + 1))


def test_criterion_7_logic_laws(capsys, rng):
    start = time.perf_counter()
    model = IdealMeasurementModel((math.sqrt(0.2), math.sqrt(0.3), math.sqrt(0.5)))
    psi0, H = model.initial_state(), model.hamiltonian
    p = Perspective(model.factorization, 0, 0.0, {-1.0: 0, 0.0: 0})
    # At whole multiples of T every sector sits on one record, so histories over
    # these times do not interfere; mid-transfer times (0.5 T) would.
    all_times, past_times = (-1.0, 0.0, 1.0, 2.0), (-1.0, 0.0)

    complement_err = expanded_err = 0.0
    for _ in range(200):
        a = _random_prop(rng, all_times)
        va, vn = evaluate(a, psi0, H, p), evaluate(Not(a), psi0, H, p)
        complement_err = max(complement_err, abs(va + vn - 1))
        # same identity with the negation expanded into explicit histories
        vn_hist = sum(history_truth(h, psi0, H, p) for h in disjoint_histories(Not(a), 4))
        expanded_err = max(expanded_err, abs(va + vn_hist - 1))

    disj_err = 0.0
    for t in (0.5, 1.0, 2.0):
        everything = Or(Or(E(0, t), E(1, t)), Or(E(2, t), E(3, t)))
        disj_err = max(disj_err, abs(evaluate(everything, psi0, H, p) - 1))
    for _ in range(20):
        cm = random_consistent_model(rng, 3, 3, N=int(rng.integers(3)), dt=1.0)
        q = Perspective(cm.factorization, cm.N, 0.0)
        everything = Or(Or(E(0, 1.0), E(1, 1.0)), E(2, 1.0))
        disj_err = max(disj_err, abs(evaluate(everything, cm.psi0, cm.H, q) - 1))

    non_classical = 0
    for _ in range(200):
        v = evaluate(_random_prop(rng, past_times), psi0, H, p)
        non_classical += v not in (0.0, 1.0)

    elapsed = time.perf_counter() - start
    ok = (complement_err < 1e-9 and expanded_err < 1e-9 and disj_err < 1e-9
          and non_classical == 0 and elapsed < 10.0)
    report(
        capsys, 7, "logic laws", ok,
        f"complement err {complement_err:.2e} (expanded {expanded_err:.2e}), "
        f"exhaustive disjunction err {disj_err:.2e}, non-classical past values {non_classical}",
        elapsed, 10,
    )
    assert ok


def test_criterion_8_determinism(capsys, tmp_path):
    start = time.perf_counter()
    configs = sorted(CONFIGS.glob("*.json"))
    mismatched = []
    for cfg in configs:
        outs = []
        for run in ("a", "b"):
            out = tmp_path / cfg.stem / run
            assert cli_main(["--config", str(cfg), "--out", str(out), "--seed", "7", "--plot", "--quiet"]) == 0
            outs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
        if outs[0] != outs[1]:
            mismatched.append(cfg.name)
    elapsed = time.perf_counter() - start
    ok = bool(configs) and not mismatched
    report(capsys, 8, "determinism", ok, f"{len(configs)} bundled configs, mismatched: {mismatched or 'none'}", elapsed)
    assert ok

"""Config-driven command line front end.

Usage::

    relstate --config run.json --out results/ [--seed N] [--plot] [--quiet]

The config is one JSON document.  Complex numbers are ``[re, im]`` pairs
and matrices are row-major nested arrays.  Exit codes: 0 success, 2 bad
config (message carries a ``line:col`` or ``$.key.path`` position), 3 a
numerical contract was violated (a ``diagnostic.json`` dump is written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import future_truth as ft
from . import svg
from .errors import ContractViolation, ParseError, RelStateError
from .evolution import Hamiltonian, energy, propagator_between
from .hilbert import TOL, Factorization, Operator, StateVector, load_snapshot
from .models import CatModel, IdealMeasurementModel, RabiModel
from .relative_state import decompose
from .temporal_logic import evaluate, parse

QUERIES = ("evolve", "branches", "future", "logic", "sample")
MODELS = ("cat", "ideal_measurement", "rabi", "custom")


class ConfigError(ParseError):
    """Config is malformed or inconsistent."""


@dataclass
class CustomModel:
    factorization: Factorization
    hamiltonian: Hamiltonian
    psi0: StateVector

    @property
    def dim(self):
        return self.factorization.dim

    def initial_state(self):
        return self.psi0


@dataclass
class RunConfig:
    model_name: str
    model: Any
    query: str
    times: list
    N: int = 0
    t0: float = 0.0
    record: dict | None = None
    propositions: list = field(default_factory=list)
    samples: int = 1
    seed: int = 0
    initial_state: StateVector | None = None

    @property
    def factorization(self) -> Factorization:
        return self.model.factorization

    @property
    def dynamics(self):
        # the cat supplies its own step unitaries; other models carry a Hamiltonian
        return self.model if isinstance(self.model, CatModel) else self.model.hamiltonian

    def state_at_start(self) -> StateVector:
        return self.initial_state if self.initial_state is not None else self.model.initial_state()


# --- config parsing -----------------------------------------------------------


def _get(doc: dict, key: str, path: str, kind=None, required=True, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"missing required key {key!r}", f"{path}.{key}")
        return default
    value = doc[key]
    # bool is an int subclass but never a valid config number
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool)):
        raise ConfigError(f"{key!r} has wrong type {type(value).__name__}", f"{path}.{key}")
    return value


def _complex(x, path: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ConfigError("expected a number or [re, im] pair", path)


def _vector(xs, path: str) -> np.ndarray:
    if not isinstance(xs, list) or not xs:
        raise ConfigError("expected a nonempty array", path)
    return np.array([_complex(x, f"{path}[{i}]") for i, x in enumerate(xs)], dtype=np.complex128)


def _matrix(rows, path: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ConfigError("expected a nonempty array of rows", path)
    mat = [_vector(r, f"{path}[{i}]") for i, r in enumerate(rows)]
    if any(r.size != len(mat) for r in mat):
        raise ConfigError("matrix must be square", path)
    return np.array(mat)


def _times(doc: dict, path: str) -> list:
    ts = _get(doc, "times", path, list)
    if not ts or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in ts):
        raise ConfigError("times must be a nonempty array of numbers", f"{path}.times")
    ts = [float(t) for t in ts]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ConfigError("times must be strictly increasing", f"{path}.times")
    return ts


def _build_model(doc: dict, base: Path):
    name = _get(doc, "model", "$", str)
    if name not in MODELS:
        raise ConfigError(f"unknown model {name!r}; expected one of {MODELS}", "$.model")
    params = _get(doc, "params", "$", dict, required=False, default={})
    try:
        if name == "cat":
            return name, CatModel(
                gamma=float(_get(params, "gamma", "$.params", (int, float))),
                bins=int(_get(params, "bins", "$.params", int)),
                t_max=float(_get(params, "t_max", "$.params", (int, float))),
            )
        if name == "ideal_measurement":
            coeffs = _vector(_get(params, "coefficients", "$.params", list), "$.params.coefficients")
            T = float(_get(params, "T", "$.params", (int, float), required=False, default=1.0))
            return name, IdealMeasurementModel(tuple(coeffs), T)
        if name == "rabi":
            return name, RabiModel(float(_get(params, "omega", "$.params", (int, float), required=False, default=1.0)))
        dims = _get(params, "dims", "$.params", list)
        if len(dims) != 2 or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims):
            raise ConfigError("dims must be two positive integers [dim_S, dim_E]", "$.params.dims")
        H = _matrix(_get(params, "hamiltonian", "$.params", list), "$.params.hamiltonian")
        if H.shape[0] != dims[0] * dims[1]:
            raise ConfigError(f"hamiltonian is {H.shape[0]}x{H.shape[0]} but dims give {dims[0] * dims[1]}",
                              "$.params.hamiltonian")
        basis = params.get("experience_basis")
        if basis is not None:
            if not isinstance(basis, list) or not basis:
                raise ConfigError("experience_basis must be a list of vectors", "$.params.experience_basis")
            basis = np.column_stack([_vector(v, f"$.params.experience_basis[{i}]") for i, v in enumerate(basis)])
        f = Factorization(dims[0], dims[1], basis)
        psi = _initial_state(doc, params, base, f.dim, required=True)
        return name, CustomModel(f, Hamiltonian(Operator(H, "hermitian")), psi)
    except ConfigError:
        raise
    except RelStateError as exc:
        raise ConfigError(str(exc), "$.params") from exc


def _initial_state(doc, params, base: Path, dim: int, required=False):
    entry = doc.get("initial_state", params.get("initial_state"))
    if entry is None:
        if required:
            raise ConfigError("custom model needs an initial_state", "$.initial_state")
        return None
    if isinstance(entry, dict) and "snapshot" in entry:
        try:
            return load_snapshot(base / entry["snapshot"], expected_dim=dim)
        except RelStateError as exc:
            raise ConfigError(str(exc), "$.initial_state.snapshot") from exc
    vec = _vector(entry, "$.initial_state")
    if vec.size != dim:
        raise ConfigError(f"initial_state has {vec.size} amplitudes, model needs {dim}", "$.initial_state")
    try:
        return StateVector(vec)
    except RelStateError as exc:
        raise ConfigError(str(exc), "$.initial_state") from exc


def load_config(text: str, base: Path = Path("."), seed: int | None = None) -> RunConfig:
    """Parse and validate a config document.

    Raises:
        ConfigError: with a ``line:col`` position for JSON syntax errors or a
            ``$.path`` for schema errors.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", f"{exc.lineno}:{exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", "$")
    name, model = _build_model(doc, base)
    query = _get(doc, "query", "$", str)
    if query not in QUERIES:
        raise ConfigError(f"unknown query {query!r}; expected one of {QUERIES}", "$.query")
    cfg = RunConfig(name, model, query, _times(doc, "$"))
    if name != "custom":
        cfg.initial_state = _initial_state(doc, {}, base, model.dim)
    cfg.seed = int(_get(doc, "seed", "$", int, required=False, default=0)) if seed is None else seed
    cfg.samples = int(_get(doc, "samples", "$", int, required=False, default=1))
    if cfg.samples < 1:
        raise ConfigError("samples must be positive", "$.samples")

    persp = _get(doc, "perspective", "$", dict, required=query in ("future", "logic"), default=None)
    if persp is not None:
        cfg.N = int(_get(persp, "N", "$.perspective", int))
        cfg.t0 = float(_get(persp, "t0", "$.perspective", (int, float)))
        rec = _get(persp, "record", "$.perspective", dict, required=False)
        if rec is not None:
            try:
                cfg.record = {float(k): int(v) for k, v in rec.items()}
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"record must map time strings to indices: {exc}", "$.perspective.record") from exc
        if not 0 <= cfg.N < model.factorization.dim_S:
            raise ConfigError(f"N={cfg.N} outside 0..{model.factorization.dim_S - 1}", "$.perspective.N")
    if query == "future" and not all(t > cfg.t0 for t in cfg.times):
        raise ConfigError("future query times must all exceed t0", "$.times")
    if query == "logic":
        props = _get(doc, "propositions", "$", list)
        for i, text_ in enumerate(props):
            if not isinstance(text_, str):
                raise ConfigError("propositions must be strings", f"$.propositions[{i}]")
            try:
                parse(text_)
            except ParseError as exc:
                raise ConfigError(f"bad proposition: {exc}", f"$.propositions[{i}]") from exc
        cfg.propositions = props
    if isinstance(model, CatModel) and (cfg.times[0] < 0 or cfg.times[-1] > model.t_max):
        raise ConfigError(f"times must lie in [0, {model.t_max}] for the cat model", "$.times")
    return cfg


# --- queries ------------------------------------------------------------------


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _states_over(cfg: RunConfig) -> list[StateVector]:
    """Universal state at each config time, starting from the model's t=0 state."""
    psi = cfg.state_at_start()
    out = []
    t_prev = 0.0
    for t in cfg.times:
        if isinstance(cfg.model, CatModel) and cfg.initial_state is None:
            psi = cfg.model.state_at(t)
        else:
            psi = StateVector(propagator_between(cfg.dynamics, t_prev, t) @ psi.amplitudes)
            t_prev = t
        out.append(psi)
    return out


def _check_unit(values, what: str):
    total = float(sum(values))
    if any(v < -TOL or v > 1 + TOL for v in values) or total > 1 + TOL:
        raise ContractViolation(f"{what}: values {list(values)} (sum {total!r}) leave [0, 1]")


def query_evolve(cfg: RunConfig, files: dict, plot: bool) -> str:
    states = _states_over(cfg)
    header = ["t", "norm"]
    has_h = not isinstance(cfg.model, CatModel)
    if has_h:
        header.append("energy")
    rows = []
    for t, s in zip(cfg.times, states):
        row = [t, float(np.linalg.norm(s.amplitudes))]
        if has_h:
            row.append(energy(s, cfg.dynamics))
        rows.append(row)
    files["evolve.csv"] = _csv(rows, header)
    files["states.json"] = json.dumps([{"t": t, **s.to_dict()} for t, s in zip(cfg.times, states)], indent=2)
    files["state_final.json"] = json.dumps(states[-1].to_dict()) + "\n"
    return f"evolved {len(states)} time points; final norm {rows[-1][1]!r}"


def query_branches(cfg: RunConfig, files: dict, plot: bool) -> str:
    f = cfg.factorization
    long_rows, wide_rows, docs = [], [], []
    for t, psi in zip(cfg.times, _states_over(cfg)):
        d = decompose(psi, f, time=t)
        w = [b.weight for b in d.branches]
        _check_unit(w, f"branch weights at t={t}")
        long_rows += [[t, b.n, b.weight, str(b.real_flag).lower()] for b in d.branches]
        wide_rows.append([t] + w)
        docs.append({"time": t, "branches": d.rows(), "sum": sum(w)})
    files["branches.csv"] = _csv(long_rows, ["t", "n", "weight", "real_flag"])
    files["branches.json"] = json.dumps(docs, indent=2)
    files["weights.csv"] = _csv(wide_rows, ["t"] + [f"w{n}" for n in range(f.dim_S)])
    summary = f"decomposed {len(cfg.times)} states over {f.dim_S} experiences"
    if isinstance(cfg.model, CatModel):
        rows = [[r[0], r[1], float(sum(r[2:]))] for r in wide_rows]
        files["cat_weights.csv"] = _csv(rows, ["t", "alive_weight", "dead_weight"])
        summary += f"; alive weight at t={rows[-1][0]!r}: {rows[-1][1]!r}"
        if plot:
            files["weights.svg"] = svg.line_chart(
                cfg.times, {"alive": [r[1] for r in rows], "dead": [r[2] for r in rows]},
                title="Branch weights (cat)",
            )
    elif plot:
        files["weights.svg"] = svg.line_chart(
            cfg.times, {f"n={n}": [r[1 + n] for r in wide_rows] for n in range(f.dim_S)},
            title="Branch weights",
        )
    return summary


def _perspective_state(cfg: RunConfig):
    """State at t0 and the perspective object."""
    psi = cfg.state_at_start()
    if isinstance(cfg.model, CatModel) and cfg.initial_state is None:
        psi0 = cfg.model.state_at(cfg.t0)
    else:
        psi0 = StateVector(propagator_between(cfg.dynamics, 0.0, cfg.t0) @ psi.amplitudes)
    p = ft.Perspective(cfg.factorization, cfg.N, cfg.t0, cfg.record)
    return psi0, p


def query_future(cfg: RunConfig, files: dict, plot: bool) -> str:
    psi0, p = _perspective_state(cfg)
    docs, lines = [], []
    for k, t in enumerate(cfg.times):
        table = ft.future_truth_table(psi0, cfg.dynamics, p, t)
        _check_unit([v for _, v in table], f"truth table at t={t}")
        defect = ft.consistency_defect(psi0, cfg.dynamics, p, t)
        files[f"future_{k:02d}.csv"] = ft.truth_table_csv(table, defect)
        docs.append(json.loads(ft.truth_table_json(table, defect, t)))
        if plot:
            files[f"future_{k:02d}.svg"] = svg.bar_chart(
                [str(m) for m, _ in table], [v for _, v in table], title=f"Future truth values at t={t!r}"
            )
        lines.append(f"t={t!r}: " + ", ".join(f"{v:.6g}" for _, v in table) + f" (defect {defect:.3g})")
    files["future.json"] = json.dumps({"N": cfg.N, "t0": cfg.t0, "tables": docs}, indent=2)
    return "\n".join(lines)


def query_logic(cfg: RunConfig, files: dict, plot: bool) -> str:
    psi0, p = _perspective_state(cfg)
    rows = []
    for text in cfg.propositions:
        v = evaluate(parse(text), psi0, cfg.dynamics, p)
        _check_unit([v], f"proposition {text!r}")
        rows.append([text, v])
    files["logic.csv"] = _csv(rows, ["proposition", "truth_value"])
    files["logic.json"] = json.dumps(
        {"N": cfg.N, "t0": cfg.t0, "results": [{"proposition": r[0], "truth_value": r[1]} for r in rows]}, indent=2
    )
    return "\n".join(f"{r[1]:.6g}  {r[0]}" for r in rows)


def query_sample(cfg: RunConfig, files: dict, plot: bool) -> str:
    psi_start = _states_over(cfg)[0]
    sampler = ft.RecordSampler(psi_start, cfg.dynamics, cfg.factorization, cfg.times)
    recs = [sampler.sample(cfg.seed + i) for i in range(cfg.samples)]
    for r in recs:
        for k, s in enumerate(r.table_sums):
            _check_unit([s], f"sampler table sum at t={cfg.times[k]}")
    if cfg.samples == 1:
        files["record.json"] = recs[0].to_json()
    files["records.json"] = json.dumps(
        {
            "seed": cfg.seed,
            "generator": "numpy PCG64; trajectory i uses seed + i",
            "times": cfg.times,
            "records": [[r.record[t] for t in cfg.times] for r in recs],
        }
    ) + "\n"
    dim_S = cfg.factorization.dim_S
    counts = np.zeros((len(cfg.times), dim_S), dtype=int)
    for r in recs:
        for k, t in enumerate(cfg.times):
            counts[k, r.record[t]] += 1
    rows = [[t, n, int(counts[k, n]), counts[k, n] / cfg.samples] for k, t in enumerate(cfg.times) for n in range(dim_S)]
    files["sample_frequencies.csv"] = _csv(rows, ["t", "n", "count", "frequency"])
    if plot:
        files["sample_frequencies.svg"] = svg.line_chart(
            cfg.times, {f"n={n}": counts[:, n] / cfg.samples for n in range(dim_S) if counts[:, n].any()},
            title="Sampled record frequencies", ylabel="frequency",
        )
    return f"sampled {cfg.samples} record(s) over {len(cfg.times)} times"


QUERY_FUNCS = {
    "evolve": query_evolve,
    "branches": query_branches,
    "future": query_future,
    "logic": query_logic,
    "sample": query_sample,
}


def run(cfg: RunConfig, out: Path, plot: bool = False) -> tuple[str, dict]:
    """Execute ``cfg``, write its output files under ``out``; return (summary, files)."""
    files: dict[str, str] = {}
    summary = QUERY_FUNCS[cfg.query](cfg, files, plot)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(files.items()):
        (out / name).write_text(text)
    return summary, files


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="relstate", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, type=Path, help="JSON run config")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override the config's seed")
    ap.add_argument("--plot", action="store_true", help="also write SVG plots")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary")
    args = ap.parse_args(argv)

    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(text, base=args.config.parent, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        summary, _ = run(cfg, args.out, plot=args.plot)
    except ContractViolation as exc:
        dump = {"error": str(exc), "query": cfg.query, "model": cfg.model_name, "times": cfg.times}
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "diagnostic.json").write_text(json.dumps(dump, indent=2) + "\n")
        print(f"contract violation: {exc}", file=sys.stderr)
        return 3
    except RelStateError as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(f"[{cfg.model_name}/{cfg.query}] {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

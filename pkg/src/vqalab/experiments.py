"""Config-driven experiment runners: objective/gradient moment sweeps, SPSA
learning curves, concentration-norm sweeps, Pauli-coefficient distributions,
and the verification suites. Deterministic seeding, CSV output.

Determinism contract: identical (config, seed) produces byte-identical CSV.
Work is split into cells enumerated in a canonical order; cell j draws from
PCG64(seed XOR j) regardless of how many workers execute, and rows are
assembled in cell order. Floats are serialized with repr (shortest
round-trip, locale-independent), line endings are LF, encoding UTF-8.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import analytic, pauli, tensornet
from .circuits import (
    Ansatz,
    TemplateFamily,
    SubcircuitTemplate,
    build_ansatz,
    dense_unitary,
    random_hea_state,
)
from .haar import design_check, mean_and_se
from .linalg import Statevector
from .observables import (
    Observable,
    expectation,
    expectation_state,
    observable_matrix,
    parse_observable,
    parameter_shift_grad,
)

DENSE_N_CAP = 12
TN_N_CAP = 16
TN_K_CAP = 4

COLUMNS = {
    "variance": ["experiment", "n", "k", "observable", "statistic", "value", "se", "samples", "seed"],
    "grad-variance": ["experiment", "n", "k", "observable", "param_index", "statistic", "value", "se", "samples", "seed"],
    "learn": ["experiment", "n", "k", "observable", "seed", "iteration", "objective", "infidelity"],
    "cknorm": ["experiment", "n", "k", "observable", "statistic", "value", "se", "samples", "seed"],
    "pauli-dist": ["experiment", "n", "k", "observable", "statistic", "theta_sample_id", "pauli_string", "coefficient", "probability"],
    "verify": ["suite", "test_id", "family", "width", "depth", "moment", "n", "k", "analytic", "estimate", "se", "pass"],
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    ansatz: dict = field(default_factory=lambda: {"kind": "mps", "k": 2})
    n_list: list[int] = field(default_factory=list)
    observables: list[str] = field(default_factory=lambda: ["global0"])
    input_state: str = "zero"
    input_states: int = 1
    samples: int = 100
    grad_params: object = "all"
    spsa: dict = field(default_factory=dict)
    paulis: list[str] = field(default_factory=list)
    path: str = "auto"
    kernel: str = "normalized"
    suite: str = "analytic"
    verify: dict = field(default_factory=dict)
    out_float_format: str = "repr"

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        validate_config(raw)
        return cls(**raw)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def qubit_sweep(self) -> list[int]:
        if self.n_list:
            return list(self.n_list)
        if "n" not in self.ansatz:
            raise ConfigError("config needs ansatz.n or a non-empty n_list")
        return [int(self.ansatz["n"])]

    def build_ansatz(self, n: int) -> Ansatz:
        spec = dict(self.ansatz)
        spec.pop("n", None)
        return build_ansatz(
            spec.pop("kind"),
            n,
            k=spec.pop("k", None),
            depth=spec.pop("depth", None),
            subcircuit_depth=spec.pop("subcircuit_depth", None),
        )


def _schema() -> dict:
    text = resources.files("vqalab").joinpath("config_schema.json").read_text("utf-8")
    return json.loads(text)


def validate_config(raw: dict) -> None:
    """Schema-validate a raw config dict; raises ConfigError with field paths."""
    import jsonschema

    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for err in errors[:8]:
            loc = "/".join(str(p) for p in err.absolute_path) or "<root>"
            msgs.append(f"{loc}: {err.message}")
        raise ConfigError("invalid config: " + "; ".join(msgs))


# ---------------------------------------------------------------------------
# deterministic seeding and CSV
# ---------------------------------------------------------------------------


def cell_rng(base_seed: int, cell_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(base_seed ^ cell_index))


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip decimal
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def write_csv(rows: list[dict], columns: list[str], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows, columns))


def _map_cells(fn, payloads: list[dict], threads: int) -> list:
    if threads <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, payloads))


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def input_state(spec: str, n: int, rng: np.random.Generator) -> Statevector:
    spec = spec.strip()
    if spec == "zero":
        return Statevector.zero(n)
    if spec.startswith("random-hea:"):
        arg = spec.split(":", 1)[1]
        depth = int(np.floor(np.log2(n))) if arg == "log" else int(arg)
        return random_hea_state(n, max(depth, 1), rng)
    if spec.startswith("product:"):
        arg = spec.split(":", 1)[1]
        if arg == "random":
            angles = rng.uniform(0, np.pi, size=2 * n)
        else:
            angles = np.array([float(x) for x in arg.split(",")])
            if angles.size != 2 * n:
                raise ConfigError(f"product state needs 2n={2*n} angles, got {angles.size}")
        amps = np.array([1.0], dtype=complex)
        for q in range(n):
            t, ph = angles[2 * q], angles[2 * q + 1]
            amps = np.kron(amps, np.array([np.cos(t / 2), np.exp(1j * ph) * np.sin(t / 2)]))
        return Statevector(n, amps)
    raise ConfigError(f"unknown input state spec {spec!r}")


def _variance_se(values: np.ndarray) -> float:
    """Delta-method SE of the sample variance."""
    m = values.size
    if m < 2:
        return 0.0
    mu = values.mean()
    var = values.var(ddof=1)
    m4 = np.mean((values - mu) ** 4)
    return float(np.sqrt(max(m4 - var**2, 0.0) / m))


def objective_samples(
    ansatz: Ansatz, obs: Observable, sigma: Statevector, samples: int, rng: np.random.Generator
) -> np.ndarray:
    vals = np.empty(samples)
    for j in range(samples):
        theta = rng.uniform(0.0, 2 * np.pi, size=ansatz.param_count)
        vals[j] = expectation(sigma, obs, ansatz, theta)
    return vals


# ---------------------------------------------------------------------------
# variance
# ---------------------------------------------------------------------------


def _variance_cell(payload: dict) -> list[dict]:
    cfg = ExperimentConfig(**payload["cfg"])
    n = payload["n"]
    obs_text = payload["observable"]
    ansatz = cfg.build_ansatz(n)
    obs = parse_observable(obs_text, n)
    rng = cell_rng(cfg.seed, payload["cell"])
    per_state = []
    for _ in range(cfg.input_states):
        sigma = input_state(cfg.input_state, n, rng)
        per_state.append(objective_samples(ansatz, obs, sigma, cfg.samples, rng))
    rows = []
    k = ansatz.k
    base = {
        "experiment": "variance",
        "n": n,
        "k": k,
        "observable": obs_text,
        "samples": cfg.samples,
        "seed": cfg.seed,
    }
    if cfg.samples == 0:
        return rows
    pooled = np.concatenate(per_state)
    mean, mean_se = mean_and_se(pooled)
    second, second_se = mean_and_se(pooled**2)
    variances = [v.var(ddof=1) if v.size > 1 else 0.0 for v in per_state]
    var_val = float(np.mean(variances))
    var_se = float(np.sqrt(sum(_variance_se(v) ** 2 for v in per_state)) / len(per_state))
    rows.append({**base, "statistic": "mean", "value": mean, "se": mean_se})
    rows.append({**base, "statistic": "second_moment", "value": second, "se": second_se})
    rows.append({**base, "statistic": "variance", "value": var_val, "se": var_se})
    return rows


def run_variance(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    payloads = []
    cell = 0
    for n in cfg.qubit_sweep():
        for obs_text in cfg.observables:
            payloads.append(
                {"cfg": cfg.__dict__, "n": n, "observable": obs_text, "cell": cell}
            )
            cell += 1
    out = _map_cells(_variance_cell, payloads, threads)
    return [row for rows in out for row in rows]


# ---------------------------------------------------------------------------
# gradient variance
# ---------------------------------------------------------------------------


def _grad_variance_cell(payload: dict) -> list[dict]:
    cfg = ExperimentConfig(**payload["cfg"])
    n = payload["n"]
    obs_text = payload["observable"]
    ansatz = cfg.build_ansatz(n)
    obs = parse_observable(obs_text, n)
    rng = cell_rng(cfg.seed, payload["cell"])
    sigma = input_state(cfg.input_state, n, rng)
    if cfg.grad_params == "all":
        indices = np.arange(ansatz.param_count)
    else:
        count = min(int(cfg.grad_params), ansatz.param_count)
        indices = np.sort(rng.choice(ansatz.param_count, size=count, replace=False))
    grads = np.empty((cfg.samples, indices.size))
    for j in range(cfg.samples):
        theta = rng.uniform(0.0, 2 * np.pi, size=ansatz.param_count)
        for c, idx in enumerate(indices):
            grads[j, c] = parameter_shift_grad(sigma, obs, ansatz, theta, int(idx))
    rows = []
    base = {
        "experiment": "grad-variance",
        "n": n,
        "k": ansatz.k,
        "observable": obs_text,
        "samples": cfg.samples,
        "seed": cfg.seed,
    }
    per_index_var = []
    for c, idx in enumerate(indices):
        g = grads[:, c]
        mean, mean_se = mean_and_se(g)
        var = float(g.var(ddof=1)) if g.size > 1 else 0.0
        per_index_var.append(var)
        rows.append({**base, "param_index": int(idx), "statistic": "grad_mean", "value": mean, "se": mean_se})
        rows.append({**base, "param_index": int(idx), "statistic": "grad_variance", "value": var, "se": _variance_se(g)})
    agg_se = float(np.sqrt(sum(_variance_se(grads[:, c]) ** 2 for c in range(indices.size))) / indices.size)
    rows.append(
        {**base, "param_index": -1, "statistic": "grad_variance_mean",
         "value": float(np.mean(per_index_var)), "se": agg_se}
    )
    return rows


def run_grad_variance(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    payloads = []
    cell = 0
    for n in cfg.qubit_sweep():
        for obs_text in cfg.observables:
            payloads.append({"cfg": cfg.__dict__, "n": n, "observable": obs_text, "cell": cell})
            cell += 1
    out = _map_cells(_grad_variance_cell, payloads, threads)
    return [row for rows in out for row in rows]


# ---------------------------------------------------------------------------
# SPSA learning
# ---------------------------------------------------------------------------


@dataclass
class SpsaSettings:
    a: float = 0.4
    c: float = 0.4
    iterations: int = 300
    init_low: float = 0.0
    init_high: float = float(np.pi / 2)
    schedule: str = "constant"  # "constant" | "decay"
    alpha: float = 0.602
    gamma: float = 0.101
    stability: float | None = None  # decay offset A; default 0.1 * iterations
    seeds: int = 5

    @classmethod
    def from_dict(cls, raw: dict) -> "SpsaSettings":
        return cls(**raw)

    def gains(self, j: int) -> tuple[float, float]:
        if self.schedule == "constant":
            return self.a, self.c
        big_a = self.stability if self.stability is not None else 0.1 * self.iterations
        return (
            self.a / (j + 1 + big_a) ** self.alpha,
            self.c / (j + 1) ** self.gamma,
        )


def spsa_maximize(objective, theta0: np.ndarray, settings: SpsaSettings, rng: np.random.Generator, trace=None):
    """Two-evaluation simultaneous-perturbation ascent with Rademacher directions."""
    theta = np.array(theta0, dtype=float)
    for j in range(settings.iterations):
        a_j, c_j = settings.gains(j)
        delta = rng.integers(0, 2, size=theta.size) * 2.0 - 1.0
        diff = objective(theta + c_j * delta) - objective(theta - c_j * delta)
        theta = theta + a_j * (diff / (2.0 * c_j)) * delta
        if trace is not None:
            trace(j + 1, theta)
    return theta


def _learn_cell(payload: dict) -> list[dict]:
    cfg = ExperimentConfig(**payload["cfg"])
    n = payload["n"]
    obs_text = payload["observable"]
    seed_index = payload["seed_index"]
    ansatz = cfg.build_ansatz(n)
    obs = parse_observable(obs_text, n)
    global0 = Observable("global0", n)
    rng = cell_rng(cfg.seed, payload["cell"])
    sigma = input_state(cfg.input_state, n, rng)
    settings = SpsaSettings.from_dict(cfg.spsa)
    theta0 = rng.uniform(settings.init_low, settings.init_high, size=ansatz.param_count)
    rows = []

    def objective(theta):
        return expectation(sigma, obs, ansatz, theta)

    def trace(iteration, theta):
        from .circuits import apply

        psi = apply(ansatz, theta, sigma)
        rows.append(
            {
                "experiment": "learn",
                "n": n,
                "k": ansatz.k,
                "observable": obs_text,
                "seed": seed_index,
                "iteration": iteration,
                "objective": expectation_state(psi, obs),
                "infidelity": 1.0 - expectation_state(psi, global0),
            }
        )

    spsa_maximize(objective, theta0, settings, rng, trace)
    return rows


def run_learn(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    settings = SpsaSettings.from_dict(cfg.spsa)
    payloads = []
    cell = 0
    for n in cfg.qubit_sweep():
        for obs_text in cfg.observables:
            for s in range(settings.seeds):
                payloads.append(
                    {"cfg": cfg.__dict__, "n": n, "observable": obs_text, "seed_index": s, "cell": cell}
                )
                cell += 1
    out = _map_cells(_learn_cell, payloads, threads)
    return [row for rows in out for row in rows]


# ---------------------------------------------------------------------------
# concentration norm and Pauli distribution
# ---------------------------------------------------------------------------


def _choose_path(cfg: ExperimentConfig, ansatz: Ansatz, obs: Observable) -> str:
    if cfg.path != "auto":
        return cfg.path
    if obs.kind != "local-avg" and ansatz.kind == "mps":
        return "mps"
    return "dense"


def _evolved_coefficient_fn(ansatz, obs, theta, path: str):
    """Returns (coefficient_lookup, four_norm, two_norm_sq) for W_{C^dag}."""
    if path == "mps":
        if ansatz.n > TN_N_CAP or ansatz.k > TN_K_CAP:
            raise ConfigError(f"tensor path capped at n<={TN_N_CAP}, k<={TN_K_CAP}")
        result = tensornet.heisenberg_evolve(obs, ansatz, theta)
        mps = result.mps
        nsq = tensornet.norm_sq(mps)
        return (
            lambda p: tensornet.coefficient(mps, p),
            lambda: tensornet.coefficient_four_norm(mps),
            nsq,
        )
    if ansatz.n > DENSE_N_CAP:
        raise ConfigError(f"dense path capped at n<={DENSE_N_CAP}")
    c = dense_unitary(ansatz, theta)
    w = observable_matrix(obs)
    evolved = c.conj().T @ w @ c
    coeffs = pauli.pauli_coefficients_dense(evolved)
    return (
        lambda p: float(coeffs[p.index()]),
        lambda: float(np.sum(coeffs**4) ** 0.25),
        float(np.sum(coeffs**2)),
    )


def _cknorm_cell(payload: dict) -> list[dict]:
    cfg = ExperimentConfig(**payload["cfg"])
    n = payload["n"]
    obs_text = payload["observable"]
    ansatz = cfg.build_ansatz(n)
    obs = parse_observable(obs_text, n)
    rng = cell_rng(cfg.seed, payload["cell"])
    path = _choose_path(cfg, ansatz, obs)
    # kernel choices: "normalized" is the fourth-root concentration norm,
    # "unnormalized" the plain l4 kernel (the absolutely homogeneous one),
    # "distribution" the 2-norm of the outcome distribution = normalized**2
    stat_name = {
        "normalized": "mean_k_norm",
        "unnormalized": "mean_coeff_four_norm",
        "distribution": "mean_dist_two_norm",
    }[cfg.kernel]
    vals = np.empty(cfg.samples)
    for j in range(cfg.samples):
        theta = rng.uniform(0.0, 2 * np.pi, size=ansatz.param_count)
        _, four_norm, nsq = _evolved_coefficient_fn(ansatz, obs, theta, path)
        if cfg.kernel == "unnormalized":
            vals[j] = four_norm()
        elif cfg.kernel == "distribution":
            vals[j] = four_norm() ** 2 / nsq
        else:
            vals[j] = four_norm() / np.sqrt(nsq)
    mean, se = mean_and_se(vals)
    return [
        {
            "experiment": "cknorm",
            "n": n,
            "k": ansatz.k,
            "observable": obs_text,
            "statistic": stat_name,
            "value": mean,
            "se": se,
            "samples": cfg.samples,
            "seed": cfg.seed,
        }
    ]


def run_cknorm(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    payloads = []
    cell = 0
    for n in cfg.qubit_sweep():
        for obs_text in cfg.observables:
            payloads.append({"cfg": cfg.__dict__, "n": n, "observable": obs_text, "cell": cell})
            cell += 1
    out = _map_cells(_cknorm_cell, payloads, threads)
    return [row for rows in out for row in rows]


def _query_paulis(cfg: ExperimentConfig, n: int) -> list[pauli.PauliString]:
    if cfg.paulis:
        out = []
        for text in cfg.paulis:
            p = pauli.PauliString.from_string(text)
            if p.n != n:
                raise ConfigError(f"query Pauli {text!r} has length {p.n}, expected {n}")
            out.append(p)
        return out
    return [pauli.PauliString.single(n, i, 2) for i in range(n)]  # the Z_i family


def _pauli_dist_cell(payload: dict) -> list[dict]:
    cfg = ExperimentConfig(**payload["cfg"])
    n = payload["n"]
    obs_text = payload["observable"]
    ansatz = cfg.build_ansatz(n)
    obs = parse_observable(obs_text, n)
    rng = cell_rng(cfg.seed, payload["cell"])
    path = _choose_path(cfg, ansatz, obs)
    queries = _query_paulis(cfg, n)
    rows = []
    base = {"experiment": "pauli-dist", "n": n, "k": ansatz.k, "observable": obs_text}
    probs = {p.to_string(): [] for p in queries}
    for j in range(cfg.samples):
        theta = rng.uniform(0.0, 2 * np.pi, size=ansatz.param_count)
        coeff_of, _, nsq = _evolved_coefficient_fn(ansatz, obs, theta, path)
        for p in queries:
            c = coeff_of(p)
            prob = c * c / nsq
            probs[p.to_string()].append(prob)
            rows.append(
                {**base, "statistic": "sample", "theta_sample_id": j,
                 "pauli_string": p.to_string(), "coefficient": c, "probability": prob}
            )
    for p in queries:
        vals = np.array(probs[p.to_string()])
        if vals.size == 0:
            continue
        for stat, q in (("q25", 25), ("median", 50), ("q75", 75)):
            rows.append(
                {**base, "statistic": stat, "theta_sample_id": -1,
                 "pauli_string": p.to_string(), "coefficient": None,
                 "probability": float(np.percentile(vals, q))}
            )
    return rows


def run_pauli_dist(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    payloads = []
    cell = 0
    for n in cfg.qubit_sweep():
        for obs_text in cfg.observables:
            payloads.append({"cfg": cfg.__dict__, "n": n, "observable": obs_text, "cell": cell})
            cell += 1
    out = _map_cells(_pauli_dist_cell, payloads, threads)
    return [row for rows in out for row in rows]


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def run_verify(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    if cfg.suite == "design":
        return _verify_design(cfg)
    if cfg.suite == "analytic":
        return _verify_analytic(cfg)
    if cfg.suite == "norm":
        return _verify_norm(cfg)
    raise ConfigError(f"unknown verify suite {cfg.suite!r}")


def _verify_design(cfg: ExperimentConfig) -> list[dict]:
    v = cfg.verify
    widths = v.get("widths", [2])
    depths = v.get("depths", [4])
    trials = v.get("trials", 20000)
    rows = []
    test_seed = cfg.seed
    for width in widths:
        for depth in depths:
            family = TemplateFamily(SubcircuitTemplate(width, depth))
            for moment in (1, 2):
                for r in design_check(family, moment, trials, seed=test_seed):
                    rows.append({"suite": "design", "test_id": f"w{width}d{depth}m{moment}t{r['test_id']}", **r})
                test_seed += 1
    return rows


def _verify_analytic(cfg: ExperimentConfig) -> list[dict]:
    v = cfg.verify
    samples = v.get("samples", 200000)
    tuples_per_case = v.get("tuples", 5)
    global_cases = [tuple(x) for x in v.get("global_cases", [[3, 2], [4, 2], [5, 2]])]
    local_cases = [tuple(x) for x in v.get("local_cases", [[4, 2], [5, 2], [6, 3]])]
    rows = []
    for case_idx, (n, k) in enumerate(global_cases):
        rng = cell_rng(cfg.seed, 7000 + case_idx)
        tuples = [
            tuple(tuple(int(b) for b in rng.integers(0, 2, n)) for _ in range(4))
            for _ in range(tuples_per_case)
        ]
        tuples[0] = (tuple([0] * n),) * 4  # always include the all-zeros tuple
        results = analytic.mc_second_moment_global_batch(
            n, k, tuples, samples, seed=cfg.seed ^ (9000 + case_idx)
        )
        for t_idx, (tup, (est, se)) in enumerate(zip(tuples, results)):
            exact = analytic.second_moment_global(n, k, *tup)
            rows.append(
                {
                    "suite": "analytic",
                    "test_id": f"global:n{n}k{k}:t{t_idx}",
                    "n": n,
                    "k": k,
                    "analytic": exact,
                    "estimate": est,
                    "se": se,
                    "pass": abs(est - exact) <= 3 * se,
                }
            )
    for case_idx, (n, k) in enumerate(local_cases):
        exact = analytic.second_moment_z_last(n, k)
        est, se = analytic.mc_second_moment_z(
            n, k, site=n - 1, samples=samples, seed=cfg.seed ^ (11000 + case_idx)
        )
        rows.append(
            {
                "suite": "analytic",
                "test_id": f"local:n{n}k{k}",
                "n": n,
                "k": k,
                "analytic": exact,
                "estimate": est,
                "se": se,
                "pass": abs(est - exact) <= 3 * se,
            }
        )
    return rows


def _estimate_c_norm(ansatz: Ansatz, w: np.ndarray, thetas: list[np.ndarray]) -> np.ndarray:
    """Per-theta unnormalized concentration kernel of W_{C(theta)^dag}."""
    vals = np.empty(len(thetas))
    for j, theta in enumerate(thetas):
        c = dense_unitary(ansatz, theta)
        vals[j] = pauli.coefficient_four_norm_dense(c.conj().T @ w @ c)
    return vals


def _verify_norm(cfg: ExperimentConfig) -> list[dict]:
    v = cfg.verify
    n = v.get("n", 4)
    pairs = v.get("pairs", 10)
    theta_samples = v.get("theta_samples", 20)
    ansatz = cfg.build_ansatz(n)
    rows = []
    for pair_idx in range(pairs):
        rng = cell_rng(cfg.seed, 13000 + pair_idx)
        w1 = pauli.random_hermitian(n, rng)
        w2 = pauli.random_hermitian(n, rng)
        scale = float(rng.uniform(0.2, 3.0)) * float(rng.choice([-1.0, 1.0]))
        thetas = [rng.uniform(0, 2 * np.pi, size=ansatz.param_count) for _ in range(theta_samples)]
        v1 = _estimate_c_norm(ansatz, w1, thetas)
        v2 = _estimate_c_norm(ansatz, w2, thetas)
        v12 = _estimate_c_norm(ansatz, w1 + w2, thetas)
        vs = _estimate_c_norm(ansatz, scale * w1, thetas)
        m1, se1 = mean_and_se(v1)
        m2, se2 = mean_and_se(v2)
        m12, se12 = mean_and_se(v12)
        ms, ses = mean_and_se(vs)
        tri_se = float(np.sqrt(se1**2 + se2**2 + se12**2))
        rows.append(
            {"suite": "norm", "test_id": f"triangle:{pair_idx}", "n": n, "k": ansatz.k,
             "analytic": m1 + m2, "estimate": m12, "se": tri_se,
             "pass": m12 <= m1 + m2 + 3 * tri_se}
        )
        hom_se = float(np.sqrt(ses**2 + (abs(scale) * se1) ** 2))
        rows.append(
            {"suite": "norm", "test_id": f"homogeneity:{pair_idx}", "n": n, "k": ansatz.k,
             "analytic": abs(scale) * m1, "estimate": ms, "se": hom_se,
             "pass": abs(ms - abs(scale) * m1) <= 3 * hom_se + 1e-9}
        )
        rows.append(
            {"suite": "norm", "test_id": f"positivity:{pair_idx}", "n": n, "k": ansatz.k,
             "analytic": 0.0, "estimate": m1, "se": se1, "pass": m1 > 0.0}
        )
    return rows


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

RUNNERS = {
    "variance": run_variance,
    "grad-variance": run_grad_variance,
    "learn": run_learn,
    "cknorm": run_cknorm,
    "pauli-dist": run_pauli_dist,
    "verify": run_verify,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> tuple[list[dict], list[str]]:
    runner = RUNNERS.get(cfg.experiment)
    if runner is None:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    rows = runner(cfg, threads)
    return rows, COLUMNS[cfg.experiment]

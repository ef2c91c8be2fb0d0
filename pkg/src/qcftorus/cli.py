"""
Command-line experiment runner.

    qcftorus --map sawtooth --K 0.5 --L 2 --N 101 --formalism continuous \\
             --steps 25 --ensemble 10 --seed 7 --out runs/k05

Scenarios: ``series`` (ensemble QCF and decay fit), ``negativity``,
``t1scan`` (T1 against log N), ``echo`` (Loschmidt echoes), ``snapshots``
(grid dumps) and ``lyapunov`` (numerical exponent sweep).  Lists are given
as ``a,b,c`` and inclusive ranges as ``start:stop:step``.  A JSON file with
the same keys may be passed with ``--config``; explicit flags override it,
and the ``meta.json`` written by a run is itself a valid config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .density import GaussianDensity, density_grid
from .fidelity import (FitUnavailable, echoed_wigner_sampled, fit_decay,
                       fit_log_scaling, loschmidt_echoes, qcf_ensemble)
from .kinematics import HilbertSpec, coherent_state
from .quantum_maps import QuantumMap, propagate
from .torus_dynamics import (ClassicalMap, lyapunov_numerical,
                             lyapunov_sawtooth_exact)
from .wigner import random_wave_plateau, wigner

SCENARIOS = ("series", "t1scan", "negativity", "echo", "snapshots", "lyapunov")
FORMALISMS = ("continuous", "discrete")
MAPS = ("sawtooth", "pcat")
# trajectories and length used to estimate lambda_max for perturbed cat fits
FIT_TRAJ, FIT_TRAJ_LEN = 20, 10**4


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    map: str = "sawtooth"
    K: list = field(default_factory=lambda: [0.5])
    mu: list = field(default_factory=lambda: [0.1])
    L: int = 1
    N: list = field(default_factory=lambda: [101])
    formalism: str = "continuous"
    sigma: float = 1.0
    steps: int = 25
    ensemble: int = 10
    seed: int = 0
    resolution: int | None = None
    scenario: str = "series"
    out: str = "qcf_out"
    eps: float = 0.01
    traj: int = 100
    traj_len: int = 10**5

    @property
    def params(self) -> list:
        return self.K if self.map == "sawtooth" else self.mu

    def classical(self, value: float) -> ClassicalMap:
        if self.map == "sawtooth":
            return ClassicalMap.sawtooth(value, self.L)
        return ClassicalMap.perturbed_cat(value, self.L)

    def quantum(self, value: float, N: int) -> QuantumMap:
        return QuantumMap(self.classical(value), HilbertSpec(N, self.L))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def parse_values(text, kind=float) -> list:
    """'a,b,c' or inclusive 'start:stop:step' into a list."""
    if isinstance(text, (list, tuple)):
        return [kind(v) for v in text]
    if isinstance(text, (int, float)):
        return [kind(text)]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range {text!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"range {text!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + k * step for k in range(count)]
        if kind is int:
            if not all(float(v).is_integer() for v in vals):
                raise ConfigError(f"range {text!r} must produce integers")
            return [int(v) for v in vals]
        return [round(v, 12) for v in vals]
    try:
        vals = [kind(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {text!r}: {exc}") from None
    if not vals:
        raise ConfigError(f"empty value list {text!r}")
    return vals


def validate(cfg: ExperimentConfig) -> None:
    """Raise ConfigError naming the first violated constraint."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if cfg.map not in MAPS:
        raise ConfigError(f"map must be one of {MAPS}, got {cfg.map!r}")
    if cfg.formalism not in FORMALISMS:
        raise ConfigError(f"formalism must be one of {FORMALISMS}, got {cfg.formalism!r}")
    if int(cfg.L) != cfg.L or cfg.L < 1:
        raise ConfigError(f"L must be a positive integer, got {cfg.L!r}")
    if not cfg.sigma > 0:
        raise ConfigError(f"sigma must be positive, got {cfg.sigma!r}")
    if cfg.steps < 0:
        raise ConfigError(f"steps must be >= 0, got {cfg.steps}")
    if cfg.ensemble < 1:
        raise ConfigError(f"ensemble must be >= 1, got {cfg.ensemble}")
    if cfg.resolution is not None and cfg.resolution < 1:
        raise ConfigError(f"resolution must be >= 1, got {cfg.resolution}")
    if cfg.map == "sawtooth" and any(not k > 0 for k in cfg.K):
        raise ConfigError("sawtooth K must be > 0")
    if cfg.scenario == "lyapunov":
        if cfg.traj < 1:
            raise ConfigError(f"traj must be >= 1, got {cfg.traj}")
        if cfg.traj_len < 1000:
            raise ConfigError(f"traj_len must be >= 1000, got {cfg.traj_len}")
        return
    if len(cfg.params) != 1:
        raise ConfigError(f"scenario {cfg.scenario!r} takes a single map parameter")
    if cfg.scenario == "t1scan":
        if len(cfg.N) < 3:
            raise ConfigError("t1scan needs at least 3 values of N")
    elif len(cfg.N) != 1:
        raise ConfigError(f"scenario {cfg.scenario!r} takes a single N")
    continuous = cfg.formalism == "continuous" or cfg.scenario in ("echo", "snapshots")
    for N in cfg.N:
        if N < 2:
            raise ConfigError(f"N must be >= 2, got {N}")
        if N % 2 == 1 and cfg.L % 2 == 1:
            raise ConfigError(f"odd N={N} requires even L")
        if continuous and N % 2 == 0:
            raise ConfigError(f"continuous formalism needs odd N, got {N}")
    if cfg.scenario == "echo" and cfg.eps == 0:
        raise ConfigError("echo needs a nonzero perturbation eps")


def lambda_max(cfg: ExperimentConfig, value: float) -> float:
    if cfg.map == "sawtooth":
        return lyapunov_sawtooth_exact(value)
    lam, _ = lyapunov_numerical(cfg.classical(value), FIT_TRAJ, FIT_TRAJ_LEN, cfg.seed)
    return lam


def _fit(series, lam, N):
    try:
        return fit_decay(series, lambda_max=lam, N=N), None
    except FitUnavailable as exc:
        return None, str(exc)


# -- scenarios ------------------------------------------------------------

def scenario_series(cfg: ExperimentConfig, out: Path) -> dict:
    (value,), (N,) = cfg.params, cfg.N
    spec = cfg.quantum(value, N)
    s = qcf_ensemble(spec, cfg.formalism, cfg.ensemble, cfg.seed, cfg.steps,
                     cfg.sigma, cfg.resolution)
    io.write_series(out / "series.csv", s)
    lam = lambda_max(cfg, value)
    fit, err = _fit(s, lam, N)
    extra = {"lambda_max": lam} if err is None else {"lambda_max": lam, "error": err}
    io.write_fit(out / "fit.json", fit, extra)
    plateau = random_wave_plateau(cfg.formalism, N)
    if cfg.scenario == "negativity":
        io.write_table(out / "negativity.csv", ("t", "P_minus", "plateau"),
                       [(int(t), P, plateau) for t, P in zip(s.times, s.P_minus)])
    return {"nan": bool(np.isnan(s.G).any() or np.isnan(s.P_minus).any())}


def scenario_t1scan(cfg: ExperimentConfig, out: Path | None = None) -> dict:
    """T1 for each N from the constrained fit, then lambda T1 = A log N + B."""
    (value,) = cfg.params
    lam = lambda_max(cfg, value)
    rows, nan = [], False
    for N in cfg.N:
        s = qcf_ensemble(cfg.quantum(value, N), cfg.formalism, cfg.ensemble,
                         cfg.seed, cfg.steps, cfg.sigma, cfg.resolution)
        nan |= bool(np.isnan(s.G).any())
        fit = fit_decay(s, lambda_max=lam, N=N)
        rows.append((N, fit.constrained.T1, fit.slope, lam * fit.constrained.T1))
        if out is not None:
            io.write_series(out / f"series_N{N}.csv", s)
    A, B = fit_log_scaling([r[0] for r in rows], [r[3] for r in rows])
    table = {"N": [r[0] for r in rows], "T1": [r[1] for r in rows],
             "slope": [r[2] for r in rows], "A_fit": A, "B_fit": B,
             "lambda_max": lam}
    if out is not None:
        io.write_table(out / "t1scan.csv", ("N", "logN", "T1", "slope", "lambda_T1"),
                       [(N, math.log(N), T1, sl, lt) for N, T1, sl, lt in rows])
        io.write_json(out / "fit.json", table)
    table["nan"] = nan
    return table


def scenario_echo(cfg: ExperimentConfig, out: Path) -> dict:
    (value,), (N,) = cfg.params, cfg.N
    spec = cfg.quantum(value, N)
    pert = cfg.quantum(value + cfg.eps, N)
    rng = np.random.default_rng(cfg.seed)
    q0, p0 = rng.random(), rng.random() * cfg.L
    state = coherent_state(q0, p0, spec.hilbert, cfg.sigma)
    d = GaussianDensity.create(q0, p0, N, cfg.L, cfg.sigma, cfg.resolution)
    rep = loschmidt_echoes(state, d, spec, pert, cfg.steps, cfg.resolution)
    cols = ("t", "F_CLE", "F_QLE", "F_QCF_0", "F_QCF_eps", "lhs", "rhs", "residual")
    rows = zip(rep.times.tolist(), rep.F_CLE, rep.F_QLE, rep.F_QCF_0, rep.F_QCF_eps,
               rep.inequality_lhs, rep.inequality_rhs, rep.residual)
    io.write_table(out / "echo.csv", cols, rows)
    raw_cols = ("t",) + tuple(rep.raw)
    io.write_table(out / "echo_raw.csv", raw_cols,
                   zip(rep.times.tolist(), *rep.raw.values()))
    io.write_json(out / "fit.json", {"q0": q0, "p0": p0, "eps": cfg.eps,
                                    "min_residual": float(np.min(rep.residual))})
    return {"nan": bool(np.isnan(rep.residual).any())}


def scenario_snapshots(cfg: ExperimentConfig, out: Path) -> dict:
    """Wigner, classical density and echoed Wigner dumps for t = 0..steps."""
    (value,), (N,) = cfg.params, cfg.N
    spec = cfg.quantum(value, N)
    res = 3 * N if cfg.resolution is None else cfg.resolution
    rng = np.random.default_rng(cfg.seed)
    q0, p0 = rng.random(), rng.random() * cfg.L
    state = coherent_state(q0, p0, spec.hilbert, cfg.sigma)
    d = GaussianDensity.create(q0, p0, N, cfg.L, cfg.sigma, res)
    nan = False
    for t in range(cfg.steps + 1):
        w = wigner(propagate(state, spec, t), "continuous").values
        rho = density_grid(d, spec.classical, t, res)
        echo = echoed_wigner_sampled(state, spec, t, res)
        for name, vals in (("wigner", w), ("density", rho), ("echoed", echo)):
            io.write_grid(out / f"{name}_t{t:03d}.txt", vals, "continuous", N, cfg.L, t)
            nan |= bool(np.isnan(vals).any())
    io.write_json(out / "fit.json", {"q0": q0, "p0": p0, "resolution": res})
    return {"nan": nan}


def scenario_lyapunov(cfg: ExperimentConfig, out: Path) -> dict:
    rows = []
    for value in cfg.params:
        lam, se = lyapunov_numerical(cfg.classical(value), cfg.traj, cfg.traj_len, cfg.seed)
        exact = lyapunov_sawtooth_exact(value) if cfg.map == "sawtooth" else float("nan")
        rows.append((value, lam, se, exact))
    name = "K" if cfg.map == "sawtooth" else "mu"
    io.write_table(out / "lyapunov.csv", (name, "lambda", "stderr", "exact"), rows)
    io.write_json(out / "fit.json", {name: [r[0] for r in rows],
                                    "lambda": [r[1] for r in rows],
                                    "stderr": [r[2] for r in rows]})
    return {"nan": any(math.isnan(r[1]) for r in rows)}


RUNNERS = {
    "series": scenario_series,
    "negativity": scenario_series,
    "t1scan": scenario_t1scan,
    "echo": scenario_echo,
    "snapshots": scenario_snapshots,
    "lyapunov": scenario_lyapunov,
}


def run(cfg: ExperimentConfig) -> int:
    """Validate, execute and write outputs; returns the exit status."""
    validate(cfg)
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from None
    start = time.perf_counter()
    info = RUNNERS[cfg.scenario](cfg, out)
    nan = bool(info.get("nan", False))
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "wall_time": time.perf_counter() - start,
        "nan": nan,
        "status": "numerics_failure" if nan else "ok",
    }
    io.write_json(out / "meta.json", meta)
    return 3 if nan else 0


# -- argument handling ----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcftorus", description=__doc__.split("\n\n")[0])
    p.add_argument("--config", help="JSON config (or a previous meta.json)")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--map", choices=MAPS)
    p.add_argument("--K", help="sawtooth parameter(s)")
    p.add_argument("--mu", help="perturbed cat parameter(s)")
    p.add_argument("--L", type=int, help="momentum period")
    p.add_argument("--N", help="Hilbert space dimension(s)")
    p.add_argument("--formalism", choices=FORMALISMS)
    p.add_argument("--sigma", type=float, help="packet squeezing (default 1)")
    p.add_argument("--steps", type=int, help="number of map steps")
    p.add_argument("--ensemble", type=int, help="number of random initial packets")
    p.add_argument("--seed", type=int)
    p.add_argument("--resolution", type=int, help="quadrature points per axis (default 3N)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--eps", type=float, help="echo perturbation of K or mu (default 0.01)")
    p.add_argument("--traj", type=int, help="lyapunov: trajectories (default 100)")
    p.add_argument("--traj-len", dest="traj_len", type=int,
                   help="lyapunov: steps per trajectory (default 1e5)")
    return p


def load_config(path) -> dict:
    data = json.loads(Path(path).read_text())
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    unknown = set(data) - {f.name for f in dataclasses.fields(ExperimentConfig)}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def config_from_args(argv=None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values = load_config(args.config) if args.config else {}
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    cfg = ExperimentConfig()
    for k, v in values.items():
        if k in ("K", "mu"):
            v = parse_values(v, float)
        elif k == "N":
            v = parse_values(v, int)
        setattr(cfg, k, v)
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"qcftorus: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except FitUnavailable as exc:
        print(f"qcftorus: decay fit failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

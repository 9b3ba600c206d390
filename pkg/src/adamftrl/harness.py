"""Experiment configuration, drivers, and deterministic CSV/JSON serialization.

A configuration is a flat JSON object; the documented key set is validated up
front (unknown keys are rejected) and regime coherence is checked before
anything runs: the ``p <= 1`` bounds cannot be requested at ``p > 1``, the
decaying-alpha bound requires the matching schedule, and the order-level bound
requires a bounded domain within the oracle horizon.

Outputs are byte-stable: identical config and seed produce identical files.
Floats are serialized with 17 significant digits in CSV; JSON summaries use
sorted keys and round-trip floats.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .adversaries import (
    FixedSequence,
    GeometricSequence,
    NonObliviousPair,
    RandomUniform,
    run_nonoblivious_experiment,
    run_tightness_experiment,
)
from .bounds import (
    BoundReport,
    TraceStats,
    bound_b_from_stats,
    bound_b_undiscounted,
    bound_corollary1_discounted,
    bound_theorem1_discounted,
    bound_theorem3_discounted,
    dominance_holds,
)
from .errors import AdamFtrlError, ConfigError
from .learner import (
    DEFAULT_ORACLE_HORIZON,
    AlphaSchedule,
    HyperParams,
    LearnerState,
    alpha_at,
    ingest_gradient,
    propose_update,
)
from .regret import RegretLedger, accumulate_discounted_regret

RNG_NAME = "numpy-pcg64"
BOUND_ORDER = ("theorem1", "corollary1", "theorem3", "B")
TRACE_COLUMNS = (
    "t", "alpha_t", "g_t", "m_t", "q_t", "delta_bar_t", "delta_t", "clipped",
    "loss_discounted", "regret_discounted", "maxV_t", "D_t",
)
PAIR_COLUMNS = (
    "t", "loss_a", "delta_a", "f_a", "loss_aprime", "delta_aprime", "f_aprime", "strict",
)

_KNOWN_KEYS = {
    "beta1", "beta2", "alpha_kind", "alpha", "alpha_ratio", "alpha_values",
    "domain", "T", "u", "adversary", "gradients", "distribution", "v0",
    "kappa", "a", "b", "v", "p", "seed", "bounds", "out", "format",
    "oracle_horizon", "grid",
}


@dataclass
class ExperimentConfig:
    """Validated, fully resolved experiment description."""

    adversary: str
    T: int
    beta1: float | None = None
    beta2: float | None = None
    alpha_kind: str = "constant"
    alpha: float = 1.0
    alpha_ratio: float | None = None
    alpha_values: tuple[float, ...] | None = None
    domain: float | None = None
    u: float | str = 0.0
    gradients: tuple[float, ...] | None = None
    distribution: str = "uniform"
    v0: float | None = None
    kappa: float | None = None
    a: float | None = None
    b: float | None = None
    v: float | None = None
    p: float | None = None
    seed: int = 0
    bounds: tuple[str, ...] = ()
    out: str | None = None
    format: str = "both"
    oracle_horizon: int = DEFAULT_ORACLE_HORIZON
    grid: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(raw)
        if "adversary" not in d:
            raise ConfigError("config needs an 'adversary' kind")
        if "gradients" in d and d["gradients"] is not None:
            d["gradients"] = tuple(float(g) for g in d["gradients"])
        if "alpha_values" in d and d["alpha_values"] is not None:
            d["alpha_values"] = tuple(float(v) for v in d["alpha_values"])
        if "bounds" in d:
            d["bounds"] = tuple(d["bounds"])
        if "domain" in d and d["domain"] == "unbounded":
            d["domain"] = None
        if "T" not in d:
            if d["adversary"] == "fixed" and d.get("gradients"):
                d["T"] = len(d["gradients"]) - 1
            else:
                raise ConfigError("config needs a round count 'T'")
        cfg = cls(**d)
        if not cfg.grid:
            # sweep templates are validated per grid point, where incoherent
            # combinations become skipped rows rather than errors
            cfg.validate()
        return cfg

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        if self.adversary not in ("fixed", "random", "geometric", "nonoblivious"):
            raise ConfigError(f"unknown adversary kind {self.adversary!r}")
        if self.T < 0:
            raise ConfigError(f"T must be >= 0, got {self.T}")
        if self.format not in ("csv", "json", "both"):
            raise ConfigError(f"format must be csv|json|both, got {self.format!r}")
        if self.oracle_horizon < 1:
            raise ConfigError(f"oracle_horizon must be >= 1, got {self.oracle_horizon}")
        if self.domain is not None and not self.domain > 0:
            raise ConfigError(f"domain must be positive or 'unbounded', got {self.domain}")
        unknown_bounds = set(self.bounds) - set(BOUND_ORDER)
        if unknown_bounds:
            raise ConfigError(f"unknown bounds requested: {sorted(unknown_bounds)}")
        if self.adversary in ("fixed", "random"):
            self._validate_gradient_run()
        elif self.adversary == "geometric":
            self._validate_geometric()
        else:
            self._validate_nonoblivious()

    def _validate_gradient_run(self) -> None:
        try:
            params = self.hyper_params()
        except (ValueError, AdamFtrlError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.u == "negD":
            if self.domain is None:
                raise ConfigError("'negD' comparator needs a bounded domain")
        elif self.domain is not None and abs(float(self.u)) > self.domain:
            raise ConfigError(f"comparator u={self.u} outside [-{self.domain}, {self.domain}]")
        if self.alpha_kind == "explicit":
            needed = self.T + 1 if self.bounds else self.T
            if len(self.alpha_values or ()) < needed:
                raise ConfigError(
                    f"explicit alpha schedule needs at least {needed} values for T={self.T}"
                )
        try:
            spec = self.adversary_spec()
            if isinstance(spec, FixedSequence):
                spec.gradient_stream(self.T)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for name in self.bounds:
            if name in ("theorem1", "corollary1") and params.p > 1.0 + 1e-12:
                raise ConfigError(f"bound {name!r} needs p <= 1, got p = {params.p}")
            if name == "corollary1" and self.alpha_kind != "constant":
                raise ConfigError("bound 'corollary1' needs a constant alpha")
            if name == "theorem3":
                if params.p < 1.0 - 1e-12:
                    raise ConfigError(f"bound 'theorem3' needs p >= 1, got p = {params.p}")
                if self.alpha_kind != "exponential_decay":
                    raise ConfigError("bound 'theorem3' needs alpha_kind 'exponential_decay'")
            if name == "B":
                if self.domain is None:
                    raise ConfigError("bound 'B' needs a bounded domain")
                if params.p > 1.0 + 1e-12 or self.alpha_kind != "constant":
                    raise ConfigError("bound 'B' needs p <= 1 and constant alpha")
                if self.T > self.oracle_horizon:
                    raise ConfigError(
                        f"bound 'B' is undiscounted and needs T <= horizon ({self.oracle_horizon})"
                    )

    def _validate_geometric(self) -> None:
        if self.domain is None:
            raise ConfigError("tightness runs need a bounded domain")
        if self.kappa is None or self.v0 is None:
            raise ConfigError("geometric adversary needs 'kappa' and 'v0'")
        try:
            self.adversary_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ratio = self.ratio()
        if not (0.4 - 1e-12 <= ratio <= 0.6 + 1e-12):
            raise ConfigError(f"tightness runs need p in [0.4, 0.6], got {ratio}")
        if self.kappa < (1.0 - 1e-12) / ratio**2:
            raise ConfigError(f"tightness runs need kappa >= 1/p^2, got {self.kappa}")
        if self.T < 2:
            raise ConfigError(f"tightness runs need T >= 2, got {self.T}")
        if self.T > self.oracle_horizon:
            raise ConfigError(f"T={self.T} exceeds the oracle horizon {self.oracle_horizon}")

    def _validate_nonoblivious(self) -> None:
        for name in ("a", "b", "v"):
            if getattr(self, name) is None:
                raise ConfigError(f"nonoblivious adversary needs {name!r}")
        try:
            self.adversary_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ratio = self.ratio()
        if not (0.0 < ratio < 1.0):
            raise ConfigError(f"nonoblivious runs need p in (0, 1), got {ratio}")
        if self.T < 2:
            raise ConfigError(f"nonoblivious runs need T >= 2, got {self.T}")
        if self.T > self.oracle_horizon:
            raise ConfigError(f"T={self.T} exceeds the oracle horizon {self.oracle_horizon}")

    # -- derived objects --------------------------------------------------

    def adversary_spec(self):
        """The adversary description object this config denotes."""
        if self.adversary == "fixed":
            if not self.gradients:
                raise ValueError("fixed adversary needs a 'gradients' list")
            return FixedSequence(self.gradients)
        if self.adversary == "random":
            return RandomUniform(seed=self.seed, distribution=self.distribution)
        if self.adversary == "geometric":
            return GeometricSequence(v0=self.v0, kappa=self.kappa)
        return NonObliviousPair(a=self.a, b=self.b, v=self.v)

    def ratio(self) -> float:
        """Momentum ratio p, from the 'p' key or derived from the betas."""
        if self.p is not None:
            return self.p
        if self.beta1 is None or self.beta2 is None:
            raise ConfigError("need either 'p' or both 'beta1' and 'beta2'")
        return self.beta1 / math.sqrt(self.beta2)

    def alpha_schedule(self) -> AlphaSchedule:
        if self.alpha_kind == "constant":
            return AlphaSchedule.constant(self.alpha)
        if self.alpha_kind == "exponential_decay":
            ratio = self.alpha_ratio if self.alpha_ratio is not None else self.ratio()
            return AlphaSchedule.exponential_decay(self.alpha, ratio)
        if self.alpha_kind == "explicit":
            if not self.alpha_values:
                raise ConfigError("explicit alpha needs 'alpha_values'")
            return AlphaSchedule.explicit(self.alpha_values)
        raise ConfigError(f"unknown alpha_kind {self.alpha_kind!r}")

    def hyper_params(self) -> HyperParams:
        if self.beta1 is None or self.beta2 is None:
            raise ConfigError("gradient-stream runs need 'beta1' and 'beta2'")
        return HyperParams(beta1=self.beta1, beta2=self.beta2,
                           alpha=self.alpha_schedule(), D=self.domain)

    def comparator(self) -> float:
        if self.u == "negD":
            return -self.domain
        return float(self.u)

    def echo(self) -> dict:
        """JSON-safe snapshot of the resolved configuration."""
        out = {}
        for key in sorted(_KNOWN_KEYS - {"grid", "out"}):
            val = getattr(self, key, None)
            if isinstance(val, tuple):
                val = list(val)
            out[key] = val
        out["domain"] = "unbounded" if self.domain is None else self.domain
        out["rng"] = RNG_NAME
        return out


@dataclass(frozen=True)
class ExperimentResult:
    """Rows ready for CSV plus a JSON-safe summary."""

    csv_header: tuple[str, ...]
    csv_rows: tuple[tuple, ...]
    summary: dict

    def contracts_ok(self) -> bool:
        return bool(self.summary.get("contracts_ok", True))


def _evaluate_bounds(config: ExperimentConfig, params: HyperParams,
                     stats: TraceStats, u: float, t: int) -> dict[str, BoundReport]:
    reports = {}
    for name in BOUND_ORDER:
        if name not in config.bounds:
            continue
        if name == "theorem1":
            reports[name] = bound_theorem1_discounted(params, stats, u, t)
        elif name == "corollary1":
            reports[name] = bound_corollary1_discounted(params, stats, u, t)
        elif name == "theorem3":
            reports[name] = bound_theorem3_discounted(params, stats, u, t)
        else:
            reports[name] = bound_b_from_stats(params, stats, u, t)
    return reports


def _run_gradient_stream(config: ExperimentConfig) -> ExperimentResult:
    params = config.hyper_params()
    u = config.comparator()
    requested = [n for n in BOUND_ORDER if n in config.bounds]
    header = TRACE_COLUMNS + tuple(f"bound_{n}" for n in requested)

    if config.T == 0:
        summary = {
            "adversary": config.adversary,
            "T": 0,
            "u": u,
            "regret_discounted": 0.0,
            "clip_count": 0,
            "bounds": {n: None for n in requested},
            "contracts_ok": True,
            "config": config.echo(),
            "version": __version__,
        }
        return ExperimentResult(csv_header=header, csv_rows=(), summary=summary)

    gradients = config.adversary_spec().gradient_stream(config.T)
    state = LearnerState(horizon=config.oracle_horizon)
    ledger = RegretLedger(u=u, horizon=config.oracle_horizon)
    ingest_gradient(state, gradients[0], params)

    rows = []
    clip_count = 0
    final_reports: dict[str, BoundReport] = {}
    for t in range(1, config.T + 1):
        m_t, q_t = state.m, state.q
        out = propose_update(state, params)
        clip_count += int(out.clipped)
        g_t = gradients[t]
        ingest_gradient(state, g_t, params)
        accumulate_discounted_regret(ledger, g_t, out.delta, params.beta1)
        row = [
            t, alpha_at(params.alpha, t), g_t, m_t, q_t,
            out.delta_bar, out.delta, out.clipped,
            g_t * out.delta, ledger.r_disc, state.max_v, state.d_max,
        ]
        if t >= 2:
            final_reports = _evaluate_bounds(
                config, params, TraceStats.from_state(state), u, t)
            row.extend(final_reports[n].total for n in requested)
        else:
            row.extend(math.nan for _ in requested)
        rows.append(tuple(row))

    bounds_summary = {}
    dominance_flags = []
    for name in requested:
        if config.T >= 2:
            rep = final_reports[name]
            entry = {
                "total": rep.total,
                "term_comparator": rep.term_comparator,
                "term_variance": rep.term_variance,
                "term_max": rep.term_max,
                "scale": rep.scale,
            }
            if rep.scale == "discounted":
                ok = dominance_holds(ledger.r_disc, rep)
                entry["dominates"] = ok
                dominance_flags.append(ok)
            bounds_summary[name] = entry
        else:
            bounds_summary[name] = None

    summary = {
        "adversary": config.adversary,
        "T": config.T,
        "u": u,
        "regret_discounted": ledger.r_disc,
        "clip_count": clip_count,
        "bounds": bounds_summary,
        "contracts_ok": all(dominance_flags) if dominance_flags else True,
        "config": config.echo(),
        "version": __version__,
    }
    return ExperimentResult(csv_header=header, csv_rows=tuple(rows), summary=summary)


def _run_geometric(config: ExperimentConfig) -> ExperimentResult:
    ratio = config.ratio()
    D = config.domain
    result = run_tightness_experiment(ratio, D, config.kappa, config.v0,
                                      config.T, horizon=config.oracle_horizon)
    header = TRACE_COLUMNS + ("bound_B",)
    rows = []
    losses = config.adversary_spec().losses(config.T)
    running_regret = 0.0
    running_num = 0.0      # sum of raw losses seen by the minimizer
    running_den = 0.0      # sum of (ratio^s v_s)^2
    running_maxv = abs(losses[0])
    running_dmax = 0.0

    for r in result.rounds:
        running_num += losses[r.t - 1]
        running_den += (ratio ** (r.t - 1) * losses[r.t - 1]) ** 2
        running_maxv = max(running_maxv, abs(r.loss))
        running_dmax = max(running_dmax, abs(r.delta))
        running_regret += r.loss * (r.delta + D)
        b_here = bound_b_undiscounted(losses[: r.t + 1], ratio, -D, D / 4.0, D).total
        rows.append((
            r.t, D / 4.0, r.loss, running_num, running_den,
            r.delta_bar, r.delta, r.clipped,
            r.loss * r.delta, running_regret, running_maxv, running_dmax,
            b_here,
        ))

    slack = 1e-9 * max(1.0, abs(result.regret), abs(result.lower_bound))
    contracts = {
        "no_clipping": not result.any_clipped,
        "prebar_within_half_domain": result.max_prebar <= D / 2.0 + 1e-12 * D,
        "regret_at_least_lower_bound": result.regret >= result.lower_bound - slack,
    }
    summary = {
        "adversary": "geometric",
        "T": config.T,
        "u": -D,
        "alpha": D / 4.0,
        "p": ratio,
        "kappa": config.kappa,
        "v0": config.v0,
        "regret": result.regret,
        "lower_bound": result.lower_bound,
        "b_total": result.b_total,
        "ratio_regret_to_b": result.ratio,
        "max_prebar": result.max_prebar,
        "any_clipped": result.any_clipped,
        "clip_count": sum(r.clipped for r in result.rounds),
        "contracts": contracts,
        "contracts_ok": all(contracts.values()),
        "config": config.echo(),
        "version": __version__,
    }
    return ExperimentResult(csv_header=header, csv_rows=tuple(rows), summary=summary)


def _run_nonoblivious(config: ExperimentConfig) -> ExperimentResult:
    pair = config.adversary_spec()
    result = run_nonoblivious_experiment(pair.a, pair.b, pair.v, config.ratio(),
                                         config.T, beta1=config.beta1,
                                         horizon=config.oracle_horizon)
    rows = tuple(
        (r.t, r.loss_a, r.delta_a, r.f_a, r.loss_aprime, r.delta_aprime,
         r.f_aprime, r.strict)
        for r in result.rounds
    )
    separation_expected = pair.separation_expected
    contracts_ok = True
    if separation_expected:
        contracts_ok = (result.per_round_strict
                        and result.regret_a < result.regret_aprime
                        and not result.any_clipped)
    summary = {
        "adversary": "nonoblivious",
        "T": config.T,
        "a": config.a,
        "b": config.b,
        "v": config.v,
        "p": config.ratio(),
        "regret_a": result.regret_a,
        "regret_aprime": result.regret_aprime,
        "per_round_strict": result.per_round_strict,
        "any_clipped": result.any_clipped,
        "separation_expected": separation_expected,
        "contracts_ok": contracts_ok,
        "config": config.echo(),
        "version": __version__,
    }
    return ExperimentResult(csv_header=PAIR_COLUMNS, csv_rows=rows, summary=summary)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Drive one experiment to completion; deterministic given (config, seed)."""
    if config.adversary in ("fixed", "random"):
        return _run_gradient_stream(config)
    if config.adversary == "geometric":
        return _run_geometric(config)
    return _run_nonoblivious(config)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

_GRID_KEYS = ("beta1", "beta2", "kappa", "a", "b", "T")


def sweep(config: ExperimentConfig) -> ExperimentResult:
    """Run the config once per grid point; one summary row per point.

    Points whose derived config is invalid are reported as skipped with the
    reason, not errors.  Row order follows the cartesian product of the grid
    values in the order given, keyed by the sorted grid-field names.
    """
    if not config.grid:
        raise ConfigError("sweep needs a non-empty 'grid'")
    if config.adversary not in ("fixed", "random", "geometric", "nonoblivious"):
        raise ConfigError(f"unknown adversary kind {config.adversary!r}")
    unknown = set(config.grid) - set(_GRID_KEYS)
    if unknown:
        raise ConfigError(f"grid keys must be among {_GRID_KEYS}, got {sorted(unknown)}")
    keys = sorted(config.grid)
    value_lists = [list(config.grid[k]) for k in keys]
    if any(not vals for vals in value_lists):
        raise ConfigError("grid value lists must be non-empty")

    base = {k: v for k, v in config.__dict__.items() if k != "grid"}
    metric_cols = _sweep_metric_columns(config.adversary)
    header = tuple(keys) + ("status",) + metric_cols
    rows = []
    ok_points = []
    for combo in itertools.product(*value_lists):
        derived_dict = dict(base)
        derived_dict.update(dict(zip(keys, combo)))
        try:
            derived = ExperimentConfig(**derived_dict)
            derived.validate()
            result = run_experiment(derived)
        except (AdamFtrlError, ValueError) as exc:
            rows.append(tuple(combo) + (f"skipped: {exc}",) + tuple(math.nan for _ in metric_cols))
            continue
        metrics = _sweep_metrics(config.adversary, result.summary, metric_cols)
        rows.append(tuple(combo) + ("ok",) + metrics)
        ok_points.append((dict(zip(keys, combo)), result.summary))

    summary = {
        "sweep_keys": keys,
        "points_total": len(rows),
        "points_ok": len(ok_points),
        "contracts_ok": all(s.get("contracts_ok", True) for _, s in ok_points),
        "config": config.echo(),
        "version": __version__,
    }
    annotations = _argmin_annotations(config, keys, ok_points)
    if annotations is not None:
        summary["beta2_argmin"] = annotations
    return ExperimentResult(csv_header=header, csv_rows=tuple(rows), summary=summary)


def _sweep_metric_columns(adversary: str) -> tuple[str, ...]:
    if adversary in ("fixed", "random"):
        return ("regret_discounted",) + tuple(
            f"bound_{n}" for n in BOUND_ORDER) + ("dominance_ok",)
    if adversary == "geometric":
        return ("regret", "lower_bound", "b_total", "ratio_regret_to_b", "any_clipped")
    return ("regret_a", "regret_aprime", "per_round_strict", "any_clipped")


def _sweep_metrics(adversary: str, summary: dict, cols: tuple[str, ...]) -> tuple:
    if adversary in ("fixed", "random"):
        vals = [summary["regret_discounted"]]
        for name in BOUND_ORDER:
            entry = summary["bounds"].get(name)
            vals.append(entry["total"] if entry else math.nan)
        vals.append(summary["contracts_ok"])
        return tuple(vals)
    return tuple(summary[c] for c in cols)


def _argmin_annotations(config: ExperimentConfig, keys, ok_points):
    """For each beta1, the grid beta2 minimizing the constant-alpha bound."""
    if "beta2" not in keys or "corollary1" not in config.bounds:
        return None
    groups: dict[float, tuple[float, float]] = {}
    for combo, summary in ok_points:
        entry = summary["bounds"].get("corollary1")
        if not entry:
            continue
        b1 = combo.get("beta1", config.beta1)
        cur = groups.get(b1)
        if cur is None or entry["total"] < cur[1]:
            groups[b1] = (combo["beta2"], entry["total"])
    return [
        {"beta1": b1, "argmin_beta2": b2, "bound_total": tot}
        for b1, (b2, tot) in sorted(groups.items())
    ]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(result: ExperimentResult) -> str:
    lines = [",".join(result.csv_header)]
    for row in result.csv_rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(result: ExperimentResult) -> str:
    return json.dumps(result.summary, sort_keys=True, indent=2) + "\n"


def write_outputs(result: ExperimentResult, out_base: str | Path,
                  fmt: str = "both") -> list[Path]:
    """Write ``<out_base>.csv`` and/or ``<out_base>.json``; returns the paths."""
    base = Path(out_base)
    if base.parent and not base.parent.exists():
        raise ConfigError(f"output directory does not exist: {base.parent}")
    written = []
    try:
        if fmt in ("csv", "both"):
            path = base.with_suffix(".csv")
            path.write_text(render_csv(result), encoding="utf-8")
            written.append(path)
        if fmt in ("json", "both"):
            path = base.with_suffix(".json")
            path.write_text(render_json(result), encoding="utf-8")
            written.append(path)
    except OSError as exc:
        raise ConfigError(f"cannot write outputs at {base}: {exc}") from exc
    return written

"""Regret upper bounds, evaluated in discounted scale with per-term breakdown.

All discounted bounds consume the learner's statistics taken after the
round-``T`` loss was ingested (gradients ``g_0..g_T`` seen), at which point

    q     = sum_{t=0..T} beta2^(T-t) g_t^2
    max_v = max_{t=0..T} beta1^(T-t) |g_t|

are exactly the sums appearing on the right-hand sides.  The comparator and
variance terms share one square root; the report stores the split.

Stable re-anchorings used here, all exact algebra:

* general non-increasing-alpha bound, ``p <= 1``:
  ``beta1^T sqrt(sum beta2^(-t) g_t^2) = p^T sqrt(q)`` and
  ``(max_t alpha_t p^(-t)) p^T = max_t alpha_t p^(T-t)``;
* exponential-decay bound, ``p >= 1``:
  ``sqrt(sum beta1^(2T) beta2^(-t) g_t^2) = p^T sqrt(q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RegimeError, ScheduleError
from .learner import HyperParams, LearnerState, alpha_at

# Regime guards tolerate one ulp of rounding in p = beta1/sqrt(beta2).
_P_TOL = 1e-12


@dataclass(frozen=True)
class TraceStats:
    """Discounted trace statistics a bound needs: ``q``, ``max_v``, ``d_max``."""

    q: float
    max_v: float
    d_max: float

    @classmethod
    def from_state(cls, state: LearnerState) -> "TraceStats":
        return cls(q=state.q, max_v=state.max_v, d_max=state.d_max)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: total plus its comparator/variance/max split."""

    kind: str
    total: float
    term_comparator: float
    term_variance: float
    term_max: float
    scale: str


def _require(cond: bool, exc: type[Exception], msg: str) -> None:
    if not cond:
        raise exc(msg)


def bound_theorem1_discounted(params: HyperParams, stats: TraceStats, u: float,
                              T: int) -> BoundReport:
    """General discounted bound for ``p <= 1`` and any non-increasing alpha.

    total = (u^2 / alpha_{T+1}) sqrt(q)
          + (sqrt(6 beta2) / (2 beta1)) (max_{1<=t<=T} alpha_t p^(T-t)) sqrt(q)
          + 7 d_max max_v
    """
    _require(params.p <= 1.0 + _P_TOL, RegimeError,
             f"general bound needs p <= 1, got p = {params.p}")
    _require(T >= 1, ValueError, f"need T >= 1, got {T}")
    alphas = [alpha_at(params.alpha, t) for t in range(1, T + 2)]
    for prev, nxt in zip(alphas, alphas[1:]):
        _require(nxt <= prev, ScheduleError,
                 f"alpha must be non-increasing, got {prev} -> {nxt}")
    root_q = math.sqrt(stats.q)
    coeff = max(alphas[t - 1] * params.p ** (T - t) for t in range(1, T + 1))
    comparator = u * u / alphas[T] * root_q
    variance = math.sqrt(6.0 * params.beta2) / (2.0 * params.beta1) * coeff * root_q
    term_max = 7.0 * stats.d_max * stats.max_v
    return BoundReport(
        kind="theorem1",
        total=comparator + variance + term_max,
        term_comparator=comparator,
        term_variance=variance,
        term_max=term_max,
        scale="discounted",
    )


def bound_corollary1_discounted(params: HyperParams, stats: TraceStats, u: float,
                                T: int) -> BoundReport:
    """Constant-alpha specialization of the general ``p <= 1`` bound.

    total = (u^2/alpha + alpha sqrt(6 beta2) / (2 beta1)) sqrt(q) + 7 d_max max_v
    """
    _require(params.p <= 1.0 + _P_TOL, RegimeError,
             f"constant-alpha bound needs p <= 1, got p = {params.p}")
    _require(params.alpha.kind == "constant", ScheduleError,
             f"constant-alpha bound needs a constant schedule, got {params.alpha.kind!r}")
    _require(T >= 1, ValueError, f"need T >= 1, got {T}")
    a = params.alpha.alpha
    root_q = math.sqrt(stats.q)
    comparator = u * u / a * root_q
    variance = a * math.sqrt(6.0 * params.beta2) / (2.0 * params.beta1) * root_q
    term_max = 7.0 * stats.d_max * stats.max_v
    return BoundReport(
        kind="corollary1",
        total=comparator + variance + term_max,
        term_comparator=comparator,
        term_variance=variance,
        term_max=term_max,
        scale="discounted",
    )


def bound_theorem3_discounted(params: HyperParams, stats: TraceStats, u: float,
                              T: int) -> BoundReport:
    """Discounted bound for ``p >= 1`` with ``alpha_t = alpha / p^(t-1)``.

    total = (u^2/alpha + alpha sqrt(6)/2) p^T sqrt(q) + 7 d_max max_v
    """
    _require(params.p >= 1.0 - _P_TOL, RegimeError,
             f"decaying-alpha bound needs p >= 1, got p = {params.p}")
    _require(params.alpha.kind == "exponential_decay", ScheduleError,
             "decaying-alpha bound needs an exponential_decay schedule, "
             f"got {params.alpha.kind!r}")
    _require(abs(params.alpha.ratio - params.p) <= _P_TOL * max(1.0, params.p),
             ScheduleError,
             f"schedule decay ratio {params.alpha.ratio} must equal p = {params.p}")
    _require(T >= 1, ValueError, f"need T >= 1, got {T}")
    a = params.alpha.alpha
    root = params.p ** T * math.sqrt(stats.q)
    comparator = u * u / a * root
    variance = a * math.sqrt(6.0) / 2.0 * root
    term_max = 7.0 * stats.d_max * stats.max_v
    return BoundReport(
        kind="theorem3",
        total=comparator + variance + term_max,
        term_comparator=comparator,
        term_variance=variance,
        term_max=term_max,
        scale="discounted",
    )


def bound_b_undiscounted(losses, ratio: float, u: float, alpha: float,
                         D: float) -> BoundReport:
    """Order-level bound on the raw loss sequence, undiscounted scale.

    total = (u^2/alpha + alpha/ratio) ratio^(-T) sqrt(sum_t (ratio^t v_t)^2)
          + D max_t |v_t|

    with ``losses = (v_0..v_T)``.  This is the object the tightness experiment
    compares realized regret against; it uses the domain half-width ``D``, not
    the realized ``d_max``.
    """
    _require(len(losses) >= 1, ValueError, "need at least the round-0 loss")
    _require(0.0 < ratio <= 1.0 + _P_TOL, RegimeError,
             f"order-level bound needs 0 < ratio <= 1, got {ratio}")
    _require(D > 0, ValueError, f"domain half-width must be positive, got {D}")
    T = len(losses) - 1
    radical = math.sqrt(math.fsum((ratio**t * v) ** 2 for t, v in enumerate(losses)))
    comparator = u * u / alpha * ratio ** (-T) * radical
    variance = alpha / ratio * ratio ** (-T) * radical
    term_max = D * max(abs(v) for v in losses)
    return BoundReport(
        kind="B",
        total=comparator + variance + term_max,
        term_comparator=comparator,
        term_variance=variance,
        term_max=term_max,
        scale="undiscounted",
    )


def bound_b_from_stats(params: HyperParams, stats: TraceStats, u: float,
                       T: int) -> BoundReport:
    """The same order-level bound recovered from discounted statistics.

    Uses ``sqrt(sum (p^t v_t)^2) = beta1^(-T) sqrt(q)`` and
    ``max |v_t| = beta1^(-T) max_v``; only meaningful at small ``T`` where
    ``beta1^(-T)`` is benign.
    """
    _require(params.D is not None, RegimeError, "order-level bound needs a bounded domain")
    _require(params.p <= 1.0 + _P_TOL, RegimeError,
             f"order-level bound needs p <= 1, got p = {params.p}")
    _require(params.alpha.kind == "constant", ScheduleError,
             f"order-level bound needs a constant schedule, got {params.alpha.kind!r}")
    a = params.alpha.alpha
    scale = params.beta1 ** -T
    radical = scale * math.sqrt(stats.q)
    comparator = u * u / a * radical
    variance = a / params.p * radical
    term_max = params.D * scale * stats.max_v
    return BoundReport(
        kind="B",
        total=comparator + variance + term_max,
        term_comparator=comparator,
        term_variance=variance,
        term_max=term_max,
        scale="undiscounted",
    )


def dominance_holds(regret_discounted: float, report: BoundReport,
                    slack: float = 1e-9) -> bool:
    """One-sided check ``regret <= total`` with relative slack."""
    return regret_discounted <= report.total + slack * max(
        1.0, abs(regret_discounted), abs(report.total)
    )

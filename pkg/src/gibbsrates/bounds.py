"""Analytic total-variation convergence bounds for two-component Gibbs chains.

Four bound families live here, all evaluated log-safely:

* the drift/minorization (Rosenthal-type) bound with its tuning knobs
  ``(d, r)``, a minimal-step solver, and a grid optimizer — the generic
  certificate that can demand ~10^34 steps from a chain that actually
  converges in a few hundred;
* the generic two-term geometric bound ``A^l + weight * B^l``;
* random-scan lower/upper bounds for the flat-prior beta-binomial model,
  plus the matching systematic-scan upper bounds and their validity gates;
* the chi-square bound for the Poisson-gamma marginal chain, and the
  scan-order rate comparison (systematic versus random, per unit work).

Closed-form constants for the beta-binomial certificate itself (lambda, b,
epsilon) are constructed in :mod:`gibbsrates.families`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptyFeasibleGridError,
    NoSolutionError,
    NonContractingError,
    NonContractingWarning,
    ParameterError,
    ValidityThresholdError,
)
from .numerics import (
    LOG_ZERO,
    GeometricTerm,
    LogMagnitude,
    StepCount,
    log1mexp,
    log_sum_terms,
    min_steps_geometric,
)

# Decay rate of the Azuma-style tail term in the random-scan upper bound:
# 3 * exp(-(steps - 1)/8).
AZUMA_RATE = math.exp(-0.125)


def _check_steps(steps: int, minimum: int = 0) -> int:
    if not isinstance(steps, (int, np.integer)):
        raise ParameterError(f"step count must be an integer, got {steps!r}")
    steps = int(steps)
    if steps < minimum:
        raise ParameterError(f"step count must be at least {minimum}, got {steps}")
    return steps


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or int(n) < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class DriftMinorization:
    """A drift-and-minorization certificate (lambda, b, epsilon, V(x0)).

    ``lam`` and ``b`` are the drift constants in
    E[V(next) | current] <= lam * V(current) + b, ``epsilon`` is the
    minorization mass on the small set (stored as a LogMagnitude because
    values like 2^-100 round to zero in linear space), and ``v_x0`` is the
    drift function evaluated at the starting state.
    """

    lam: float
    b: float
    epsilon: LogMagnitude
    v_x0: float = 0.0

    def __post_init__(self) -> None:
        eps = self.epsilon
        if not isinstance(eps, LogMagnitude):
            eps = LogMagnitude.from_linear(float(eps))
            object.__setattr__(self, "epsilon", eps)
        lam = float(self.lam)
        b = float(self.b)
        v = float(self.v_x0)
        if not 0.0 <= lam < 1.0:
            raise ParameterError(f"drift factor lambda must lie in [0, 1), got {lam}")
        if b < 0.0:
            raise ParameterError(f"drift constant b must be nonnegative, got {b}")
        if not eps.log_value <= 0.0 or eps.log_value == LOG_ZERO:
            raise ParameterError(
                "minorization mass epsilon must lie in (0, 1], got "
                f"log epsilon = {eps.log_value}"
            )
        if v < 0.0:
            raise ParameterError(f"V(x0) must be nonnegative, got {v}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "v_x0", v)

    @property
    def small_set_threshold(self) -> float:
        """Smallest admissible small-set radius d: 2b/(1 - lambda)."""
        return 2.0 * self.b / (1.0 - self.lam)

    @property
    def coefficient(self) -> float:
        """The constant 1 + b/(1 - lambda) + V(x0) multiplying the drift term."""
        return 1.0 + self.b / (1.0 - self.lam) + self.v_x0


@dataclass(frozen=True)
class RosenthalParams:
    """Tuning knobs of the drift/minorization bound.

    ``d`` is the small-set radius ({V <= d}); ``r`` in (0, 1) splits the
    step budget between the minorization and drift terms.  The constraint
    d >= 2b/(1 - lambda) depends on the certificate and is validated where
    the two meet.
    """

    d: float
    r: float

    def __post_init__(self) -> None:
        d = float(self.d)
        r = float(self.r)
        if not math.isfinite(d) or d < 0.0:
            raise ParameterError(f"invalid-d: small-set radius must be >= 0, got {d}")
        if not 0.0 < r < 1.0:
            raise ParameterError(f"invalid-r: exponent split must lie in (0, 1), got {r}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class RosenthalIngredients:
    """Derived quantities of the bound: alpha, u, and both decay ratios (logs).

    ``rosenthal_alpha`` is the bound's internal (1+d)/(1+2b+lambda*d) — a
    different animal from any scan weight, hence the prefixed name.
    """

    rosenthal_alpha: float
    u: float
    log_ratio_minorization: float
    log_ratio_drift: float
    coefficient: float


def rosenthal_ingredients(
    cert: DriftMinorization, params: RosenthalParams
) -> RosenthalIngredients:
    """Resolve (alpha, u, decay ratios) and validate d against the certificate."""
    threshold = cert.small_set_threshold
    if params.d < threshold:
        raise ValidityThresholdError(
            f"invalid-d: d={params.d} is below the small-set threshold "
            f"2b/(1-lambda)={threshold}"
        )
    alpha = (1.0 + params.d) / (1.0 + 2.0 * cert.b + cert.lam * params.d)
    u = 1.0 + 2.0 * (cert.lam * params.d + cert.b)
    log_ratio_drift = params.r * math.log(u) - (1.0 - params.r) * math.log(alpha)
    log_ratio_minorization = params.r * log1mexp(cert.epsilon.log_value)
    return RosenthalIngredients(
        rosenthal_alpha=alpha,
        u=u,
        log_ratio_minorization=log_ratio_minorization,
        log_ratio_drift=log_ratio_drift,
        coefficient=cert.coefficient,
    )


def rosenthal_bound(
    cert: DriftMinorization, params: RosenthalParams, steps: StepCount
) -> LogMagnitude:
    """Evaluate (1-eps)^(r*steps) + (u^r / alpha^(1-r))^steps * coefficient.

    Raises ``NonContractingError`` when the drift ratio exceeds 1 (the
    formula then grows and certifies nothing); a ratio of exactly 1 is
    degenerate but well defined, so the value is returned with a
    ``NonContractingWarning``.
    """
    steps = _check_steps(steps)
    ing = rosenthal_ingredients(cert, params)
    if ing.log_ratio_drift > 0.0:
        raise NonContractingError(
            "non-contracting-parameters: u^r/alpha^(1-r) = "
            f"{math.exp(ing.log_ratio_drift)} exceeds 1 for d={params.d}, r={params.r}"
        )
    if ing.log_ratio_drift == 0.0:
        warnings.warn(
            "non-contracting-parameters: u^r/alpha^(1-r) equals 1; the bound "
            "never decays below its coefficient",
            NonContractingWarning,
            stacklevel=2,
        )
    if steps == 0:
        log_term1 = 0.0
    elif ing.log_ratio_minorization == LOG_ZERO:
        log_term1 = LOG_ZERO
    else:
        log_term1 = steps * ing.log_ratio_minorization
    log_term2 = steps * ing.log_ratio_drift + math.log(ing.coefficient)
    return LogMagnitude(np.logaddexp(log_term1, log_term2))


def rosenthal_min_steps(
    cert: DriftMinorization,
    params: RosenthalParams,
    target: float,
) -> StepCount:
    """Minimal step count at which the drift/minorization bound <= target."""
    target = float(target)
    if not 0.0 < target < 1.0:
        raise ParameterError(f"target must lie in (0, 1), got {target}")
    ing = rosenthal_ingredients(cert, params)
    if ing.log_ratio_drift >= 0.0:
        raise NonContractingError(
            "non-contracting-parameters: the drift term never decays "
            f"(u^r/alpha^(1-r) = {math.exp(ing.log_ratio_drift)}), so the bound "
            f"stays above its coefficient {ing.coefficient} >= 1 > {target}"
        )
    terms = [
        GeometricTerm(0.0, ing.log_ratio_minorization),
        GeometricTerm(math.log(ing.coefficient), ing.log_ratio_drift),
    ]
    return min_steps_geometric(terms, target)


@dataclass(frozen=True)
class RosenthalGridCell:
    """Outcome of one (d, r) grid point: solved steps or the failure kind."""

    params: RosenthalParams
    min_steps: StepCount | None
    status: str  # "ok" | "infeasible" | "non-contracting" | "no-solution"
    detail: str = ""


@dataclass(frozen=True)
class RosenthalGridResult:
    best_params: RosenthalParams
    min_steps: StepCount
    cells: tuple[RosenthalGridCell, ...]


def rosenthal_grid_optimize(
    cert: DriftMinorization,
    target: float,
    d_grid: Sequence[float],
    r_grid: Sequence[float],
) -> RosenthalGridResult:
    """Minimize the solved step count over a (d, r) grid.

    Infeasible and non-contracting cells are recorded and skipped; ties on
    step count are broken by smaller d, then smaller r.  Raises
    ``EmptyFeasibleGridError`` when no cell survives.
    """
    if not d_grid or not r_grid:
        raise ParameterError("empty-feasible-grid: d and r grids must be non-empty")
    cells: list[RosenthalGridCell] = []
    for d in d_grid:
        for r in r_grid:
            try:
                params = RosenthalParams(d=d, r=r)
                steps = rosenthal_min_steps(cert, params, target)
            except ValidityThresholdError as exc:
                cells.append(RosenthalGridCell(params, None, "infeasible", str(exc)))
                continue
            except NonContractingError as exc:
                cells.append(RosenthalGridCell(params, None, "non-contracting", str(exc)))
                continue
            except NoSolutionError as exc:
                cells.append(RosenthalGridCell(params, None, "no-solution", str(exc)))
                continue
            cells.append(RosenthalGridCell(params, steps, "ok"))
    feasible = [c for c in cells if c.status == "ok"]
    if not feasible:
        raise EmptyFeasibleGridError(
            "empty-feasible-grid: no (d, r) grid point satisfies the constraints"
        )
    best = min(feasible, key=lambda c: (c.min_steps, c.params.d, c.params.r))
    return RosenthalGridResult(
        best_params=best.params, min_steps=best.min_steps, cells=tuple(cells)
    )


def _two_term_parts(ratio_a: float, ratio_b: float, weight: float):
    for name, ratio in (("A", ratio_a), ("B", ratio_b)):
        if not 0.0 <= float(ratio) < 1.0:
            raise ParameterError(f"invalid ratio: {name} must lie in [0, 1), got {ratio}")
    if float(weight) < 0.0:
        raise ParameterError(f"weight must be nonnegative, got {weight}")
    return [
        GeometricTerm.from_linear(1.0, float(ratio_a)),
        GeometricTerm.from_linear(float(weight), float(ratio_b)),
    ]


def two_term_bound(
    ratio_a: float, ratio_b: float, weight: float, steps: StepCount
) -> float:
    """Evaluate A^steps + weight * B^steps (both ratios in [0, 1))."""
    steps = _check_steps(steps)
    terms = _two_term_parts(ratio_a, ratio_b, weight)
    log_value = log_sum_terms(terms, steps)
    return 0.0 if log_value == LOG_ZERO else math.exp(log_value)


def two_term_min_steps(
    ratio_a: float, ratio_b: float, weight: float, target: float
) -> StepCount:
    """Minimal step count with A^steps + weight * B^steps <= target."""
    terms = _two_term_parts(ratio_a, ratio_b, weight)
    return min_steps_geometric(terms, target)


def random_scan_validity_threshold(n: int) -> int:
    """Smallest step count where the random-scan upper bound is stated: ceil(3n/4)."""
    return -((-3 * _check_n(n)) // 4)


def systematic_validity_threshold(n: int) -> int:
    """Smallest step count where the systematic upper bound is stated: ceil(3n/16)."""
    return -((-3 * _check_n(n)) // 16)


def random_scan_rate(n: int) -> float:
    """Per-step geometric rate of the balanced random scan: (1 + sqrt(n/(n+2)))/2."""
    n = _check_n(n)
    return 0.5 + 0.5 * math.sqrt(n / (n + 2.0))


def systematic_rate(n: int) -> float:
    """Per-sweep geometric rate of the systematic scan: n/(n+2) = 1 - 2/(n+2)."""
    n = _check_n(n)
    return n / (n + 2.0)


def random_scan_lower(n: int, steps: StepCount) -> float:
    """Lower bound (1/3) * (1 - 1/(n+2))^steps on random-scan TV, steps >= 1.

    Applicability note: the derivation assumes the chain starts in the upper
    half of the parameter range (theta0 >= 1/2); the formula is evaluated
    regardless and that condition travels as report metadata.
    """
    n = _check_n(n)
    steps = _check_steps(steps, minimum=1)
    return math.exp(math.log(1.0 / 3.0) + steps * math.log1p(-1.0 / (n + 2.0)))


def random_scan_upper(n: int, steps: StepCount) -> float:
    """Upper bound 3 e^{-(steps-1)/8} + 10 sqrt((n+2)/n) * rate^(steps-1).

    ``rate`` is (1 + sqrt(n/(n+2)))/2.  Only stated for steps >= ceil(3n/4);
    below that the call raises ``ValidityThresholdError``.  Values above 1
    are vacuous but returned as-is so curves stay smooth.
    """
    n = _check_n(n)
    steps = _check_steps(steps)
    threshold = random_scan_validity_threshold(n)
    if steps < threshold:
        raise ValidityThresholdError(
            f"below-validity-threshold: the random-scan upper bound needs "
            f"steps >= ceil(3n/4) = {threshold}, got {steps}"
        )
    tail = 3.0 * math.exp(-(steps - 1) / 8.0)
    rate = random_scan_rate(n)
    main = 10.0 * math.sqrt((n + 2.0) / n) * math.exp((steps - 1) * math.log(rate))
    return tail + main


SYSTEMATIC_ORDERS = ("x_theta", "theta_x")


def systematic_upper(n: int, steps: StepCount, order: str = "x_theta") -> float:
    """Upper bound 10 * (1 - 2/(n+2))^e on systematic-scan TV.

    The exponent depends on the sweep order: e = steps for the x-then-theta
    sweep and e = steps - 1/2 for the theta-then-x sweep (that chain is half
    a sweep ahead when watched on the x coordinate).  Stated for
    steps >= ceil(3n/16).
    """
    n = _check_n(n)
    steps = _check_steps(steps)
    if order not in SYSTEMATIC_ORDERS:
        raise ParameterError(
            f"unknown sweep order {order!r}; expected one of {SYSTEMATIC_ORDERS}"
        )
    threshold = systematic_validity_threshold(n)
    if steps < threshold:
        raise ValidityThresholdError(
            f"below-validity-threshold: the systematic upper bound needs "
            f"steps >= ceil(3n/16) = {threshold}, got {steps}"
        )
    exponent = float(steps) if order == "x_theta" else steps - 0.5
    return 10.0 * math.exp(exponent * math.log(systematic_rate(n)))


def chisq_bound_pg(
    j: int,
    steps: StepCount,
    stationary,
    decay_rate: float = 0.5,
) -> float:
    """Chi-square bound sqrt(1/m(j)) * decay_rate^steps for a start at j.

    ``stationary`` is the (truncated) stationary law m — a Distribution or
    plain vector; ``decay_rate`` defaults to the flat-shape Poisson-gamma
    chain's second eigenvalue 1/2.  Sharp in rate, poor in constant for
    far-out starts: the constant costs (j+1)/2 extra halving steps.
    """
    steps = _check_steps(steps)
    if not isinstance(j, (int, np.integer)) or int(j) < 0:
        raise ParameterError(f"start state j must be a nonnegative integer, got {j!r}")
    weights = stationary.weights if hasattr(stationary, "weights") else np.asarray(stationary, dtype=float)
    if int(j) >= weights.shape[0]:
        raise ParameterError(
            f"j beyond truncation: start {j} outside the {weights.shape[0]}-state law"
        )
    mass = float(weights[int(j)])
    if mass <= 0.0:
        raise ParameterError(f"stationary mass at j={j} must be positive, got {mass}")
    if not 0.0 < float(decay_rate) < 1.0:
        raise ParameterError(f"decay rate must lie in (0, 1), got {decay_rate}")
    return math.exp(-0.5 * math.log(mass) + steps * math.log(decay_rate))


def chisq_min_steps_pg(
    j: int,
    stationary,
    target: float,
    decay_rate: float = 0.5,
) -> StepCount:
    """Minimal step count at which the chi-square bound drops to the target."""
    at_zero = chisq_bound_pg(j, 0, stationary, decay_rate)
    term = GeometricTerm.from_linear(at_zero, float(decay_rate))
    return min_steps_geometric([term], target)


def scan_time_ratio(n: int) -> float:
    """Work-normalized rate ratio of systematic over random scan; tends to 2.

    One systematic sweep performs two conditional refreshes while one
    random-scan step performs one, so comparable units are conditional
    draws.  The ratio returned is ln(systematic per-sweep rate) divided by
    2 ln(random per-step rate) — the factor by which random scan needs more
    conditional draws for the same accuracy.  As n grows this tends to 2:
    the balanced random scan takes about twice the work.
    """
    n = _check_n(n)
    q = systematic_rate(n)
    return math.log(q) / (2.0 * math.log(0.5 + 0.5 * math.sqrt(q)))


@dataclass(frozen=True)
class BoundCurve:
    """A labeled bound curve: step count -> LogMagnitude, with a validity gate.

    ``evaluate`` is only consulted for steps >= ``min_valid_steps``;
    ``at_or_none`` returns None below the gate so report tables can leave
    those cells blank instead of printing numbers the formula does not claim.
    """

    label: str
    min_valid_steps: int
    evaluate: Callable[[StepCount], LogMagnitude]
    notes: str = ""

    def at(self, steps: StepCount) -> LogMagnitude:
        steps = _check_steps(steps)
        if steps < self.min_valid_steps:
            raise ValidityThresholdError(
                f"below-validity-threshold: {self.label} is stated for steps >= "
                f"{self.min_valid_steps}, got {steps}"
            )
        return self.evaluate(steps)

    def at_or_none(self, steps: StepCount) -> float | None:
        if steps < self.min_valid_steps:
            return None
        return self.evaluate(steps).to_float()

    def is_vacuous(self, steps: StepCount) -> bool:
        """True when the bound evaluates above 1 (no information at this step)."""
        return self.at(steps).log_value > 0.0

"""Scalar and matrix numerics that survive extreme magnitudes.

Convergence certificates for slowly mixing chains produce step counts near
10^34 and per-step rates like 1 - 2^-100, neither of which fits ordinary
double arithmetic.  Everything here therefore works in the log domain
(``LogMagnitude``, ``GeometricTerm``, ``min_steps_geometric``) or in exact
integer/rational arithmetic (step counts are plain Python ints, binomial
tails are ``Fraction``).  The dense-matrix half (total variation, matrix
powers, stationary laws, reversible spectra) is conventional numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, NoSolutionError, ParameterError

LOG_ZERO = float("-inf")

# Tolerances and caps used by the matrix routines.
ROW_SUM_TOL = 1e-12
NEGATIVE_CLIP = 1e-15
INVARIANCE_TOL = 1e-10
DETAILED_BALANCE_TOL = 1e-10
POWER_ITERATION_TOL = 1e-13
POWER_ITERATION_CAP = 10**6
MATRIX_POWER_CAP = 10**7

# Step-count solver gives up beyond this many steps.
STEP_SEARCH_CAP = 10**40

LN2 = math.log(2.0)
LN10 = math.log(10.0)

# Step counts are plain Python integers: exact ordering and arithmetic at any
# magnitude, which 64-bit integers and doubles cannot promise near 10^40.
StepCount = int


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise ParameterError(f"{name} is NaN")
    return value


def round_sig(value: float, digits: int = 12) -> float:
    """Round to a fixed number of significant digits (default 12).

    Serialization helper: every float that leaves the package in JSON or CSV
    passes through this, so repeated runs emit byte-identical output.
    """
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def log1mexp(log_x: float) -> float:
    """ln(1 - e^log_x) for log_x <= 0, stable across the whole range.

    This is how quantities like 1 - 2^-100 enter the log domain: the direct
    subtraction rounds to exactly 1.0 and erases the certificate, while
    log1p(-e^log_x) keeps the full -7.9e-31 of information.
    """
    log_x = _require_finite("log argument", log_x)
    if log_x > 0.0:
        raise ParameterError(f"log1mexp needs a log of a value <= 1, got {log_x}")
    if log_x == 0.0:
        return LOG_ZERO
    if log_x > -LN2:
        return math.log(-math.expm1(log_x))
    return math.log1p(-math.exp(log_x))


@total_ordering
@dataclass(frozen=True)
class LogMagnitude:
    """A nonnegative magnitude stored as its natural logarithm.

    ``log_value`` holds ln(x); ``-inf`` encodes exactly zero.  Storing the
    log is what makes quantities like (1 - 2^-100)^(10^33) or 10^-10^31
    representable at all.  Round-tripping through ``to_float`` is faithful
    to about ``|ln x| * eps`` relative error (a float near ln(1e300) ~ 690
    has absolute spacing ~1e-13, so the exponential cannot do better); the
    log itself is the exact carrier.
    """

    log_value: float

    def __post_init__(self) -> None:
        lv = float(self.log_value)
        if math.isnan(lv):
            raise ParameterError("log magnitude is NaN")
        if lv == float("inf"):
            raise ParameterError("infinite magnitude is not representable")
        object.__setattr__(self, "log_value", lv)

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(LOG_ZERO)

    @classmethod
    def one(cls) -> "LogMagnitude":
        return cls(0.0)

    @classmethod
    def from_linear(cls, value: float) -> "LogMagnitude":
        value = _require_finite("magnitude", value)
        if value < 0:
            raise ParameterError(f"magnitude must be nonnegative, got {value}")
        if value == 0:
            return cls(LOG_ZERO)
        return cls(math.log(value))

    @classmethod
    def from_log(cls, log_value: float) -> "LogMagnitude":
        return cls(log_value)

    @classmethod
    def from_log2(cls, log2_value: float) -> "LogMagnitude":
        """Build from a base-2 exponent, e.g. ``from_log2(-100)`` is 2^-100."""
        return cls(float(log2_value) * LN2)

    @property
    def log10(self) -> float:
        if self.log_value == LOG_ZERO:
            return LOG_ZERO
        return self.log_value / LN10

    def to_float(self) -> float:
        if self.log_value == LOG_ZERO:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return float("inf")

    def __float__(self) -> float:
        return self.to_float()

    def decompose(self) -> tuple[float, int]:
        """Return (mantissa, exponent) with value = mantissa * 10**exponent.

        The mantissa lies in [1, 10); zero decomposes to (0.0, 0).  This is
        the loss-free way to print a 10^33-scale answer in text.
        """
        if self.log_value == LOG_ZERO:
            return (0.0, 0)
        l10 = self.log10
        exponent = math.floor(l10)
        mantissa = 10.0 ** (l10 - exponent)
        if mantissa >= 10.0:  # floating-point edge at a power of ten
            mantissa /= 10.0
            exponent += 1
        return (mantissa, exponent)

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        if self.log_value == LOG_ZERO or other.log_value == LOG_ZERO:
            return LogMagnitude(LOG_ZERO)
        return LogMagnitude(self.log_value + other.log_value)

    def __add__(self, other: "LogMagnitude") -> "LogMagnitude":
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        return LogMagnitude(float(np.logaddexp(self.log_value, other.log_value)))

    def __pow__(self, exponent: float) -> "LogMagnitude":
        exponent = _require_finite("exponent", exponent)
        if exponent == 0:
            return LogMagnitude(0.0)
        if self.log_value == LOG_ZERO:
            if exponent < 0:
                raise ParameterError("zero magnitude to a negative power")
            return LogMagnitude(LOG_ZERO)
        return LogMagnitude(self.log_value * exponent)

    def __lt__(self, other: "LogMagnitude") -> bool:
        if not isinstance(other, LogMagnitude):
            return NotImplemented
        return self.log_value < other.log_value

    def __repr__(self) -> str:
        if self.log_value == LOG_ZERO:
            return "LogMagnitude(0)"
        mantissa, exponent = self.decompose()
        return f"LogMagnitude({mantissa:.9g}e{exponent:+d})"


@dataclass(frozen=True)
class GeometricTerm:
    """One term coefficient * ratio**(steps + offset), stored in logs.

    The ratio must be strictly inside [0, 1): a unit ratio never decays and
    is rejected up front.  Build ratios like 1 - 2^-100 via ``log1p`` on the
    tiny epsilon rather than subtracting from 1.0 in linear space, which
    would round to exactly 1.
    """

    log_coeff: float
    log_ratio: float
    offset: float = 0.0

    def __post_init__(self) -> None:
        lc = _require_finite("log coefficient", self.log_coeff)
        lr = _require_finite("log ratio", self.log_ratio)
        off = _require_finite("offset", self.offset)
        if lc == float("inf"):
            raise ParameterError("infinite coefficient")
        if lr >= 0.0:
            raise ParameterError(
                f"invalid ratio: log ratio must be negative (ratio < 1), got {lr}"
            )
        object.__setattr__(self, "log_coeff", lc)
        object.__setattr__(self, "log_ratio", lr)
        object.__setattr__(self, "offset", off)

    @classmethod
    def from_linear(cls, coeff: float, ratio: float, offset: float = 0.0) -> "GeometricTerm":
        coeff = _require_finite("coefficient", coeff)
        ratio = _require_finite("ratio", ratio)
        if coeff < 0:
            raise ParameterError(f"coefficient must be nonnegative, got {coeff}")
        if not 0.0 <= ratio < 1.0:
            raise ParameterError(f"invalid ratio: must lie in [0, 1), got {ratio}")
        log_coeff = LOG_ZERO if coeff == 0 else math.log(coeff)
        log_ratio = LOG_ZERO if ratio == 0 else math.log(ratio)
        return cls(log_coeff, log_ratio, offset)

    def log_at(self, steps: int) -> float:
        """ln of the term at the given step count (0**0 counts as 1)."""
        exponent = float(steps) + self.offset
        if self.log_coeff == LOG_ZERO:
            return LOG_ZERO
        if self.log_ratio == LOG_ZERO:
            if exponent > 0:
                return LOG_ZERO
            if exponent == 0:
                return self.log_coeff
            raise ParameterError("zero ratio raised to a negative exponent")
        return self.log_coeff + exponent * self.log_ratio


def as_geometric_term(term) -> GeometricTerm:
    """Coerce (coefficient, ratio[, offset]) tuples into GeometricTerm.

    The coefficient may be a plain nonnegative float or a LogMagnitude; the
    ratio is always linear and must lie in [0, 1).
    """
    if isinstance(term, GeometricTerm):
        return term
    coeff, ratio, *rest = term
    offset = float(rest[0]) if rest else 0.0
    ratio = _require_finite("ratio", ratio)
    if not 0.0 <= ratio < 1.0:
        raise ParameterError(f"invalid ratio: must lie in [0, 1), got {ratio}")
    log_ratio = LOG_ZERO if ratio == 0 else math.log(ratio)
    if isinstance(coeff, LogMagnitude):
        return GeometricTerm(coeff.log_value, log_ratio, offset)
    coeff = _require_finite("coefficient", coeff)
    if coeff < 0:
        raise ParameterError(f"coefficient must be nonnegative, got {coeff}")
    log_coeff = LOG_ZERO if coeff == 0 else math.log(coeff)
    return GeometricTerm(log_coeff, log_ratio, offset)


def log_sum_terms(terms: Sequence[GeometricTerm], steps: int) -> float:
    """ln of the summed terms at a step count, via a stable log-sum-exp."""
    logs = [term.log_at(steps) for term in terms]
    peak = max(logs)
    if peak == LOG_ZERO:
        return LOG_ZERO
    return peak + math.log(sum(math.exp(lv - peak) for lv in logs))


def min_steps_geometric(
    terms: Sequence["GeometricTerm | tuple"],
    target: "LogMagnitude | float",
    max_steps: int = STEP_SEARCH_CAP,
) -> int:
    """Smallest step count at which the summed terms drop to the target.

    The sum is strictly decreasing in the step count (every ratio is below
    one), so a doubling bracket followed by integer bisection finds the
    minimal solution exactly.  All evaluation happens in the log domain;
    step counts are exact Python ints, valid far beyond 2^63.

    Returns the minimal ``steps >= 0`` with sum(steps) <= target.  Raises
    ``NoSolutionError`` if even ``max_steps`` (default 10^40) is not enough.
    """
    if not terms:
        raise ParameterError("at least one geometric term is required")
    terms = [as_geometric_term(term) for term in terms]
    if isinstance(target, LogMagnitude):
        log_target = target.log_value
    else:
        target = _require_finite("target", target)
        if target <= 0:
            raise ParameterError(f"target must be positive, got {target}")
        log_target = math.log(target)
    if log_target == LOG_ZERO:
        raise ParameterError("target must be positive")
    if max_steps < 1:
        raise ParameterError("max_steps must be at least 1")

    if log_sum_terms(terms, 0) <= log_target:
        return 0

    low, high = 0, 1
    while log_sum_terms(terms, high) > log_target:
        low = high
        high *= 2
        if high >= max_steps:
            if log_sum_terms(terms, max_steps) > log_target:
                raise NoSolutionError(
                    f"no solution: target not reached within {max_steps} steps"
                )
            high = max_steps
            break
    while low + 1 < high:
        mid = (low + high) // 2
        if log_sum_terms(terms, mid) <= log_target:
            high = mid
        else:
            low = mid
    return high


def _as_weights(p: "Distribution | np.ndarray | Sequence[float]") -> np.ndarray:
    if isinstance(p, Distribution):
        return p.weights
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ParameterError("a distribution must be a one-dimensional vector")
    return arr


def tv_distance(
    p: "Distribution | np.ndarray | Sequence[float]",
    q: "Distribution | np.ndarray | Sequence[float]",
) -> float:
    """Total variation distance: half the l1 distance between mass vectors."""
    pv = _as_weights(p)
    qv = _as_weights(q)
    if pv.shape != qv.shape:
        raise ParameterError(
            f"dimension mismatch: {pv.shape[0]} versus {qv.shape[0]} states"
        )
    return 0.5 * float(np.abs(pv - qv).sum())


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector: nonnegative entries summing to 1 within 1e-12.

    Entries in [-1e-15, 0) are treated as numerical noise and clipped to 0;
    anything more negative is rejected.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ParameterError("weights must be a nonempty one-dimensional vector")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights must be finite")
        if w.min() < -NEGATIVE_CLIP:
            raise ParameterError(
                f"negative weight {w.min()} below the clipping tolerance"
            )
        np.clip(w, 0.0, None, out=w)
        total = float(w.sum())
        if abs(total - 1.0) > ROW_SUM_TOL:
            raise ParameterError(f"weights sum to {total}, not 1 within {ROW_SUM_TOL}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def __getitem__(self, index: int) -> float:
        return float(self.weights[index])


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A dense row-stochastic matrix with validated rows.

    Entries in [-1e-15, 0) are clipped to zero; every row must sum to 1
    within 1e-12.  The stored array is read-only.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ParameterError("entries must form a nonempty square matrix")
        if not np.all(np.isfinite(m)):
            raise ParameterError("matrix entries must be finite")
        if m.min() < -NEGATIVE_CLIP:
            raise ParameterError(
                f"negative entry {m.min()} below the clipping tolerance"
            )
        np.clip(m, 0.0, None, out=m)
        row_sums = m.sum(axis=1)
        worst = float(np.abs(row_sums - 1.0).max())
        if worst > ROW_SUM_TOL:
            bad = int(np.abs(row_sums - 1.0).argmax())
            raise ParameterError(
                f"row {bad} sums to {row_sums[bad]}, off by {worst} > {ROW_SUM_TOL}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


def _check_invariant(matrix: StochasticMatrix, stationary: Distribution) -> None:
    if len(stationary) != matrix.dim:
        raise ParameterError(
            f"dimension mismatch: matrix is {matrix.dim}, stationary has "
            f"{len(stationary)} states"
        )
    residual = float(np.abs(stationary.weights @ matrix.entries - stationary.weights).max())
    if residual > INVARIANCE_TOL:
        raise ParameterError(
            f"stationary law is not invariant: residual {residual} > {INVARIANCE_TOL}"
        )


def matrix_power_tv(
    matrix: StochasticMatrix,
    start: int,
    stationary: Distribution,
    n_steps: int,
) -> float:
    """TV distance to stationarity after ``n_steps`` from a point start.

    Iterates the row vector rather than forming the matrix power, so memory
    stays at one vector.  ``n_steps`` must be a machine loop count (at most
    10^7); certificates beyond that range belong to the log-domain solver.
    """
    if not 0 <= start < matrix.dim:
        raise ParameterError(f"start state {start} outside 0..{matrix.dim - 1}")
    if n_steps < 0:
        raise ParameterError("step count must be nonnegative")
    if n_steps > MATRIX_POWER_CAP:
        raise ParameterError(
            f"step count {n_steps} exceeds the exact-iteration cap {MATRIX_POWER_CAP}"
        )
    _check_invariant(matrix, stationary)
    v = np.zeros(matrix.dim)
    v[start] = 1.0
    for _ in range(n_steps):
        v = v @ matrix.entries
    return tv_distance(v, stationary)


def stationary_distribution(
    matrix: StochasticMatrix,
    max_iterations: int = POWER_ITERATION_CAP,
) -> Distribution:
    """Stationary law by deterministic power iteration from the uniform start.

    Stops when successive iterates differ by less than 1e-13 in TV; raises
    ``ConvergenceError`` after ``max_iterations`` (default 10^6).  The input
    chain should be irreducible and aperiodic for the limit to be meaningful.
    """
    if max_iterations < 1:
        raise ParameterError("max_iterations must be at least 1")
    v = np.full(matrix.dim, 1.0 / matrix.dim)
    for _ in range(max_iterations):
        nxt = v @ matrix.entries
        nxt /= nxt.sum()
        if 0.5 * float(np.abs(nxt - v).sum()) < POWER_ITERATION_TOL:
            return Distribution(nxt)
        v = nxt
    raise ConvergenceError(
        f"power iteration did not converge within {max_iterations} iterations"
    )


def reversible_spectrum(matrix: StochasticMatrix, stationary: Distribution) -> np.ndarray:
    """All eigenvalues of a reversible chain, sorted in descending order.

    Verifies detailed balance pi_i K_ij = pi_j K_ji within 1e-10, then
    symmetrizes by the sqrt(pi) similarity transform and calls a symmetric
    eigensolver, so every eigenvalue comes back real.  The leading
    eigenvalue must be 1 within 1e-10 and the rest must lie in [-1, 1].
    """
    _check_invariant(matrix, stationary)
    pi = stationary.weights
    if pi.min() <= 0:
        raise ParameterError(
            "stationary law must be strictly positive to symmetrize the chain"
        )
    flux = pi[:, None] * matrix.entries
    db_residual = float(np.abs(flux - flux.T).max())
    if db_residual > DETAILED_BALANCE_TOL:
        raise ParameterError(
            f"detailed balance violated: max flux asymmetry {db_residual} > "
            f"{DETAILED_BALANCE_TOL}"
        )
    root = np.sqrt(pi)
    sym = root[:, None] * matrix.entries / root[None, :]
    sym = 0.5 * (sym + sym.T)
    eigs = np.linalg.eigvalsh(sym)[::-1]
    if abs(eigs[0] - 1.0) > INVARIANCE_TOL:
        raise ConvergenceError(
            f"leading eigenvalue {eigs[0]} is not 1 within {INVARIANCE_TOL}"
        )
    if eigs.min() < -1.0 - INVARIANCE_TOL or eigs.max() > 1.0 + INVARIANCE_TOL:
        raise ConvergenceError("eigenvalues escape [-1, 1] beyond tolerance")
    return eigs


def binomial_tail_le(n_flips: int, cutoff: int) -> Fraction:
    """Exact lower binomial tail sum_{j=0}^{cutoff} C(n, j) / 2^n.

    Works in exact rational arithmetic; restricted to n_flips <= 64, which
    covers the coin-flip concentration checks this package needs.
    """
    if not isinstance(n_flips, int) or not isinstance(cutoff, int):
        raise ParameterError("flip count and cutoff must be integers")
    if not 1 <= n_flips <= 64:
        raise ParameterError(f"flip count must lie in 1..64, got {n_flips}")
    if not 0 <= cutoff <= n_flips:
        raise ParameterError(f"cutoff must lie in 0..{n_flips}, got {cutoff}")
    total = sum(math.comb(n_flips, j) for j in range(cutoff + 1))
    return Fraction(total, 2**n_flips)

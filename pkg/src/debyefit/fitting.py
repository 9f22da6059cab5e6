"""Multi-pole Debye expansions fitted to sampled permittivity spectra.

The fit is hybrid linear-nonlinear: a stochastic global search proposes
relaxation times (as log10 seconds), an inner damped least-squares solve
returns the pole weights for each proposal, and the score is the summed
average relative error of the real and the loss part, in percent.  Negative
weights are sign-flipped rather than constrained, which makes such
candidates score badly and steers the search toward all-positive (and hence
causal) expansions; adding the real part to the score keeps the procedure
stable on targets whose real and loss parts are inconsistent.

`cost` is pure and reentrant, so optimizers may evaluate candidates
concurrently; independent `fit` calls are safe to run in parallel.
"""

from __future__ import annotations

import math
import secrets
import time
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .dispersion import (
    TWO_PI,
    ComplexSpectrum,
    FrequencyGrid,
    RelaxationModel,
    evaluate_model,
    make_log_grid,
)
from .optimizers import Bounds, default_settings, minimize

MAX_POLES = 20
# automatic pole-count search stops below this summed error (percent)
AUTO_POLE_TARGET_PCT = 5.0
# relative ridge weight for the damped normal equations
RIDGE_SCALE = 1e-10
# exactly-zero sign-flipped weights are raised to this floor
WEIGHT_FLOOR = 1e-12
# denominator guard for relative errors on near-zero targets
ERROR_FLOOR = 1e-6
# search box slack: candidate relaxation frequencies may leave the fitting
# band by up to one decade on either side
TAU_BAND_MARGIN = 10.0


@dataclass(frozen=True, eq=False)
class DebyeExpansion:
    """eps_inf plus N first-order poles delta_eps_n / (1 + j*w*tau_n).

    Poles are kept in canonical order, slowest (largest tau) first.
    """

    eps_inf: float
    delta_eps: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        delta = np.atleast_1d(np.array(self.delta_eps, dtype=float))
        tau = np.atleast_1d(np.array(self.tau, dtype=float))
        if delta.ndim != 1 or delta.shape != tau.shape:
            raise ValueError("delta_eps and tau must be 1-D and the same length")
        if not 1 <= delta.size <= MAX_POLES:
            raise ValueError(f"pole count must lie in [1, {MAX_POLES}]")
        if self.eps_inf < 1.0:
            raise ValueError("eps_inf must be >= 1")
        if not np.all(tau > 0.0):
            raise ValueError("every tau must be positive")
        if not np.all(delta > 0.0):
            raise ValueError("every delta_eps must be positive")
        order = np.argsort(-tau, kind="stable")
        delta, tau = delta[order], tau[order]
        delta.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "delta_eps", delta)
        object.__setattr__(self, "tau", tau)

    @property
    def n_poles(self) -> int:
        return self.delta_eps.size


@dataclass(frozen=True, eq=False)
class WeightSolveResult:
    """Damped least-squares weights; negative solutions arrive sign-flipped."""

    eps_inf: float
    deltas: np.ndarray
    penalized: bool  # True when at least one raw weight came out negative


@dataclass(frozen=True)
class FitConfig:
    """Everything a fit needs besides the target model itself.

    n_poles = -1 requests the automatic pole-count loop.  A missing seed is
    drawn from system entropy at fit time and recorded in the report.
    optimizer_options are forwarded to `default_settings` (budgets,
    tolerances, algorithm constants).
    """

    f_min_hz: float
    f_max_hz: float
    n_poles: int
    optimizer: str = "pso"
    n_points: int = 50
    seed: int | None = None
    optimizer_options: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.f_min_hz <= 0.0 or self.f_min_hz >= self.f_max_hz:
            raise ValueError("need 0 < f_min_hz < f_max_hz")
        if self.n_poles != -1 and not 1 <= self.n_poles <= MAX_POLES:
            raise ValueError(f"n_poles must lie in [1, {MAX_POLES}] or be -1")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")


@dataclass(frozen=True, eq=False)
class FitReport:
    """Fit result plus its error metrics and reproducibility data.

    err_real and err_imag are the average relative errors of eps' and eps''
    in percent; err_total is their sum.  convergence is the optimizer's
    (iteration, best_cost) trace.  Re-running with seed_used reproduces the
    report exactly (durations aside).
    """

    expansion: DebyeExpansion
    err_real: float
    err_imag: float
    err_total: float
    duration: float
    convergence: tuple[tuple[int, float], ...]
    seed_used: int

    def __post_init__(self):
        if abs(self.err_total - (self.err_real + self.err_imag)) > 1e-9:
            raise ValueError("err_total must equal err_real + err_imag")
        costs = [cost for _, cost in self.convergence]
        if any(b > a for a, b in zip(costs, costs[1:])):
            raise ValueError("convergence trace must be non-increasing")


def eval_expansion(expansion: DebyeExpansion, grid: FrequencyGrid) -> ComplexSpectrum:
    """Evaluate the pole sum on a grid (eps' - j*eps'' storage)."""
    wt = grid.omega[:, None] * expansion.tau[None, :]
    values = expansion.eps_inf + np.sum(expansion.delta_eps / (1.0 + 1j * wt), axis=1)
    return ComplexSpectrum(grid, values)


def _ridge_solve(design: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    gram = design.T @ design
    lam = RIDGE_SCALE * np.trace(gram) / gram.shape[0]
    return np.linalg.solve(gram + lam * np.eye(gram.shape[0]), design.T @ rhs)


def solve_weights_dls(taus, target: ComplexSpectrum) -> WeightSolveResult:
    """Best (eps_inf, delta_eps) for fixed relaxation times, damped LS.

    Each grid frequency contributes one equation for eps' (with the
    frequency-flat eps_inf column and the poles' real kernel 1/(1+w^2 t^2))
    and one for eps'' (kernel w*t/(1+w^2 t^2)).  The normal equations carry
    a small relative ridge so nearly coincident taus stay solvable.  An
    eps_inf below the physical floor of 1 is clamped and the weights
    re-solved around it; negative weights are returned sign-flipped with
    `penalized` set.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    n = taus.size
    if n == 0 or not np.all(taus > 0.0):
        raise ValueError("need at least one positive tau")
    m = len(target.grid)
    if n > m:
        raise ValueError("cannot solve for more poles than grid points")

    wt = target.grid.omega[:, None] * taus[None, :]
    denom = 1.0 + wt * wt
    design = np.zeros((2 * m, n + 1))
    design[:m, 0] = 1.0
    design[:m, 1:] = 1.0 / denom
    design[m:, 1:] = wt / denom
    rhs = np.concatenate([target.eps_real, target.eps_imag])

    solution = _ridge_solve(design, rhs)
    eps_inf = float(solution[0])
    deltas = solution[1:]
    if eps_inf < 1.0:
        eps_inf = 1.0
        deltas = _ridge_solve(design[:, 1:], rhs - design[:, 0] * eps_inf)

    penalized = bool(np.any(deltas < 0.0))
    deltas = np.abs(deltas)
    deltas[deltas == 0.0] = WEIGHT_FLOOR
    deltas.setflags(write=False)
    return WeightSolveResult(eps_inf=eps_inf, deltas=deltas, penalized=penalized)


def spectrum_errors(fitted: ComplexSpectrum, target: ComplexSpectrum) -> tuple[float, float]:
    """Average pointwise relative error of eps' and of eps'', in percent."""
    m = len(target.grid)

    def average(fit_part, target_part):
        scale = np.maximum(np.abs(target_part), ERROR_FLOOR)
        return float(100.0 / m * np.sum(np.abs(fit_part - target_part) / scale))

    return (average(fitted.eps_real, target.eps_real),
            average(fitted.eps_imag, target.eps_imag))


def cost(log10_taus, target: ComplexSpectrum) -> float:
    """Score a relaxation-time candidate: summed average relative error (%).

    Solves the weights for the proposed taus, evaluates the resulting
    expansion, and sums the per-part errors.  Always finite and
    non-negative; sign-flipped weights surface here as a large error.
    """
    taus = 10.0 ** np.asarray(log10_taus, dtype=float)
    solved = solve_weights_dls(taus, target)
    expansion = DebyeExpansion(solved.eps_inf, solved.deltas, taus)
    err_real, err_imag = spectrum_errors(eval_expansion(expansion, target.grid), target)
    return err_real + err_imag


def tau_search_bounds(f_min_hz: float, f_max_hz: float, n_poles: int) -> Bounds:
    """log10(tau) box whose relaxation frequencies cover the band plus margin."""
    tau_min = 1.0 / (TWO_PI * f_max_hz * TAU_BAND_MARGIN)
    tau_max = TAU_BAND_MARGIN / (TWO_PI * f_min_hz)
    return Bounds(np.full(n_poles, math.log10(tau_min)),
                  np.full(n_poles, math.log10(tau_max)))


def _fresh_seed() -> int:
    return secrets.randbits(32)


def fit(model: RelaxationModel, config: FitConfig) -> FitReport:
    """Fit a Debye expansion to a relaxation model over the configured band.

    Runs the configured global optimizer over the log10-tau box, finalizes
    the best candidate through the weight solve, and reports per-part
    errors.  A poor fit is reported through the error metrics, never raised.
    Deterministic for a given seed.
    """
    if config.n_poles == -1:
        return fit_auto_poles(model, config)
    grid = make_log_grid(config.f_min_hz, config.f_max_hz, config.n_points)
    target = evaluate_model(model, grid)
    seed = config.seed if config.seed is not None else _fresh_seed()
    settings = default_settings(config.optimizer, seed=seed, **dict(config.optimizer_options))
    bounds = tau_search_bounds(config.f_min_hz, config.f_max_hz, config.n_poles)

    started = time.perf_counter()
    outcome = minimize(lambda point: cost(point, target), bounds, settings)
    duration = time.perf_counter() - started

    taus = 10.0 ** outcome.best_point
    solved = solve_weights_dls(taus, target)
    expansion = DebyeExpansion(solved.eps_inf, solved.deltas, taus)
    err_real, err_imag = spectrum_errors(eval_expansion(expansion, grid), target)
    return FitReport(expansion=expansion, err_real=err_real, err_imag=err_imag,
                     err_total=err_real + err_imag, duration=duration,
                     convergence=outcome.trace, seed_used=seed)


def fit_auto_poles(model: RelaxationModel, config: FitConfig) -> FitReport:
    """Grow the pole count from 1 until the summed error drops below 5%.

    Gives up at 20 poles and returns that attempt.  Each pole count N runs
    with seed + N, so attempts are independent but the whole loop replays
    from the base seed (recorded as seed_used).
    """
    if config.n_poles != -1:
        raise ValueError("fit_auto_poles expects the sentinel n_poles == -1")
    base_seed = config.seed if config.seed is not None else _fresh_seed()
    started = time.perf_counter()
    report = None
    for n in range(1, MAX_POLES + 1):
        attempt = replace(config, n_poles=n, seed=base_seed + n)
        report = fit(model, attempt)
        if report.err_total < AUTO_POLE_TARGET_PCT:
            break
    return replace(report, seed_used=base_seed,
                   duration=time.perf_counter() - started)

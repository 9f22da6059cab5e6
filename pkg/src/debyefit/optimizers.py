"""Self-contained bounded-box global minimizers.

Three stochastic methods behind one dispatch entry point: global-best
particle swarm, differential evolution (rand/1/bin), and generalized
simulated annealing with a distorted Cauchy-Lorentz visiting distribution.
Each run is a pure function of (objective, bounds, settings): a fixed seed
reproduces the evaluation sequence and the result bit for bit, and the
objective is only ever invoked inside the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# iterations of sub-tolerance relative improvement before PSO/DE stop early
STALL_WINDOW = 15
# annealing steps between coordinate-wise golden-section refinements
REFINE_EVERY = 50
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
VISIT_TAIL_LIMIT = 1e8
VISIT_MIN_OFFSET = 1e-10

_ALGORITHM_DEFAULTS = {
    "pso": {"max_iterations": 100, "population": 40},
    "de": {"max_iterations": 200, "population": 50},
    "da": {"max_iterations": 1000, "population": 1},
}


@dataclass(frozen=True, eq=False)
class Bounds:
    """Box constraints: lower[d] < upper[d] for every coordinate."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D and the same length")
        if lower.size == 0:
            raise ValueError("bounds must have at least one dimension")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must lie below its upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class OptimizerSettings:
    """Algorithm choice plus every tunable constant.

    Hyperparameter defaults follow the canonical literature values for each
    method; use `default_settings` to get them filled in per algorithm.
    PSO and DE stop early once an improvement lands but the best cost has
    gained less than `tolerance` (relative) over the last STALL_WINDOW
    iterations; annealing always runs its full budget.  Set tolerance to 0
    to disable early stopping.
    """

    algorithm: str
    max_iterations: int
    population: int
    seed: int
    tolerance: float = 1e-8
    # particle swarm
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 1.49
    social: float = 1.49
    # differential evolution
    mutation_factor: float = 0.8
    crossover_rate: float = 0.9
    # generalized simulated annealing
    visiting_param: float = 2.62
    acceptance_param: float = -5.0
    initial_temperature: float = 5230.0

    def __post_init__(self):
        if self.algorithm not in _ALGORITHM_DEFAULTS:
            raise ValueError(f"unknown optimizer algorithm: {self.algorithm!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.algorithm in ("pso", "de") and self.population < 5:
            raise ValueError("population must be >= 5 for pso/de")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.tolerance < 0.0:
            raise ValueError("tolerance must be >= 0")
        if not 1.0 < self.visiting_param <= 3.0:
            raise ValueError("visiting_param must lie in (1, 3]")
        if self.initial_temperature <= 0.0:
            raise ValueError("initial_temperature must be positive")


def default_settings(algorithm: str = "pso", seed: int = 0, **overrides) -> OptimizerSettings:
    """Settings pre-filled with the canonical budget for one algorithm."""
    if algorithm not in _ALGORITHM_DEFAULTS:
        raise ValueError(f"unknown optimizer algorithm: {algorithm!r}")
    fields = dict(_ALGORITHM_DEFAULTS[algorithm])
    fields.update(overrides)
    return OptimizerSettings(algorithm=algorithm, seed=seed, **fields)


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    """Best point found, its cost, the per-iteration best-cost trace, and
    the total number of objective evaluations."""

    best_point: np.ndarray
    best_cost: float
    trace: tuple[tuple[int, float], ...]
    evaluations: int


def _rng(seed: int) -> np.random.Generator:
    # counter-based generator: cheap to seed, trivially splittable
    return np.random.Generator(np.random.Philox(seed))


def _stalled(trace, tolerance: float, improved_now: bool) -> bool:
    """Stop once refinement has gone stale: the best just improved, yet the
    gain accumulated over the trailing STALL_WINDOW iterations is below the
    relative tolerance.  Checking only at improvement events keeps bursty
    searches alive through temporary plateaus."""
    if tolerance <= 0.0 or not improved_now or len(trace) <= STALL_WINDOW:
        return False
    prev = trace[-1 - STALL_WINDOW][1]
    now = trace[-1][1]
    return (prev - now) < tolerance * max(abs(prev), 1e-30)


def pso_minimize(objective, bounds: Bounds, settings: OptimizerSettings) -> OptimizeResult:
    """Global-best particle swarm with linearly decaying inertia.

    v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x); positions are clamped
    to the box and the velocity is zeroed on any clamped coordinate.
    """
    rng = _rng(settings.seed)
    dim, size = bounds.dimension, settings.population
    lower, upper, span = bounds.lower, bounds.upper, bounds.span

    x = lower + rng.random((size, dim)) * span
    v = (2.0 * rng.random((size, dim)) - 1.0) * span
    fx = np.array([float(objective(p)) for p in x])
    evaluations = size
    pbest = x.copy()
    fbest = fx.copy()
    g = int(np.argmin(fbest))
    gbest, gcost = pbest[g].copy(), float(fbest[g])
    trace = [(0, gcost)]

    decay_steps = max(settings.max_iterations - 1, 1)
    for it in range(1, settings.max_iterations + 1):
        w = settings.inertia_start + (settings.inertia_end - settings.inertia_start) * (it - 1) / decay_steps
        improved = False
        for i in range(size):
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            v[i] = w * v[i] + settings.cognitive * r1 * (pbest[i] - x[i]) \
                + settings.social * r2 * (gbest - x[i])
            x[i] = x[i] + v[i]
            out = (x[i] < lower) | (x[i] > upper)
            if np.any(out):
                x[i] = np.clip(x[i], lower, upper)
                v[i][out] = 0.0
            fx[i] = float(objective(x[i]))
            evaluations += 1
            if fx[i] < fbest[i]:
                pbest[i] = x[i].copy()
                fbest[i] = fx[i]
                # swarm best updates mid-sweep so later particles chase it
                if fx[i] < gcost:
                    gcost = float(fx[i])
                    gbest = x[i].copy()
                    improved = True
        trace.append((it, gcost))
        if _stalled(trace, settings.tolerance, improved):
            break
    return OptimizeResult(gbest, gcost, tuple(trace), evaluations)


def _distinct_indices(rng, size: int, exclude: int) -> list[int]:
    picks: list[int] = []
    while len(picks) < 3:
        j = int(rng.integers(size))
        if j != exclude and j not in picks:
            picks.append(j)
    return picks


def de_minimize(objective, bounds: Bounds, settings: OptimizerSettings) -> OptimizeResult:
    """Differential evolution, rand/1/bin with greedy selection.

    Mutant coordinates that leave the box are resampled uniformly inside it.
    """
    rng = _rng(settings.seed)
    dim, size = bounds.dimension, settings.population
    lower, span = bounds.lower, bounds.span

    x = lower + rng.random((size, dim)) * span
    fx = np.array([float(objective(p)) for p in x])
    evaluations = size
    g = int(np.argmin(fx))
    gbest, gcost = x[g].copy(), float(fx[g])
    trace = [(0, gcost)]

    for gen in range(1, settings.max_iterations + 1):
        improved = False
        for i in range(size):
            a, b, c = _distinct_indices(rng, size, i)
            mutant = x[a] + settings.mutation_factor * (x[b] - x[c])
            out = (mutant < lower) | (mutant > bounds.upper)
            if np.any(out):
                mutant[out] = lower[out] + rng.random(int(out.sum())) * span[out]
            cross = rng.random(dim) < settings.crossover_rate
            cross[int(rng.integers(dim))] = True  # guaranteed mutant coordinate
            trial = np.where(cross, mutant, x[i])
            ft = float(objective(trial))
            evaluations += 1
            if ft <= fx[i]:
                x[i] = trial
                fx[i] = ft
                if ft < gcost:
                    gcost = ft
                    gbest = trial.copy()
                    improved = True
        trace.append((gen, gcost))
        if _stalled(trace, settings.tolerance, improved):
            break
    return OptimizeResult(gbest, gcost, tuple(trace), evaluations)


def _tsallis_visits(rng, visiting_param: float, temperature: float, n: int) -> np.ndarray:
    """Draw n displacement samples from the distorted Cauchy-Lorentz law."""
    qv = visiting_param
    gauss_x = rng.normal(size=n)
    gauss_y = rng.normal(size=n)
    factor1 = math.exp(math.log(temperature) / (qv - 1.0))
    factor2 = math.exp((4.0 - qv) * math.log(qv - 1.0))
    factor3 = math.exp((2.0 - qv) * math.log(2.0) / (qv - 1.0))
    factor4 = math.sqrt(math.pi) * factor2 / (factor3 * (3.0 - qv)) * factor1
    factor5 = 1.0 / (qv - 1.0) - 0.5
    d1 = 2.0 - factor5
    factor6 = math.pi * (1.0 - factor5) / math.sin(math.pi * (1.0 - factor5)) / math.exp(math.lgamma(d1))
    sigma_x = math.exp(-(qv - 1.0) * math.log(factor6 / factor4) / (3.0 - qv))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        visits = sigma_x * gauss_x / np.exp((qv - 1.0) * np.log(np.abs(gauss_y)) / (3.0 - qv))
    visits[~np.isfinite(visits)] = VISIT_TAIL_LIMIT + 1.0
    big = visits > VISIT_TAIL_LIMIT
    if np.any(big):
        visits[big] = VISIT_TAIL_LIMIT * rng.random(int(big.sum()))
    small = visits < -VISIT_TAIL_LIMIT
    if np.any(small):
        visits[small] = -VISIT_TAIL_LIMIT * rng.random(int(small.sum()))
    return visits


def _wrap_into(values: np.ndarray, lower, upper, span) -> np.ndarray:
    """Fold arbitrary displacement targets back into the box (toroidal wrap)."""
    wrapped = lower + np.mod(values - lower, span)
    nudge = np.abs(wrapped - lower) < VISIT_MIN_OFFSET
    if np.any(nudge):
        wrapped = np.where(nudge, wrapped + VISIT_MIN_OFFSET, wrapped)
    return np.minimum(wrapped, upper)


def _tsallis_acceptance(acceptance_param: float, delta: float, temperature_step: float) -> float:
    base = 1.0 - (1.0 - acceptance_param) * delta / temperature_step
    if base <= 0.0:
        return 0.0
    return math.exp(math.log(base) / (1.0 - acceptance_param))


def _refine_coordinates(objective, bounds: Bounds, point: np.ndarray, value: float):
    """One golden-section sweep per coordinate; keep a move only if it improves."""
    point = point.copy()
    evaluations = 0
    for d in range(bounds.dimension):
        lo = float(bounds.lower[d])
        hi = float(bounds.upper[d])
        tol = 1e-10 * (hi - lo)

        def at(t: float) -> float:
            trial = point.copy()
            trial[d] = t
            return float(objective(trial))

        a, b = lo, hi
        c = b - GOLDEN * (b - a)
        e = a + GOLDEN * (b - a)
        fc, fe = at(c), at(e)
        evaluations += 2
        # iteration cap: below ~GOLDEN**90 of the span the floats cannot
        # resolve the interval anyway, and tol may sit below float spacing
        for _ in range(90):
            if (b - a) <= tol:
                break
            if fc < fe:
                b, e, fe = e, c, fc
                c = b - GOLDEN * (b - a)
                fc = at(c)
            else:
                a, c, fc = c, e, fe
                e = a + GOLDEN * (b - a)
                fe = at(e)
            evaluations += 1
        t_best, f_best = (c, fc) if fc < fe else (e, fe)
        if f_best < value:
            point[d] = t_best
            value = f_best
    return point, value, evaluations


def da_minimize(objective, bounds: Bounds, settings: OptimizerSettings) -> OptimizeResult:
    """Generalized simulated annealing (dual-annealing style).

    Candidate moves follow the Tsallis visiting distribution with wrapped
    boundary handling; worse moves pass a generalized Metropolis test.  The
    temperature decays as T0*(2^(qv-1) - 1)/((1+t)^(qv-1) - 1) and every
    `REFINE_EVERY` steps the best point gets a coordinate-wise golden-section
    polish.  Runs the full `max_iterations` budget (no early stop).
    """
    rng = _rng(settings.seed)
    qv = settings.visiting_param
    lower, upper, span = bounds.lower, bounds.upper, bounds.span
    dim = bounds.dimension

    x = lower + rng.random(dim) * span
    energy = float(objective(x))
    evaluations = 1
    best, best_energy = x.copy(), energy
    trace = [(0, best_energy)]

    temp_scale = 2.0 ** (qv - 1.0) - 1.0
    for step in range(1, settings.max_iterations + 1):
        temperature = settings.initial_temperature * temp_scale / ((1.0 + step) ** (qv - 1.0) - 1.0)
        temperature_step = temperature / (step + 1.0)
        for j in range(2 * dim):
            if j < dim:
                candidate = _wrap_into(x + _tsallis_visits(rng, qv, temperature, dim),
                                       lower, upper, span)
            else:
                # second half of the chain varies one coordinate at a time
                k = j - dim
                candidate = x.copy()
                offset = _tsallis_visits(rng, qv, temperature, 1)[0]
                candidate[k] = _wrap_into(np.array([x[k] + offset]),
                                          lower[k], upper[k], span[k])[0]
            cand_energy = float(objective(candidate))
            evaluations += 1
            if cand_energy < energy:
                x, energy = candidate, cand_energy
                if cand_energy < best_energy:
                    best, best_energy = candidate.copy(), cand_energy
            else:
                accept = _tsallis_acceptance(settings.acceptance_param,
                                             cand_energy - energy, temperature_step)
                if rng.random() <= accept:
                    x, energy = candidate, cand_energy
        if step % REFINE_EVERY == 0:
            best, best_energy, used = _refine_coordinates(objective, bounds, best, best_energy)
            evaluations += used
            if best_energy < energy:
                x, energy = best.copy(), best_energy
        trace.append((step, best_energy))
    return OptimizeResult(best, best_energy, tuple(trace), evaluations)


_MINIMIZERS = {"pso": pso_minimize, "de": de_minimize, "da": da_minimize}


def minimize(objective, bounds: Bounds, settings: OptimizerSettings) -> OptimizeResult:
    """Dispatch to the configured algorithm; uniform result shape."""
    return _MINIMIZERS[settings.algorithm](objective, bounds, settings)

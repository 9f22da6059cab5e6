"""Relaxation-function spectra for dispersive dielectric materials.

Every model is evaluated as a complex relative permittivity sampled on a
logarithmic frequency grid, stored with the engineering sign convention
eps = eps' - j*eps''.  For physically valid parameters (positive dielectric
strength and relaxation times) the loss part eps'' is non-negative at every
frequency.

All types are immutable after construction and all evaluators are pure, so
spectra can be produced concurrently without synchronization.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

TWO_PI = 2.0 * math.pi


def _frozen_array(values, dtype) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing, strictly positive angular frequencies (rad/s)."""

    omega: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size < 2:
            raise ValueError("frequency grid needs at least 2 points")
        if not np.all(omega > 0.0):
            raise ValueError("angular frequencies must be positive")
        if not np.all(np.diff(omega) > 0.0):
            raise ValueError("angular frequencies must be strictly increasing")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    def __len__(self) -> int:
        return self.omega.size

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.omega / TWO_PI


def make_log_grid(f_min_hz: float, f_max_hz: float, n_points: int = 50) -> FrequencyGrid:
    """Log-spaced angular-frequency grid covering [f_min_hz, f_max_hz] inclusive.

    50 points resolve several relaxation poles across a multi-decade band
    while staying cheap enough for stochastic optimizers to sample.
    """
    if f_min_hz <= 0.0:
        raise ValueError("f_min_hz must be positive")
    if f_min_hz >= f_max_hz:
        raise ValueError("need f_min_hz < f_max_hz")
    if n_points < 2:
        raise ValueError("need at least 2 grid points")
    freqs = np.logspace(math.log10(f_min_hz), math.log10(f_max_hz), int(n_points))
    freqs[0], freqs[-1] = f_min_hz, f_max_hz  # endpoints exact, not 10**log10(f)
    return FrequencyGrid(TWO_PI * freqs)


@dataclass(frozen=True, eq=False)
class ComplexSpectrum:
    """Complex relative permittivity eps' - j*eps'' sampled on a grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 1 or values.size != len(self.grid):
            raise ValueError("spectrum length must match its frequency grid")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def eps_real(self) -> np.ndarray:
        return self.values.real

    @property
    def eps_imag(self) -> np.ndarray:
        """Loss part eps''; non-negative for passive media."""
        return -self.values.imag


@dataclass(frozen=True)
class HavriliakNegamiParams:
    """Two-exponent relaxation eps_inf + delta_eps / (1 + (j*w*tau)^alpha)^beta.

    alpha = beta = 1 is the single-pole Debye model, beta = 1 the Cole-Cole
    model and alpha = 1 the Cole-Davidson model.
    """

    eps_inf: float
    delta_eps: float
    tau: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise ValueError("eps_inf must be >= 1")
        if self.delta_eps <= 0.0:
            raise ValueError("delta_eps must be positive")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")

    @property
    def eps_static(self) -> float:
        return self.eps_inf + self.delta_eps


@dataclass(frozen=True)
class JonscherParams:
    """Power-law response eps_inf + amplitude * (-j*w/omega_ref)^exponent.

    exponent runs from 0 (lossless, frequency-flat) to 1; omega_ref is the
    arbitrarily chosen reference angular frequency.
    """

    eps_inf: float
    amplitude: float
    omega_ref: float
    exponent: float

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise ValueError("eps_inf must be >= 1")
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        if self.omega_ref <= 0.0:
            raise ValueError("omega_ref must be positive")
        if not 0.0 <= self.exponent <= 1.0:
            raise ValueError("exponent must lie in [0, 1]")


@dataclass(frozen=True)
class CrimComponent:
    """One mixture constituent: volumetric fraction plus a Debye-pole triple."""

    fraction: float
    eps_inf: float
    delta_eps: float
    tau: float

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        if self.eps_inf < 1.0:
            raise ValueError("constituent eps_inf must be >= 1")
        if self.delta_eps <= 0.0:
            raise ValueError("constituent delta_eps must be positive")
        if self.tau <= 0.0:
            raise ValueError("constituent tau must be positive")


@dataclass(frozen=True)
class CrimParams:
    """Volumetric power-law mixing rule (sum_i f_i * eps_i^a)^(1/a).

    Constituents are restricted to single-pole Debye media, the dominant
    use case for wet-mixture modelling.  The shape factor a is commonly 0.5.
    """

    shape_a: float
    components: tuple[CrimComponent, ...]

    def __post_init__(self):
        if self.shape_a == 0.0:
            raise ValueError("shape factor must be nonzero")
        components = tuple(self.components)
        if not components:
            raise ValueError("need at least one mixture component")
        total = math.fsum(c.fraction for c in components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"volumetric fractions must sum to 1, got {total!r}")
        object.__setattr__(self, "components", components)


@dataclass(frozen=True, eq=False)
class RawDataTable:
    """Measured permittivity samples: frequency (Hz), eps' and eps'' columns."""

    frequency_hz: np.ndarray
    eps_real: np.ndarray
    eps_imag: np.ndarray

    def __post_init__(self):
        freq = np.array(self.frequency_hz, dtype=float)
        re = np.array(self.eps_real, dtype=float)
        im = np.array(self.eps_imag, dtype=float)
        if freq.ndim != 1 or freq.size < 2:
            raise ValueError("raw data needs at least 2 rows")
        if re.shape != freq.shape or im.shape != freq.shape:
            raise ValueError("raw data columns must have equal length")
        if not np.all(freq > 0.0):
            raise ValueError("frequencies must be positive")
        if not np.all(np.diff(freq) > 0.0):
            raise ValueError("frequencies must be strictly increasing")
        if not np.all(im >= 0.0):
            raise ValueError("loss column eps'' must be non-negative")
        for name, arr in (("frequency_hz", freq), ("eps_real", re), ("eps_imag", im)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


RelaxationModel = Union[HavriliakNegamiParams, JonscherParams, CrimParams, RawDataTable]


def load_raw_csv(path) -> RawDataTable:
    """Read a three-column CSV `frequency_hz, eps_real, eps_imag`.

    A header row is detected by a non-numeric first token and skipped; rows
    must already be sorted ascending by frequency.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row_no, row in enumerate(csv.reader(handle), start=1):
            cells = [cell.strip() for cell in row if cell.strip()]
            if not cells:
                continue
            if row_no == 1 and not _is_number(cells[0]):
                continue  # header
            if len(cells) != 3:
                raise ValueError(f"{path}: row {row_no}: expected 3 columns, got {len(cells)}")
            try:
                rows.append(tuple(float(cell) for cell in cells))
            except ValueError:
                raise ValueError(f"{path}: row {row_no}: non-numeric value") from None
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows")
    freq, re, im = (np.array(col) for col in zip(*rows))
    return RawDataTable(freq, re, im)


def eval_debye_pole(eps_inf: float, delta_eps: float, tau: float,
                    grid: FrequencyGrid) -> ComplexSpectrum:
    """Single-pole relaxation eps_inf + delta_eps / (1 + j*w*tau).

    The loss peak sits at the relaxation frequency 1/(2*pi*tau), where
    eps' = eps_inf + delta_eps/2 and eps'' = delta_eps/2.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    values = eps_inf + delta_eps / (1.0 + 1j * grid.omega * tau)
    return ComplexSpectrum(grid, values)


def eval_havriliak_negami(params: HavriliakNegamiParams,
                          grid: FrequencyGrid) -> ComplexSpectrum:
    """Evaluate the two-exponent relaxation function on a grid.

    Complex powers use the principal branch; for alpha, beta in (0, 1] and
    positive w*tau the argument never reaches the branch cut.
    """
    jwt = 1j * grid.omega * params.tau
    values = params.eps_inf + params.delta_eps / (1.0 + jwt ** params.alpha) ** params.beta
    return ComplexSpectrum(grid, values)


def eval_jonscher(params: JonscherParams, grid: FrequencyGrid) -> ComplexSpectrum:
    """Evaluate the power-law response on a grid.

    At w = omega_ref the value is eps_inf + amplitude * exp(-j*pi*exponent/2).
    """
    values = params.eps_inf + params.amplitude * (-1j * grid.omega / params.omega_ref) ** params.exponent
    return ComplexSpectrum(grid, values)


def eval_crim(params: CrimParams, grid: FrequencyGrid) -> ComplexSpectrum:
    """Evaluate the volumetric mixing rule on a grid (principal-branch powers)."""
    mix = np.zeros(len(grid), dtype=complex)
    for comp in params.components:
        constituent = eval_debye_pole(comp.eps_inf, comp.delta_eps, comp.tau, grid)
        mix += comp.fraction * constituent.values ** params.shape_a
    return ComplexSpectrum(grid, mix ** (1.0 / params.shape_a))


def interp_raw_data(table: RawDataTable, grid: FrequencyGrid) -> ComplexSpectrum:
    """Interpolate measured data onto a grid, linearly in log-frequency.

    The grid must lie inside the tabulated band; there is no extrapolation.
    """
    freqs = grid.frequencies_hz
    lo, hi = table.frequency_hz[0], table.frequency_hz[-1]
    # tiny relative slack so a grid built from the same band edges passes
    if freqs[0] < lo * (1.0 - 1e-9) or freqs[-1] > hi * (1.0 + 1e-9):
        raise ValueError(
            f"grid band [{freqs[0]:g}, {freqs[-1]:g}] Hz extends outside the "
            f"tabulated band [{lo:g}, {hi:g}] Hz")
    log_f = np.log(freqs)
    log_table = np.log(table.frequency_hz)
    re = np.interp(log_f, log_table, table.eps_real)
    im = np.interp(log_f, log_table, table.eps_imag)
    return ComplexSpectrum(grid, re - 1j * im)


def evaluate_model(model: RelaxationModel, grid: FrequencyGrid) -> ComplexSpectrum:
    """Evaluate any supported relaxation model as a spectrum on a grid."""
    if isinstance(model, HavriliakNegamiParams):
        return eval_havriliak_negami(model, grid)
    if isinstance(model, JonscherParams):
        return eval_jonscher(model, grid)
    if isinstance(model, CrimParams):
        return eval_crim(model, grid)
    if isinstance(model, RawDataTable):
        return interp_raw_data(model, grid)
    raise TypeError(f"not a relaxation model: {type(model).__name__}")


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True

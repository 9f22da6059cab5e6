"""Multi-pole Debye expansion fitting for dispersive dielectric materials.

Evaluates Havriliak-Negami / Cole-Cole / Cole-Davidson, Jonscher, volumetric
mixing (CRIM) and measured spectra, then approximates any of them by an
N-pole Debye expansion using a hybrid scheme: a stochastic global search
(particle swarm, differential evolution, or generalized simulated annealing)
over the relaxation times with a damped least-squares solve for the pole
weights.  The `debyefit` command line turns hashtag material commands into
`#material` / `#add_dispersion_debye` lines for FDTD input files.
"""

from .dispersion import (
    ComplexSpectrum,
    CrimComponent,
    CrimParams,
    FrequencyGrid,
    HavriliakNegamiParams,
    JonscherParams,
    RawDataTable,
    RelaxationModel,
    eval_crim,
    eval_debye_pole,
    eval_havriliak_negami,
    eval_jonscher,
    evaluate_model,
    interp_raw_data,
    load_raw_csv,
    make_log_grid,
)
from .fitting import (
    AUTO_POLE_TARGET_PCT,
    MAX_POLES,
    DebyeExpansion,
    FitConfig,
    FitReport,
    WeightSolveResult,
    cost,
    eval_expansion,
    fit,
    fit_auto_poles,
    solve_weights_dls,
    spectrum_errors,
    tau_search_bounds,
)
from .gprmax import (
    CliOptions,
    CommandError,
    MaterialCommand,
    MaterialOutput,
    RawDataRef,
    format_command,
    format_value,
    main,
    parse_command,
    run_command,
    run_file,
)
from .optimizers import (
    Bounds,
    OptimizeResult,
    OptimizerSettings,
    da_minimize,
    de_minimize,
    default_settings,
    minimize,
    pso_minimize,
)

__version__ = "0.1.0"

__all__ = [
    "AUTO_POLE_TARGET_PCT",
    "Bounds",
    "CliOptions",
    "CommandError",
    "ComplexSpectrum",
    "CrimComponent",
    "CrimParams",
    "DebyeExpansion",
    "FitConfig",
    "FitReport",
    "FrequencyGrid",
    "HavriliakNegamiParams",
    "JonscherParams",
    "MAX_POLES",
    "MaterialCommand",
    "MaterialOutput",
    "OptimizeResult",
    "OptimizerSettings",
    "RawDataRef",
    "RawDataTable",
    "RelaxationModel",
    "WeightSolveResult",
    "cost",
    "da_minimize",
    "de_minimize",
    "default_settings",
    "eval_crim",
    "eval_debye_pole",
    "eval_expansion",
    "eval_havriliak_negami",
    "eval_jonscher",
    "evaluate_model",
    "fit",
    "fit_auto_poles",
    "format_command",
    "format_value",
    "interp_raw_data",
    "load_raw_csv",
    "main",
    "make_log_grid",
    "minimize",
    "parse_command",
    "pso_minimize",
    "run_command",
    "run_file",
    "solve_weights_dls",
    "spectrum_errors",
    "tau_search_bounds",
]

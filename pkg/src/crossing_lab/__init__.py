"""Two-level avoided crossings and Landau-Zener transition dynamics."""

from .dynamics import (
    DimensionlessLZProblem,
    PhysicalLZProblem,
    Trajectory,
    integrate_dimensionless,
    integrate_physical,
    reduce_to_dimensionless,
    survival_probability,
)
from .errors import (
    BracketError,
    CrossingLabError,
    DivergenceError,
    DomainError,
    InsufficientDataError,
    SingularReductionError,
)
from .lz import LZComparison, lz_compare, lz_survival
from .model import (
    AdiabaticSolution,
    CustomModel,
    IonicCovalent,
    LinearCrossing,
    PRESETS,
    adiabatic_solve,
    evaluate_diabatic,
    find_crossing,
    preset,
    sample_curves,
    slope_difference,
)
from .sweep import SweepSpec, reproduce_curve_figure, reproduce_probability_figure, run_lambda_sweep

__version__ = "0.1.0"

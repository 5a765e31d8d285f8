"""Rate functions of Bernstein functions and Cesaro means of semigroups."""

from ergorate.bernstein import (
    BernsteinFunction,
    MeasureUnavailable,
    RateFunction,
    RateShapeError,
    WDecomposition,
    ZeroFunctionError,
    cesaro_symbol,
    cm_probe,
    comparability_constants,
    evaluate,
    rate,
    rate_to_bernstein,
    sandwich_bounds,
    special_estimate_check,
    w_decompose,
    wiener_norm_cesaro,
)
from ergorate.measure import (
    DensityComponent,
    ExpDecay,
    LogKernel,
    MeasureError,
    PowerLaw,
    RadonMeasure,
    Tabulated,
    Uniform,
    exp_integral,
    levy_integral,
    tail_mass,
    truncated_first_moment,
)
from ergorate.stieltjes import StieltjesFunction, evaluate_stieltjes, log_ratio

__version__ = "0.1.0"

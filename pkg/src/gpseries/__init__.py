"""Exact truncated generalized power series.

Sparse series with rational coefficients, nonnegative rational exponents in
the x-variables and natural exponents in the y-variables, truncated at a
rational total degree.  On top of the ring kernel the package provides
blow-up chart pullbacks, Weierstrass division, monomialisation trees,
division chains, and quadrant parametrisation of basic sets, plus a CLI.
"""

from .series import (
    Series,
    SeriesError,
    Signature,
    SignatureMismatch,
    constant,
    evaluate,
    monomial,
    render,
    x_var,
    y_var,
    zero,
)
from .parser import ParseError, parse_basic_set, parse_series
from .transforms import (
    BlowUpXX,
    BlowUpYX,
    BlowUpYY,
    Linear,
    RamifyX,
    RamifyY,
    SignChart,
    Tschirnhausen,
    TransformError,
    forward_chain,
    inverse_chain,
    pullback_chain,
)
from .trees import AdmissibleTree, LambdaPalette
from .division import (
    DivisionError,
    WeierstrassResult,
    solve_implicit,
    tschirnhausen_center,
    unit_root,
    weierstrass_divide,
)
from .monomialize import (
    CapExceeded,
    EngineOptions,
    PrecisionExhausted,
    division_chain,
    monomialize,
    normal_form,
)
from .geometry import membership, parametrize_basic

__version__ = "0.1.0"

__all__ = [
    "Series",
    "SeriesError",
    "Signature",
    "SignatureMismatch",
    "constant",
    "evaluate",
    "monomial",
    "render",
    "x_var",
    "y_var",
    "zero",
    "ParseError",
    "parse_basic_set",
    "parse_series",
    "BlowUpXX",
    "BlowUpYX",
    "BlowUpYY",
    "Linear",
    "RamifyX",
    "RamifyY",
    "SignChart",
    "Tschirnhausen",
    "TransformError",
    "forward_chain",
    "inverse_chain",
    "pullback_chain",
    "AdmissibleTree",
    "LambdaPalette",
    "DivisionError",
    "WeierstrassResult",
    "solve_implicit",
    "tschirnhausen_center",
    "unit_root",
    "weierstrass_divide",
    "CapExceeded",
    "EngineOptions",
    "PrecisionExhausted",
    "division_chain",
    "monomialize",
    "normal_form",
    "membership",
    "parametrize_basic",
]

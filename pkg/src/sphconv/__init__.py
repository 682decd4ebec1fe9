"""Numerical lab for the sphere-singular convolution operator.

The operator convolves with (|y|^2 - 1)^(-alpha) restricted to |y| > 1. The
package provides its Bessel closed-form Fourier multipliers, quadrature
oracles that arbitrate them, an FFT application path, Lp -> Lq ratio
estimation over a fixed test battery, and a CLI / HTTP service exposing the
verification workflows.
"""

from .errors import (
    AliasWarning,
    BoundaryError,
    ConfigError,
    ConvergenceError,
    DegenerateFitError,
    DomainError,
    EmptyBatteryError,
    InsufficientDataError,
    NumericalError,
    PoleError,
    RangeError,
    ResolutionError,
    SingularPointError,
    SphconvError,
)

__version__ = "0.1.0"

from .kernel import (  # noqa: E402
    KernelParams,
    QuadratureConfig,
    phi_alpha,
    weak_l2_bound,
    xi_alpha,
    xi_hat_quadrature,
)
from .multiplier import (  # noqa: E402
    RegionQuery,
    decay_slope_fit,
    hl_admissible,
    m_paper,
    m_reference,
    peak_samples,
    region_main,
    region_one_dim,
    region_strichartz,
)
from .normlab import (  # noqa: E402
    lp_norm,
    ratio_report,
    smoke_battery,
    standard_battery,
    sweep_region,
    write_region_csv,
)
from .operators import (  # noqa: E402
    GridFunction,
    GridSpec,
    apply_salpha_spectral,
    convolve_direct,
    dft_forward,
    dft_inverse,
    grid_to_csv,
    make_test_function,
    read_grid,
    write_grid,
)
from .specfun import bessel_j, envelope_constant, gamma, scaled_bessel  # noqa: E402

__all__ = [
    "AliasWarning",
    "BoundaryError",
    "ConfigError",
    "ConvergenceError",
    "DegenerateFitError",
    "DomainError",
    "EmptyBatteryError",
    "GridFunction",
    "GridSpec",
    "InsufficientDataError",
    "KernelParams",
    "NumericalError",
    "PoleError",
    "QuadratureConfig",
    "RangeError",
    "RegionQuery",
    "ResolutionError",
    "SingularPointError",
    "SphconvError",
    "__version__",
    "apply_salpha_spectral",
    "bessel_j",
    "convolve_direct",
    "decay_slope_fit",
    "dft_forward",
    "dft_inverse",
    "envelope_constant",
    "gamma",
    "grid_to_csv",
    "hl_admissible",
    "lp_norm",
    "m_paper",
    "m_reference",
    "make_test_function",
    "peak_samples",
    "phi_alpha",
    "ratio_report",
    "read_grid",
    "region_main",
    "region_one_dim",
    "region_strichartz",
    "scaled_bessel",
    "smoke_battery",
    "standard_battery",
    "sweep_region",
    "weak_l2_bound",
    "write_grid",
    "write_region_csv",
    "xi_alpha",
    "xi_hat_quadrature",
]

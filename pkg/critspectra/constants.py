"""Constants used throughout the toolkit."""

import math

# 2-D Ising model
CRITICAL_COUPLING_RATIO = 2.0 / math.log(1.0 + math.sqrt(2.0))  # T_c / J
CRITICAL_BETA2J = math.log(1.0 + math.sqrt(2.0))  # 2J / T_c
FLIPS_PER_SITE = 10  # one time step is 10 L^2 flips
ISING_THETA = 0.25
ISING_ZETA = 7 / 8

# Numerical tolerances
SYMMETRY_TOLERANCE = 1e-12
ENTRY_TOLERANCE = 1e-12
RANK_TOLERANCE = 1e-8  # relative to the matrix dimension
IMAGINARY_TOLERANCE = 1e-10
QUADRATURE_TOLERANCE = 1e-8

# Spectral analysis defaults
UNFOLD_TRIM_FRACTION = 0.1
UNFOLD_POLYNOMIAL_ORDER = 7
MIN_POLYNOMIAL_UNFOLD_POINTS = 10
SPACING_WARN_RANGE = (0.9, 1.1)
NUMBER_VARIANCE_MAX_FRACTION = 0.1
MIN_FIT_POINTS = 5
MIN_RELIABLE_FIT_POINTS = 20
FIT_WINDOW_DIVISORS = (400, 40)

# Binary formats
TIME_SERIES_MAGIC = b"CSTS"
TIME_SERIES_VERSION = 1
TIME_SERIES_HEADER = "<4sIIIQQ"  # magic, version, L, N, tau, seed
MATRIX_MAGIC = b"CSCM"
MATRIX_HEADER = "<4sIQ"  # magic, D, tau

# CSV schemas: column names never depend on run parameters
ZIPF_COLUMNS = ("index", "eigenvalue")
ZIPF_OVERLAY_COLUMNS = ("index", "eigenvalue", "mp_reference")
SPECTRUM_COLUMNS = ("index", "eigenvalue")
DENSITY_COLUMNS = ("bin_center", "density")
DENSITY_OVERLAY_COLUMNS = ("bin_center", "density", "mp_density")
SPACING_COLUMNS = ("S", "P")
SPACING_OVERLAY_COLUMNS = ("S", "P", "wigner")
SIGMA2_COLUMNS = ("r", "sigma2")
SIGMA2_OVERLAY_COLUMNS = ("r", "sigma2", "wishart_baseline")
FIT_COLUMNS = ("zeta", "log_prefactor", "n_min", "n_max", "rmse", "point_count")
STUDY_COLUMNS = ("L", "zeta", "stderr", "n_min", "n_max", "rmse")
SERIES_CSV_COLUMNS = ("site", "series")  # series spans the remaining tau columns

# Observables emitted by the spectrum subcommand
OBSERVABLES = ("zipf", "density", "spacing", "sigma2", "emerging", "fit")
DEFAULT_OBSERVABLES = ("zipf", "density", "fit")
DEFAULT_SIGMA2_R = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0)
DEFAULT_TAU_FRACTIONS = ("1/16", "1/4", "1/2", "3/4")

# Process exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_PRECONDITION_ERROR = 3
EXIT_NUMERICAL_ERROR = 4
